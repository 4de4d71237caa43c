"""Exact-arithmetic reference values used across the test modules."""

from fractions import Fraction
from math import factorial


def besov_a(sigma: Fraction, N: int) -> list[Fraction]:
    """Coefficients of (1 - t)^(-sigma)."""
    out = [Fraction(1)]
    for n in range(1, N + 1):
        out.append(out[-1] * (sigma + n - 1) / n)
    return out


def dirichlet_a(N: int) -> list[Fraction]:
    return [Fraction(1, n + 1) for n in range(N + 1)]


def invert(a: list[Fraction]) -> list[Fraction]:
    """b_1..b_N of 1 - 1/sum a_n t^n, with b[0] = 0."""
    b = [Fraction(0)] * len(a)
    for m in range(1, len(a)):
        b[m] = (a[m] - sum(b[n] * a[m - n] for n in range(1, m))) / a[0]
    return b


def multinomial(alpha) -> int:
    n = sum(alpha)
    out = factorial(n)
    for k in alpha:
        out //= factorial(k)
    return out


def weight(a: list[Fraction], alpha) -> Fraction:
    return Fraction(1) / (a[sum(alpha)] * multinomial(alpha))
