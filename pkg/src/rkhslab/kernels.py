"""Coefficient sequences of unitarily invariant kernels on the ball.

A kernel ``k(z, w) = sum_n a_n <z, w>^n`` is described by a :class:`KernelSpec`
and truncated to a :class:`CoeffTable`. Inverting the power series gives the
coefficients ``b_n`` of ``1 - 1/k``; the kernel has the complete Pick property
exactly when every ``b_n`` is nonnegative.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import ParameterDomainError, PointDomainError, SeriesDivisionError

FAMILIES = ("hardy", "drury_arveson", "h_s", "besov_sobolev", "bergman_disc", "custom")

# short names accepted on the command line and in config files
ALIASES = {
    "da": "drury_arveson",
    "drury-arveson": "drury_arveson",
    "bergman": "bergman_disc",
    "k_sigma": "besov_sobolev",
    "besov-sobolev": "besov_sobolev",
    "hs": "h_s",
}

DEFAULT_CNP_TOL = 1e-12


def _frozen(x: np.ndarray) -> np.ndarray:
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class KernelSpec:
    """A named (or custom) unitarily invariant kernel family in dimension ``d``."""

    family: str
    d: int = 1
    s: float | None = None
    sigma: float | None = None
    coefficients: tuple[float, ...] | None = None
    unnormalized: bool = False

    def __post_init__(self) -> None:
        fam = ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise ParameterDomainError(f"unknown kernel family {self.family!r}")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ParameterDomainError(f"ambient dimension must be a positive integer, got {self.d!r}")
        if fam == "h_s":
            if self.s is None or not math.isfinite(self.s) or self.s > 0:
                raise ParameterDomainError(f"h_s needs s <= 0, got {self.s!r}")
        if fam == "besov_sobolev":
            if self.sigma is None or not (0 < self.sigma <= 1):
                raise ParameterDomainError(f"besov_sobolev needs 0 < sigma <= 1, got {self.sigma!r}")
        if fam == "custom":
            if not self.coefficients:
                raise ParameterDomainError("custom kernel needs a nonempty coefficient list")
            coeffs = tuple(float(c) for c in self.coefficients)
            if any(not math.isfinite(c) or c <= 0 for c in coeffs):
                raise ParameterDomainError("custom coefficients must be positive and finite")
            if not self.unnormalized and coeffs[0] != 1.0:
                raise ParameterDomainError(
                    "custom coefficients must start with 1 unless flagged unnormalized"
                )
            object.__setattr__(self, "coefficients", coeffs)

    # named constructors
    @classmethod
    def hardy(cls) -> "KernelSpec":
        return cls("hardy", 1)

    @classmethod
    def drury_arveson(cls, d: int = 2) -> "KernelSpec":
        return cls("drury_arveson", d)

    @classmethod
    def dirichlet(cls, d: int = 1) -> "KernelSpec":
        return cls("h_s", d, s=-1.0)

    @classmethod
    def bergman(cls, d: int = 1) -> "KernelSpec":
        return cls("bergman_disc", d)

    @classmethod
    def from_name(cls, name: str, d: int = 1, s: float | None = None,
                  sigma: float | None = None) -> "KernelSpec":
        """Build a spec from a family name; ``dirichlet`` means ``h_s`` with s = -1."""
        if name == "dirichlet":
            return cls("h_s", d, s=-1.0)
        return cls(name, d, s=s, sigma=sigma)

    @property
    def label(self) -> str:
        if self.family == "h_s":
            return f"h_s(s={self.s:g})"
        if self.family == "besov_sobolev":
            return f"besov_sobolev(sigma={self.sigma:g})"
        return self.family

    def to_dict(self, N: int | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family, "d": self.d}
        if self.s is not None:
            out["s"] = self.s
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.coefficients is not None:
            out["coefficients"] = list(self.coefficients)
        if self.unnormalized:
            out["unnormalized"] = True
        if N is not None:
            out["N"] = N
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> tuple["KernelSpec", int | None]:
        """Parse ``{"family": ..., "d": ..., "N": ...}``; returns (spec, N or None)."""
        data = dict(data)
        N = data.pop("N", None)
        name = data.pop("family")
        coeffs = data.pop("coefficients", None)
        spec = (
            cls.from_name(name, d=int(data.pop("d", 1)), s=data.pop("s", None),
                          sigma=data.pop("sigma", None))
            if coeffs is None
            else cls("custom", int(data.pop("d", 1)), coefficients=tuple(coeffs),
                     unnormalized=bool(data.pop("unnormalized", False)))
        )
        return spec, (None if N is None else int(N))

    def to_json(self, N: int | None = None) -> str:
        return json.dumps(self.to_dict(N), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> tuple["KernelSpec", int | None]:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CoeffTable:
    """Truncated coefficients ``a_0..a_N`` and (optionally) ``b_1..b_N``.

    ``b[0]`` is unused and stored as 0 so that ``b[n]`` is ``b_n``.
    """

    a: np.ndarray
    b: np.ndarray | None = None
    normalized: bool = True
    label: str = "custom"
    d: int = 1

    def __post_init__(self) -> None:
        a = _frozen(np.array(self.a, dtype=float))
        if a.ndim != 1 or a.size == 0:
            raise ParameterDomainError("coefficient table needs at least a_0")
        object.__setattr__(self, "a", a)
        if self.b is not None:
            b = np.array(self.b, dtype=float)
            if b.shape != a.shape:
                raise ParameterDomainError("b must be indexed 0..N like a")
            object.__setattr__(self, "b", _frozen(b))

    @property
    def N(self) -> int:
        return self.a.size - 1

    @property
    def has_b(self) -> bool:
        return self.b is not None

    @property
    def cnp_margin(self) -> float:
        """``min_{1<=n<=N} b_n`` (``inf`` when N = 0)."""
        if self.b is None:
            raise ValueError("b not computed; call invert_series first")
        return float(self.b[1:].min()) if self.N >= 1 else math.inf

    def truncated(self, N: int) -> "CoeffTable":
        if N > self.N:
            raise ParameterDomainError(f"table has order {self.N}, cannot truncate to {N}")
        b = None if self.b is None else self.b[: N + 1]
        return CoeffTable(self.a[: N + 1], b, self.normalized, self.label, self.d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "a_n", "b_n"])
        for n in range(self.N + 1):
            bn = "" if (self.b is None or n == 0) else format(float(self.b[n]), ".17g")
            w.writerow([n, format(float(self.a[n]), ".17g"), bn])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, label: str = "custom", d: int = 1) -> "CoeffTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        a = [float(r["a_n"]) for r in rows]
        have_b = all(r["b_n"] != "" for r in rows[1:]) and len(rows) > 1
        b = [0.0] + [float(r["b_n"]) for r in rows[1:]] if have_b else None
        return cls(np.array(a), None if b is None else np.array(b),
                   normalized=(a[0] == 1.0), label=label, d=d)


def compute_a(spec: KernelSpec, N: int) -> CoeffTable:
    """Coefficients ``a_0..a_N`` of the kernel family (``b`` left empty)."""
    if not isinstance(N, (int, np.integer)) or N < 0:
        raise ParameterDomainError(f"truncation order must be a nonnegative integer, got {N!r}")
    n = np.arange(N + 1, dtype=float)
    fam = spec.family
    if fam in ("hardy", "drury_arveson"):
        a = np.ones(N + 1)
    elif fam == "h_s":
        a = (n + 1.0) ** spec.s
    elif fam == "besov_sobolev":
        # binomial series of (1 - t)^(-sigma)
        factors = (spec.sigma + n[1:] - 1.0) / n[1:]
        a = np.concatenate(([1.0], np.cumprod(factors)))
    elif fam == "bergman_disc":
        a = n + 1.0
    else:
        if N + 1 > len(spec.coefficients):
            raise ParameterDomainError(
                f"custom kernel has {len(spec.coefficients)} coefficients, need {N + 1}"
            )
        a = np.array(spec.coefficients[: N + 1], dtype=float)
    return CoeffTable(a, None, normalized=(a[0] == 1.0), label=spec.label, d=spec.d)


def invert_series(table: CoeffTable) -> CoeffTable:
    """Fill ``b`` from ``a_m = sum_{n=1}^m b_n a_{m-n}``."""
    a = table.a
    if a[0] == 0:
        raise SeriesDivisionError("a_0 = 0: the series is not invertible")
    N = table.N
    b = np.zeros(N + 1)
    for m in range(1, N + 1):
        # b[1:m] . a[m-1:0:-1]  ==  sum_{n=1}^{m-1} b_n a_{m-n}
        b[m] = (a[m] - np.dot(b[1:m], a[m - 1:0:-1])) / a[0]
    return CoeffTable(a, b, table.normalized, table.label, table.d)


def table_for(spec: KernelSpec, N: int) -> CoeffTable:
    """``compute_a`` followed by ``invert_series``."""
    return invert_series(compute_a(spec, N))


def reconvolve(table: CoeffTable) -> np.ndarray:
    """Rebuild ``a_1..a_N`` from ``b`` and ``a`` (index 0 copied)."""
    if table.b is None:
        raise ValueError("b not computed")
    a, b = table.a, table.b
    out = a.copy()
    for m in range(1, table.N + 1):
        out[m] = np.dot(b[1:m + 1], a[m - 1::-1])
    return out


def roundtrip_residual(table: CoeffTable) -> float:
    """Max relative error of the convolution round trip."""
    back = reconvolve(table)
    return float(np.max(np.abs(back - table.a) / np.abs(table.a)))


@dataclass(frozen=True)
class CNPVerdict:
    passed: bool
    tol: float
    margin: float
    first_index: int | None = None
    first_value: float | None = None

    def __str__(self) -> str:
        if self.passed:
            return "pass"
        return f"fail(n={self.first_index}, {self.first_value:.17g})"

    def to_dict(self) -> dict[str, Any]:
        return {"verdict": "pass" if self.passed else "fail", "tol": self.tol,
                "margin": self.margin, "first_index": self.first_index,
                "first_value": self.first_value}


def is_cnp(table: CoeffTable, tol: float = DEFAULT_CNP_TOL) -> CNPVerdict:
    """Truncated complete-Pick test: ``b_n >= -tol`` for ``1 <= n <= N``."""
    if table.b is None:
        raise ValueError("b not computed; call invert_series first")
    bad = np.nonzero(table.b[1:] < -tol)[0]
    margin = table.cnp_margin
    if bad.size == 0:
        return CNPVerdict(True, tol, margin)
    n = int(bad[0]) + 1
    return CNPVerdict(False, tol, margin, n, float(table.b[n]))


@dataclass(frozen=True)
class RegularityProfile:
    ratios: np.ndarray  # ratios[n] = a_n / a_{n+1}, n = 0..N-1
    deviation: float  # max |ratio - 1| over the last quartile of indices
    window_start: int
    threshold: float

    @property
    def flagged(self) -> bool:
        return self.deviation > self.threshold


def regularity_profile(table: CoeffTable, threshold: float = 0.1) -> RegularityProfile:
    """Ratios ``a_n/a_{n+1}`` and their deviation from 1 over the last quartile.

    A trend diagnostic only; regularity is a statement about the limit.
    """
    if table.N < 4:
        raise ParameterDomainError("regularity profile needs N >= 4")
    ratios = table.a[:-1] / table.a[1:]
    start = (3 * ratios.size) // 4
    dev = float(np.max(np.abs(ratios[start:] - 1.0)))
    return RegularityProfile(_frozen(ratios), dev, start, threshold)


@dataclass(frozen=True)
class SummabilityReport:
    sum_a: float
    sum_b: float
    partial_b: np.ndarray  # cumulative sums of b_1..b_n
    a_tail_fraction: float  # share of sum_a carried by indices above N/2
    flags: dict[str, bool] = field(default_factory=dict)


def classify_summability(table: CoeffTable, tol: float = DEFAULT_CNP_TOL,
                         tail_threshold: float = 0.05) -> SummabilityReport:
    """Partial sums of ``a`` and ``b`` with heuristic boundedness flags.

    ``bounded_kernel_trend`` is set when the upper half of the indices carries
    less than ``tail_threshold`` of ``sum a_n``; it is a hint, not a proof.
    Raises ``AssertionError`` if a CNP table has ``sum b_n > 1 + tol``.
    """
    if table.b is None:
        raise ValueError("b not computed; call invert_series first")
    sum_a = float(np.sum(table.a))
    partial_b = np.cumsum(table.b[1:])
    sum_b = float(partial_b[-1]) if partial_b.size else 0.0
    half = table.N // 2
    tail = float(np.sum(table.a[half + 1:])) / sum_a
    cnp = is_cnp(table, tol).passed
    flags = {
        "cnp": cnp,
        "sum_b_at_most_one": sum_b <= 1.0 + tol,
        "partial_b_monotone": bool(np.all(np.diff(partial_b) >= -tol)),
        "bounded_kernel_trend": tail < tail_threshold,
    }
    if cnp and table.normalized:
        assert sum_b <= 1.0 + tol, f"CNP table with sum b = {sum_b!r} > 1"
    return SummabilityReport(sum_a, sum_b, _frozen(partial_b), tail, flags)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    order: int
    tail_estimate: float  # a_N |t|^{N+1} / (1 - |t|); inf when |t| >= 1


def _coerce_table(kernel: KernelSpec | CoeffTable, N: int | None) -> CoeffTable:
    if isinstance(kernel, CoeffTable):
        return kernel if N is None else kernel.truncated(N)
    if N is None:
        raise ParameterDomainError("truncation order N is required for a kernel spec")
    return compute_a(kernel, N)


def as_points(points: Sequence | np.ndarray, d: int | None = None) -> np.ndarray:
    """Coerce to a complex array of shape (n_points, d)."""
    P = np.asarray(points, dtype=complex)
    if P.ndim == 1:
        P = P[:, None] if d in (None, 1) else P[None, :]
    if d is not None and P.shape[1] != d:
        raise PointDomainError(f"points have dimension {P.shape[1]}, expected {d}")
    return P


def _horner(a: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.full(t.shape, a[-1], dtype=complex)
    for coeff in a[-2::-1]:
        out = out * t + coeff
    return out


def kernel_eval(kernel: KernelSpec | CoeffTable, z, w, N: int | None = None,
                allow_boundary: bool = False) -> KernelValue:
    """Truncated ``sum_{n<=N} a_n <z, w>^n``.

    Points must lie in the open ball (closed ball with ``allow_boundary``,
    meant for kernels with summable coefficients).
    """
    table = _coerce_table(kernel, N)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if z.shape != w.shape:
        raise PointDomainError("z and w must have the same dimension")
    for p in (z, w):
        r = float(np.linalg.norm(p))
        if r > 1.0 or (r >= 1.0 and not allow_boundary):
            raise PointDomainError(f"point of norm {r!r} outside the open unit ball")
    t = complex(np.vdot(w, z))  # <z, w> = sum z_j conj(w_j)
    val = complex(_horner(table.a, np.array([t]))[0])
    at = abs(t)
    tail = float(table.a[-1] * at ** (table.N + 1) / (1 - at)) if at < 1 else math.inf
    return KernelValue(val, table.N, tail)


def kernel_gram(kernel: KernelSpec | CoeffTable, points, N: int | None = None,
                others=None, allow_boundary: bool = False) -> np.ndarray:
    """Matrix ``[k(x_i, y_j)]`` of truncated kernel values (``y = x`` by default)."""
    table = _coerce_table(kernel, N)
    X = as_points(points)
    Y = X if others is None else as_points(others, X.shape[1])
    for P in (X, Y):
        norms = np.linalg.norm(P, axis=1)
        limit_ok = norms <= 1.0 if allow_boundary else norms < 1.0
        if not np.all(limit_ok):
            raise PointDomainError(f"point of norm {norms.max()!r} outside the unit ball")
    T = X @ Y.conj().T
    return _horner(table.a, T)


def perturb_kernel(table: CoeffTable, eps: float) -> CoeffTable:
    """Table of ``k - (1 - eps)``: ``a_0`` becomes ``eps``, the rest is unchanged."""
    if not table.normalized:
        raise ParameterDomainError("perturb_kernel expects a normalized table")
    if not (0 < eps <= 1):
        raise ParameterDomainError(f"eps must lie in (0, 1], got {eps!r}")
    a = table.a.copy()
    a[0] = eps
    out = CoeffTable(a, None, normalized=(eps == 1.0), label=f"{table.label}-eps{eps:g}", d=table.d)
    return invert_series(out) if table.b is not None else out
