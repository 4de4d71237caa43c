"""Graded monomial bases, homogeneous ideals and their orthogonal complements.

Polynomials of degree <= N in d variables are stored as coefficient vectors
against the monomials ``z^alpha`` in graded order (degree first, then
descending lexicographic within a degree, so degree one reads z_1, ..., z_d).
The space carries the weighted inner product with
``||z^alpha||^2 = alpha! / (a_|alpha| |alpha|!)``; multiplying a coefficient
vector by ``sqrt(weights)`` gives coordinates in the orthonormalized basis.
"""

from __future__ import annotations

import ast
import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterator, Mapping, Sequence

import numpy as np

from .errors import ImproperIdealError, ParameterDomainError, TruncationError
from .kernels import CoeffTable

MultiIndex = tuple[int, ...]

DEFAULT_RANK_TOL = 1e-10


def compositions(m: int, d: int) -> Iterator[MultiIndex]:
    """Multi-indices of degree ``m`` in ``d`` variables, descending lex order."""
    if d == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in compositions(m - first, d - 1):
            yield (first,) + rest


def count_degree(m: int, d: int) -> int:
    return math.comb(m + d - 1, d - 1)


def factorial_product(alpha: Sequence[int]) -> int:
    return math.prod(math.factorial(k) for k in alpha)


def multinomial(n: int, alpha: Sequence[int]) -> int:
    """``n! / (alpha_1! ... alpha_d!)`` as an exact integer."""
    if any(k < 0 for k in alpha) or sum(alpha) != n:
        raise ValueError(f"multi-index {tuple(alpha)} does not have degree {n}")
    return math.factorial(n) // factorial_product(alpha)


@lru_cache(maxsize=None)
def _graded_indices(d: int, N: int) -> tuple[MultiIndex, ...]:
    return tuple(alpha for m in range(N + 1) for alpha in compositions(m, d))


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    d: int
    N: int
    indices: tuple[MultiIndex, ...]
    weights: np.ndarray
    a: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {alpha: i for i, alpha in enumerate(self.indices)})
        offsets = [0]
        for m in range(self.N + 1):
            offsets.append(offsets[-1] + count_degree(m, self.d))
        object.__setattr__(self, "_offsets", tuple(offsets))
        degrees = np.array([sum(alpha) for alpha in self.indices], dtype=int)
        degrees.setflags(write=False)
        object.__setattr__(self, "degrees", degrees)
        sw = np.sqrt(self.weights)
        sw.setflags(write=False)
        object.__setattr__(self, "sqrt_weights", sw)

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def dim(self) -> int:
        return len(self.indices)

    def index_of(self, alpha: Sequence[int]) -> int:
        return self._index[tuple(alpha)]

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._index

    def degree_slice(self, m: int) -> slice:
        if not 0 <= m <= self.N:
            raise TruncationError(f"degree {m} outside 0..{self.N}")
        return slice(self._offsets[m], self._offsets[m + 1])

    def degree_indices(self, m: int) -> tuple[MultiIndex, ...]:
        return self.indices[self.degree_slice(m)]

    def weight(self, alpha: Sequence[int]) -> float:
        return float(self.weights[self.index_of(alpha)])

    def to_orthonormal(self, coeffs: np.ndarray) -> np.ndarray:
        """Monomial coefficients -> orthonormal coordinates (first axis)."""
        coeffs = np.asarray(coeffs)
        return coeffs * self.sqrt_weights.reshape((-1,) + (1,) * (coeffs.ndim - 1))

    def from_orthonormal(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        return x / self.sqrt_weights.reshape((-1,) + (1,) * (x.ndim - 1))

    def inner(self, p: np.ndarray, q: np.ndarray) -> complex:
        """Weighted inner product <p, q> of coefficient vectors."""
        return complex(np.sum(np.asarray(p) * np.conj(q) * self.weights))

    def norm2(self, p: np.ndarray) -> float:
        return float(np.sum(np.abs(p) ** 2 * self.weights))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "exponents", "degree", "weight"])
        for i, alpha in enumerate(self.indices):
            w.writerow([i, " ".join(map(str, alpha)), sum(alpha), format(float(self.weights[i]), ".17g")])
        return buf.getvalue()


def build_basis(table: CoeffTable, d: int, N: int) -> MonomialBasis:
    """Graded basis of polynomials of degree <= N with exact norm weights."""
    if not table.normalized or table.a[0] != 1.0:
        raise ParameterDomainError("monomial weights need a normalized table (a_0 = 1)")
    if d < 1 or N < 0:
        raise ParameterDomainError(f"need d >= 1 and N >= 0, got d={d}, N={N}")
    if table.N < N:
        raise TruncationError(f"table has order {table.N} < N = {N}")
    indices = _graded_indices(d, N)
    # 1 / (a_n * C(n, alpha)): the multinomial is exact before conversion
    weights = np.array([1.0 / (table.a[sum(al)] * multinomial(sum(al), al)) for al in indices])
    weights.setflags(write=False)
    a = np.array(table.a[: N + 1])
    a.setflags(write=False)
    return MonomialBasis(d, N, indices, weights, a)


@dataclass(frozen=True)
class HomogeneousPolynomial:
    degree: int
    coeffs: Mapping[MultiIndex, complex]

    def __post_init__(self) -> None:
        clean: dict[MultiIndex, complex] = {}
        for alpha, c in self.coeffs.items():
            alpha = tuple(int(k) for k in alpha)
            if any(k < 0 for k in alpha) or sum(alpha) != self.degree:
                raise ParameterDomainError(f"monomial {alpha} is not of degree {self.degree}")
            if c != 0:
                clean[alpha] = complex(c)
        lengths = {len(alpha) for alpha in clean}
        if len(lengths) > 1:
            raise ParameterDomainError("monomials of different lengths in one polynomial")
        object.__setattr__(self, "coeffs", clean)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def times_monomial(self, beta: MultiIndex) -> "HomogeneousPolynomial":
        return HomogeneousPolynomial(
            self.degree + sum(beta),
            {tuple(x + y for x, y in zip(alpha, beta)): c for alpha, c in self.coeffs.items()},
        )

    def vector(self, basis: MonomialBasis) -> np.ndarray:
        """Coefficient vector on the full basis."""
        if self.degree > basis.N:
            raise TruncationError(f"degree {self.degree} exceeds basis order {basis.N}")
        v = np.zeros(basis.dim, dtype=complex)
        for alpha, c in self.coeffs.items():
            v[basis.index_of(alpha)] = c
        return v

    @classmethod
    def from_vector(cls, basis: MonomialBasis, m: int, coeffs: Sequence[complex]) -> "HomogeneousPolynomial":
        idx = basis.degree_indices(m)
        if len(coeffs) != len(idx):
            raise ParameterDomainError(f"degree {m} has {len(idx)} monomials, got {len(coeffs)}")
        return cls(m, dict(zip(idx, coeffs)))

    @classmethod
    def monomial(cls, alpha: Sequence[int], c: complex = 1.0) -> "HomogeneousPolynomial":
        alpha = tuple(alpha)
        return cls(sum(alpha), {alpha: c})


def _parse_coeff(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(value)


@dataclass(frozen=True)
class HomogeneousIdeal:
    d: int
    generators: tuple[HomogeneousPolynomial, ...]

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        for g in gens:
            if g.is_zero:
                raise ParameterDomainError("ideal generators must be nonzero")
            if any(len(alpha) != self.d for alpha in g.coeffs):
                raise ParameterDomainError(f"generator exponents must have length {self.d}")
        object.__setattr__(self, "generators", gens)

    @property
    def is_proper(self) -> bool:
        return all(g.degree > 0 for g in self.generators)

    @classmethod
    def maximal_power(cls, d: int, k: int) -> "HomogeneousIdeal":
        """``<z_1, ..., z_d>^k``, generated by all monomials of degree k."""
        return cls(d, tuple(HomogeneousPolynomial.monomial(al) for al in compositions(k, d)))

    @classmethod
    def monomial_ideal(cls, d: int, exponents: Sequence[Sequence[int]]) -> "HomogeneousIdeal":
        return cls(d, tuple(HomogeneousPolynomial.monomial(tuple(al)) for al in exponents))

    def to_dict(self) -> dict[str, Any]:
        gens = []
        for g in self.generators:
            coeffs = {str(tuple(alpha)): ([c.real, c.imag] if c.imag else c.real)
                      for alpha, c in g.coeffs.items()}
            gens.append({"degree": g.degree, "coeffs": coeffs})
        return {"d": self.d, "generators": gens}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "HomogeneousIdeal":
        d = int(data["d"])
        gens = []
        for g in data["generators"]:
            coeffs = {}
            for key, val in g["coeffs"].items():
                alpha = ast.literal_eval(key)
                alpha = (alpha,) if isinstance(alpha, int) else tuple(alpha)
                coeffs[alpha] = _parse_coeff(val)
            gens.append(HomogeneousPolynomial(int(g["degree"]), coeffs))
        return cls(d, tuple(gens))

    @classmethod
    def from_json(cls, text: str) -> "HomogeneousIdeal":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class IdealSlice:
    degree: int
    spanning: np.ndarray  # monomial coefficients of q*g over degree-m monomials (columns)
    rank: int
    singular_values: np.ndarray  # in orthonormal coordinates, descending
    ortho_span: np.ndarray  # orthonormal-coordinate basis of the slice (columns)


def _degree_block(basis: MonomialBasis, m: int, polys: Sequence[HomogeneousPolynomial]) -> np.ndarray:
    idx = basis.degree_slice(m)
    cols = [p.vector(basis)[idx] for p in polys]
    size = idx.stop - idx.start
    return np.array(cols, dtype=complex).T if cols else np.zeros((size, 0), dtype=complex)


def ideal_slices(ideal: HomogeneousIdeal, basis: MonomialBasis,
                 tol: float = DEFAULT_RANK_TOL) -> tuple[IdealSlice, ...]:
    """Per degree m <= N, the span of ``q g`` over monomials q and generators g."""
    if not ideal.is_proper:
        raise ImproperIdealError("ideal contains a nonzero constant")
    if ideal.d != basis.d:
        raise ParameterDomainError(f"ideal lives in d={ideal.d}, basis in d={basis.d}")
    out = []
    for m in range(basis.N + 1):
        products = [g.times_monomial(beta)
                    for g in ideal.generators if g.degree <= m
                    for beta in compositions(m - g.degree, basis.d)]
        G = _degree_block(basis, m, products)
        sw = basis.sqrt_weights[basis.degree_slice(m)]
        Y = G * sw[:, None]
        if Y.shape[1] == 0:
            sv = np.zeros(0)
            rank = 0
            U = np.zeros((Y.shape[0], 0), dtype=complex)
        else:
            U, sv, _ = np.linalg.svd(Y, full_matrices=False)
            rank = int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0
            U = U[:, :rank]
        out.append(IdealSlice(m, G, rank, sv, U))
    return tuple(out)


@dataclass(frozen=True)
class IdealComplementBasis:
    basis: MonomialBasis
    columns: tuple[np.ndarray, ...]  # per degree, monomial coefficients; C^H W C = I
    ortho_columns: tuple[np.ndarray, ...]  # per degree, orthonormal coordinates
    slices: tuple[IdealSlice, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.columns)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def embedding(self) -> np.ndarray:
        """Isometry (orthonormal coordinates) from the complement into the full basis."""
        Q = np.zeros((self.basis.dim, self.dim), dtype=complex)
        col = 0
        for m, C in enumerate(self.ortho_columns):
            rows = self.basis.degree_slice(m)
            Q[rows, col:col + C.shape[1]] = C
            col += C.shape[1]
        return Q

    def projector(self) -> np.ndarray:
        Q = self.embedding()
        return Q @ Q.conj().T


def complement_basis(ideal: HomogeneousIdeal, basis: MonomialBasis,
                     tol: float = DEFAULT_RANK_TOL) -> IdealComplementBasis:
    """Weighted-orthonormal basis of the complement of each ideal slice."""
    slices = ideal_slices(ideal, basis, tol)
    cols, ortho = [], []
    for sl in slices:
        rows = basis.degree_slice(sl.degree)
        size = rows.stop - rows.start
        if sl.rank == 0:
            Cq = np.eye(size, dtype=complex)
        else:
            U, _, _ = np.linalg.svd(sl.ortho_span, full_matrices=True)
            Cq = U[:, sl.rank:]
        ortho.append(Cq)
        cols.append(Cq / basis.sqrt_weights[rows][:, None])
    return IdealComplementBasis(basis, tuple(cols), tuple(ortho), slices)


def kernel_power_vector(basis: MonomialBasis, w: Sequence[complex], n: int) -> tuple[np.ndarray, float]:
    """Coefficients of ``<., w>^n`` and its squared norm.

    ``<z, w>^n = sum_{|alpha|=n} C(n, alpha) z^alpha conj(w)^alpha``.
    """
    if n > basis.N or n < 0:
        raise TruncationError(f"power {n} outside 0..{basis.N}")
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.size != basis.d:
        raise ParameterDomainError(f"w has dimension {w.size}, expected {basis.d}")
    v = np.zeros(basis.dim, dtype=complex)
    wc = np.conj(w)
    for alpha in basis.degree_indices(n):
        v[basis.index_of(alpha)] = multinomial(n, alpha) * np.prod(wc ** np.array(alpha))
    return v, basis.norm2(v)
