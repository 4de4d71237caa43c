"""Finite model operators and the hereditary calculus ``1/k(T, T*)``.

Matrices act on orthonormal coordinates. For a commuting tuple ``T`` and a
coefficient table with inverted series ``b``,

    1/k(T, T*) = I - sum_{n>=1} b_n sum_{|alpha|=n} C(n, alpha) T^alpha (T*)^alpha.

Monomial products ``T^alpha`` are formed along the graded index tree (one
multiplication per child). For long truncations the degree sums are instead
accumulated with ``H_n = sum_j T_j H_{n-1} T_j^*``, which needs commutativity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    CNPViolationError,
    DegeneracyError,
    NilpotencyError,
    ParameterDomainError,
    TruncationError,
)
from .kernels import CoeffTable
from .linalg import hermitian_eigvalsh, hermitian_part, spectral_norm
from .polyspace import (
    HomogeneousPolynomial,
    IdealComplementBasis,
    MonomialBasis,
    build_basis,
    compositions,
    multinomial,
)

DEFAULT_COMMUTATOR_TOL = 1e-10
DEFAULT_PSD_TOL = 1e-10
NILPOTENT_RTOL = 1e-13
TREE_INDEX_LIMIT = 20000


def _as_matrix(A) -> np.ndarray:
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParameterDomainError(f"expected a square matrix, got shape {M.shape}")
    M.setflags(write=False)
    return M


def _max_commutator(mats: Sequence[np.ndarray]) -> float:
    worst = 0.0
    for j in range(len(mats)):
        for k in range(j + 1, len(mats)):
            worst = max(worst, spectral_norm(mats[j] @ mats[k] - mats[k] @ mats[j]))
    return worst


@dataclass(frozen=True, eq=False)
class OperatorTuple:
    """``d`` commuting square matrices of a common size.

    Construction fails if some commutator exceeds ``commutator_tol`` in
    spectral norm; :meth:`measured` instead records the observed value.
    """

    matrices: tuple[np.ndarray, ...]
    commutator_tol: float = DEFAULT_COMMUTATOR_TOL

    def __post_init__(self) -> None:
        mats = tuple(_as_matrix(A) for A in self.matrices)
        if not mats:
            raise ParameterDomainError("a tuple needs at least one matrix")
        if len({A.shape for A in mats}) != 1:
            raise ParameterDomainError("tuple matrices must share one size")
        object.__setattr__(self, "matrices", mats)
        comm = _max_commutator(mats)
        object.__setattr__(self, "commutator_norm", comm)
        if comm > self.commutator_tol:
            raise ParameterDomainError(
                f"tuple does not commute: max commutator {comm:.3e} > {self.commutator_tol:g}"
            )

    @classmethod
    def measured(cls, matrices: Sequence[np.ndarray]) -> "OperatorTuple":
        mats = [_as_matrix(A) for A in matrices]
        return cls(tuple(mats), max(DEFAULT_COMMUTATOR_TOL, _max_commutator(mats)))

    @classmethod
    def zero(cls, d: int, n: int) -> "OperatorTuple":
        return cls(tuple(np.zeros((n, n)) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def size(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def scale(self) -> float:
        return max(spectral_norm(A) for A in self.matrices)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.matrices[j]

    def __iter__(self):
        return iter(self.matrices)

    def scaled(self, r: float) -> "OperatorTuple":
        return OperatorTuple(tuple(r * A for A in self.matrices),
                             max(self.commutator_tol, abs(r) ** 2 * self.commutator_tol))

    def conjugated(self, U: np.ndarray) -> "OperatorTuple":
        """``U T_j U^*`` for a unitary ``U``."""
        return OperatorTuple.measured([U @ A @ U.conj().T for A in self.matrices])

    def to_text(self) -> str:
        """Dense text format: a header per matrix, then rows of ``re,im`` pairs."""
        lines = [f"# tuple d={self.d} n={self.size}"]
        for j, A in enumerate(self.matrices):
            lines.append(f"# matrix {j}")
            for row in A:
                lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, commutator_tol: float = DEFAULT_COMMUTATOR_TOL) -> "OperatorTuple":
        mats: list[list[list[complex]]] = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("# matrix"):
                mats.append([])
                continue
            if line.startswith("#"):
                continue
            if not mats:
                raise ParameterDomainError("matrix rows before any '# matrix' header")
            row = []
            for pair in line.split():
                re, im = pair.split(",")
                row.append(complex(float(re), float(im)))
            mats[-1].append(row)
        return cls(tuple(np.array(m, dtype=complex) for m in mats), commutator_tol)


def _first_nonzero(alpha: tuple[int, ...]) -> int:
    for j, k in enumerate(alpha):
        if k:
            return j
    raise ValueError("zero multi-index has no parent")


def monomial_levels(T: OperatorTuple, max_degree: int) -> Iterator[tuple[int, dict]]:
    """Yield ``(n, {alpha: T^alpha})`` for n = 0..max_degree along the graded tree.

    ``T^alpha = T_1^{alpha_1} ... T_d^{alpha_d}``; each child is its parent
    times one coordinate matrix.
    """
    d = T.d
    level = {(0,) * d: np.eye(T.size, dtype=complex)}
    yield 0, level
    for n in range(1, max_degree + 1):
        nxt = {}
        for alpha in compositions(n, d):
            j = _first_nonzero(alpha)
            parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            nxt[alpha] = T.matrices[j] @ level[parent]
        yield n, nxt
        level = nxt


def monomial_power(T: OperatorTuple, alpha: Sequence[int]) -> np.ndarray:
    out = np.eye(T.size, dtype=complex)
    for j, k in enumerate(alpha):
        if k:
            out = out @ np.linalg.matrix_power(T.matrices[j], k)
    return out


def evaluate_polynomial(p: HomogeneousPolynomial, T: OperatorTuple) -> np.ndarray:
    out = np.zeros((T.size, T.size), dtype=complex)
    for alpha, c in p.coeffs.items():
        out += c * monomial_power(T, alpha)
    return out


def _nilpotent_threshold(T: OperatorTuple, n: int) -> float:
    return NILPOTENT_RTOL * max(1.0, T.scale) ** n


def nilpotency_order(T: OperatorTuple) -> int:
    """Smallest n with every ``T^alpha`` (|alpha| = n) numerically zero.

    Raises ``NilpotencyError`` if no such n <= size exists.
    """
    for n, level in monomial_levels(T, T.size):
        if n and all(spectral_norm(P) <= _nilpotent_threshold(T, n) for P in level.values()):
            return n
    raise NilpotencyError("tuple is not jointly nilpotent")


@dataclass(frozen=True)
class HereditaryResult:
    matrix: np.ndarray
    order: int  # highest degree n included in the sum
    tail_status: str  # "exact" | "bounded" | "inconclusive"
    tail_bound: float | None
    min_eigenvalue: float
    eigenvalues: np.ndarray
    tol: float

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def verdict(self) -> str:
        return "psd" if self.psd else "not_psd"

    def report(self, operation: str = "hereditary_1k", inputs: dict | None = None) -> dict[str, Any]:
        return {"operation": operation, "inputs": inputs or {}, "min_eigenvalue": self.min_eigenvalue,
                "tolerance": self.tol, "verdict": self.verdict, "order": self.order,
                "tail_status": self.tail_status, "tail_bound": self.tail_bound}


def _b_up_to(table: CoeffTable, M: int) -> np.ndarray:
    if table.b is None:
        raise ParameterDomainError("table has no inverted series; call invert_series")
    if M > table.N:
        raise TruncationError(f"order {M} exceeds the table's b entries (N = {table.N})")
    return table.b


def _index_count(d: int, M: int) -> int:
    return math.comb(M + d, d)


def _degree_sums_tree(T: OperatorTuple, M: int | None, weights) -> tuple[np.ndarray, int, bool]:
    """Return ``sum_n weights(n) * sum_{|alpha|=n} C(n,alpha) T^a T^a*`` over n >= 1.

    With ``M is None`` the walk stops at the first all-zero degree (and raises
    if none exists up to the matrix size). Returns (sum, last degree used,
    hit_zero_level).
    """
    acc = np.zeros((T.size, T.size), dtype=complex)
    limit = T.size if M is None else M
    for n, level in monomial_levels(T, limit):
        if n == 0:
            continue
        thr = _nilpotent_threshold(T, n)
        if all(spectral_norm(P) <= thr for P in level.values()):
            return acc, n - 1, True
        w = weights(n)
        for alpha, P in level.items():
            acc += (w * multinomial(n, alpha)) * (P @ P.conj().T)
    if M is None:
        raise NilpotencyError(f"tuple of size {T.size} has nonzero products of degree {T.size}")
    return acc, M, False


def _degree_sums_recursive(T: OperatorTuple, M: int, weights) -> tuple[np.ndarray, int, bool]:
    acc = np.zeros((T.size, T.size), dtype=complex)
    H = np.eye(T.size, dtype=complex)
    adj = [A.conj().T for A in T.matrices]
    for n in range(1, M + 1):
        H = sum(A @ H @ Ah for A, Ah in zip(T.matrices, adj))
        if spectral_norm(H) <= _nilpotent_threshold(T, n):
            return acc, n - 1, True
        acc += weights(n) * H
    return acc, M, False


def _degree_sums(T: OperatorTuple, M: int | str, weights, method: str):
    if M in ("auto", "auto-nilpotent"):
        return _degree_sums_tree(T, None, weights)
    if not isinstance(M, (int, np.integer)) or M < 0:
        raise ParameterDomainError(f"truncation order must be 'auto-nilpotent' or an integer, got {M!r}")
    if method == "auto":
        method = "tree" if _index_count(T.d, M) <= TREE_INDEX_LIMIT else "recursive"
    if method == "tree":
        return _degree_sums_tree(T, int(M), weights)
    if method == "recursive":
        return _degree_sums_recursive(T, int(M), weights)
    raise ParameterDomainError(f"unknown method {method!r}")


def hereditary_1k(T: OperatorTuple, table: CoeffTable, M: int | str = "auto-nilpotent",
                  tol: float = DEFAULT_PSD_TOL, method: str = "auto") -> HereditaryResult:
    """Assemble ``1/k(T, T*)`` truncated at degree M (exact for nilpotent tuples)."""
    if table.b is None:
        raise ParameterDomainError("table has no inverted series; call invert_series")
    if M not in ("auto", "auto-nilpotent"):
        _b_up_to(table, int(M))
    b = table.b

    def weight(n: int) -> float:
        if n > table.N:
            raise TruncationError(f"degree {n} needs b_{n}, table stops at N = {table.N}")
        return float(b[n])

    S, order, exact = _degree_sums(T, M, weight, method)
    D = np.eye(T.size, dtype=complex) - S
    D = hermitian_part(D)
    if exact:
        status, bound = "exact", 0.0
    else:
        base = T.scale * math.sqrt(T.d)
        partial = float(np.sum(b[1:order + 1]))
        cnp = table.normalized and bool(np.all(b[1:] >= -1e-12))
        if base < 1 and cnp:
            # sum_{n>M} b_n ||H_n|| <= base^(2(M+1)) * sum_{n>M} b_n, and sum b <= 1
            status, bound = "bounded", base ** (2 * (order + 1)) * max(0.0, 1.0 - partial)
        else:
            status, bound = "inconclusive", None
    evals = hermitian_eigvalsh(D)
    lo = float(evals[0]) if evals.size else 0.0
    return HereditaryResult(D, order, status, bound, lo, evals, tol)


@dataclass(frozen=True)
class PsiRow:
    terms: dict | None  # alpha -> psi_{k,alpha}(T), when materialized
    row_sum: np.ndarray
    max_eigenvalue: float
    order: int
    tol: float

    @property
    def contractive(self) -> bool:
        return self.max_eigenvalue <= 1.0 + self.tol


def psi_row(T: OperatorTuple, table: CoeffTable, M: int | str = "auto-nilpotent",
            tol: float = DEFAULT_PSD_TOL, materialize: bool | None = None,
            cnp_tol: float = 1e-12) -> PsiRow:
    """The row ``(sqrt(b_|a| C(|a|, a)) T^a)_a`` and its row sum ``sum psi psi^*``.

    Terms are materialized along the graded tree when the index count allows;
    otherwise only the row sum is formed (degree-wise recursion).
    """
    if table.b is None:
        raise ParameterDomainError("table has no inverted series; call invert_series")
    b = table.b

    def coeff(n: int) -> float:
        if n > table.N:
            raise TruncationError(f"degree {n} needs b_{n}, table stops at N = {table.N}")
        if b[n] < -cnp_tol:
            raise CNPViolationError(f"b_{n} = {b[n]:.3e} < 0: psi row needs a CNP table")
        return max(float(b[n]), 0.0)

    auto = M in ("auto", "auto-nilpotent")
    if materialize is None:
        materialize = auto or _index_count(T.d, int(M)) <= TREE_INDEX_LIMIT
    if not materialize:
        S, order, _ = _degree_sums(T, M, coeff, "recursive")
        row_sum = hermitian_part(S)
    else:
        terms = {}
        row_sum = np.zeros((T.size, T.size), dtype=complex)
        limit = T.size if auto else int(M)
        order = limit
        for n, level in monomial_levels(T, limit):
            if n == 0:
                continue
            if all(spectral_norm(P) <= _nilpotent_threshold(T, n) for P in level.values()):
                order = n - 1
                break
            c = coeff(n)
            for alpha, P in level.items():
                psi = math.sqrt(c * multinomial(n, alpha)) * P
                terms[alpha] = psi
                row_sum += psi @ psi.conj().T
        else:
            if auto:
                raise NilpotencyError("tuple is not jointly nilpotent")
        row_sum = hermitian_part(row_sum)
    evals = hermitian_eigvalsh(row_sum)
    top = float(evals[-1]) if evals.size else 0.0
    return PsiRow(terms if materialize else None, row_sum, top, order, tol)


def shift_tuple(basis: MonomialBasis) -> OperatorTuple:
    """Coordinate multipliers compressed to degree <= N (orthonormal basis).

    ``e_alpha -> sqrt(w(alpha + e_j) / w(alpha)) e_{alpha + e_j}`` below the
    top degree, and zero on degree N.
    """
    n = basis.dim
    mats = []
    for j in range(basis.d):
        S = np.zeros((n, n))
        for i, alpha in enumerate(basis.indices):
            if sum(alpha) >= basis.N:
                continue
            child = alpha[:j] + (alpha[j] + 1,) + alpha[j + 1:]
            k = basis.index_of(child)
            S[k, i] = math.sqrt(basis.weights[k] / basis.weights[i])
        mats.append(S)
    return OperatorTuple(tuple(mats))


def compress(T: OperatorTuple, Q: np.ndarray, rtol: float = 1e-10) -> OperatorTuple:
    """``Q^H T_j Q`` for an isometry ``Q``; commutator norm is re-measured."""
    Q = np.asarray(Q, dtype=complex)
    if Q.ndim != 2 or Q.shape[0] != T.size:
        raise ParameterDomainError(f"subspace matrix has shape {Q.shape}, tuple size {T.size}")
    if Q.shape[1] and spectral_norm(Q.conj().T @ Q - np.eye(Q.shape[1])) > rtol:
        raise ParameterDomainError("subspace columns are not orthonormal")
    return OperatorTuple.measured([Q.conj().T @ A @ Q for A in T.matrices])


def positive_degree_subspace(basis: MonomialBasis) -> np.ndarray:
    """Coordinate isometry onto the polynomials vanishing at 0."""
    return np.eye(basis.dim, dtype=complex)[:, 1:]


def truncated_shift(table: CoeffTable, d: int, N: int) -> tuple[MonomialBasis, OperatorTuple]:
    basis = build_basis(table, d, N)
    return basis, shift_tuple(basis)


def technical_identity_check(basis: MonomialBasis, table: CoeffTable, n: int,
                             p: HomogeneousPolynomial) -> tuple[float, float]:
    """Relative residual of ``sum_{|a|=n} C(n,a) S^a S^a* p = (a_{m-n}/a_m) p``.

    Returns (residual, factor). Uses the full truncated shift, on which the
    identity is exact for degrees up to N.
    """
    m = p.degree
    if m > basis.N:
        raise TruncationError(f"degree {m} exceeds N = {basis.N}")
    if not 1 <= n <= m:
        raise ParameterDomainError(f"need 1 <= n <= m, got n={n}, m={m}")
    if table.N < basis.N or not np.array_equal(table.a[: basis.N + 1], basis.a):
        raise ParameterDomainError("table and basis carry different coefficients")
    S = shift_tuple(basis)
    x = basis.to_orthonormal(p.vector(basis))
    lhs = np.zeros_like(x)
    for k, level in monomial_levels(S, n):
        if k == n:
            for alpha, P in level.items():
                lhs += multinomial(n, alpha) * (P @ (P.conj().T @ x))
    factor = float(table.a[m - n] / table.a[m])
    rhs = factor * x
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)), factor


@dataclass(frozen=True)
class JointSpectrum:
    points: np.ndarray  # (size, d) joint eigenvalues paired positionally
    max_norm: float
    residual: float  # largest strictly-lower-triangular norm after triangularization
    unitary: np.ndarray


def _lower_residual(mats: Sequence[np.ndarray], Q: np.ndarray) -> float:
    worst = 0.0
    for A in mats:
        B = Q.conj().T @ A @ Q
        worst = max(worst, float(np.linalg.norm(np.tril(B, -1))))
    return worst


def _clusters(evals: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage groups of eigenvalues closer than ``radius``."""
    n = len(evals)
    label = list(range(n))

    def root(i: int) -> int:
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    close = np.abs(evals[:, None] - evals[None, :]) <= radius
    for i, j in zip(*np.nonzero(close)):
        label[root(i)] = root(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def _common_eigenvector(mats: Sequence[np.ndarray], c: np.ndarray) -> np.ndarray:
    """One common eigenvector, found inside the invariant subspace of a
    random combination belonging to its largest eigenvalue cluster.

    Eigenvalues of defective matrices scatter by about ``eps ** (1/n)``, so
    clusters are formed with that radius; on the cluster subspace each
    matrix has a single eigenvalue, which the trace recovers accurately.
    """
    n = mats[0].shape[0]
    L = sum(cj * A for cj, A in zip(c, mats))
    scale = max(1.0, spectral_norm(L))
    evals = np.linalg.eigvals(L)
    radius = 10 * np.finfo(float).eps ** (1.0 / n) * scale
    group = evals[max(_clusters(evals, radius), key=len)]
    T, Z, sdim = scipy.linalg.schur(
        L, output="complex", sort=lambda x: bool(np.min(np.abs(group - x)) <= radius))
    K = Z[:, : max(sdim, 1)]
    m = K.shape[1]
    stacked = []
    for A in mats:
        R = K.conj().T @ A @ K
        stacked.append(R - (np.trace(R) / m) * np.eye(m))
    _, _, Vh = np.linalg.svd(np.vstack(stacked))
    return K @ Vh[-1].conj()


def _deflate(mats: Sequence[np.ndarray], c: np.ndarray) -> np.ndarray:
    n = mats[0].shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    v = _common_eigenvector(mats, c)
    v = v / np.linalg.norm(v)
    W = scipy.linalg.null_space(v.conj()[None, :])
    sub = [W.conj().T @ A @ W for A in mats]
    return np.column_stack([v, W @ _deflate(sub, c)])


def joint_eigenvalues(T: OperatorTuple, tol: float = 1e-8, seed: int = 0) -> JointSpectrum:
    """Joint eigenvalues of a commuting tuple via a common triangularizing unitary.

    First tries the Schur vectors of one random linear combination (fixed
    seed); if some ``T_j`` is not triangular in that basis, falls back to
    deflating common eigenvectors one at a time.
    """
    scale = max(1.0, T.scale)
    if T.commutator_norm > 1e-8 * scale:
        raise DegeneracyError(f"tuple is not commuting (commutator {T.commutator_norm:.2e})",
                              T.commutator_norm)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(T.d) + 1j * rng.standard_normal(T.d)
    L = sum(cj * A for cj, A in zip(c, T.matrices))
    _, Q = scipy.linalg.schur(L, output="complex")
    res = _lower_residual(T.matrices, Q)
    if res > tol * scale:
        Q = _deflate(T.matrices, c)
        res = _lower_residual(T.matrices, Q)
        if res > tol * scale:
            raise DegeneracyError(f"simultaneous triangularization residual {res:.2e}", res)
    pts = np.column_stack([np.diag(Q.conj().T @ A @ Q) for A in T.matrices])
    max_norm = float(np.max(np.linalg.norm(pts, axis=1))) if pts.size else 0.0
    return JointSpectrum(pts, max_norm, res, Q)


def _degree_labels(degrees) -> np.ndarray:
    if isinstance(degrees, MonomialBasis):
        return np.asarray(degrees.degrees)
    if isinstance(degrees, IdealComplementBasis):
        return np.repeat(np.arange(len(degrees.dims)), degrees.dims)
    return np.asarray(degrees, dtype=int)


@dataclass(frozen=True)
class DefectResult:
    matrix: np.ndarray
    eigenvalues: np.ndarray  # ascending
    per_degree: dict[int, np.ndarray] = field(default_factory=dict)


def defect_operator(T: OperatorTuple, degrees=None) -> DefectResult:
    """``I - sum_j T_j T_j^*`` with its spectrum, optionally split by degree."""
    D = np.eye(T.size, dtype=complex) - sum(A @ A.conj().T for A in T.matrices)
    D = hermitian_part(D)
    per = {}
    if degrees is not None:
        labels = _degree_labels(degrees)
        for m in np.unique(labels):
            sel = np.nonzero(labels == m)[0]
            per[int(m)] = hermitian_eigvalsh(D[np.ix_(sel, sel)])
    return DefectResult(D, hermitian_eigvalsh(D), per)


@dataclass(frozen=True)
class CommutatorTail:
    cutoffs: np.ndarray  # m = 0..N-1
    values: np.ndarray  # max_{j,k} ||P_m [T_j, T_k^*] P_m|| on degrees m..N-1
    boundary: float  # same quantity on the top degree alone (truncation artefact)


def commutator_tail_norms(T: OperatorTuple, degrees) -> CommutatorTail:
    """Self-commutator norms on the interior degrees ``m..N-1``.

    The top degree is reported separately: truncation kills the shift there,
    so its commutator does not approximate the untruncated one.
    """
    labels = _degree_labels(degrees)
    top = int(labels.max())
    comms = [A @ B.conj().T - B.conj().T @ A for A in T.matrices for B in T.matrices]
    cutoffs = np.arange(top)
    vals = []
    for m in cutoffs:
        sel = np.nonzero((labels >= m) & (labels < top))[0]
        vals.append(max(spectral_norm(C[np.ix_(sel, sel)]) for C in comms))
    sel = np.nonzero(labels == top)[0]
    boundary = max(spectral_norm(C[np.ix_(sel, sel)]) for C in comms)
    return CommutatorTail(cutoffs, np.array(vals), boundary)


@dataclass(frozen=True)
class ToeplitzDefect:
    matrices: tuple[np.ndarray, ...]  # U^H S^A U - S^B per coordinate
    factors: np.ndarray  # signed scalar per source degree n = 0..N-1
    magnitudes: np.ndarray  # max_j spectral norm of the degree-n columns
    residual: float  # entrywise deviation from factor * S^B


def toeplitz_defect(tableA: CoeffTable, tableB: CoeffTable | None, d: int, N: int) -> ToeplitzDefect:
    """Compare two shifts under the unitary ``p -> sqrt(a^A_n / a^B_n) p`` on degree n.

    In orthonormal monomial coordinates that unitary is the identity, so the
    defect is ``S^A - S^B``; on degree n it equals
    ``(sqrt(a^A_n a^B_{n+1} / (a^A_{n+1} a^B_n)) - 1) S^B``.
    """
    if tableB is None:
        from .kernels import KernelSpec, compute_a

        tableB = compute_a(KernelSpec.drury_arveson(d), N)
    if tableA.N < N or tableB.N < N:
        raise ParameterDomainError("both tables need order >= N")
    basisA = build_basis(tableA, d, N)
    basisB = build_basis(tableB, d, N)
    SA, SB = shift_tuple(basisA), shift_tuple(basisB)
    aA, aB = tableA.a, tableB.a
    factors = np.array([math.sqrt(aA[n] * aB[n + 1] / (aA[n + 1] * aB[n])) - 1.0 for n in range(N)])
    labels = basisA.degrees
    mats, mags, resid = [], np.zeros(N), 0.0
    col_factor = np.append(factors, 0.0)[labels]
    for A, B in zip(SA.matrices, SB.matrices):
        Dm = A - B
        mats.append(Dm)
        resid = max(resid, float(np.max(np.abs(Dm - B * col_factor[None, :]))))
        for n in range(N):
            sel = np.nonzero(labels == n)[0]
            mags[n] = max(mags[n], spectral_norm(Dm[:, sel]))
    return ToeplitzDefect(tuple(mats), factors, mags, resid)


@dataclass(frozen=True)
class MultiplierNorm:
    norm: float  # spectral norm of the truncated multiplier
    target: float  # ||z^alpha|| in the space
    gap: float  # target - norm


def monomial_multiplier_norm(table: CoeffTable, d: int, N: int, alpha: Sequence[int]) -> MultiplierNorm:
    """Norm of the truncated multiplier by ``z^alpha`` against ``||z^alpha||``."""
    alpha = tuple(alpha)
    if len(alpha) != d or sum(alpha) > N:
        raise ParameterDomainError(f"monomial {alpha} not available for d={d}, N={N}")
    basis, S = truncated_shift(table, d, N)
    P = monomial_power(S, alpha)
    norm = spectral_norm(P)
    target = math.sqrt(basis.weight(alpha))
    return MultiplierNorm(norm, target, target - norm)


def sampled_multiplier_power_norm(table: CoeffTable, d: int, N: int, n: int) -> MultiplierNorm:
    """``||S_{z_1}^n||`` on the truncation against ``1/sqrt(a_n)``."""
    return monomial_multiplier_norm(table, d, N, (n,) + (0,) * (d - 1))


def sup_norm_on_samples(alpha: Sequence[int], points: np.ndarray) -> float:
    """``max |z^alpha|`` over sample points (rows)."""
    P = np.asarray(points, dtype=complex)
    vals = np.prod(P ** np.asarray(alpha)[None, :], axis=1)
    return float(np.max(np.abs(vals)))
