"""Pick-matrix feasibility, kernel quotients and sample-level multiplier norms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.linalg.lapack
from scipy.special import ndtri
from scipy.stats import qmc

from .errors import (
    DegenerateSampleError,
    NotPSDError,
    ParameterDomainError,
    PointDomainError,
    SingularKernelError,
)
from .kernels import CoeffTable, KernelSpec, as_points, kernel_gram
from .linalg import PsdVerdict, hermitian_part, is_psd, spectral_norm

__all__ = [
    "PickProblem", "PsdVerdict", "is_psd", "pick_matrix", "kernel_quotient_gram",
    "negative_principal_minor", "gram_factor", "sampled_multiplier_norm",
    "feasibility_threshold", "ball_samples", "sphere_samples",
]

Kernel = KernelSpec | CoeffTable


def _complex_array(data: Any) -> np.ndarray:
    """JSON numbers with complex entries written as ``[re, im]`` pairs."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ParameterDomainError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _pairs(arr: np.ndarray) -> list:
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


@dataclass(frozen=True, eq=False)
class PickProblem:
    """Interpolation data: nodes ``z_i`` in the ball and ``r x r`` targets ``W_i``."""

    nodes: np.ndarray  # (n, d)
    targets: np.ndarray  # (n, r, r)

    def __post_init__(self) -> None:
        Z = np.array(self.nodes, dtype=complex)
        if Z.ndim == 1:
            Z = Z[:, None]
        W = np.array(self.targets, dtype=complex)
        if W.ndim == 1:
            W = W[:, None, None]
        if W.ndim != 3 or W.shape[1] != W.shape[2] or W.shape[0] != Z.shape[0]:
            raise ParameterDomainError(f"targets of shape {W.shape} do not match {Z.shape[0]} nodes")
        norms = np.linalg.norm(Z, axis=1)
        if np.any(norms >= 1.0):
            raise PointDomainError(f"node of norm {norms.max()!r} outside the open ball")
        for i in range(len(Z)):
            for j in range(i):
                if np.array_equal(Z[i], Z[j]):
                    raise ParameterDomainError(f"nodes {j} and {i} coincide")
        Z.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "nodes", Z)
        object.__setattr__(self, "targets", W)

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    @property
    def r(self) -> int:
        return self.targets.shape[1]

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    @classmethod
    def scalar(cls, nodes: Sequence, values: Sequence[complex]) -> "PickProblem":
        return cls(np.asarray(nodes, dtype=complex), np.asarray(values, dtype=complex)[:, None, None])

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, "r": self.r, "nodes": _pairs(self.nodes), "targets": _pairs(self.targets)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PickProblem":
        d, r = int(data["d"]), int(data.get("r", 1))
        Z = _complex_array(data["nodes"]).reshape(-1, d)
        W = _complex_array(data["targets"]).reshape(-1, r, r)
        return cls(Z, W)

    @classmethod
    def from_json(cls, text: str) -> "PickProblem":
        return cls.from_dict(json.loads(text))


def pick_matrix(problem: PickProblem, kernel: Kernel, N: int | None = None) -> np.ndarray:
    """Block matrix ``[k(z_i, z_j) (I - W_i W_j^*)]``."""
    K = kernel_gram(kernel, problem.nodes, N)
    n, r = problem.n, problem.r
    W = problem.targets
    P = np.zeros((n * r, n * r), dtype=complex)
    eye = np.eye(r)
    for i in range(n):
        for j in range(n):
            P[i * r:(i + 1) * r, j * r:(j + 1) * r] = K[i, j] * (eye - W[i] @ W[j].conj().T)
    return hermitian_part(P)


@dataclass(frozen=True)
class QuotientGram:
    matrix: np.ndarray
    verdict: PsdVerdict


def kernel_quotient_gram(numerator: Kernel, denominator: Kernel, points, N: int | None = None,
                         tol: float = 1e-10) -> QuotientGram:
    """Gram matrix of ``k_num / k_den`` on the sample with its PSD verdict."""
    X = as_points(points)
    K2 = kernel_gram(numerator, X, N)
    K1 = kernel_gram(denominator, X, N)
    if np.any(np.abs(K1) <= 1e-14 * np.max(np.abs(K1))):
        raise SingularKernelError("denominator kernel vanishes on the sample")
    Q = hermitian_part(K2 / K1)
    return QuotientGram(Q, is_psd(Q, tol))


@dataclass(frozen=True)
class PrincipalMinor:
    i: int
    j: int
    det: float
    error_bound: float

    @property
    def certified_negative(self) -> bool:
        return self.det < -self.error_bound


def negative_principal_minor(M: np.ndarray) -> PrincipalMinor:
    """Most negative 2x2 principal minor with a floating-point error bound."""
    M = np.asarray(M)
    dg = np.real(np.diag(M))
    prod = np.outer(dg, dg)
    off = np.abs(M) ** 2
    dets = prod - off
    np.fill_diagonal(dets, np.inf)
    i, j = np.unravel_index(np.argmin(dets), dets.shape)
    eps = np.finfo(float).eps
    bound = 8 * eps * (abs(prod[i, j]) + off[i, j])
    return PrincipalMinor(int(min(i, j)), int(max(i, j)), float(dets[i, j]), float(bound))


@dataclass(frozen=True)
class GramFactor:
    F: np.ndarray  # (n, rank), F F^H ~ G
    rank: int
    residual: float  # ||F F^H - G|| / scale
    pivots: tuple[int, ...]


def gram_factor(G: np.ndarray, tol: float = 1e-13) -> GramFactor:
    """Pivoted Cholesky factor of a PSD matrix (LAPACK ``zpstrf``), truncated
    once the largest remaining diagonal drops below ``tol * max diag``."""
    A = hermitian_part(np.asarray(G, dtype=complex))
    n = A.shape[0]
    if n == 0:
        return GramFactor(np.zeros((0, 0), dtype=complex), 0, 0.0, ())
    scale = max(float(np.real(np.diag(A)).max()), 0.0)
    if scale == 0.0:
        if spectral_norm(A) > 0:
            raise NotPSDError("zero diagonal with nonzero off-diagonal entries")
        return GramFactor(np.zeros((n, 0), dtype=complex), 0, 0.0, ())
    c, piv, rank, info = scipy.linalg.lapack.zpstrf(A, tol=tol * scale, lower=1)
    if info < 0:
        raise ParameterDomainError(f"zpstrf rejected argument {-info}")
    order = piv[:n] - 1
    F = np.zeros((n, rank), dtype=complex)
    F[order] = np.tril(c)[:, :rank]
    resid = spectral_norm(F @ F.conj().T - A) / scale
    if resid > max(1e-8, tol * n):
        raise NotPSDError(f"factorization residual {resid:.3e}: matrix is not PSD")
    return GramFactor(F, rank, resid, tuple(int(i) for i in order[:rank]))


def sampled_multiplier_norm(phi_values: Sequence[complex], kernel: Kernel, points,
                            N: int | None = None, cond_limit: float = 1e13) -> float:
    """Smallest ``t >= 0`` with ``[k(z_i, z_j)(t^2 - phi(z_i) conj(phi(z_j)))]`` PSD.

    Computed as the square root of the largest generalized eigenvalue of
    ``(G o Phi, G)``.
    """
    X = as_points(points)
    phi = np.asarray(phi_values, dtype=complex).reshape(-1)
    if phi.size != X.shape[0]:
        raise ParameterDomainError("one function value per sample point is required")
    G = hermitian_part(kernel_gram(kernel, X, N))
    evals = np.linalg.eigvalsh(G)
    if evals[0] <= evals[-1] / cond_limit:
        raise DegenerateSampleError(
            f"kernel Gram matrix is numerically singular (eigenvalues {evals[0]:.2e}..{evals[-1]:.2e})"
        )
    A = hermitian_part(phi[:, None] * G * phi.conj()[None, :])
    top = float(scipy.linalg.eigh(A, G, eigvals_only=True)[-1])
    return math.sqrt(max(top, 0.0))


def feasibility_threshold(make_problem: Callable[[float], PickProblem], kernel: Kernel,
                          N: int | None, lo: float, hi: float, tol: float = 1e-10,
                          xtol: float = 1e-9) -> float:
    """Bisect the parameter at which the Pick matrix stops being PSD.

    ``make_problem(lo)`` must be feasible and ``make_problem(hi)`` infeasible.
    """
    def feasible(t: float) -> bool:
        return is_psd(pick_matrix(make_problem(t), kernel, N), tol).psd

    if not feasible(lo) or feasible(hi):
        raise ParameterDomainError("bracket must be feasible at lo and infeasible at hi")
    while hi - lo > xtol:
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _gaussian_from_uniform(U: np.ndarray) -> np.ndarray:

    return ndtri(np.clip(U, 1e-12, 1 - 1e-12))


def sphere_samples(d: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton points on the unit sphere of C^d."""
    U = qmc.Halton(d=2 * d, scramble=True, seed=seed).random(count)
    G = _gaussian_from_uniform(U)
    Z = G[:, :d] + 1j * G[:, d:]
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def ball_samples(d: int, count: int, rmax: float = 0.9, seed: int = 0) -> np.ndarray:
    """Deterministic points in the ball of radius ``rmax`` (uniform in volume)."""
    if not 0 < rmax < 1:
        raise ParameterDomainError("rmax must lie in (0, 1)")
    U = qmc.Halton(d=2 * d + 1, scramble=True, seed=seed).random(count)
    G = _gaussian_from_uniform(U[:, : 2 * d])
    Z = G[:, :d] + 1j * G[:, d:]
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    radius = rmax * U[:, -1] ** (1.0 / (2 * d))
    return Z * radius[:, None]
