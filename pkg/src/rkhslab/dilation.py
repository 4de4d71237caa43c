"""Coextension isometries for jointly nilpotent tuples.

For a jointly nilpotent ``T`` on ``E`` with ``D = 1/k(T, T*) >= 0`` the map

    V x = sum_alpha a_|alpha| (|alpha|! / alpha!) z^alpha (x) D^{1/2} (T*)^alpha x

is an isometry ``E -> H (x) E`` with ``(S_j^* (x) I) V = V T_j^*``. In the
orthonormal monomial basis its block at ``alpha`` is
``sqrt(a_n C(n, alpha)) D^{1/2} (T^alpha)^*``. The sum is finite because
``T`` is nilpotent, so everything lives on the polynomials of degree <= N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ParameterDomainError, PreconditionError, TruncationError
from .kernels import CoeffTable
from .linalg import psd_sqrt, spectral_norm
from .model_ops import (
    OperatorTuple,
    compress,
    hereditary_1k,
    monomial_levels,
    monomial_power,
    shift_tuple,
)
from .polyspace import IdealComplementBasis, MonomialBasis, compositions, multinomial

DEFAULT_CERT_TOL = 1e-8


@dataclass(frozen=True)
class DilationCertificate:
    V: np.ndarray
    isometry_residual: float
    intertwining_residuals: tuple[float, ...]
    compression_residuals: tuple[float, ...]
    tolerance: float
    range_residual: float | None = None
    clamped_mass: float = 0.0

    @property
    def valid(self) -> bool:
        worst = max((self.isometry_residual, *self.intertwining_residuals,
                     *self.compression_residuals, self.range_residual or 0.0))
        return worst <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        out = {
            "isometry_residual": self.isometry_residual,
            "intertwining_residuals": list(self.intertwining_residuals),
            "compression_residuals": list(self.compression_residuals),
            "tolerance": self.tolerance,
            "valid": self.valid,
        }
        if self.range_residual is not None:
            out["range_residual"] = self.range_residual
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_coextension(V: np.ndarray, T: OperatorTuple, S: OperatorTuple,
                       tol: float = DEFAULT_CERT_TOL) -> DilationCertificate:
    """Residuals of an isometric coextension ``V: E -> K (x) E`` (no construction)."""
    V = np.asarray(V, dtype=complex)
    e, m = T.size, S.size
    if T.d != S.d:
        raise ParameterDomainError(f"tuples have different lengths {T.d} and {S.d}")
    if V.shape != (m * e, e):
        raise ParameterDomainError(f"V has shape {V.shape}, expected {(m * e, e)}")
    iso = spectral_norm(V.conj().T @ V - np.eye(e))
    eye = np.eye(e)
    inter, comp = [], []
    for Sj, Tj in zip(S.matrices, T.matrices):
        big = np.kron(Sj, eye)
        inter.append(spectral_norm(big.conj().T @ V - V @ Tj.conj().T))
        comp.append(spectral_norm(V.conj().T @ big @ V - Tj))
    return DilationCertificate(V, iso, tuple(inter), tuple(comp), tol)


def agler_coextension(T: OperatorTuple, table: CoeffTable, basis: MonomialBasis,
                      complement: IdealComplementBasis | None = None,
                      tol: float = DEFAULT_CERT_TOL, psd_tol: float = 1e-10) -> DilationCertificate:
    """Construct and certify the coextension of a jointly nilpotent tuple.

    With ``complement`` the range of ``V`` is checked against the ideal
    complement (``range_residual``) and the certificate is issued for the
    compressed tuple on that complement.
    """
    if T.d != basis.d:
        raise ParameterDomainError(f"tuple has d={T.d}, basis has d={basis.d}")
    if table.N < basis.N or not np.array_equal(table.a[: basis.N + 1], basis.a):
        raise ParameterDomainError("basis was built from a different coefficient table")
    H = hereditary_1k(T, table, "auto-nilpotent", tol=psd_tol)
    scale = max(1.0, float(np.max(np.abs(H.eigenvalues))))
    if H.min_eigenvalue < -psd_tol * scale:
        raise PreconditionError(
            f"1/k(T,T*) is not positive (min eigenvalue {H.min_eigenvalue:.6g})"
        )
    if H.order > basis.N:
        raise TruncationError(f"tuple needs degree {H.order} but basis stops at N = {basis.N}")
    root, clamped = psd_sqrt(H.matrix, psd_tol)
    e = T.size
    V = np.zeros((basis.dim * e, e), dtype=complex)
    a = basis.a
    for n, level in monomial_levels(T, H.order):
        for alpha, P in level.items():
            i = basis.index_of(alpha)
            V[i * e:(i + 1) * e] = math.sqrt(a[n] * multinomial(n, alpha)) * (root @ P.conj().T)
    S = shift_tuple(basis)
    if complement is None:
        cert = verify_coextension(V, T, S, tol)
        return DilationCertificate(V, cert.isometry_residual, cert.intertwining_residuals,
                                   cert.compression_residuals, tol, None, clamped)
    Q = complement.embedding()
    big_Q = np.kron(Q, np.eye(e))
    VI = big_Q.conj().T @ V
    range_res = spectral_norm(V - big_Q @ VI)
    cert = verify_coextension(VI, T, compress(S, Q), tol)
    return DilationCertificate(VI, cert.isometry_residual, cert.intertwining_residuals,
                               cert.compression_residuals, tol, range_res, clamped)


def power_compression_residuals(V: np.ndarray, T: OperatorTuple, S: OperatorTuple,
                                max_degree: int) -> dict[tuple[int, ...], float]:
    """``||V^H (S^alpha (x) I) V - T^alpha||`` for ``1 <= |alpha| <= max_degree``."""
    eye = np.eye(T.size)
    out = {}
    for n in range(1, max_degree + 1):
        for alpha in compositions(n, T.d):
            big = np.kron(monomial_power(S, alpha), eye)
            out[alpha] = spectral_norm(V.conj().T @ big @ V - monomial_power(T, alpha))
    return out


def isometry_identity_residual(T: OperatorTuple, table: CoeffTable) -> float:
    """``||sum_alpha a_|a| C(|a|,a) T^a D (T^a)^* - I||`` with ``D = 1/k(T,T*)``."""
    H = hereditary_1k(T, table, "auto-nilpotent")
    acc = np.zeros((T.size, T.size), dtype=complex)
    for n, level in monomial_levels(T, H.order):
        for alpha, P in level.items():
            acc += table.a[n] * multinomial(n, alpha) * (P @ H.matrix @ P.conj().T)
    return spectral_norm(acc - np.eye(T.size))


def spherical_unitary(points: Sequence[Sequence[complex]], tol: float = 1e-12) -> OperatorTuple:
    """Diagonal tuple ``U_j = diag(p_j)`` over points ``p`` on the unit sphere."""
    P = np.asarray(points, dtype=complex)
    if P.ndim == 1:
        P = P[:, None]
    norms = np.linalg.norm(P, axis=1)
    if np.any(np.abs(norms - 1.0) > tol):
        raise ParameterDomainError(f"point off the unit sphere (norm {norms[np.argmax(np.abs(norms - 1))]!r})")
    return OperatorTuple(tuple(np.diag(P[:, j]) for j in range(P.shape[1])))


def direct_sum(A: OperatorTuple, B: OperatorTuple) -> OperatorTuple:
    if A.d != B.d:
        raise ParameterDomainError(f"cannot add tuples of lengths {A.d} and {B.d}")
    na, nb = A.size, B.size
    mats = []
    for X, Y in zip(A.matrices, B.matrices):
        M = np.zeros((na + nb, na + nb), dtype=complex)
        M[:na, :na] = X
        M[na:, na:] = Y
        mats.append(M)
    return OperatorTuple(tuple(mats), max(A.commutator_tol, B.commutator_tol))
