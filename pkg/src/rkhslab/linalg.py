"""Dense Hermitian helpers and the PSD verdict used across modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NonHermitianError, NotPSDError

HERMITIAN_RTOL = 1e-10


def spectral_norm(A: np.ndarray) -> float:
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_part(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A)
    return (A + A.conj().T) / 2


def hermitian_defect(A: np.ndarray) -> float:
    """Relative distance of ``A`` from its adjoint (0 for the zero matrix)."""
    A = np.asarray(A)
    scale = spectral_norm(A)
    if scale == 0.0:
        return 0.0
    return spectral_norm(A - A.conj().T) / scale


def hermitian_eigvalsh(A: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the symmetrized matrix."""
    A = np.asarray(A)
    if A.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(hermitian_part(A))


def psd_sqrt(A: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Square root of a numerically PSD matrix.

    Negative eigenvalues down to ``-tol * scale`` are clamped to zero. Returns
    the root and the clamped mass (sum of absolute values of clamped
    eigenvalues). Raises ``NotPSDError`` beyond the tolerance.
    """
    H = hermitian_part(A)
    evals, evecs = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    if evals.size and evals[0] < -tol * scale:
        raise NotPSDError(f"minimum eigenvalue {evals[0]:.3e} below -{tol:g}*{scale:.3g}")
    neg = evals < 0
    clamped = float(np.sum(np.abs(evals[neg])))
    evals = np.where(neg, 0.0, evals)
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    return root, clamped


@dataclass(frozen=True)
class PsdVerdict:
    min_eigenvalue: float
    size: int
    tolerance: float
    scale: float
    verdict: str  # "psd" | "not_psd"

    @property
    def psd(self) -> bool:
        return self.verdict == "psd"

    def to_dict(self) -> dict:
        return asdict(self)


def is_psd(matrix: np.ndarray, tol: float = 1e-10) -> PsdVerdict:
    """PSD verdict relative to the largest eigenvalue magnitude.

    >>> is_psd(np.eye(2)).verdict
    'psd'
    """
    M = np.asarray(matrix)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if hermitian_defect(M) > HERMITIAN_RTOL:
        raise NonHermitianError(
            f"matrix is not Hermitian (relative defect {hermitian_defect(M):.2e})"
        )
    evals = hermitian_eigvalsh(M)
    if evals.size == 0:
        return PsdVerdict(0.0, 0, tol, 0.0, "psd")
    scale = float(np.max(np.abs(evals)))
    lo = float(evals[0])
    ok = lo >= -tol * (scale if scale > 0 else 1.0)
    return PsdVerdict(lo, M.shape[0], tol, scale, "psd" if ok else "not_psd")

