"""Reproducible computations built from the library operations.

Each function returns plain numbers or small dataclasses so the command line
and the test suite can share them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.stats import unitary_group

from .dilation import DilationCertificate, agler_coextension
from .kernels import CoeffTable, KernelSpec, table_for
from .linalg import spectral_norm
from .model_ops import (
    HereditaryResult,
    OperatorTuple,
    compress,
    hereditary_1k,
    positive_degree_subspace,
    shift_tuple,
    sup_norm_on_samples,
    truncated_shift,
)
from .pick import PickProblem, feasibility_threshold, sphere_samples
from .polyspace import (
    HomogeneousIdeal,
    IdealComplementBasis,
    MonomialBasis,
    build_basis,
    complement_basis,
    count_degree,
)

# families with nonnegative b_n, used for the certificate and psi suites
CNP_FAMILIES = (
    ("hardy", {}),
    ("drury_arveson", {}),
    ("h_s", {"s": 0.0}),
    ("h_s", {"s": -0.5}),
    ("h_s", {"s": -1.0}),
    ("h_s", {"s": -2.0}),
    ("besov_sobolev", {"sigma": 0.25}),
    ("besov_sobolev", {"sigma": 0.5}),
    ("besov_sobolev", {"sigma": 1.0}),
)

ALL_FAMILIES = CNP_FAMILIES + (("bergman_disc", {}),)


def family_spec(name: str, params: dict, d: int) -> KernelSpec:
    return KernelSpec(name, d, **params)


def projection_distance(table: CoeffTable, d: int, N: int) -> float:
    """Spectral distance between ``1/k(S, S*)`` and the projection onto constants."""
    basis, S = truncated_shift(table, d, N)
    H = hereditary_1k(S, table)
    P = np.zeros((basis.dim, basis.dim))
    P[0, 0] = 1.0
    return spectral_norm(H.matrix - P)


@dataclass(frozen=True)
class RestrictionSpectrum:
    computed: np.ndarray
    expected: np.ndarray

    @property
    def error(self) -> float:
        return float(np.max(np.abs(self.computed - self.expected))) if self.computed.size else 0.0


def restriction_spectrum(table: CoeffTable, d: int, N: int) -> RestrictionSpectrum:
    """Spectrum of ``1/k(T, T*)`` for the shift restricted to polynomials vanishing at 0,
    against ``b_m / a_m`` repeated ``C(m+d-1, d-1)`` times."""
    basis, S = truncated_shift(table, d, N)
    T = compress(S, positive_degree_subspace(basis))
    H = hereditary_1k(T, table)
    expected = np.sort(np.concatenate(
        [np.full(count_degree(m, d), table.b[m] / table.a[m]) for m in range(1, N + 1)]
    ))
    return RestrictionSpectrum(H.eigenvalues, expected)


def bergman_on_hardy_shift(N: int) -> HereditaryResult:
    """``1/k(S, S*)`` with the Bergman coefficients and ``S`` the Hardy shift."""
    _, S = truncated_shift(table_for(KernelSpec.hardy(), N), 1, N)
    return hereditary_1k(S, table_for(KernelSpec.bergman(), N))


def two_node_problem(node: float, target: float) -> PickProblem:
    return PickProblem.scalar([[0.0], [node]], [0.0, target])


def two_node_threshold(kernel: KernelSpec | CoeffTable, node: float = 0.5, N: int | None = None,
                       xtol: float = 1e-9) -> float:
    """Largest ``|w|`` for which ``0 -> 0, node -> w`` stays feasible."""
    return feasibility_threshold(lambda t: two_node_problem(node, t), kernel, N, 0.0, 1.0, xtol=xtol)


def hardy_two_node_oracle(node: float) -> float:
    # det [[1, 1], [1, (1 - w^2)/(1 - node^2)]] >= 0  <=>  w <= node
    return abs(node)


@dataclass(frozen=True)
class ModelCase:
    label: str
    table: CoeffTable
    basis: MonomialBasis
    complement: IdealComplementBasis
    ideal: HomogeneousIdeal
    T: OperatorTuple
    r: float


def ideal_choices(d: int, N: int) -> list[tuple[str, HomogeneousIdeal]]:
    out = [("max_power", HomogeneousIdeal.maximal_power(d, N + 1)),
           ("z1", HomogeneousIdeal.monomial_ideal(d, [(1,) + (0,) * (d - 1)]))]
    if d >= 2:
        out.append(("z1z2", HomogeneousIdeal.monomial_ideal(d, [(1, 1) + (0,) * (d - 2)])))
    return out


def model_case(name: str, params: dict, d: int, N: int, ideal_name: str, r: float,
               U: np.ndarray | None = None) -> ModelCase:
    table = table_for(family_spec(name, params, d), N)
    basis = build_basis(table, d, N)
    ideal = dict(ideal_choices(d, N))[ideal_name]
    comp = complement_basis(ideal, basis)
    T = compress(shift_tuple(basis), comp.embedding()).scaled(r)
    if U is not None:
        T = T.conjugated(U)
    label = f"{table.label} d={d} N={N} ideal={ideal_name} r={r:g}"
    return ModelCase(label, table, basis, comp, ideal, T, r)


def random_model_cases(count: int, seed: int = 0, radii=(0.5, 0.9, 1.0),
                       max_d: int = 2, max_N: int = 4) -> Iterator[ModelCase]:
    """Seeded ``r * S^I`` tuples, conjugated by a random unitary."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        name, params = CNP_FAMILIES[rng.integers(len(CNP_FAMILIES))]
        d = int(rng.integers(1, max_d + 1))
        N = int(rng.integers(1, max_N + 1))
        ideals = ideal_choices(d, N)
        ideal_name = ideals[rng.integers(len(ideals))][0]
        r = float(radii[rng.integers(len(radii))])
        table = table_for(family_spec(name, params, d), N)
        size = complement_basis(dict(ideals)[ideal_name], build_basis(table, d, N)).dim
        U = unitary_group.rvs(size, random_state=rng) if size > 1 else np.ones((1, 1))
        yield model_case(name, params, d, N, ideal_name, r, U)


def certify_case(case: ModelCase, tol: float = 1e-8) -> DilationCertificate:
    return agler_coextension(case.T, case.table, case.basis, case.complement, tol=tol)


def random_nilpotent_tuple(rng: np.random.Generator, d: int, n: int, norm: float) -> OperatorTuple:
    """Commuting nilpotent tuple ``T_j = p_j(J)`` for a random strictly upper
    triangular ``J`` (unitarily rotated), rescaled to the given norm."""
    J = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), 1)
    if n > 1:
        U = unitary_group.rvs(n, random_state=rng)
        J = U @ J @ U.conj().T
    powers = [np.linalg.matrix_power(J, k) for k in range(1, n)] or [np.zeros((n, n))]
    mats = []
    for _ in range(d):
        c = rng.standard_normal(len(powers)) + 1j * rng.standard_normal(len(powers))
        mats.append(sum(ck * P for ck, P in zip(c, powers)))
    scale = max(spectral_norm(A) for A in mats)
    if scale > 0:
        mats = [A * (norm / scale) for A in mats]
    return OperatorTuple.measured(mats)


def random_nilpotent_cases(count: int, seed: int = 0) -> Iterator[tuple[OperatorTuple, CoeffTable]]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        name, params = CNP_FAMILIES[rng.integers(len(CNP_FAMILIES))]
        d = int(rng.integers(1, 3))
        n = int(rng.integers(2, 6))
        norm = float(rng.uniform(0.2, 1.4))
        T = random_nilpotent_tuple(rng, d, n, norm)
        yield T, table_for(family_spec(name, params, d), n)


def spherical_partial_sums(table: CoeffTable, checkpoints) -> list[float]:
    """``sum_{n<=M} b_n`` at each checkpoint M."""
    c = np.cumsum(table.b)
    return [float(c[M]) for M in checkpoints]


def row_sum_scalar(row_sum: np.ndarray) -> tuple[float, float]:
    """Mean diagonal value of a row sum and its distance from that multiple of I."""
    n = row_sum.shape[0]
    lam = float(np.real(np.trace(row_sum))) / n
    return lam, spectral_norm(row_sum - lam * np.eye(n))


def dirichlet_gap_table(N: int, n_max: int) -> list[tuple[int, float, float]]:
    """``(n, ||S_z^n||^2, 1/a_n)`` for the Dirichlet truncation."""
    table = table_for(KernelSpec.dirichlet(), N)
    _, S = truncated_shift(table, 1, N)
    P = np.eye(S.size)
    out = []
    for n in range(1, n_max + 1):
        P = S.matrices[0] @ P
        out.append((n, spectral_norm(P) ** 2, 1.0 / table.a[n]))
    return out


def sphere_sup_norm2(alpha, count: int, seed: int = 0) -> float:
    return sup_norm_on_samples(alpha, sphere_samples(len(alpha), count, seed)) ** 2

