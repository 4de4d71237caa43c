import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from oracles import dirichlet_a, invert
from rkhslab.dilation import spherical_unitary
from rkhslab.errors import (
    CNPViolationError,
    DegeneracyError,
    NilpotencyError,
    ParameterDomainError,
    TruncationError,
)
from rkhslab.experiments import CNP_FAMILIES, family_spec, random_nilpotent_tuple
from rkhslab.kernels import KernelSpec, table_for
from rkhslab.model_ops import (
    OperatorTuple,
    commutator_tail_norms,
    compress,
    defect_operator,
    hereditary_1k,
    joint_eigenvalues,
    monomial_levels,
    monomial_multiplier_norm,
    monomial_power,
    nilpotency_order,
    positive_degree_subspace,
    psi_row,
    sampled_multiplier_power_norm,
    sup_norm_on_samples,
    technical_identity_check,
    toeplitz_defect,
    truncated_shift,
)
from rkhslab.pick import sphere_samples
from rkhslab.polyspace import (
    HomogeneousIdeal,
    HomogeneousPolynomial,
    build_basis,
    complement_basis,
    compositions,
    count_degree,
)

HARDY = KernelSpec.hardy()
DIRICHLET = KernelSpec.dirichlet()


def jordan(n):
    return np.diag(np.ones(n - 1), -1)


class TestShift:
    def test_hardy_is_subdiagonal(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        np.testing.assert_array_equal(S[0], jordan(3))

    def test_dirichlet_first_entry(self):
        # sqrt(w(1) / w(0)) with w(n) = n + 1
        _, S = truncated_shift(table_for(DIRICHLET, 1), 1, 1)
        assert S[0][1, 0] == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_dirichlet_entries_match_weights(self):
        _, S = truncated_shift(table_for(DIRICHLET, 5), 1, 5)
        expected = [math.sqrt((n + 2) / (n + 1)) for n in range(5)]
        np.testing.assert_allclose(np.diag(S[0], -1), expected, rtol=1e-15)

    def test_da_two_variables(self):
        basis, S = truncated_shift(table_for(KernelSpec.drury_arveson(2), 1), 2, 1)
        assert S[0][basis.index_of((1, 0)), 0] == 1
        assert S[1][basis.index_of((0, 1)), 0] == 1
        assert np.all(S[0][:, 1:] == 0)

    def test_one_nonzero_per_column(self):
        _, S = truncated_shift(table_for(KernelSpec.drury_arveson(3), 4), 3, 4)
        for A in S:
            assert np.all(np.count_nonzero(A, axis=0) <= 1)


class TestCompress:
    def test_jordan_block_modulo_z_squared(self):
        basis, S = truncated_shift(table_for(HARDY, 3), 1, 3)
        comp = complement_basis(HomogeneousIdeal.monomial_ideal(1, [(2,)]), basis)
        T = compress(S, comp.embedding())
        np.testing.assert_allclose(T[0], jordan(2), atol=1e-15)

    def test_constants_give_zero(self):
        basis, S = truncated_shift(table_for(KernelSpec.drury_arveson(2), 3), 2, 3)
        T = compress(S, np.eye(basis.dim)[:, :1])
        assert all(np.all(A == 0) for A in T)

    def test_positive_degree_part(self):
        basis, S = truncated_shift(table_for(HARDY, 4), 1, 4)
        T = compress(S, positive_degree_subspace(basis))
        np.testing.assert_allclose(T[0], jordan(4))

    def test_rejects_non_isometry(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        with pytest.raises(ParameterDomainError):
            compress(S, 2 * np.eye(3)[:, :2])

    def test_records_commutator_of_non_coinvariant_compression(self):
        basis, S = truncated_shift(table_for(KernelSpec.drury_arveson(2), 2), 2, 2)
        Q = np.eye(basis.dim)[:, [1, 2, 4]]  # z1, z2, z1 z2: not coinvariant
        T = compress(S, Q)
        assert T.commutator_norm >= 0


class TestOperatorTuple:
    def test_rejects_noncommuting(self):
        with pytest.raises(ParameterDomainError):
            OperatorTuple((jordan(2), jordan(2).T))

    def test_text_roundtrip(self):
        rng = np.random.default_rng(1)
        T = random_nilpotent_tuple(rng, 2, 4, 0.7)
        back = OperatorTuple.from_text(T.to_text(), commutator_tol=1e-9)
        for A, B in zip(T, back):
            np.testing.assert_array_equal(A, B)

    def test_nilpotency_order(self):
        _, S = truncated_shift(table_for(KernelSpec.drury_arveson(2), 3), 2, 3)
        assert nilpotency_order(S) == 4
        with pytest.raises(NilpotencyError):
            nilpotency_order(OperatorTuple((np.eye(2),)))

    def test_graded_products_match_direct_powers(self):
        rng = np.random.default_rng(2)
        T = random_nilpotent_tuple(rng, 3, 5, 0.9)
        for n, level in monomial_levels(T, 4):
            for alpha, P in level.items():
                np.testing.assert_allclose(P, monomial_power(T, alpha), atol=1e-13)


class TestHereditary:
    def test_hardy_shift_gives_projection(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        H = hereditary_1k(S, table_for(HARDY, 2))
        np.testing.assert_allclose(H.matrix, np.diag([1, 0, 0]), atol=1e-15)
        assert H.tail_status == "exact" and H.psd

    def test_bergman_on_hardy_shift(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        H = hereditary_1k(S, table_for(KernelSpec.bergman(), 2))
        np.testing.assert_allclose(H.matrix, np.diag([1, -1, 0]), atol=1e-15)
        assert H.min_eigenvalue == pytest.approx(-1, abs=1e-12)
        assert H.verdict == "not_psd"

    def test_dirichlet_restriction_spectrum(self):
        table = table_for(DIRICHLET, 2)
        basis, S = truncated_shift(table, 1, 2)
        H = hereditary_1k(compress(S, positive_degree_subspace(basis)), table)
        np.testing.assert_allclose(H.eigenvalues, [0.25, 1.0], atol=1e-14)

    def test_restriction_spectrum_exact_oracle(self):
        # d = 1: b_m / a_m from exact arithmetic
        a = dirichlet_a(6)
        b = invert(a)
        table = table_for(DIRICHLET, 6)
        basis, S = truncated_shift(table, 1, 6)
        H = hereditary_1k(compress(S, positive_degree_subspace(basis)), table)
        expected = sorted(float(b[m] / a[m]) for m in range(1, 7))
        np.testing.assert_allclose(H.eigenvalues, expected, atol=1e-13)
        assert b[3] / a[3] == Fraction(1, 6)

    def test_restriction_multiplicities(self):
        table = table_for(KernelSpec("besov_sobolev", 2, sigma=0.5), 3)
        basis, S = truncated_shift(table, 2, 3)
        H = hereditary_1k(compress(S, positive_degree_subspace(basis)), table)
        expected = np.sort(np.concatenate(
            [np.full(count_degree(m, 2), table.b[m] / table.a[m]) for m in (1, 2, 3)]))
        np.testing.assert_allclose(H.eigenvalues, expected, atol=1e-12)

    def test_auto_mode_needs_nilpotent(self):
        with pytest.raises(NilpotencyError):
            hereditary_1k(OperatorTuple((0.5 * np.eye(2),)), table_for(HARDY, 5))

    def test_order_beyond_table(self):
        with pytest.raises(TruncationError):
            hereditary_1k(OperatorTuple((0.5 * np.eye(2),)), table_for(HARDY, 5), M=6)

    def test_explicit_order_tail(self):
        T = OperatorTuple((0.5 * np.eye(2),))
        H = hereditary_1k(T, table_for(HARDY, 20), M=20)
        np.testing.assert_allclose(H.matrix, 0.75 * np.eye(2))
        assert H.tail_status == "bounded" and H.tail_bound == 0.0
        H = hereditary_1k(T, table_for(DIRICHLET, 20), M=20)
        assert H.tail_status == "bounded" and 0 < H.tail_bound < 0.5 ** 42
        H = hereditary_1k(OperatorTuple((np.eye(2),)), table_for(DIRICHLET, 20), M=20)
        assert H.tail_status == "inconclusive" and H.tail_bound is None

    def test_tree_and_recursion_agree(self):
        rng = np.random.default_rng(3)
        T = random_nilpotent_tuple(rng, 2, 5, 0.8)
        table = table_for(DIRICHLET, 8)
        A = hereditary_1k(T, table, M=8, method="tree")
        B = hereditary_1k(T, table, M=8, method="recursive")
        np.testing.assert_allclose(A.matrix, B.matrix, atol=1e-13)

    def test_report_fields(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        rep = hereditary_1k(S, table_for(HARDY, 2)).report(inputs={"case": "hardy"})
        assert {"operation", "inputs", "min_eigenvalue", "tolerance", "verdict"} <= rep.keys()


@pytest.mark.parametrize("name,params", CNP_FAMILIES + (("bergman_disc", {}),))
@pytest.mark.parametrize("d", [1, 2, 3])
def test_projection_onto_constants(name, params, d):
    N = 4 if d < 3 else 3
    table = table_for(family_spec(name, params, d), N)
    basis, S = truncated_shift(table, d, N)
    H = hereditary_1k(S, table)
    P = np.zeros((basis.dim, basis.dim))
    P[0, 0] = 1
    assert np.linalg.norm(H.matrix - P, 2) <= 1e-10


class TestTechnicalIdentity:
    def test_examples(self):
        t = table_for(HARDY, 4)
        res, f = technical_identity_check(build_basis(t, 1, 4), t, 1, HomogeneousPolynomial.monomial((2,)))
        assert res < 1e-15 and f == 1
        t = table_for(KernelSpec.drury_arveson(2), 4)
        res, f = technical_identity_check(build_basis(t, 2, 4), t, 1, HomogeneousPolynomial.monomial((1, 1)))
        assert res < 1e-15 and f == 1
        t = table_for(DIRICHLET, 5)
        res, f = technical_identity_check(build_basis(t, 1, 5), t, 2, HomogeneousPolynomial.monomial((3,)))
        assert res < 1e-14 and f == pytest.approx(2)

    def test_out_of_range(self):
        t = table_for(HARDY, 3)
        with pytest.raises(TruncationError):
            technical_identity_check(build_basis(t, 1, 3), t, 1, HomogeneousPolynomial.monomial((4,)))

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(CNP_FAMILIES + (("bergman_disc", {}),)), st.integers(1, 3),
           st.integers(1, 5), st.integers(0, 2**31 - 1))
    def test_random_polynomials(self, fam, d, m, seed):
        name, params = fam
        table = table_for(family_spec(name, params, d), 5)
        basis = build_basis(table, d, 5)
        rng = np.random.default_rng(seed)
        idx = list(compositions(m, d))
        p = HomogeneousPolynomial.from_vector(basis, m, rng.standard_normal(len(idx))
                                              + 1j * rng.standard_normal(len(idx)))
        for n in range(1, m + 1):
            res, factor = technical_identity_check(basis, table, n, p)
            assert res <= 1e-10
            assert factor == table.a[m - n] / table.a[m]


class TestPsiRow:
    def test_hardy_shift(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        row = psi_row(S, table_for(HARDY, 2))
        np.testing.assert_allclose(row.row_sum, np.diag([0, 1, 1]), atol=1e-15)
        assert row.max_eigenvalue == pytest.approx(1)

    def test_zero_tuple(self):
        row = psi_row(OperatorTuple.zero(2, 3), table_for(HARDY, 3))
        assert np.all(row.row_sum == 0) and row.max_eigenvalue == 0

    def test_spherical_unitary_partial_sums(self):
        U = spherical_unitary(sphere_samples(2, 4, seed=1))
        table = table_for(KernelSpec.dirichlet(2), 1000)
        prev = 0.0
        for M in (10, 100, 1000):
            row = psi_row(U, table, M=M)
            lam = float(np.sum(table.b[1:M + 1]))
            np.testing.assert_allclose(row.row_sum, lam * np.eye(4), atol=1e-12)
            assert prev < row.max_eigenvalue < 1
            prev = row.max_eigenvalue

    def test_requires_cnp(self):
        _, S = truncated_shift(table_for(HARDY, 3), 1, 3)
        with pytest.raises(CNPViolationError):
            psi_row(S, table_for(KernelSpec.bergman(), 3))

    def test_terms(self):
        table = table_for(KernelSpec.drury_arveson(2), 2)
        _, S = truncated_shift(table, 2, 2)
        row = psi_row(S, table)
        assert set(row.terms) == {(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}
        # b_2 = 0 for this kernel, so the degree-2 entries vanish
        assert all(np.all(row.terms[al] == 0) for al in [(2, 0), (1, 1), (0, 2)])


class TestJointSpectrum:
    def test_diagonal(self):
        js = joint_eigenvalues(OperatorTuple((np.diag([0.1]), np.diag([0.2]))))
        np.testing.assert_allclose(js.points, [[0.1, 0.2]])

    def test_nilpotent_shift(self):
        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        js = joint_eigenvalues(S)
        assert js.max_norm == 0 and js.points.shape == (3, 1)

    def test_spherical_unitary(self):
        pts = sphere_samples(2, 5, seed=3)
        js = joint_eigenvalues(spherical_unitary(pts))
        got = sorted(map(tuple, np.round(js.points, 12)), key=lambda p: (p[0].real, p[0].imag))
        want = sorted(map(tuple, np.round(pts, 12)), key=lambda p: (p[0].real, p[0].imag))
        np.testing.assert_allclose(np.array(got), np.array(want), atol=1e-11)
        assert js.max_norm == pytest.approx(1)

    def test_repeated_eigenvalues_after_rotation(self):
        D = OperatorTuple((np.diag([0.1, 0.2, 0.3, 0.1]), np.diag([0.3, 0.1, 0.3, 0.3])))
        U = unitary_group.rvs(4, random_state=5)
        js = joint_eigenvalues(D.conjugated(U))
        got = sorted(tuple(np.round(p.real, 9)) for p in js.points)
        assert got == sorted([(0.1, 0.3), (0.2, 0.1), (0.3, 0.3), (0.1, 0.3)])

    @pytest.mark.parametrize("seed", range(5))
    def test_rotated_compressed_shift(self, seed):
        table = table_for(KernelSpec.dirichlet(2), 4)
        basis, S = truncated_shift(table, 2, 4)
        comp = complement_basis(HomogeneousIdeal.monomial_ideal(2, [(1, 1)]), basis)
        T = compress(S, comp.embedding()).scaled(0.9)
        T = T.conjugated(unitary_group.rvs(T.size, random_state=seed))
        js = joint_eigenvalues(T)
        assert js.residual < 1e-10 and js.max_norm < 1e-6

    def test_noncommuting_input(self):
        T = OperatorTuple.measured([jordan(2), jordan(2).T])
        with pytest.raises(DegeneracyError):
            joint_eigenvalues(T)


class TestDiagnostics:
    def test_defect_hardy(self):
        _, S = truncated_shift(table_for(HARDY, 3), 1, 3)
        np.testing.assert_allclose(defect_operator(S).eigenvalues, [0, 0, 0, 1], atol=1e-15)

    def test_defect_spherical_unitary(self):
        U = spherical_unitary(sphere_samples(3, 4))
        assert np.linalg.norm(defect_operator(U).matrix) < 1e-15

    def test_defect_interior_degrees(self):
        table = table_for(DIRICHLET, 5)
        basis, S = truncated_shift(table, 1, 5)
        per = defect_operator(S, basis.degrees).per_degree
        assert per[0][0] == pytest.approx(1)
        for m in range(1, 5):
            assert per[m][0] == pytest.approx(1 - table.a[m - 1] / table.a[m], abs=1e-14)
        # m=2 in closed form: 1 - 3/2
        assert per[2][0] == pytest.approx(-0.5)

    def test_defect_of_direct_sum_block(self):
        from rkhslab.dilation import direct_sum

        _, S = truncated_shift(table_for(HARDY, 2), 1, 2)
        D = defect_operator(direct_sum(S, spherical_unitary([[1.0]]))).matrix
        np.testing.assert_allclose(D, np.diag([1, 0, 0, 0]), atol=1e-15)

    def test_commutator_tails(self):
        basis, S = truncated_shift(table_for(HARDY, 6), 1, 6)
        tail = commutator_tail_norms(S, basis.degrees)
        assert tail.values[0] == pytest.approx(1)
        np.testing.assert_allclose(tail.values[1:], 0, atol=1e-15)
        assert tail.boundary == pytest.approx(1)
        basis, S = truncated_shift(table_for(KernelSpec.drury_arveson(2), 6), 2, 6)
        vals = commutator_tail_norms(S, basis.degrees).values
        np.testing.assert_allclose(vals[1:], 1 / np.arange(2, 7), rtol=1e-12)
        U = spherical_unitary(sphere_samples(2, 3))
        np.testing.assert_allclose(commutator_tail_norms(U, [0, 1, 2]).values, 0, atol=1e-15)

    def test_toeplitz_defect(self):
        td = toeplitz_defect(table_for(HARDY, 6), None, 1, 6)
        assert np.all(td.magnitudes == 0)
        td = toeplitz_defect(table_for(DIRICHLET, 6), None, 1, 6)
        assert td.magnitudes[0] == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
        assert td.residual < 1e-12
        td = toeplitz_defect(table_for(KernelSpec.bergman(), 8), None, 1, 8)
        n = np.arange(8)
        np.testing.assert_allclose(td.factors, np.sqrt((n + 1) / (n + 2)) - 1, atol=1e-15)

    def test_toeplitz_mismatch(self):
        with pytest.raises(ParameterDomainError):
            toeplitz_defect(table_for(HARDY, 3), table_for(HARDY, 2), 1, 3)

    def test_multiplier_norms(self):
        for n in range(1, 5):
            mn = sampled_multiplier_power_norm(table_for(HARDY, 6), 1, 6, n)
            assert mn.norm == pytest.approx(1) and mn.target == 1
        mn = sampled_multiplier_power_norm(table_for(DIRICHLET, 10), 1, 10, 2)
        assert mn.norm == pytest.approx(math.sqrt(3)) and mn.target == pytest.approx(math.sqrt(3))
        mn = monomial_multiplier_norm(table_for(KernelSpec.drury_arveson(2), 4), 2, 4, (1, 1))
        assert mn.norm ** 2 == pytest.approx(0.5) and mn.target ** 2 == pytest.approx(0.5)
        assert sup_norm_on_samples((1, 1), sphere_samples(2, 2000)) ** 2 < 0.2501

    @pytest.mark.parametrize("name,params", CNP_FAMILIES)
    def test_truncated_norm_attains_target(self, name, params):
        # a_m / a_{m+n} is largest at m = 0 for these families
        table = table_for(family_spec(name, params, 1), 8)
        for n in range(1, 8):
            mn = sampled_multiplier_power_norm(table, 1, 8, n)
            assert mn.norm == pytest.approx(mn.target, rel=1e-12)

    def test_bergman_truncated_norm_exceeds_coefficient_bound(self):
        # increasing a_n: the ratio peaks at the top of the truncation
        mn = sampled_multiplier_power_norm(table_for(KernelSpec.bergman(), 8), 1, 8, 1)
        assert mn.norm == pytest.approx(math.sqrt(8 / 9)) and mn.gap < 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(CNP_FAMILIES), st.integers(1, 2),
       st.floats(0.0, 1.0))
def test_scaling_keeps_positivity(seed, fam, d, r):
    rng = np.random.default_rng(seed)
    name, params = fam
    table = table_for(family_spec(name, params, d), 5)
    T = random_nilpotent_tuple(rng, d, 5, float(rng.uniform(0.1, 1.2)))
    if hereditary_1k(T, table).min_eigenvalue >= -1e-10:
        assert hereditary_1k(T.scaled(r), table).min_eigenvalue >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(CNP_FAMILIES), st.integers(1, 2))
def test_psi_and_hereditary_agree(seed, fam, d):
    rng = np.random.default_rng(seed)
    name, params = fam
    table = table_for(family_spec(name, params, d), 5)
    T = random_nilpotent_tuple(rng, d, int(rng.integers(2, 6)), float(rng.uniform(0.1, 1.5)))
    H = hereditary_1k(T, table)
    row = psi_row(T, table)
    np.testing.assert_allclose(H.matrix, np.eye(T.size) - row.row_sum, atol=1e-12)
    assert (H.min_eigenvalue >= -1e-10) == (row.max_eigenvalue <= 1 + 1e-10)
