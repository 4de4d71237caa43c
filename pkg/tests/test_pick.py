import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkhslab.errors import (
    DegenerateSampleError,
    NonHermitianError,
    NotPSDError,
    ParameterDomainError,
    PointDomainError,
    SingularKernelError,
)
from rkhslab.experiments import hardy_two_node_oracle, two_node_problem, two_node_threshold
from rkhslab.kernels import CoeffTable, KernelSpec, kernel_gram
from rkhslab.linalg import is_psd
from rkhslab.pick import (
    PickProblem,
    ball_samples,
    gram_factor,
    kernel_quotient_gram,
    negative_principal_minor,
    pick_matrix,
    sampled_multiplier_norm,
    sphere_samples,
)

HARDY = KernelSpec.hardy()
BERGMAN = KernelSpec.bergman()


class TestPickMatrix:
    @pytest.mark.parametrize("w,psd", [(0.5, True), (1.0, True), (1.01, False)])
    def test_single_node(self, w, psd):
        P = pick_matrix(PickProblem.scalar([[0.0]], [w]), HARDY, 5)
        assert P[0, 0] == pytest.approx(1 - w * w)
        assert is_psd(P).psd is psd

    def test_two_nodes_determinant_oracle(self):
        for w in (0.3, 0.49, 0.5, 0.51, 0.8):
            P = pick_matrix(two_node_problem(0.5, w), HARDY, 200)
            det = 4 / 3 * (1 - w * w) - 1
            assert np.linalg.det(P).real == pytest.approx(det, abs=1e-12)
            assert is_psd(P).psd == (det >= -1e-12)

    def test_matrix_targets_infeasible(self):
        prob = PickProblem([[0.0], [0.5]], [np.zeros((2, 2)), np.eye(2)])
        P = pick_matrix(prob, HARDY, 200)
        assert P.shape == (4, 4)
        assert not is_psd(P).psd

    def test_zero_targets_give_gram(self):
        pts = ball_samples(2, 6, seed=4)
        prob = PickProblem(pts, np.zeros((6, 1, 1)))
        G = kernel_gram(KernelSpec.drury_arveson(2), pts, 300)
        np.testing.assert_allclose(pick_matrix(prob, KernelSpec.drury_arveson(2), 300), G)
        assert np.linalg.eigvalsh(G)[0] > 0

    def test_json_ingest(self):
        text = '{"d":1, "nodes":[[0.0,0.0]], "r":1, "targets":[[[0.5,0.0]]]}'
        prob = PickProblem.from_json(text)
        assert prob.nodes.shape == (1, 1) and prob.targets[0, 0, 0] == 0.5
        assert PickProblem.from_dict(prob.to_dict()).targets[0, 0, 0] == 0.5

    def test_domain_errors(self):
        with pytest.raises(PointDomainError):
            PickProblem.scalar([[1.0]], [0.0])
        with pytest.raises(ParameterDomainError):
            PickProblem.scalar([[0.1], [0.1]], [0.0, 0.0])
        with pytest.raises(ParameterDomainError):
            PickProblem([[0.1]], np.zeros((2, 1, 1)))


class TestIsPsd:
    def test_examples(self):
        v = is_psd(np.eye(3))
        assert v.psd and v.min_eigenvalue == 1
        assert not is_psd(np.diag([1.0, -1.0])).psd
        v = is_psd(np.diag([1.0, -1.0, 0.0]))
        assert v.verdict == "not_psd" and v.min_eigenvalue == -1

    def test_relative_tolerance(self):
        assert is_psd(np.diag([1e6, -1e-5])).psd
        assert not is_psd(np.diag([1.0, -1e-5])).psd

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            is_psd(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestQuotient:
    def test_bergman_over_hardy_is_hardy_kernel(self):
        pts = ball_samples(1, 50, seed=0)
        q = kernel_quotient_gram(BERGMAN, HARDY, pts, 400)
        np.testing.assert_allclose(q.matrix, kernel_gram(HARDY, pts, 400), atol=1e-10)
        assert q.verdict.psd

    def test_hardy_over_bergman_two_points(self):
        r = 0.6
        q = kernel_quotient_gram(HARDY, BERGMAN, [0.0, r], 400)
        assert np.linalg.det(q.matrix).real == pytest.approx(-r * r, abs=1e-10)
        assert not q.verdict.psd
        minor = negative_principal_minor(q.matrix)
        assert minor.certified_negative

    def test_identical_kernels(self):
        q = kernel_quotient_gram(HARDY, HARDY, ball_samples(1, 7), 100)
        np.testing.assert_allclose(q.matrix, np.ones((7, 7)), atol=1e-14)
        assert q.verdict.psd

    def test_vanishing_denominator(self):
        odd = CoeffTable(np.array([1.0, 4.0]))
        with pytest.raises(SingularKernelError):
            kernel_quotient_gram(HARDY, odd, [0.5, -0.5], 1)


class TestGramFactor:
    def test_examples(self):
        f = gram_factor(np.ones((4, 4)))
        assert f.rank == 1
        np.testing.assert_allclose(np.abs(f.F[:, 0]), 1)
        G = kernel_gram(HARDY, [0.0, 0.5], 200)
        f = gram_factor(G)
        assert f.rank == 2 and f.residual <= 1e-12
        assert gram_factor(np.diag([1.0, 0.0])).rank == 1

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            gram_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 200), st.integers(1, 30), st.integers(0, 2**31 - 1))
    def test_roundtrip(self, n, rank, seed):
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n, min(rank, n))) + 1j * rng.standard_normal((n, min(rank, n)))
        G = X @ X.conj().T
        f = gram_factor(G)
        assert np.linalg.norm(f.F @ f.F.conj().T - G, 2) <= 1e-10 * np.linalg.norm(G, 2)


class TestMultiplierNorm:
    def test_constant(self):
        pts = ball_samples(1, 8)
        t = sampled_multiplier_norm(np.full(8, 0.7 - 0.2j), HARDY, pts, 300)
        assert t == pytest.approx(abs(0.7 - 0.2j), rel=1e-8)

    def test_hardy_identity_function(self):
        previous = 0.0
        for count in (3, 6, 10):
            pts = ball_samples(1, count, rmax=0.95, seed=2)
            t = sampled_multiplier_norm(pts[:, 0], HARDY, pts, 800)
            assert t <= 1 + 1e-8
            previous = max(previous, t)
        assert previous > 0.9

    def test_dirichlet_square_below_limit(self):
        D = KernelSpec.dirichlet()
        pts = ball_samples(1, 10, rmax=0.95, seed=5)
        t = sampled_multiplier_norm(pts[:, 0] ** 2, D, pts, 800)
        assert 1 < t <= math.sqrt(3) + 1e-8

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSampleError):
            sampled_multiplier_norm([0.1, 0.1], HARDY, [0.3, 0.3 + 1e-12], 100)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_monotone_under_enlargement(self, seed):
        rng = np.random.default_rng(seed)
        pts = ball_samples(1, 8, seed=int(rng.integers(1000)))
        phi = lambda z: 0.5 * z[:, 0] ** 2 - 0.3 * z[:, 0]
        small = sampled_multiplier_norm(phi(pts[:4]), HARDY, pts[:4], 400)
        large = sampled_multiplier_norm(phi(pts), HARDY, pts, 400)
        assert small <= large + 1e-8

    def test_schur_product_direction(self):
        # bergman/hardy is psd, so multiplier norms for bergman are below hardy's
        pts = ball_samples(1, 8, seed=7)
        for phi in (pts[:, 0], pts[:, 0] ** 3, 0.4 + 0.5 * pts[:, 0]):
            tb = sampled_multiplier_norm(phi, BERGMAN, pts, 400)
            th = sampled_multiplier_norm(phi, HARDY, pts, 400)
            assert tb <= th + 1e-8


class TestSamplesAndThreshold:
    def test_sphere_and_ball(self):
        S = sphere_samples(3, 100, seed=1)
        np.testing.assert_allclose(np.linalg.norm(S, axis=1), 1, atol=1e-14)
        B = ball_samples(2, 100, rmax=0.8, seed=1)
        assert np.all(np.linalg.norm(B, axis=1) <= 0.8)
        np.testing.assert_array_equal(sphere_samples(3, 10, seed=1), sphere_samples(3, 10, seed=1))

    def test_two_node_threshold(self):
        assert two_node_threshold(HARDY, 0.5, 200) == pytest.approx(0.5, abs=1e-6)
        assert two_node_threshold(HARDY, 0.3, 200) == pytest.approx(hardy_two_node_oracle(0.3), abs=1e-6)

    def test_not_psd_stays_not_psd_when_nodes_added(self):
        rng = np.random.default_rng(11)
        pts = ball_samples(1, 8, seed=3)
        vals = rng.uniform(0.5, 1.0, 8) * np.exp(2j * np.pi * rng.uniform(size=8))
        for k in range(2, 8):
            small = is_psd(pick_matrix(PickProblem.scalar(pts[:k], vals[:k]), HARDY, 300))
            large = is_psd(pick_matrix(PickProblem.scalar(pts[:k + 1], vals[:k + 1]), HARDY, 300))
            if not small.psd:
                assert not large.psd
