"""Local Gram assembly and the corrected predictors against explicit-inverse oracles."""

import numpy as np
import pytest

from gpnn.kernels import KernelSpec
from gpnn.local_gp import (
    HyperParams,
    assemble_local_system,
    batch_predict,
    gamma_factor,
    golub_perturbation_bound,
    limit_deviation_ratio,
    limit_inverse,
    predict_gpnn,
    predict_nngp,
)
from gpnn.neighbors import build_index, knn, pairwise_distance_stack

KERNEL = KernelSpec.matern(1.5)
THETA = HyperParams(noise_var=0.2, kernel_scale=1.0, lengthscale=0.7)


def random_instance(rng, m=8, d=3, theta=THETA, kernel=KERNEL):
    pts = rng.normal(size=(60, d))
    q = rng.normal(size=d)
    ns = knn(build_index(pts), q, m)
    sys = assemble_local_system(q, ns, pts, kernel, theta)
    y = rng.normal(size=m)
    return q, ns, sys, y, pts


def oracle_predict(sys, y, gamma_correction=True):
    """Explicit matrix inverse, used only here as an independent oracle."""
    inv = np.linalg.inv(sys.gram)
    factor = sys.gamma if gamma_correction else 1.0
    mean = factor * sys.cross @ inv @ y
    var = sys.prior_var - sys.cross @ inv @ sys.cross
    return mean, var


class TestHyperParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            HyperParams(noise_var=0.1, kernel_scale=0.0, lengthscale=1.0)
        with pytest.raises(ValueError):
            HyperParams(noise_var=0.1, kernel_scale=1.0, lengthscale=-1.0)
        with pytest.raises(ValueError):
            HyperParams(noise_var=-0.1, kernel_scale=1.0, lengthscale=1.0)

    def test_config_round_trip(self):
        theta = HyperParams(noise_var=0.1, kernel_scale=2.0, lengthscale=0.5, beta=[1.0, -2.0])
        back = HyperParams.from_config(theta.to_config())
        assert back.noise_var == theta.noise_var
        np.testing.assert_array_equal(back.beta, theta.beta)


class TestGammaFactor:
    def test_unit_case(self):
        assert gamma_factor(1, HyperParams(1.0, 1.0, 1.0)) == 2.0

    def test_noise_free_is_one(self):
        for m in (1, 5, 100):
            assert gamma_factor(m, HyperParams(0.0, 1.3, 1.0)) == 1.0

    def test_direct_arithmetic(self):
        assert gamma_factor(100, HyperParams(0.2, 1.0, 1.0)) == pytest.approx(1.002)

    def test_rejects_zero_m(self):
        with pytest.raises(ValueError):
            gamma_factor(0, THETA)


class TestAssembleLocalSystem:
    def test_single_coincident_neighbor(self):
        pts = np.array([[1.0, 2.0]])
        ns = knn(build_index(pts), pts[0], 1)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        assert sys.gram == pytest.approx(np.array([[1.2]]))
        assert sys.cross == pytest.approx(np.array([1.0]))

    def test_coincident_neighbors_limit_form(self):
        pts = np.tile([0.3, -0.4], (3, 1))
        ns = knn(build_index(pts), pts[0], 3)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        expected = THETA.noise_var * np.eye(3) + THETA.kernel_scale * np.ones((3, 3))
        np.testing.assert_allclose(sys.gram, expected, atol=1e-12)

    def test_random_instance_symmetric_and_well_conditioned(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            _, _, sys, _, _ = random_instance(rng)
            np.testing.assert_array_equal(sys.gram, sys.gram.T)
            eigs = np.linalg.eigvalsh(sys.gram)
            assert eigs.min() >= THETA.noise_var - 1e-10

    def test_jitter_recorded_when_noise_free(self):
        theta = HyperParams(noise_var=0.0, kernel_scale=1.0, lengthscale=0.7)
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(20, 2))
        ns = knn(build_index(pts), np.zeros(2), 5)
        sys = assemble_local_system(np.zeros(2), ns, pts, KERNEL, theta)
        assert sys.jitter == pytest.approx(1e-10)
        np.linalg.cholesky(sys.gram)  # PD after jitter


class TestPredictGpnn:
    def test_single_coincident_neighbor_recovers_response(self):
        pts = np.array([[0.5, 0.5]])
        ns = knn(build_index(pts), pts[0], 1)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        pred = predict_gpnn(pts[0], ns, np.array([3.7]), sys)
        assert pred.mean == pytest.approx(3.7, abs=1e-12)

    def test_coincident_neighbors_mean_and_variance(self):
        m = 4
        pts = np.tile([0.1, 0.9], (m, 1))
        ns = knn(build_index(pts), pts[0], m)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        y = np.array([1.0, 2.0, 3.0, 6.0])
        pred = predict_gpnn(pts[0], ns, y, sys)
        assert pred.mean == pytest.approx(y.mean(), abs=1e-9)
        gamma = gamma_factor(m, THETA)
        assert pred.variance == pytest.approx(THETA.noise_var * (1 + 1 / (m * gamma)), abs=1e-9)

    def test_matches_explicit_inverse_oracle(self):
        rng = np.random.default_rng(20)
        for _ in range(200):
            _, ns, sys, y, _ = random_instance(rng, m=int(rng.integers(1, 12)))
            pred = predict_gpnn(None, ns, y, sys)
            mean_o, var_o = oracle_predict(sys, y)
            assert pred.mean == pytest.approx(mean_o, rel=1e-10, abs=1e-12)
            assert pred.variance == pytest.approx(var_o, rel=1e-10)

    def test_gamma_flag_disables_correction(self):
        rng = np.random.default_rng(21)
        _, ns, sys, y, _ = random_instance(rng)
        corrected = predict_gpnn(None, ns, y, sys)
        plain = predict_gpnn(None, ns, y, sys, gamma_correction=False)
        assert corrected.mean == pytest.approx(plain.mean * sys.gamma, rel=1e-12)
        assert corrected.variance == plain.variance

    def test_misaligned_responses_rejected(self):
        rng = np.random.default_rng(22)
        _, ns, sys, y, _ = random_instance(rng)
        with pytest.raises(ValueError):
            predict_gpnn(None, ns, y[:-1], sys)

    def test_variance_bracket(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            theta = HyperParams(
                noise_var=float(rng.uniform(0.01, 1.0)),
                kernel_scale=float(rng.uniform(0.2, 3.0)),
                lengthscale=float(rng.uniform(0.3, 2.0)),
            )
            _, ns, sys, y, _ = random_instance(rng, m=int(rng.integers(1, 10)), theta=theta)
            pred = predict_gpnn(None, ns, y, sys)
            assert theta.noise_var - 1e-10 <= pred.variance <= theta.noise_var + theta.kernel_scale + 1e-10

    def test_calibration_invariance_of_mean_and_scaling_of_variance(self):
        rng = np.random.default_rng(24)
        for alpha in (0.3, 2.0, 11.0):
            q, ns, sys, y, pts = random_instance(rng)
            scaled = HyperParams(
                noise_var=alpha * THETA.noise_var,
                kernel_scale=alpha * THETA.kernel_scale,
                lengthscale=THETA.lengthscale,
            )
            sys2 = assemble_local_system(q, ns, pts, KERNEL, scaled)
            before = predict_gpnn(q, ns, y, sys)
            after = predict_gpnn(q, ns, y, sys2)
            assert after.mean == pytest.approx(before.mean, rel=1e-12, abs=1e-12)
            assert after.variance == pytest.approx(alpha * before.variance, rel=1e-12)


class TestPredictNngp:
    def test_zero_beta_reduces_to_gpnn(self):
        rng = np.random.default_rng(30)
        theta = THETA.replace(beta=np.zeros(2))
        q, ns, sys, y, pts = random_instance(rng, theta=theta)
        t_star = rng.normal(size=2)
        t_neighbors = rng.normal(size=(len(ns.indices), 2))
        a = predict_nngp(q, ns, y, t_star, t_neighbors, sys, theta)
        b = predict_gpnn(q, ns, y, sys)
        assert a.mean == pytest.approx(b.mean, rel=1e-12)
        assert a.variance == pytest.approx(b.variance, rel=1e-12)

    def test_noise_free_linear_field_at_coincident_points(self):
        beta = np.array([2.0, -1.0])
        theta = HyperParams(noise_var=0.0, kernel_scale=1.0, lengthscale=0.7, beta=beta)
        m = 3
        pts = np.tile([0.2, 0.4], (m, 1))
        ns = knn(build_index(pts), pts[0], m)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, theta)
        t_neighbors = np.tile([0.04, 0.16], (m, 1))
        y = t_neighbors @ beta
        pred = predict_nngp(pts[0], ns, y, t_neighbors[0], t_neighbors, sys, theta)
        assert pred.mean == pytest.approx(t_neighbors[0] @ beta, abs=1e-8)

    def test_matches_explicit_inverse_oracle(self):
        rng = np.random.default_rng(31)
        theta = THETA.replace(beta=np.array([0.7, -0.2]))
        for _ in range(100):
            q, ns, sys, y, pts = random_instance(rng, m=int(rng.integers(1, 10)), theta=theta)
            m = len(ns.indices)
            t_star = rng.normal(size=2)
            t_neighbors = rng.normal(size=(m, 2))
            pred = predict_nngp(q, ns, y, t_star, t_neighbors, sys, theta)
            inv = np.linalg.inv(sys.gram)
            mean_o = t_star @ theta.beta + sys.gamma * sys.cross @ inv @ (y - t_neighbors @ theta.beta)
            assert pred.mean == pytest.approx(mean_o, rel=1e-10, abs=1e-12)

    def test_shape_mismatch_rejected(self):
        rng = np.random.default_rng(32)
        theta = THETA.replace(beta=np.array([1.0]))
        q, ns, sys, y, pts = random_instance(rng, theta=theta)
        with pytest.raises(ValueError):
            predict_nngp(q, ns, y, np.zeros(2), np.zeros((len(ns.indices), 1)), sys, theta)
        with pytest.raises(ValueError):
            predict_nngp(q, ns, y, np.zeros(1), np.zeros((len(ns.indices), 2)), sys, theta)


class TestLimitInverse:
    def test_inverse_identity(self):
        for m in (1, 2, 7):
            k_inf = THETA.noise_var * np.eye(m) + THETA.kernel_scale * np.ones((m, m))
            inv = limit_inverse(m, THETA)
            np.testing.assert_allclose(k_inf @ inv, np.eye(m), atol=1e-12)

    def test_one_norm_of_limit_matrix(self):
        for m in (1, 3, 10):
            k_inf = THETA.noise_var * np.eye(m) + THETA.kernel_scale * np.ones((m, m))
            assert np.max(np.abs(k_inf).sum(axis=0)) == pytest.approx(
                THETA.noise_var + m * THETA.kernel_scale
            )
        # the reciprocal identity for the inverse holds at m = 1
        inv = limit_inverse(1, THETA)
        assert np.abs(inv).sum() == pytest.approx(1.0 / (THETA.noise_var + THETA.kernel_scale))

    def test_coincident_gram_inverse_matches_closed_form(self):
        m = 5
        pts = np.tile([1.0, -1.0], (m, 1))
        ns = knn(build_index(pts), pts[0], m)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        np.testing.assert_allclose(np.linalg.inv(sys.gram), limit_inverse(m, THETA), rtol=1e-9, atol=1e-9)

    def test_zero_noise_rejected(self):
        with pytest.raises(ValueError):
            limit_inverse(3, HyperParams(0.0, 1.0, 1.0))


class TestGramLimitDeviation:
    def test_sound_golub_bound_holds_on_random_systems(self):
        rng = np.random.default_rng(40)
        pts = rng.uniform(-1, 1, size=(4000, 2))
        index = build_index(pts)
        checked = 0
        for _ in range(200):
            theta = HyperParams(
                noise_var=float(rng.uniform(0.05, 1.0)),
                kernel_scale=1.0,
                lengthscale=float(rng.uniform(1.0, 3.0)),
            )
            q = rng.uniform(-1, 1, size=2)
            ns = knn(index, q, int(rng.integers(2, 9)))
            sys = assemble_local_system(q, ns, pts, KERNEL, theta)
            bound = golub_perturbation_bound(sys, theta)
            if not np.isfinite(bound):
                continue
            checked += 1
            assert limit_deviation_ratio(sys, theta) <= bound + 1e-12
        assert checked > 150

    def test_deviation_vanishes_for_coincident_neighbors(self):
        m = 4
        pts = np.tile([0.0, 1.0], (m, 1))
        ns = knn(build_index(pts), pts[0], m)
        sys = assemble_local_system(pts[0], ns, pts, KERNEL, THETA)
        assert limit_deviation_ratio(sys, THETA) == pytest.approx(0.0, abs=1e-10)


class TestConsistencyLimit:
    def test_shrinking_neighbors_drives_prediction_to_limits(self):
        rng = np.random.default_rng(50)
        m = 6
        base = rng.normal(size=(m, 2))
        q = np.zeros(2)
        y = rng.normal(size=m)
        gamma = gamma_factor(m, THETA)
        limit_var = THETA.noise_var * (1 + 1 / (m * gamma))
        gaps = []
        for s in np.linspace(1.0, 1e-3, 25):
            pts = q + s * (base - q)
            ns = knn(build_index(pts), q, m)
            sys = assemble_local_system(q, ns, pts, KERNEL, THETA)
            pred = predict_gpnn(q, ns, y, sys)
            gaps.append(abs(pred.variance - limit_var))
        assert gaps[-1] < 1e-5
        assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))
        # the mean approaches the plain average of the responses
        assert pred.mean == pytest.approx(y.mean(), abs=1e-4)


class TestBatchPredict:
    def test_agrees_with_per_point_path(self):
        rng = np.random.default_rng(60)
        n_q, m, d = 40, 7, 3
        pts = rng.normal(size=(300, d))
        queries = rng.normal(size=(n_q, d))
        index = build_index(pts)
        dists, idxs = index.query_batch(queries, m)
        pair = pairwise_distance_stack(pts[idxs])
        resp = rng.normal(size=(n_q, m))
        means, variances = batch_predict(pair, dists, resp, KERNEL, THETA)
        for i in range(n_q):
            ns = knn(index, queries[i], m)
            sys = assemble_local_system(queries[i], ns, pts, KERNEL, THETA)
            pred = predict_gpnn(queries[i], ns, resp[i], sys)
            assert means[i] == pytest.approx(pred.mean, rel=1e-9, abs=1e-11)
            assert variances[i] == pytest.approx(pred.variance, rel=1e-9)

    def test_offset_carries_trend(self):
        rng = np.random.default_rng(61)
        pair = pairwise_distance_stack(rng.normal(size=(5, 4, 2)))
        cross = np.abs(rng.normal(size=(5, 4)))
        resp = rng.normal(size=(5, 4))
        offs = rng.normal(size=5)
        base, _ = batch_predict(pair, cross, resp, KERNEL, THETA)
        shifted, _ = batch_predict(pair, cross, resp, KERNEL, THETA, offset=offs)
        np.testing.assert_allclose(shifted, base + offs, atol=1e-12)
