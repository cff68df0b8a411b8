"""Variance-rescaling calibration: exactness, mean invariance, NLL optimality."""

import numpy as np
import pytest

from gpnn.calibration import apply_calibration, calibration_alpha
from gpnn.kernels import KernelSpec
from gpnn.local_gp import HyperParams, assemble_local_system, predict_gpnn
from gpnn.metrics import empirical_metrics
from gpnn.neighbors import build_index, knn


class TestCalibrationAlpha:
    def test_matched_residuals_give_unit_alpha(self):
        var = np.array([0.5, 1.0, 2.0])
        res = np.sqrt(var)
        out = calibration_alpha(res, var)
        assert out.alpha == pytest.approx(1.0)

    def test_doubling_variances_halves_alpha(self):
        rng = np.random.default_rng(0)
        res = rng.normal(size=20)
        var = rng.uniform(0.5, 2.0, size=20)
        a1 = calibration_alpha(res, var).alpha
        a2 = calibration_alpha(res, 2.0 * var).alpha
        assert a2 == pytest.approx(a1 / 2.0, rel=1e-14)

    def test_hand_case_against_loop_oracle(self):
        res = np.array([0.5, -1.0, 2.0, 0.1, -0.3])
        var = np.array([1.0, 0.5, 4.0, 0.2, 0.9])
        expected = sum(r * r / v for r, v in zip(res, var)) / 5.0
        out = calibration_alpha(res, var)
        assert out.alpha == pytest.approx(expected, rel=1e-14)
        assert out.post_cal == pytest.approx(1.0, abs=1e-12)
        assert out.n_cal == 5

    def test_errors(self):
        with pytest.raises(ValueError):
            calibration_alpha([], [])
        with pytest.raises(ValueError):
            calibration_alpha([1.0], [0.0])
        with pytest.raises(ValueError):
            calibration_alpha([1.0, 2.0], [1.0])


class TestApplyCalibration:
    def test_identity_at_unit_alpha(self):
        theta = HyperParams(0.2, 1.0, 0.7, beta=[1.0])
        out = apply_calibration(theta, 1.0)
        assert out.noise_var == theta.noise_var
        assert out.kernel_scale == theta.kernel_scale
        assert out.lengthscale == theta.lengthscale
        np.testing.assert_array_equal(out.beta, theta.beta)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            apply_calibration(HyperParams(0.2, 1.0, 0.7), 0.0)

    def test_mean_invariance_and_variance_scaling_end_to_end(self):
        rng = np.random.default_rng(1)
        kernel = KernelSpec.matern(1.5)
        theta = HyperParams(0.3, 1.2, 0.8)
        pts = rng.normal(size=(80, 2))
        index = build_index(pts)
        alpha = 2.37
        theta2 = apply_calibration(theta, alpha)
        for _ in range(20):
            q = rng.normal(size=2)
            y = rng.normal(size=6)
            ns = knn(index, q, 6)
            before = predict_gpnn(q, ns, y, assemble_local_system(q, ns, pts, kernel, theta))
            after = predict_gpnn(q, ns, y, assemble_local_system(q, ns, pts, kernel, theta2))
            assert after.mean == pytest.approx(before.mean, abs=1e-12, rel=1e-12)
            assert after.variance == pytest.approx(alpha * before.variance, rel=1e-12)

    def test_post_calibration_cal_is_one_on_calibration_set(self):
        rng = np.random.default_rng(2)
        res = rng.normal(size=200)
        var = rng.uniform(0.2, 2.0, size=200)
        alpha = calibration_alpha(res, var).alpha
        post = empirical_metrics(res, alpha * var)
        assert post.cal_hat == pytest.approx(1.0, abs=1e-10)

    def test_alpha_minimises_nll_on_calibration_set(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            size = int(rng.integers(5, 100))
            res = rng.normal(scale=rng.uniform(0.5, 3.0), size=size)
            var = rng.uniform(0.1, 2.0, size=size)
            alpha = calibration_alpha(res, var).alpha
            best = empirical_metrics(res, alpha * var).nll_hat
            for bump in (0.9, 1.1):
                worse = empirical_metrics(res, alpha * bump * var).nll_hat
                assert best <= worse + 1e-12
