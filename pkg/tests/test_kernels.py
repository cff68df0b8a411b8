"""Kernel values, radial derivatives, induced metric and envelope bounds."""

import math

import numpy as np
import pytest
from scipy import special

from gpnn._bessel import bessel_i, bessel_k, bessel_k_pair
from gpnn.kernels import (
    KernelSpec,
    kernel_metric_sq,
    kernel_radial_derivative,
    kernel_value,
    verify_kernel_bounds,
)

ALL_SPECS = [
    KernelSpec.exponential(),
    KernelSpec.squared_exponential(),
    KernelSpec.matern(0.5),
    KernelSpec.matern(0.75),
    KernelSpec.matern(1.0),
    KernelSpec.matern(1.5),
    KernelSpec.matern(2.5),
]


class TestBesselK:
    """The self-contained K_nu evaluation against scipy as an independent oracle."""

    @pytest.mark.parametrize("nu", [0.0, 0.05, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.3, 7.0])
    def test_against_scipy(self, nu):
        z = np.concatenate(
            [np.logspace(-8, math.log10(2.0), 200), np.linspace(2.001, 40, 300), np.linspace(41, 690, 60)]
        )
        mine = bessel_k(nu, z)
        ref = special.kv(nu, z)
        ok = ref > 1e-290
        np.testing.assert_allclose(mine[ok], ref[ok], rtol=5e-13)

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.75, 1.0, 1.5, 2.5])
    def test_pair_returns_adjacent_orders(self, nu):
        z = np.logspace(-5, 1.5, 150)
        hi, lo = bessel_k_pair(nu, z)
        np.testing.assert_allclose(hi, special.kv(nu, z), rtol=5e-13)
        np.testing.assert_allclose(lo, special.kv(abs(nu - 1.0), z), rtol=5e-13)

    def test_first_kind_series(self):
        for nu in (0.25, 0.5, 0.75, 1.0, 2.0):
            assert bessel_i(nu, 1.0) == pytest.approx(special.iv(nu, 1.0), rel=1e-14)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            bessel_k(-1.0, np.array([1.0]))
        with pytest.raises(ValueError):
            bessel_k(1.0, np.array([0.0]))


class TestKernelValue:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family}-{s.nu}")
    def test_normalised_at_zero(self, spec):
        assert kernel_value(spec, 0.0) == 1.0

    def test_matern_half_is_exponential(self):
        assert kernel_value(KernelSpec.matern(0.5), 1.0) == pytest.approx(math.exp(-1.0), abs=1e-15)

    def test_matern_three_halves_general_path_matches_closed_form(self):
        spec = KernelSpec.matern(1.5)
        r = np.linspace(1e-3, 8.0, 100)
        closed = (1.0 + math.sqrt(3.0) * r) * np.exp(-math.sqrt(3.0) * r)
        general = kernel_value(spec, r, general=True)
        np.testing.assert_allclose(general, closed, atol=1e-12, rtol=0)

    def test_matern_five_halves_general_path_matches_closed_form(self):
        spec = KernelSpec.matern(2.5)
        r = np.linspace(1e-3, 8.0, 100)
        s = math.sqrt(5.0) * r
        closed = (1.0 + s + s * s / 3.0) * np.exp(-s)
        np.testing.assert_allclose(kernel_value(spec, r, general=True), closed, atol=1e-12, rtol=0)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family}-{s.nu}")
    def test_strictly_decreasing_and_in_unit_interval(self, spec):
        rng = np.random.default_rng(7)
        r = np.sort(rng.uniform(0.0, 6.0, size=200))
        c = kernel_value(spec, r)
        assert np.all(c >= 0.0) and np.all(c <= 1.0)
        assert np.all(np.diff(c) < 0.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            kernel_value(KernelSpec.exponential(), float("nan"))
        with pytest.raises(ValueError):
            kernel_value(KernelSpec.exponential(), -0.5)

    def test_config_round_trip(self):
        spec = KernelSpec.from_config({"family": "matern", "nu": 0.75})
        assert spec.nu == 0.75
        assert KernelSpec.from_config(spec.to_config()) == spec
        assert KernelSpec.from_config({"family": "sq_exp"}).family == "sq_exp"
        with pytest.raises(ValueError):
            KernelSpec.from_config({"family": "matern"})
        with pytest.raises(ValueError):
            KernelSpec.from_config({"family": "periodic"})


class TestKernelMetric:
    def test_identity(self):
        spec = KernelSpec.matern(1.5)
        x = np.array([0.3, -1.2])
        assert kernel_metric_sq(spec, x, x, 0.7) == 0.0

    def test_exponential_closed_form(self):
        spec = KernelSpec.exponential()
        x = np.zeros(3)
        y = np.array([2.0, 0.0, 0.0])
        assert kernel_metric_sq(spec, x, y, 2.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-15)

    def test_symmetry(self):
        spec = KernelSpec.squared_exponential()
        rng = np.random.default_rng(3)
        for _ in range(50):
            x, y = rng.normal(size=(2, 4))
            assert kernel_metric_sq(spec, x, y, 1.3) == kernel_metric_sq(spec, y, x, 1.3)

    def test_dimension_mismatch(self):
        spec = KernelSpec.exponential()
        with pytest.raises(ValueError):
            kernel_metric_sq(spec, np.zeros(2), np.zeros(3), 1.0)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family}-{s.nu}")
    def test_triangle_inequality(self, spec):
        rng = np.random.default_rng(11)
        for _ in range(100):
            a, b, c = rng.normal(scale=1.5, size=(3, 3))
            d_ac = math.sqrt(kernel_metric_sq(spec, a, c, 1.0))
            d_ab = math.sqrt(kernel_metric_sq(spec, a, b, 1.0))
            d_bc = math.sqrt(kernel_metric_sq(spec, b, c, 1.0))
            assert d_ac <= d_ab + d_bc + 1e-12


class TestRadialDerivative:
    def test_exponential_at_one(self):
        assert kernel_radial_derivative(KernelSpec.exponential(), 1.0) == pytest.approx(-math.exp(-1.0), abs=1e-15)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family}-{s.nu}")
    def test_matches_finite_differences(self, spec):
        r = np.logspace(-2, 1, 120)
        h = 1e-6
        fd = (kernel_value(spec, r + h) - kernel_value(spec, r - h)) / (2.0 * h)
        an = kernel_radial_derivative(spec, r)
        np.testing.assert_allclose(an, fd, rtol=1e-6, atol=1e-10)

    def test_r_times_derivative_vanishes_at_origin(self):
        for spec in (KernelSpec.matern(1.5), KernelSpec.matern(1.0), KernelSpec.matern(0.75)):
            r = np.logspace(-9, -5, 20)
            vals = np.abs(r * kernel_radial_derivative(spec, r))
            assert vals[0] < 1e-8
            assert np.all(np.diff(vals) > 0)  # decays monotonically toward 0

    def test_rejects_non_positive_radius(self):
        with pytest.raises(ValueError):
            kernel_radial_derivative(KernelSpec.exponential(), 0.0)


class TestEnvelopeBounds:
    def test_exponential_lower_bound(self):
        rep = verify_kernel_bounds(KernelSpec.exponential(), np.linspace(0.1, 10.0, 100))
        assert rep.all_ok

    def test_squared_exponential_lower_bound(self):
        spec = KernelSpec.squared_exponential()
        r = np.logspace(-3, 1, 300)
        assert np.all(kernel_value(spec, r) >= 1.0 - 0.5 * r**2 - 1e-12)
        assert verify_kernel_bounds(spec, r).all_ok

    def test_matern_three_halves_explicit_constant(self):
        spec = KernelSpec.matern(1.5)
        assert spec.holder_lc == pytest.approx(1.5)
        r = np.logspace(-3, 1, 300)
        assert np.all(kernel_value(spec, r) >= 1.0 - 1.5 * r**2 - 1e-12)

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.family}-{s.nu}")
    def test_bounds_hold_on_dense_grid(self, spec):
        assert verify_kernel_bounds(spec, np.logspace(-3, 1, 500)).all_ok

    def test_matern_one_bound_restricted_to_unit_interval(self):
        rep = verify_kernel_bounds(KernelSpec.matern(1.0), np.logspace(-3, 1, 100))
        assert np.all(rep.checked == (rep.grid <= 1.0))
        assert rep.all_ok

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            verify_kernel_bounds(KernelSpec.exponential(), [])
