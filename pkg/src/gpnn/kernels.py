"""Isotropic correlation kernels, their induced metric and radial derivatives.

Families: exponential, squared exponential, and Matern with any smoothness
nu > 0 (closed forms at nu in {1/2, 3/2, 5/2}, a self-contained Bessel-K
evaluation otherwise). Every kernel is normalised, c(0) = 1, and strictly
decreasing in the radius.

Each `KernelSpec` also carries the constants of the two envelope inequalities

    c(r) >= 1 - L_c r^(2p)        and        |r c'(r)| <= L'_c r^(2p')

which hold family-wise (for Matern nu = 1 only on r <= 1, with exponent
2 - 0.1 and a numerically maximised constant). `verify_kernel_bounds` checks
both envelopes pointwise on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._bessel import bessel_i, bessel_k, bessel_k_pair

EXPONENTIAL = "exp"
SQUARED_EXPONENTIAL = "sq_exp"
MATERN = "matern"

_MATERN_ONE_EPS = 0.1  # exponent defect used for the nu = 1 bound check


def _matern_one_envelope_constants() -> tuple[float, float]:
    """Numerically maximise (1 - c(r))/r^(2-eps) and |r c'(r)|/r^(2-eps) on (0, 1]."""
    r = np.linspace(1e-6, 1.0, 4000)
    c = _matern_value(1.0, r)
    cp = _matern_derivative(1.0, r)
    expo = 2.0 - _MATERN_ONE_EPS
    l_val = float(np.max((1.0 - c) / r**expo))
    l_der = float(np.max(np.abs(r * cp) / r**expo))
    return l_val, l_der


@dataclass(frozen=True)
class KernelSpec:
    """An isotropic correlation family plus its smoothness envelope constants.

    holder_p / holder_lc bound the kernel from below, deriv_p / deriv_lc bound
    the radial derivative, deriv_bc is a global bound on |r c'(r)|. For
    family "matern" with nu = 1 the envelopes are only valid on r <= 1
    (bound_rmax records the validity range).
    """

    family: str
    nu: float | None = None
    holder_p: float = field(init=False, default=0.0)
    holder_lc: float = field(init=False, default=0.0)
    deriv_p: float = field(init=False, default=0.0)
    deriv_lc: float = field(init=False, default=0.0)
    deriv_bc: float = field(init=False, default=1.0)
    bound_rmax: float = field(init=False, default=math.inf)

    def __post_init__(self):
        if self.family not in (EXPONENTIAL, SQUARED_EXPONENTIAL, MATERN):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == MATERN:
            if self.nu is None or not (self.nu > 0) or not math.isfinite(self.nu):
                raise ValueError("matern kernel needs a positive smoothness nu")
        constants = self._envelope_constants()
        for name, value in constants.items():
            object.__setattr__(self, name, value)

    def _envelope_constants(self) -> dict:
        if self.family == EXPONENTIAL:
            return dict(holder_p=0.5, holder_lc=1.0, deriv_p=0.5, deriv_lc=1.0, deriv_bc=1.0)
        if self.family == SQUARED_EXPONENTIAL:
            return dict(holder_p=1.0, holder_lc=0.5, deriv_p=1.0, deriv_lc=1.0, deriv_bc=1.0)
        nu = float(self.nu)
        if nu > 1.0:
            lc = nu / (2.0 * (nu - 1.0))
            ldc = nu * (nu + 1.0) / (2.0 * (nu - 1.0))
            p = 1.0
        elif nu < 1.0:
            gamma_term = math.gamma(1.0 - nu) * nu**nu
            lc = gamma_term * bessel_i(nu, 1.0)
            ldc = gamma_term * (1.0 / (math.gamma(nu) * 2.0**nu) + nu * bessel_i(nu, 1.0))
            p = nu
        else:
            l_val, l_der = _matern_one_envelope_constants()
            return dict(
                holder_p=1.0 - 0.5 * _MATERN_ONE_EPS,
                holder_lc=l_val,
                deriv_p=1.0 - 0.5 * _MATERN_ONE_EPS,
                deriv_lc=l_der,
                deriv_bc=self._numeric_bc(),
                bound_rmax=1.0,
            )
        return dict(holder_p=p, holder_lc=lc, deriv_p=p, deriv_lc=ldc, deriv_bc=self._numeric_bc())

    def _numeric_bc(self) -> float:
        r = np.logspace(-4, 2, 2000)
        return max(1.0, float(np.max(np.abs(r * _matern_derivative(float(self.nu), r)))))

    @classmethod
    def exponential(cls) -> "KernelSpec":
        return cls(EXPONENTIAL)

    @classmethod
    def squared_exponential(cls) -> "KernelSpec":
        return cls(SQUARED_EXPONENTIAL)

    @classmethod
    def matern(cls, nu: float) -> "KernelSpec":
        return cls(MATERN, nu=float(nu))

    @classmethod
    def from_config(cls, cfg: dict) -> "KernelSpec":
        family = cfg.get("family")
        if family == MATERN:
            if "nu" not in cfg:
                raise ValueError('matern kernel config needs a "nu" entry')
            return cls.matern(cfg["nu"])
        if family in (EXPONENTIAL, SQUARED_EXPONENTIAL):
            return cls(family)
        raise ValueError(f"unknown kernel family {family!r}")

    def to_config(self) -> dict:
        if self.family == MATERN:
            return {"family": MATERN, "nu": self.nu}
        return {"family": self.family}


def _matern_value(nu: float, r: np.ndarray, general: bool = False) -> np.ndarray:
    """Matern correlation; `general` forces the Bessel path over closed forms."""
    if not general:
        if nu == 0.5:
            return np.exp(-r)
        if nu == 1.5:
            s = math.sqrt(3.0) * r
            return (1.0 + s) * np.exp(-s)
        if nu == 2.5:
            s = math.sqrt(5.0) * r
            return (1.0 + s + s * s / 3.0) * np.exp(-s)
    a = math.sqrt(2.0 * nu)
    z = a * r
    out = np.ones_like(z)
    z_floor = 1e-15 if nu >= 1.0 else 1e-150
    mask = z > z_floor
    if np.any(mask):
        zm = z[mask]
        out[mask] = (2.0 / math.gamma(nu)) * (0.5 * zm) ** nu * bessel_k(nu, zm)
    return np.clip(out, 0.0, 1.0)


def _matern_derivative(nu: float, r: np.ndarray, general: bool = False) -> np.ndarray:
    if not general:
        if nu == 0.5:
            return -np.exp(-r)
        if nu == 1.5:
            return -3.0 * r * np.exp(-math.sqrt(3.0) * r)
        if nu == 2.5:
            s = math.sqrt(5.0) * r
            return -(5.0 / 3.0) * r * (1.0 + s) * np.exp(-s)
    a = math.sqrt(2.0 * nu)
    z = a * r
    out = np.zeros_like(z)
    z_floor = 1e-15 if nu > 0.5 else 0.0
    mask = z > z_floor
    if np.any(mask):
        zm = z[mask]
        _, k_lower = bessel_k_pair(nu, zm)
        out[mask] = -(2.0 * a / math.gamma(nu)) * (0.5 * zm) ** nu * k_lower
    return out


def _validate_radius(r, positive: bool = False) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("radius must be finite")
    if positive:
        if np.any(arr <= 0.0):
            raise ValueError("radius must be strictly positive")
    elif np.any(arr < 0.0):
        raise ValueError("radius must be non-negative")
    return arr


def kernel_value(spec: KernelSpec, r, general: bool = False):
    """Correlation c(r) for the given family; vectorised over r >= 0.

    `general` routes Matern evaluation through the Bessel path even when a
    closed form exists (used to cross-check the two).
    """
    arr = _validate_radius(r)
    scalar = np.isscalar(r) or arr.ndim == 0
    arr = np.atleast_1d(arr)
    if spec.family == EXPONENTIAL:
        out = np.exp(-arr)
    elif spec.family == SQUARED_EXPONENTIAL:
        out = np.exp(-0.5 * arr * arr)
    else:
        out = _matern_value(float(spec.nu), arr, general=general)
    return float(out[0]) if scalar else out


def kernel_radial_derivative(spec: KernelSpec, r, general: bool = False):
    """Radial derivative c'(r) for r > 0; vectorised.

    The lengthscale chain rule d/dl c(r/l) = -(r/l^2) c'(r/l) is left to
    callers, as is any r -> 0 limit handling.
    """
    arr = _validate_radius(r, positive=True)
    scalar = np.isscalar(r) or np.asarray(r).ndim == 0
    arr = np.atleast_1d(arr)
    if spec.family == EXPONENTIAL:
        out = -np.exp(-arr)
    elif spec.family == SQUARED_EXPONENTIAL:
        out = -arr * np.exp(-0.5 * arr * arr)
    else:
        out = _matern_derivative(float(spec.nu), arr, general=general)
    return float(out[0]) if scalar else out


def kernel_metric_sq(spec: KernelSpec, x, x_other, lengthscale: float):
    """Squared kernel-induced metric 1 - c(||x - x'||_2 / lengthscale)."""
    if lengthscale <= 0:
        raise ValueError("lengthscale must be positive")
    a = np.asarray(x, dtype=float)
    b = np.asarray(x_other, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"point dimensions differ: {a.shape} vs {b.shape}")
    r = float(np.linalg.norm(a - b)) / lengthscale
    return 1.0 - kernel_value(spec, r)


@dataclass
class KernelBoundReport:
    """Pointwise outcome of the envelope checks on a radius grid."""

    grid: np.ndarray
    checked: np.ndarray  # False where the envelope does not claim validity
    value_ok: np.ndarray
    deriv_ok: np.ndarray

    @property
    def all_ok(self) -> bool:
        return bool(np.all(self.value_ok[self.checked]) and np.all(self.deriv_ok[self.checked]))


def verify_kernel_bounds(spec: KernelSpec, grid, slack: float = 1e-12) -> KernelBoundReport:
    """Check c(r) >= 1 - L_c r^(2p) and |r c'(r)| <= L'_c r^(2p') on the grid."""
    r = _validate_radius(grid, positive=True)
    r = np.atleast_1d(r)
    if r.size == 0:
        raise ValueError("grid must be non-empty")
    checked = r <= spec.bound_rmax
    c = kernel_value(spec, r)
    lower = 1.0 - spec.holder_lc * r ** (2.0 * spec.holder_p)
    value_ok = c >= lower - slack
    rd = np.abs(r * kernel_radial_derivative(spec, r))
    upper = spec.deriv_lc * r ** (2.0 * spec.deriv_p)
    deriv_ok = rd <= upper + slack
    return KernelBoundReport(grid=r, checked=checked, value_ok=value_ok, deriv_ok=deriv_ok)
