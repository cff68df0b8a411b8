"""Single-scalar post-hoc rescaling of the predictive variance.

Scaling both the kernel scale and the noise variance by the mean squared
standardized residual of a held-out set leaves every predictive mean unchanged,
multiplies every predictive variance by that factor, and makes the held-out
calibration coefficient exactly 1 (this choice also minimises the held-out
negative log-likelihood over all positive rescalings).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .local_gp import HyperParams


@dataclass
class CalibrationResult:
    alpha: float
    n_cal: int
    pre_cal: float
    post_cal: float


def calibration_alpha(residuals, variances) -> CalibrationResult:
    """Mean squared standardized residual over the calibration set."""
    residuals = np.asarray(residuals, dtype=float).reshape(-1)
    variances = np.asarray(variances, dtype=float).reshape(-1)
    if residuals.size == 0:
        raise ValueError("calibration set is empty")
    if residuals.shape != variances.shape:
        raise ValueError("residuals and variances must have equal length")
    if np.any(variances <= 0):
        raise ValueError("predictive variances must be positive")
    ratios = residuals**2 / variances
    alpha = float(ratios.mean())
    post = float((residuals**2 / (alpha * variances)).mean())
    return CalibrationResult(alpha=alpha, n_cal=residuals.size, pre_cal=alpha, post_cal=post)


def apply_calibration(theta: HyperParams, alpha: float) -> HyperParams:
    """Scale kernel_scale and noise_var by alpha; lengthscale and beta unchanged."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return theta.replace(noise_var=alpha * theta.noise_var, kernel_scale=alpha * theta.kernel_scale)
