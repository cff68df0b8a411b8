"""Pointwise and empirical prediction metrics plus log-log rate fitting.

Per test point: squared error, the squared standardized residual (its test-set
mean is the calibration coefficient, 1 when the predictive variance matches
the error scale), and the Gaussian negative log-likelihood.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class MetricSummary:
    mse_hat: float
    cal_hat: float
    nll_hat: float
    n_test: int


@dataclass
class RiskPoint:
    n: int
    m: int
    risk: float
    std_err: float


@dataclass
class RiskCurve:
    """Empirical risk along a training-size grid with its fitted decay rate."""

    entries: list[RiskPoint]
    fitted_slope: float
    intercept: float
    r_squared: float
    stone_exponent: float
    tail: int


def pointwise_scores(y_star: float, mean: float, variance: float) -> tuple[float, float, float]:
    """(squared error, standardized squared error, negative log-likelihood)."""
    if not variance > 0:
        raise ValueError("predictive variance must be positive")
    se = (y_star - mean) ** 2
    cal = se / variance
    nll = 0.5 * (math.log(variance) + cal + LOG_2PI)
    return se, cal, nll


def empirical_metrics(residuals, variances) -> MetricSummary:
    """Test-set means of the pointwise scores from residual/variance pairs."""
    residuals = np.asarray(residuals, dtype=float).reshape(-1)
    variances = np.asarray(variances, dtype=float).reshape(-1)
    if residuals.size == 0:
        raise ValueError("empty test set")
    if residuals.shape != variances.shape:
        raise ValueError("residuals and variances must have equal length")
    if np.any(variances <= 0):
        raise ValueError("predictive variances must be positive")
    se = residuals**2
    cal = se / variances
    nll = 0.5 * (np.log(variances) + cal + LOG_2PI)
    return MetricSummary(
        mse_hat=float(se.mean()),
        cal_hat=float(cal.mean()),
        nll_hat=float(nll.mean()),
        n_test=residuals.size,
    )


def fit_loglog_slope(points, tail: int = 8) -> tuple[float, float, float]:
    """OLS of log10(risk) on log10(n) over the `tail` largest n values.

    Returns (slope, intercept, r_squared); R^2 is 1 for a zero-variance tail.
    """
    pts = sorted((float(n), float(risk)) for n, risk in points)
    if tail < 2:
        raise ValueError("tail must be at least 2")
    pts = pts[-tail:]
    if len(pts) < 2:
        raise ValueError("need at least 2 points in the tail window")
    n_vals = np.array([p[0] for p in pts])
    risks = np.array([p[1] for p in pts])
    if np.any(risks <= 0):
        raise ValueError("risks must be positive for a log-log fit")
    x = np.log10(n_vals)
    y = np.log10(risks)
    x_bar = x.mean()
    y_bar = y.mean()
    sxx = float(np.sum((x - x_bar) ** 2))
    if sxx == 0:
        raise ValueError("tail window has no spread in n")
    slope = float(np.sum((x - x_bar) * (y - y_bar)) / sxx)
    intercept = y_bar - slope * x_bar
    ss_res = float(np.sum((y - (intercept + slope * x)) ** 2))
    ss_tot = float(np.sum((y - y_bar) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r_squared


def make_risk_curve(ns, ms, risks, std_errs, stone_exponent: float, tail: int = 8) -> RiskCurve:
    """Assemble a RiskCurve, fitting the slope on the same tail window."""
    order = np.argsort(np.asarray(ns))
    entries = [
        RiskPoint(n=int(ns[i]), m=int(ms[i]), risk=float(risks[i]), std_err=float(std_errs[i]))
        for i in order
    ]
    tail = min(tail, len(entries))
    slope, intercept, r2 = fit_loglog_slope([(e.n, e.risk) for e in entries], tail=tail)
    return RiskCurve(
        entries=entries,
        fitted_slope=slope,
        intercept=intercept,
        r_squared=r2,
        stone_exponent=stone_exponent,
        tail=tail,
    )
