"""Local Gram systems and the bias-corrected nearest-neighbour GP predictors.

The predictive mean carries a correction factor gamma = (noise + m scale) /
(m scale) that removes the fixed-m asymptotic bias of the plain local GP
mean; a flag restores the uncorrected textbook predictor. Solves go through
one Cholesky factorisation and triangular solves; the explicit-inverse route
exists only in the test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .kernels import KernelSpec, kernel_value
from .neighbors import NeighborSet, pairwise_distances

_JITTER_THRESHOLD = 1e-10
_JITTER_SCALE = 1e-10


@dataclass(frozen=True, eq=False)
class HyperParams:
    """Regression hyperparameters: noise variance, kernel scale, lengthscale
    and the trend coefficient vector (empty when no trend model is used)."""

    noise_var: float
    kernel_scale: float
    lengthscale: float
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float).reshape(-1))
        if not self.kernel_scale > 0:
            raise ValueError("kernel_scale must be positive")
        if not self.lengthscale > 0:
            raise ValueError("lengthscale must be positive")
        if self.noise_var < 0:
            raise ValueError("noise_var must be non-negative")

    def replace(self, **kwargs) -> "HyperParams":
        current = dict(
            noise_var=self.noise_var,
            kernel_scale=self.kernel_scale,
            lengthscale=self.lengthscale,
            beta=self.beta,
        )
        current.update(kwargs)
        return HyperParams(**current)

    def to_config(self) -> dict:
        return {
            "noise_var": self.noise_var,
            "kernel_scale": self.kernel_scale,
            "lengthscale": self.lengthscale,
            "beta": self.beta.tolist(),
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "HyperParams":
        return cls(
            noise_var=cfg["noise_var"],
            kernel_scale=cfg["kernel_scale"],
            lengthscale=cfg["lengthscale"],
            beta=np.asarray(cfg.get("beta", []), dtype=float),
        )


@dataclass
class LocalSystem:
    """Shifted Gram matrix, cross-covariance vector and correction factor."""

    gram: np.ndarray
    cross: np.ndarray
    gamma: float
    noise_var: float
    prior_var: float  # kernel_scale + noise_var, the diagonal of gram minus jitter
    jitter: float = 0.0

    @property
    def size(self) -> int:
        return self.cross.shape[0]


@dataclass
class PredictiveDistribution:
    mean: float
    variance: float


def gamma_factor(m: int, theta: HyperParams) -> float:
    """Bias-correction factor (noise + m scale) / (m scale); 1 when noise-free."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return (theta.noise_var + m * theta.kernel_scale) / (m * theta.kernel_scale)


def assemble_local_system(
    x_star: np.ndarray,
    ns: NeighborSet,
    points: np.ndarray,
    kernel: KernelSpec,
    theta: HyperParams,
) -> LocalSystem:
    """Build the m x m shifted Gram system for one test point."""
    m = len(ns.indices)
    if m < 1:
        raise ValueError("neighbour set is empty")
    neigh = np.asarray(points, dtype=float)[ns.indices]
    ell = theta.lengthscale
    corr = kernel_value(kernel, pairwise_distances(neigh) / ell)
    corr = np.atleast_2d(corr)
    np.fill_diagonal(corr, 1.0)
    gram = theta.kernel_scale * corr + theta.noise_var * np.eye(m)
    jitter = 0.0
    if theta.noise_var < _JITTER_THRESHOLD:
        jitter = _JITTER_SCALE * theta.kernel_scale
        gram[np.diag_indices_from(gram)] += jitter
    cross = theta.kernel_scale * np.atleast_1d(kernel_value(kernel, np.asarray(ns.distances) / ell))
    return LocalSystem(
        gram=gram,
        cross=cross,
        gamma=gamma_factor(m, theta),
        noise_var=theta.noise_var,
        prior_var=theta.kernel_scale + theta.noise_var,
        jitter=jitter,
    )


def _mean_weights_and_qform(sys: LocalSystem) -> tuple[np.ndarray, float]:
    low, lower = cho_factor(sys.gram, lower=True)
    z = solve_triangular(low, sys.cross, lower=True)
    weights = solve_triangular(low.T, z, lower=False)
    return weights, float(z @ z)


def predict_gpnn(
    x_star: np.ndarray,
    ns: NeighborSet,
    responses: np.ndarray,
    sys: LocalSystem,
    gamma_correction: bool = True,
) -> PredictiveDistribution:
    """Bias-corrected local GP prediction from neighbour responses."""
    responses = np.asarray(responses, dtype=float)
    if responses.shape != (sys.size,):
        raise ValueError("responses must align with the neighbour ordering")
    weights, qform = _mean_weights_and_qform(sys)
    factor = sys.gamma if gamma_correction else 1.0
    mean = factor * float(weights @ responses)
    variance = sys.prior_var - qform
    return PredictiveDistribution(mean=mean, variance=variance)


def predict_nngp(
    x_star: np.ndarray,
    ns: NeighborSet,
    responses: np.ndarray,
    t_star: np.ndarray,
    t_neighbors: np.ndarray,
    sys: LocalSystem,
    theta: HyperParams,
    gamma_correction: bool = True,
) -> PredictiveDistribution:
    """Trend-plus-residual prediction for the spatial linear mixed model."""
    responses = np.asarray(responses, dtype=float)
    t_star = np.asarray(t_star, dtype=float).reshape(-1)
    t_neighbors = np.asarray(t_neighbors, dtype=float)
    d_t = theta.beta.shape[0]
    if t_star.shape != (d_t,):
        raise ValueError(f"t_star must have length {d_t}")
    if t_neighbors.shape != (sys.size, d_t):
        raise ValueError(f"t_neighbors must be ({sys.size}, {d_t})")
    if responses.shape != (sys.size,):
        raise ValueError("responses must align with the neighbour ordering")
    residual = responses - t_neighbors @ theta.beta
    weights, qform = _mean_weights_and_qform(sys)
    factor = sys.gamma if gamma_correction else 1.0
    mean = float(t_star @ theta.beta) + factor * float(weights @ residual)
    variance = sys.prior_var - qform
    return PredictiveDistribution(mean=mean, variance=variance)


def limit_inverse(m: int, theta: HyperParams) -> np.ndarray:
    """Closed-form inverse of the coincident-neighbour Gram limit.

    (1/noise) (I - scale/(noise + m scale) 11^T), by Sherman-Morrison.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if theta.noise_var <= 0:
        raise ValueError("the limit inverse requires positive noise variance")
    denom = theta.noise_var + m * theta.kernel_scale
    return (np.eye(m) - (theta.kernel_scale / denom) * np.ones((m, m))) / theta.noise_var


def limit_deviation_ratio(sys: LocalSystem, theta: HyperParams) -> float:
    """l1 deviation of K^-1 k* from its coincident-neighbour limit, relative.

    The limit weight vector is scale * (K_inf)^-1 1 = scale/(noise + m scale) 1.
    """
    m = sys.size
    weights, _ = _mean_weights_and_qform(sys)
    limit = np.full(m, theta.kernel_scale / (theta.noise_var + m * theta.kernel_scale))
    return float(np.sum(np.abs(weights - limit)) / np.sum(np.abs(limit)))


def golub_perturbation_bound(sys: LocalSystem, theta: HyperParams) -> float:
    """Sound perturbation bound (r_A + r_b)/(1 - r_A) on the deviation above.

    Uses the true induced-1-norm condition number of the limit matrix; returns
    inf when r_A >= 1 and the bound is vacuous.
    """
    m = sys.size
    denom = theta.noise_var + m * theta.kernel_scale
    limit_gram = theta.noise_var * np.eye(m) + theta.kernel_scale * np.ones((m, m))
    inv = limit_inverse(m, theta)
    kappa = float(np.max(np.sum(np.abs(limit_gram), axis=0)) * np.max(np.sum(np.abs(inv), axis=0)))
    delta_gram = sys.gram - np.diag(np.full(m, sys.jitter)) - limit_gram
    eps_a = float(np.max(np.sum(np.abs(delta_gram), axis=0))) / denom
    eps_b = float(np.sum(np.abs(sys.cross - theta.kernel_scale))) / (m * theta.kernel_scale)
    r_a = eps_a * kappa
    r_b = eps_b * kappa
    if r_a >= 1.0:
        return float("inf")
    return (r_a + r_b) / (1.0 - r_a)


def batch_predict(
    pair_dist: np.ndarray,
    cross_dist: np.ndarray,
    responses: np.ndarray,
    kernel: KernelSpec,
    theta: HyperParams,
    gamma_correction: bool = True,
    offset=0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised prediction over a stack of local systems.

    pair_dist: (N, m, m) neighbour-pairwise Euclidean distances.
    cross_dist: (N, m) query-to-neighbour distances.
    responses: (N, m) neighbour responses (already trend-adjusted for the
        mixed model; `offset` carries the trend value at the queries).
    Returns (means, variances), each (N,).
    """
    n, m = cross_dist.shape
    ell = theta.lengthscale
    corr = kernel_value(kernel, pair_dist.reshape(-1) / ell).reshape(pair_dist.shape)
    idx = np.arange(m)
    corr[:, idx, idx] = 1.0
    gram = theta.kernel_scale * corr
    diag_shift = theta.noise_var
    if theta.noise_var < _JITTER_THRESHOLD:
        diag_shift = theta.noise_var + _JITTER_SCALE * theta.kernel_scale
    gram[:, idx, idx] += diag_shift
    cross = theta.kernel_scale * kernel_value(kernel, cross_dist.reshape(-1) / ell).reshape(n, m)
    low = np.linalg.cholesky(gram)
    rhs = np.stack([cross, responses], axis=-1)
    z = np.linalg.solve(low, rhs)
    z_cross = z[..., 0]
    z_resp = z[..., 1]
    factor = gamma_factor(m, theta) if gamma_correction else 1.0
    means = offset + factor * np.einsum("nm,nm->n", z_cross, z_resp)
    variances = (theta.kernel_scale + theta.noise_var) - np.einsum("nm,nm->n", z_cross, z_cross)
    return means, variances
