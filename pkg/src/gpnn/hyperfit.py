"""Cheap hyperparameter estimation via a block-diagonal marginal likelihood.

The exact GP log marginal likelihood is summed over disjoint batches that
share one (noise_var, kernel_scale, lengthscale) triple, replacing one
O((B n_B)^3) solve by B independent O(n_B^3) solves. Optimization is Adam
ascent in log-parameter space (positivity, and it removes the 1/lengthscale
gradient prefactor that flattens raw-lengthscale landscapes). The trend
coefficients are not fitted here; they default to zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .kernels import KernelSpec, kernel_radial_derivative, kernel_value
from .local_gp import HyperParams, _JITTER_SCALE, _JITTER_THRESHOLD
from .neighbors import pairwise_distances

LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class BlockPartition:
    blocks: list
    seed: int


@dataclass
class FitConfig:
    learning_rate: float = 0.05
    iterations: int = 200
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    init_theta: HyperParams | None = None

    def __post_init__(self):
        if not (0.0 < self.adam_beta1 < 1.0 and 0.0 < self.adam_beta2 < 1.0):
            raise ValueError("adam betas must lie in (0, 1)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


class FitError(RuntimeError):
    """Numeric failure during optimization; carries the objective trace so far."""

    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


def block_partition(n: int, num_blocks: int, block_size: int, seed: int) -> BlockPartition:
    """Uniformly random disjoint index blocks, deterministic in the seed."""
    if num_blocks < 1 or block_size < 1:
        raise ValueError("num_blocks and block_size must be positive")
    if num_blocks * block_size > n:
        raise ValueError(f"cannot draw {num_blocks} blocks of {block_size} from {n} indices")
    perm = np.random.default_rng(seed).permutation(n)
    blocks = [perm[i * block_size : (i + 1) * block_size] for i in range(num_blocks)]
    return BlockPartition(blocks=blocks, seed=seed)


def extract_blocks(x: np.ndarray, y: np.ndarray, partition: BlockPartition) -> list:
    """Materialise (X_b, y_b) pairs for the partition's index blocks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return [(x[idx], y[idx]) for idx in partition.blocks]


def _shifted_gram(theta: HyperParams, dist: np.ndarray, kernel: KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    corr = np.atleast_2d(kernel_value(kernel, dist / theta.lengthscale))
    np.fill_diagonal(corr, 1.0)
    gram = theta.kernel_scale * corr + theta.noise_var * np.eye(dist.shape[0])
    if theta.noise_var < _JITTER_THRESHOLD:
        gram[np.diag_indices_from(gram)] += _JITTER_SCALE * theta.kernel_scale
    return gram, corr


def _block_log_likelihood(theta: HyperParams, xb: np.ndarray, yb: np.ndarray, kernel: KernelSpec) -> float:
    dist = pairwise_distances(xb)
    gram, _ = _shifted_gram(theta, dist, kernel)
    cho = cho_factor(gram, lower=True)
    alpha = cho_solve(cho, yb)
    logdet = 2.0 * float(np.sum(np.log(np.diag(cho[0]))))
    return -0.5 * (float(yb @ alpha) + logdet + yb.size * LOG_2PI)


def _block_gradient(theta: HyperParams, xb: np.ndarray, yb: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """Gradient of the block log-likelihood in (log noise, log scale, log ell)."""
    dist = pairwise_distances(xb)
    gram, corr = _shifted_gram(theta, dist, kernel)
    cho = cho_factor(gram, lower=True)
    alpha = cho_solve(cho, yb)
    gram_inv = cho_solve(cho, np.eye(yb.size))
    inner = np.outer(alpha, alpha) - gram_inv
    ell = theta.lengthscale
    d_ell = np.zeros_like(dist)
    off = dist > 0
    if np.any(off):
        d_ell[off] = -(theta.kernel_scale / ell**2) * dist[off] * kernel_radial_derivative(
            kernel, dist[off] / ell
        )
    g_noise = 0.5 * float(np.trace(inner))
    g_scale = 0.5 * float(np.sum(inner * corr))
    g_ell = 0.5 * float(np.sum(inner * d_ell))
    return np.array(
        [theta.noise_var * g_noise, theta.kernel_scale * g_scale, ell * g_ell]
    )


def _map_blocks(fn, theta, blocks, kernel, threads: int):
    """Evaluate fn over blocks, optionally in parallel; order is preserved."""
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda b: fn(theta, b[0], b[1], kernel), blocks))
    return [fn(theta, xb, yb, kernel) for xb, yb in blocks]


def block_mll(theta: HyperParams, blocks: list, kernel: KernelSpec, threads: int = 1) -> float:
    """Sum of exact per-block GP log marginal likelihoods (fixed block order)."""
    if not blocks:
        raise ValueError("no data blocks")
    values = _map_blocks(_block_log_likelihood, theta, blocks, kernel, threads)
    total = 0.0
    for v in values:
        total += v
    return total


def block_mll_grad(theta: HyperParams, blocks: list, kernel: KernelSpec, threads: int = 1) -> np.ndarray:
    """Gradient of block_mll over (log noise_var, log kernel_scale, log lengthscale)."""
    if not blocks:
        raise ValueError("no data blocks")
    grads = _map_blocks(_block_gradient, theta, blocks, kernel, threads)
    total = np.zeros(3)
    for g in grads:
        total += g
    return total


def default_init(blocks: list) -> HyperParams:
    """Median-heuristic lengthscale and response-variance scales."""
    first_x = blocks[0][0]
    dist = pairwise_distances(first_x)
    upper = dist[np.triu_indices_from(dist, k=1)]
    positive = upper[upper > 0]
    ell0 = float(np.median(positive)) if positive.size else 1.0
    y_all = np.concatenate([yb for _, yb in blocks])
    var_y = float(np.var(y_all))
    if var_y <= 0:
        var_y = 1.0
    return HyperParams(noise_var=0.1 * var_y, kernel_scale=var_y, lengthscale=ell0)


def fit_hyperparams(
    blocks: list, kernel: KernelSpec, cfg: FitConfig | None = None, threads: int = 1
) -> tuple[HyperParams, list]:
    """Adam ascent on the block marginal likelihood; returns (theta, trace)."""
    cfg = cfg or FitConfig()
    theta0 = cfg.init_theta or default_init(blocks)
    if theta0.noise_var <= 0:
        raise ValueError("log-space fitting needs a positive initial noise variance")
    params = np.log([theta0.noise_var, theta0.kernel_scale, theta0.lengthscale])
    moment1 = np.zeros(3)
    moment2 = np.zeros(3)
    trace: list = []
    theta = theta0
    for step in range(1, cfg.iterations + 1):
        try:
            objective = block_mll(theta, blocks, kernel, threads=threads)
            grad = block_mll_grad(theta, blocks, kernel, threads=threads)
        except np.linalg.LinAlgError as exc:
            raise FitError(f"linear algebra failure at iteration {step}: {exc}", trace) from exc
        if not (np.isfinite(objective) and np.all(np.isfinite(grad))):
            raise FitError(f"non-finite objective or gradient at iteration {step}", trace)
        trace.append(objective)
        moment1 = cfg.adam_beta1 * moment1 + (1.0 - cfg.adam_beta1) * grad
        moment2 = cfg.adam_beta2 * moment2 + (1.0 - cfg.adam_beta2) * grad**2
        m_hat = moment1 / (1.0 - cfg.adam_beta1**step)
        v_hat = moment2 / (1.0 - cfg.adam_beta2**step)
        params = params + cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
        theta = HyperParams(
            noise_var=float(np.exp(params[0])),
            kernel_scale=float(np.exp(params[1])),
            lengthscale=float(np.exp(params[2])),
            beta=theta0.beta,
        )
    return theta, trace
