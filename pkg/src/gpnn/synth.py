"""Locality-based synthetic experiments for nearest-neighbour GP prediction.

Instead of materialising a full size-n latent field, responses are sampled
jointly only over each test point's neighbourhood, which preserves the risk
statistics of nearest-neighbour prediction while keeping runtime linear in
the number of test points. Every random draw comes from a counter-based
stream (Philox) keyed by (master seed, grid index, replicate, point index),
so results are bit-identical under any execution order or thread count, and
hyperparameter sweeps reuse identical data (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .kernels import KernelSpec, kernel_value
from .local_gp import HyperParams, batch_predict
from .metrics import RiskCurve, fit_loglog_slope, make_risk_curve
from .neighbors import build_index, pairwise_distance_stack

GAUSSIAN = "gaussian"
UNIFORM_DISK = "uniform_disk"
UNIFORM_CUBE = "uniform_cube"

_TAG_TRAIN, _TAG_TEST, _TAG_RESPONSE = 0, 1, 2
_SET_TEST, _SET_CAL = 0, 1

_LATENT_JITTER = 1e-10


# ----------------------------------------------------------------------------
# covariates and response models
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CovariateSpec:
    """Covariate distribution: isotropic Gaussian with per-coordinate variance
    1/dim, the uniform unit disk (dim 2), or the uniform unit hypercube."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, UNIFORM_DISK, UNIFORM_CUBE):
            raise ValueError(f"unsupported covariate kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.kind == UNIFORM_DISK and self.dim != 2:
            raise ValueError("the uniform disk is two-dimensional")


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def sample_covariates(spec: CovariateSpec, n: int, seed) -> np.ndarray:
    """Draw n i.i.d. covariates; deterministic in the seed."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = _as_generator(seed)
    if spec.kind == GAUSSIAN:
        return rng.standard_normal((n, spec.dim)) / math.sqrt(spec.dim)
    if spec.kind == UNIFORM_CUBE:
        return rng.uniform(0.0, 1.0, size=(n, spec.dim))
    radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
    angle = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)


def regression_fn_tanh(d: int, x) -> np.ndarray:
    """Bounded Lipschitz test function mixing per-coordinate oscillations with
    pairwise interactions; needs an even dimension for the interaction pairs."""
    if d % 2 != 0:
        raise ValueError("the interaction sum needs an even dimension")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != d:
        raise ValueError(f"points must have dimension {d}")
    root = math.sqrt(d)
    osc = np.sin(root * x).sum(axis=1) / root
    pairs = x[:, 0::2] + x[:, 1::2]
    inter = np.cos(root * pairs).sum(axis=1) / math.sqrt(d / 2)
    return np.tanh(osc + inter)


def coordinate_squares(x) -> np.ndarray:
    """Regressor map t(x) = (x_1^2, ..., x_d^2)."""
    return np.atleast_2d(np.asarray(x, dtype=float)) ** 2


@dataclass(frozen=True)
class GpnnModel:
    """Deterministic regression function plus independent observation noise;
    noise_var may be a constant or a function of the covariate."""

    fn: object
    noise_var: object
    holder_q: float = 1.0

    def noise_at(self, x: np.ndarray) -> np.ndarray:
        if callable(self.noise_var):
            return np.asarray(self.noise_var(x), dtype=float)
        return np.full(np.atleast_2d(x).shape[0], float(self.noise_var))


@dataclass(frozen=True)
class NngpModel:
    """Spatial linear mixed model: deterministic regressors, a latent
    unit-variance correlated field scaled by latent_var, and white noise."""

    beta: tuple
    regressors: object
    latent_kernel: KernelSpec
    latent_lengthscale: float
    latent_var: float
    noise_var: float

    def __post_init__(self):
        if self.latent_var <= 0 or self.noise_var <= 0:
            raise ValueError("latent_var and noise_var must be positive")

    @property
    def beta_vec(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float)


# ----------------------------------------------------------------------------
# neighbourhood schedule
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleSpec:
    """m_n = ceil(C n^{2p/(2p+d)}) with C pinned so that m(pin_n) = pin_m.

    smoothness p > 1 runs the beyond-theory regime (flagged in outputs).
    A fixed_m overrides the power law entirely.
    """

    smoothness: float = 1.0
    pin_n: int = 100000
    pin_m: int = 100
    fixed_m: int | None = None

    def __post_init__(self):
        if self.fixed_m is None:
            if not self.smoothness > 0:
                raise ValueError("smoothness must be positive")
            if self.pin_n < 1 or self.pin_m < 1:
                raise ValueError("pin must be positive")
        elif self.fixed_m < 1:
            raise ValueError("fixed_m must be positive")

    def exponent(self, d: int) -> float:
        return 2.0 * self.smoothness / (2.0 * self.smoothness + d)

    def m_at(self, d: int, n: int) -> int:
        if self.fixed_m is not None:
            return min(n, self.fixed_m)
        e = self.exponent(d)
        c = self.pin_m / self.pin_n**e
        return min(n, max(1, math.ceil(c * n**e)))

    @property
    def beyond_theory(self) -> bool:
        return self.fixed_m is None and self.smoothness > 1.0


def neighbourhood_schedule(sched: ScheduleSpec, d: int, n: int) -> int:
    """Neighbourhood size at training size n (clamped to n)."""
    if n < 1:
        raise ValueError("n must be positive")
    return sched.m_at(d, n)


def default_n_grid(lo: int = 100, hi: int = 100000, points: int = 12) -> list:
    """Geometric training-size grid with duplicate-free integer rounding."""
    raw = np.geomspace(lo, hi, points)
    grid = sorted({int(round(v)) for v in raw})
    return grid


# ----------------------------------------------------------------------------
# keyed random streams
# ----------------------------------------------------------------------------

def _stream(master_seed: int, *key) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=key)))


def _point_streams(master_seed: int, n_idx: int, rep: int, set_id: int, count: int) -> list:
    parent = np.random.SeedSequence(master_seed, spawn_key=(_TAG_RESPONSE, n_idx, rep, set_id))
    return [np.random.Generator(np.random.Philox(child)) for child in parent.spawn(count)]


# ----------------------------------------------------------------------------
# local response sampling (per-point contract; the batched path matches it)
# ----------------------------------------------------------------------------

def gpnn_local_responses(x_star, neighbor_points, gen: GpnnModel, seed):
    """Latent truth f(x*) and noisy neighbour responses for one test point."""
    rng = _as_generator(seed)
    neighbor_points = np.atleast_2d(np.asarray(neighbor_points, dtype=float))
    f_star = float(gen.fn(np.atleast_2d(x_star))[0])
    f_neighbors = np.asarray(gen.fn(neighbor_points), dtype=float)
    draws = rng.standard_normal(neighbor_points.shape[0])
    y = f_neighbors + np.sqrt(gen.noise_at(neighbor_points)) * draws
    return f_star, y


def nngp_local_responses(x_star, neighbor_points, gen: NngpModel, seed):
    """Latent truth t(x*).b + w(x*) and neighbour responses, sampled jointly."""
    rng = _as_generator(seed)
    x_star = np.asarray(x_star, dtype=float).reshape(1, -1)
    neighbor_points = np.atleast_2d(np.asarray(neighbor_points, dtype=float))
    m = neighbor_points.shape[0]
    pts = np.concatenate([x_star, neighbor_points], axis=0)
    dist = pairwise_distance_stack(pts[None])[0]
    corr = np.atleast_2d(kernel_value(gen.latent_kernel, dist / gen.latent_lengthscale))
    corr[np.diag_indices_from(corr)] = 1.0 + _LATENT_JITTER
    low = np.linalg.cholesky(corr)
    w = math.sqrt(gen.latent_var) * (low @ rng.standard_normal(m + 1))
    noise = math.sqrt(gen.noise_var) * rng.standard_normal(m)
    t_neighbors = gen.regressors(neighbor_points)
    beta = gen.beta_vec
    y = t_neighbors @ beta + w[1:] + noise
    g_star = float(gen.regressors(x_star)[0] @ beta + w[0])
    return g_star, y


# ----------------------------------------------------------------------------
# experiment configuration and the shared evaluation pass
# ----------------------------------------------------------------------------

@dataclass
class RateConfig:
    covariates: CovariateSpec
    model: object  # GpnnModel | NngpModel
    kernel: KernelSpec
    theta: HyperParams
    schedule: ScheduleSpec
    n_grid: list = field(default_factory=default_n_grid)
    n_test: int = 2000
    replicates: int = 3
    master_seed: int = 0
    risk_target: str = "latent"  # latent truth or the noisy test response
    gamma_correction: bool = True
    tail: int = 8
    stone_alpha: float | None = None
    threads: int = 1
    chunk: int = 512

    def __post_init__(self):
        if self.risk_target not in ("latent", "noisy"):
            raise ValueError('risk_target must be "latent" or "noisy"')
        if self.n_test < 1 or self.replicates < 1:
            raise ValueError("n_test and replicates must be positive")

    def stone_exponent(self) -> float:
        if self.schedule.fixed_m is not None:
            return 0.0
        p = self.schedule.smoothness
        alpha = self.stone_alpha
        if alpha is None:
            alpha = p if isinstance(self.model, NngpModel) else min(p, self.model.holder_q)
        return 2.0 * alpha / (2.0 * p + self.covariates.dim)


@dataclass
class PassAccumulator:
    """Per-hyperparameter sums over one (n, replicate) evaluation pass."""

    sq_err: np.ndarray  # (n_thetas,)
    pred_var: np.ndarray
    count: int


def _chunk_local_data(cfg: RateConfig, x_star: np.ndarray, neigh: np.ndarray, streams, noisy_target: bool):
    """Sample neighbour responses and the truth for one chunk of test points.

    Returns (pair_dist, cross_dist, responses, target, trend) where trend is
    (t_star, t_neighbors) for the mixed model and None otherwise.
    """
    model = cfg.model
    c, m, _ = neigh.shape
    full = np.concatenate([x_star[:, None, :], neigh], axis=1)
    dist_full = pairwise_distance_stack(full)
    pair = dist_full[:, 1:, 1:]
    cross = dist_full[:, 0, 1:]
    if isinstance(model, GpnnModel):
        f_star = np.asarray(model.fn(x_star), dtype=float)
        f_neigh = np.asarray(model.fn(neigh.reshape(-1, neigh.shape[-1])), dtype=float).reshape(c, m)
        noise_neigh = model.noise_at(neigh.reshape(-1, neigh.shape[-1])).reshape(c, m)
        responses = np.empty((c, m))
        target = f_star.copy()
        for i, rng in enumerate(streams):
            responses[i] = f_neigh[i] + np.sqrt(noise_neigh[i]) * rng.standard_normal(m)
            if noisy_target:
                noise_star = model.noise_at(x_star[i : i + 1])[0]
                target[i] += math.sqrt(noise_star) * rng.standard_normal()
        return pair, cross, responses, target, None
    corr = kernel_value(model.latent_kernel, dist_full.reshape(-1) / model.latent_lengthscale)
    corr = corr.reshape(dist_full.shape)
    idx = np.arange(m + 1)
    corr[:, idx, idx] = 1.0 + _LATENT_JITTER
    low = np.linalg.cholesky(corr)
    scale_w = math.sqrt(model.latent_var)
    scale_noise = math.sqrt(model.noise_var)
    beta = model.beta_vec
    t_neighbors = model.regressors(neigh.reshape(-1, neigh.shape[-1])).reshape(c, m, beta.size)
    t_star = model.regressors(x_star)
    trend_neigh = t_neighbors @ beta
    trend_star = t_star @ beta
    responses = np.empty((c, m))
    target = np.empty(c)
    for i, rng in enumerate(streams):
        w = scale_w * (low[i] @ rng.standard_normal(m + 1))
        noise = scale_noise * rng.standard_normal(m)
        responses[i] = trend_neigh[i] + w[1:] + noise
        target[i] = trend_star[i] + w[0]
        if noisy_target:
            target[i] += scale_noise * rng.standard_normal()
    return pair, cross, responses, target, (t_star, t_neighbors)


def _evaluate_thetas(cfg: RateConfig, thetas, pair, cross, responses, target, trend):
    """Squared-error and predictive-variance sums for each hyperparameter set."""
    sq = np.zeros(len(thetas))
    pv = np.zeros(len(thetas))
    for k, theta in enumerate(thetas):
        if trend is None or theta.beta.size == 0:
            offset = 0.0
            y_eff = responses
        else:
            t_star, t_neighbors = trend
            offset = t_star @ theta.beta
            y_eff = responses - t_neighbors @ theta.beta
        means, variances = batch_predict(
            pair, cross, y_eff, cfg.kernel, theta, gamma_correction=cfg.gamma_correction, offset=offset
        )
        sq[k] = float(np.sum((target - means) ** 2))
        pv[k] = float(np.sum(variances))
    return sq, pv


def _run_pass(cfg: RateConfig, n_idx: int, n: int, m: int, rep: int, thetas) -> PassAccumulator:
    """One (training size, replicate) unit: sample data, predict, accumulate."""
    train = sample_covariates(cfg.covariates, n, _stream(cfg.master_seed, _TAG_TRAIN, n_idx, rep))
    test = sample_covariates(cfg.covariates, cfg.n_test, _stream(cfg.master_seed, _TAG_TEST, n_idx, rep))
    index = build_index(train)
    streams = _point_streams(cfg.master_seed, n_idx, rep, _SET_TEST, cfg.n_test)
    noisy = cfg.risk_target == "noisy"
    sq = np.zeros(len(thetas))
    pv = np.zeros(len(thetas))
    for lo in range(0, cfg.n_test, cfg.chunk):
        hi = min(lo + cfg.chunk, cfg.n_test)
        x_star = test[lo:hi]
        _, idx = index.query_batch(x_star, m)
        pair, cross, responses, target, trend = _chunk_local_data(
            cfg, x_star, train[idx], streams[lo:hi], noisy
        )
        d_sq, d_pv = _evaluate_thetas(cfg, thetas, pair, cross, responses, target, trend)
        sq += d_sq
        pv += d_pv
    return PassAccumulator(sq_err=sq, pred_var=pv, count=cfg.n_test)


def _run_units(cfg: RateConfig, thetas) -> np.ndarray:
    """Evaluate all (n, replicate) units; returns risks[n_idx, rep, theta]
    stacked with predictive-variance means along the last axis."""
    units = [(n_idx, n, cfg.schedule.m_at(cfg.covariates.dim, n), rep)
             for n_idx, n in enumerate(cfg.n_grid) for rep in range(cfg.replicates)]

    def work(unit):
        n_idx, n, m, rep = unit
        return _run_pass(cfg, n_idx, n, m, rep, thetas)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(work, units))
    else:
        results = [work(u) for u in units]
    out = np.zeros((len(cfg.n_grid), cfg.replicates, len(thetas), 2))
    for (n_idx, _, _, rep), acc in zip(units, results):
        out[n_idx, rep, :, 0] = acc.sq_err / acc.count
        out[n_idx, rep, :, 1] = acc.pred_var / acc.count
    return out


@dataclass
class RateResult:
    curve: RiskCurve
    mean_pred_var: list  # per grid point, averaged over replicates
    rep_risks: np.ndarray  # (n_grid, replicates)
    m_values: list
    beyond_theory: bool


def run_rate_experiment(cfg: RateConfig) -> RateResult:
    """Empirical risk along the n-grid with a fitted log-log decay slope."""
    table = _run_units(cfg, [cfg.theta])
    rep_risks = table[:, :, 0, 0]
    risks = rep_risks.mean(axis=1)
    if cfg.replicates > 1:
        std_err = rep_risks.std(axis=1, ddof=1) / math.sqrt(cfg.replicates)
    else:
        std_err = np.zeros(len(cfg.n_grid))
    m_values = [cfg.schedule.m_at(cfg.covariates.dim, n) for n in cfg.n_grid]
    curve = make_risk_curve(
        cfg.n_grid, m_values, risks, std_err, stone_exponent=cfg.stone_exponent(), tail=cfg.tail
    )
    return RateResult(
        curve=curve,
        mean_pred_var=table[:, :, 0, 1].mean(axis=1).tolist(),
        rep_risks=rep_risks,
        m_values=m_values,
        beyond_theory=cfg.schedule.beyond_theory,
    )


# ----------------------------------------------------------------------------
# landscape and derivative sweeps (common random numbers across thetas)
# ----------------------------------------------------------------------------

_AXES = ("lengthscale", "kernel_scale", "noise_var", "beta")


def _theta_on_axis(theta: HyperParams, axis: str, value: float) -> HyperParams:
    if axis == "beta":
        if theta.beta.size == 0:
            raise ValueError("the beta axis needs a trend model")
        return theta.replace(beta=np.full(theta.beta.size, value))
    if axis in ("lengthscale", "kernel_scale"):
        if value <= 0:
            raise ValueError(f"{axis} must stay positive on the sweep grid")
    if axis == "noise_var" and value < 0:
        raise ValueError("noise_var must stay non-negative on the sweep grid")
    return theta.replace(**{axis: value})


@dataclass
class LandscapeResult:
    axis: str
    grid: list
    n_grid: list
    risks: np.ndarray  # (n_grid, grid)
    ranges: list  # peak-to-trough per n


def risk_landscape_sweep(cfg: RateConfig, axis: str, grid) -> LandscapeResult:
    """One-dimensional risk slices along a hyperparameter axis, per n."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}")
    grid = [float(v) for v in grid]
    thetas = [_theta_on_axis(cfg.theta, axis, v) for v in grid]
    table = _run_units(cfg, thetas)
    risks = table[:, :, :, 0].mean(axis=1)
    ranges = (risks.max(axis=1) - risks.min(axis=1)).tolist()
    return LandscapeResult(axis=axis, grid=grid, n_grid=list(cfg.n_grid), risks=risks, ranges=ranges)


def five_point_stencil(values, h: float) -> float:
    """First derivative from values at (x-2h, x-h, x+h, x+2h); exact for cubics."""
    v = [float(x) for x in values]
    if len(v) != 4:
        raise ValueError("the stencil needs exactly four off-centre values")
    return (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h)


@dataclass
class DerivativeResult:
    axis: str
    n_grid: list
    derivatives: list  # |dR/dphi| per n
    step: float
    slope: float
    intercept: float
    r_squared: float


def finite_diff_derivative(cfg: RateConfig, axis: str, rel_step: float = 0.02) -> DerivativeResult:
    """|dR/dphi| along the n-grid via a five-point stencil with shared seeds.

    For the trend coefficients the derivative is directional along
    (1, ..., 1)/sqrt(d_T).
    """
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {_AXES}")
    if rel_step <= 0:
        raise ValueError("rel_step must be positive")
    theta = cfg.theta
    if axis == "beta":
        d_t = theta.beta.size
        if d_t == 0:
            raise ValueError("the beta axis needs a trend model")
        direction = np.ones(d_t) / math.sqrt(d_t)
        h = rel_step * max(1.0, float(np.linalg.norm(theta.beta)))
        thetas = [theta.replace(beta=theta.beta + s * h * direction) for s in (-2, -1, 1, 2)]
    else:
        center = float(getattr(theta, axis))
        h = rel_step * center
        if center - 2.0 * h <= 0:
            raise ValueError(f"stencil leaves the positive domain for {axis}")
        thetas = [theta.replace(**{axis: center + s * h}) for s in (-2, -1, 1, 2)]
    table = _run_units(cfg, thetas)
    risks = table[:, :, :, 0].mean(axis=1)  # (n_grid, 4)
    derivs = [abs(five_point_stencil(risks[i], h)) for i in range(len(cfg.n_grid))]
    slope, intercept, r2 = fit_loglog_slope(list(zip(cfg.n_grid, derivs)), tail=min(cfg.tail, len(derivs)))
    return DerivativeResult(
        axis=axis,
        n_grid=list(cfg.n_grid),
        derivatives=derivs,
        step=h,
        slope=slope,
        intercept=intercept,
        r_squared=r2,
    )


# ----------------------------------------------------------------------------
# calibration experiment (mixed-model data, mismatched regression parameters)
# ----------------------------------------------------------------------------

@dataclass
class CalibrationExperimentResult:
    alpha: float
    cal_on_calibration_set: float
    pre_test: dict
    post_test: dict
    n: int
    m: int
    replicates: int


def run_calibration_experiment(
    cfg: RateConfig, n: int, n_cal: int, n_test: int
) -> CalibrationExperimentResult:
    """Fit the variance-rescaling factor on a held-out set and score a test set.

    Uses noisy responses at the held-out points (calibration targets the full
    predictive distribution of the response). Averages metrics over
    cfg.replicates independent training realisations.
    """
    from .calibration import apply_calibration, calibration_alpha
    from .metrics import empirical_metrics

    m = cfg.schedule.m_at(cfg.covariates.dim, n)
    alphas = []
    pre = {"mse": [], "cal": [], "nll": []}
    post = {"mse": [], "cal": [], "nll": []}
    cal_post_vals = []
    for rep in range(cfg.replicates):
        train = sample_covariates(cfg.covariates, n, _stream(cfg.master_seed, _TAG_TRAIN, 0, rep))
        index = build_index(train)

        def predict_set(points, set_id, theta, count):
            streams = _point_streams(cfg.master_seed, 0, rep, set_id, count)
            residuals = np.empty(count)
            variances = np.empty(count)
            for lo in range(0, count, cfg.chunk):
                hi = min(lo + cfg.chunk, count)
                x_star = points[lo:hi]
                _, idx = index.query_batch(x_star, m)
                pair, cross, responses, target, trend = _chunk_local_data(
                    cfg, x_star, train[idx], streams[lo:hi], noisy_target=True
                )
                if trend is None or theta.beta.size == 0:
                    offset, y_eff = 0.0, responses
                else:
                    t_star, t_neighbors = trend
                    offset = t_star @ theta.beta
                    y_eff = responses - t_neighbors @ theta.beta
                means, variances_chunk = batch_predict(
                    pair, cross, y_eff, cfg.kernel, theta,
                    gamma_correction=cfg.gamma_correction, offset=offset,
                )
                residuals[lo:hi] = target - means
                variances[lo:hi] = variances_chunk
            return residuals, variances

        cal_points = sample_covariates(
            cfg.covariates, n_cal, _stream(cfg.master_seed, _TAG_TEST, 1, rep)
        )
        test_points = sample_covariates(
            cfg.covariates, n_test, _stream(cfg.master_seed, _TAG_TEST, 0, rep)
        )
        res_cal, var_cal = predict_set(cal_points, _SET_CAL, cfg.theta, n_cal)
        result = calibration_alpha(res_cal, var_cal)
        theta_cal = apply_calibration(cfg.theta, result.alpha)
        alphas.append(result.alpha)

        res_cal2, var_cal2 = predict_set(cal_points, _SET_CAL, theta_cal, n_cal)
        cal_post_vals.append(empirical_metrics(res_cal2, var_cal2).cal_hat)

        before = empirical_metrics(*predict_set(test_points, _SET_TEST, cfg.theta, n_test))
        after = empirical_metrics(*predict_set(test_points, _SET_TEST, theta_cal, n_test))
        for store, summary in ((pre, before), (post, after)):
            store["mse"].append(summary.mse_hat)
            store["cal"].append(summary.cal_hat)
            store["nll"].append(summary.nll_hat)
    return CalibrationExperimentResult(
        alpha=float(np.mean(alphas)),
        cal_on_calibration_set=float(np.mean(cal_post_vals)),
        pre_test={k: float(np.mean(v)) for k, v in pre.items()},
        post_test={k: float(np.mean(v)) for k, v in post.items()},
        n=n,
        m=m,
        replicates=cfg.replicates,
    )
