"""Command-line entry point: config ingestion, dataset IO, result emission.

Subcommands: rates, landscape, derivatives, calibrate, fit, predict, workflow,
selfcheck. Configs are JSON documents; results are CSV/JSON files that embed
the fully resolved config and master seed on their first line for provenance.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from functools import partial

import numpy as np

from .calibration import apply_calibration, calibration_alpha
from .hyperfit import FitConfig, block_partition, extract_blocks, fit_hyperparams
from .kernels import KernelSpec, verify_kernel_bounds
from .local_gp import HyperParams, batch_predict
from .metrics import empirical_metrics
from .neighbors import build_index, pairwise_distance_stack
from .synth import (
    GAUSSIAN,
    UNIFORM_CUBE,
    UNIFORM_DISK,
    CovariateSpec,
    GpnnModel,
    NngpModel,
    RateConfig,
    ScheduleSpec,
    coordinate_squares,
    default_n_grid,
    finite_diff_derivative,
    regression_fn_tanh,
    risk_landscape_sweep,
    run_calibration_experiment,
    run_rate_experiment,
)

_FLOAT_FMT = "%.17g"

REGRESSION_FUNCTIONS = {"tanh_interaction": regression_fn_tanh}
REGRESSOR_MAPS = {"coordinate_squares": coordinate_squares}


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


# ----------------------------------------------------------------------------
# dataset loading
# ----------------------------------------------------------------------------

@dataclass
class Dataset:
    """Covariate matrix, responses and optional trend regressors."""

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray | None = None

    def __len__(self) -> int:
        return self.x.shape[0]


def _column_layout(header: list) -> tuple[list, list]:
    x_cols = sorted((c for c in header if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    t_cols = sorted((c for c in header if c.startswith("t") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    if not x_cols:
        raise ConfigError("dataset needs covariate columns x1..xd")
    if "y" not in header:
        raise ConfigError('dataset needs a response column "y"')
    expect_x = [f"x{i}" for i in range(1, len(x_cols) + 1)]
    if x_cols != expect_x:
        raise ConfigError(f"covariate columns must be consecutive x1..xd, got {x_cols}")
    if t_cols and t_cols != [f"t{i}" for i in range(1, len(t_cols) + 1)]:
        raise ConfigError(f"regressor columns must be consecutive t1..tdT, got {t_cols}")
    return x_cols, t_cols


def load_dataset(path: str) -> Dataset:
    """Parse a CSV with columns x1..xd, y and optional t1..tdT; row order kept."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        x_cols, t_cols = _column_layout(header)
        pos = {name: header.index(name) for name in x_cols + ["y"] + t_cols}
        rows_x, rows_y, rows_t = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            values = {}
            for name, j in pos.items():
                if j >= len(row):
                    raise ConfigError(f"{path}: row {line_no} is missing column {name!r}")
                cell = row[j].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise ConfigError(
                        f"{path}: non-numeric value {cell!r} at row {line_no}, column {name!r}"
                    ) from None
                if not math.isfinite(value):
                    raise ConfigError(f"{path}: non-finite value at row {line_no}, column {name!r}")
                values[name] = value
            rows_x.append([values[c] for c in x_cols])
            rows_y.append(values["y"])
            if t_cols:
                rows_t.append([values[c] for c in t_cols])
    if not rows_x:
        raise ConfigError(f"{path}: no data rows")
    return Dataset(
        x=np.asarray(rows_x, dtype=float),
        y=np.asarray(rows_y, dtype=float),
        t=np.asarray(rows_t, dtype=float) if t_cols else None,
    )


# ----------------------------------------------------------------------------
# config -> objects
# ----------------------------------------------------------------------------

def _require(cfg: dict, key: str, context: str):
    if key not in cfg:
        raise ConfigError(f"{context}: missing required key {key!r}")
    return cfg[key]


def build_covariates(cfg: dict) -> CovariateSpec:
    kind = _require(cfg, "kind", "covariates")
    if kind not in (GAUSSIAN, UNIFORM_DISK, UNIFORM_CUBE):
        raise ConfigError(f"covariates: unknown kind {kind!r}")
    dim = int(_require(cfg, "dim", "covariates"))
    return CovariateSpec(kind=kind, dim=dim)


def build_model(cfg: dict, dim: int):
    kind = _require(cfg, "type", "model")
    if kind == "gpnn":
        fn_name = cfg.get("function", "tanh_interaction")
        if fn_name not in REGRESSION_FUNCTIONS:
            raise ConfigError(f"model: unknown regression function {fn_name!r}")
        return GpnnModel(
            fn=partial(REGRESSION_FUNCTIONS[fn_name], dim),
            noise_var=float(_require(cfg, "noise_var", "model")),
            holder_q=float(cfg.get("holder_q", 1.0)),
        )
    if kind == "nngp":
        reg_name = cfg.get("regressors", "coordinate_squares")
        if reg_name not in REGRESSOR_MAPS:
            raise ConfigError(f"model: unknown regressor map {reg_name!r}")
        return NngpModel(
            beta=tuple(float(b) for b in _require(cfg, "beta", "model")),
            regressors=REGRESSOR_MAPS[reg_name],
            latent_kernel=KernelSpec.from_config(_require(cfg, "latent_kernel", "model")),
            latent_lengthscale=float(_require(cfg, "latent_lengthscale", "model")),
            latent_var=float(_require(cfg, "latent_var", "model")),
            noise_var=float(_require(cfg, "noise_var", "model")),
        )
    raise ConfigError(f'model: type must be "gpnn" or "nngp", got {kind!r}')


def build_schedule(cfg: dict) -> ScheduleSpec:
    if "fixed_m" in cfg:
        return ScheduleSpec(fixed_m=int(cfg["fixed_m"]))
    return ScheduleSpec(
        smoothness=float(cfg.get("smoothness", 1.0)),
        pin_n=int(cfg.get("pin_n", 100000)),
        pin_m=int(cfg.get("pin_m", 100)),
    )


def _grid_from_config(cfg) -> list:
    if isinstance(cfg, list):
        return [int(v) for v in cfg]
    return default_n_grid(int(cfg.get("start", 100)), int(cfg.get("stop", 100000)), int(cfg.get("points", 12)))


def build_rate_config(cfg: dict, seed_override=None, threads_override=None) -> RateConfig:
    covariates = build_covariates(_require(cfg, "covariates", "config"))
    model = build_model(_require(cfg, "model", "config"), covariates.dim)
    kernel = KernelSpec.from_config(_require(cfg, "kernel", "config"))
    theta = HyperParams.from_config(_require(cfg, "theta", "config"))
    schedule = build_schedule(cfg.get("schedule", {}))
    seed = seed_override if seed_override is not None else int(cfg.get("master_seed", 0))
    threads = threads_override if threads_override is not None else _thread_budget(cfg)
    return RateConfig(
        covariates=covariates,
        model=model,
        kernel=kernel,
        theta=theta,
        schedule=schedule,
        n_grid=_grid_from_config(cfg.get("n_grid", {})),
        n_test=int(cfg.get("n_test", 2000)),
        replicates=int(cfg.get("replicates", 3)),
        master_seed=seed,
        risk_target=cfg.get("risk_target", "latent"),
        gamma_correction=bool(cfg.get("gamma_correction", True)),
        tail=int(cfg.get("tail", 8)),
        stone_alpha=cfg.get("stone_alpha"),
        threads=threads,
        chunk=int(cfg.get("chunk", 512)),
    )


def _thread_budget(cfg: dict) -> int:
    if "threads" in cfg:
        return max(1, int(cfg["threads"]))
    return max(1, int(os.environ.get("GPNN_THREADS", "1")))


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


# ----------------------------------------------------------------------------
# output writers (provenance embedded)
# ----------------------------------------------------------------------------

def _provenance(config: dict, seed) -> dict:
    return {"config": config, "master_seed": seed}


def write_json(path: str, payload: dict, config: dict, seed) -> None:
    body = dict(payload)
    body["provenance"] = _provenance(config, seed)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(body, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_csv(path: str, header: list, rows, config: dict, seed) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write("# " + json.dumps(_provenance(config, seed), sort_keys=True) + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_FLOAT_FMT % v if isinstance(v, float) else v for v in row])


# ----------------------------------------------------------------------------
# prediction over datasets
# ----------------------------------------------------------------------------

def predict_dataset(
    train: Dataset,
    test_x: np.ndarray,
    theta: HyperParams,
    kernel: KernelSpec,
    m: int,
    test_t: np.ndarray | None = None,
    gamma_correction: bool = True,
    chunk: int = 512,
) -> tuple[np.ndarray, np.ndarray]:
    """Batch nearest-neighbour GP prediction over test rows."""
    index = build_index(train.x)
    test_x = np.atleast_2d(np.asarray(test_x, dtype=float))
    use_trend = theta.beta.size > 0
    if use_trend and train.t is None:
        raise ConfigError("theta has trend coefficients but the training set has no t columns")
    if use_trend and test_t is None:
        raise ConfigError("theta has trend coefficients but the test set has no t columns")
    n_rows = test_x.shape[0]
    means = np.empty(n_rows)
    variances = np.empty(n_rows)
    for lo in range(0, n_rows, chunk):
        hi = min(lo + chunk, n_rows)
        dist, idx = index.query_batch(test_x[lo:hi], m)
        pair = pairwise_distance_stack(train.x[idx])
        responses = train.y[idx]
        if use_trend:
            offset = test_t[lo:hi] @ theta.beta
            responses = responses - train.t[idx] @ theta.beta
        else:
            offset = 0.0
        means[lo:hi], variances[lo:hi] = batch_predict(
            pair, dist, responses, kernel, theta, gamma_correction=gamma_correction, offset=offset
        )
    return means, variances


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def _out_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def cmd_rates(config: dict, out_dir: str, seed, threads) -> int:
    cfg = build_rate_config(config, seed, threads)
    result = run_rate_experiment(cfg)
    rows = [
        (e.n, e.m, float(e.risk), float(e.std_err), float(pv))
        for e, pv in zip(result.curve.entries, result.mean_pred_var)
    ]
    write_csv(
        _out_path(out_dir, "risk_curve.csv"),
        ["n", "m", "risk", "stderr", "mean_pred_var"],
        rows,
        config,
        cfg.master_seed,
    )
    write_json(
        _out_path(out_dir, "slopes.json"),
        {
            "slope": result.curve.fitted_slope,
            "intercept": result.curve.intercept,
            "r2": result.curve.r_squared,
            "stone_exponent": result.curve.stone_exponent,
            "tail": result.curve.tail,
            "beyond_theory": result.beyond_theory,
        },
        config,
        cfg.master_seed,
    )
    return 0


def cmd_landscape(config: dict, out_dir: str, seed, threads) -> int:
    cfg = build_rate_config(config, seed, threads)
    axis = _require(config, "axis", "landscape")
    grid = [float(v) for v in _require(config, "axis_grid", "landscape")]
    result = risk_landscape_sweep(cfg, axis, grid)
    rows = [
        (axis, value, n, float(result.risks[i, j]))
        for i, n in enumerate(result.n_grid)
        for j, value in enumerate(result.grid)
    ]
    write_csv(_out_path(out_dir, "landscape.csv"), ["axis", "value", "n", "risk"], rows, config, cfg.master_seed)
    write_json(
        _out_path(out_dir, "landscape.json"),
        {"axis": axis, "n_grid": result.n_grid, "ranges": result.ranges},
        config,
        cfg.master_seed,
    )
    return 0


def cmd_derivatives(config: dict, out_dir: str, seed, threads) -> int:
    cfg = build_rate_config(config, seed, threads)
    axes = config.get("axes", ["lengthscale", "kernel_scale", "noise_var", "beta"])
    rel_step = float(config.get("rel_step", 0.02))
    rows = []
    slopes = {}
    for axis in axes:
        result = finite_diff_derivative(cfg, axis, rel_step=rel_step)
        rows.extend((axis, n, float(v), result.step) for n, v in zip(result.n_grid, result.derivatives))
        slopes[axis] = {"slope": result.slope, "r2": result.r_squared, "step": result.step}
    write_csv(
        _out_path(out_dir, "derivative_curve.csv"), ["axis", "n", "derivative", "step"], rows, config, cfg.master_seed
    )
    write_json(_out_path(out_dir, "derivative_slopes.json"), {"axes": slopes}, config, cfg.master_seed)
    return 0


def cmd_calibrate(config: dict, out_dir: str, seed, threads) -> int:
    cfg = build_rate_config(config, seed, threads)
    result = run_calibration_experiment(
        cfg,
        n=int(config.get("n", 10000)),
        n_cal=int(config.get("n_cal", 2000)),
        n_test=int(config.get("n_cal_test", config.get("n_test", 8000))),
    )
    write_json(
        _out_path(out_dir, "calibration.json"),
        {
            "alpha": result.alpha,
            "cal_on_calibration_set": result.cal_on_calibration_set,
            "pre_test": result.pre_test,
            "post_test": result.post_test,
            "n": result.n,
            "m": result.m,
            "replicates": result.replicates,
        },
        config,
        cfg.master_seed,
    )
    return 0


def _fit_blocks_from_dataset(data: Dataset, config: dict, seed: int):
    subset = min(int(config.get("fit_subset", 2000)), len(data))
    block_size = int(config.get("block_size", 100))
    num_blocks = int(config.get("num_blocks", max(1, subset // block_size)))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(data), size=subset, replace=False)
    partition = block_partition(subset, num_blocks, block_size, seed=seed)
    return extract_blocks(data.x[chosen], data.y[chosen], partition)


def _fit_theta(data: Dataset, config: dict, kernel: KernelSpec, seed: int, threads: int) -> tuple[HyperParams, list]:
    blocks = _fit_blocks_from_dataset(data, config, seed)
    fit_cfg = FitConfig(
        learning_rate=float(config.get("learning_rate", 0.05)),
        iterations=int(config.get("iterations", 200)),
        adam_beta1=float(config.get("adam_beta1", 0.9)),
        adam_beta2=float(config.get("adam_beta2", 0.999)),
        adam_eps=float(config.get("adam_eps", 1e-8)),
        init_theta=HyperParams.from_config(config["init_theta"]) if "init_theta" in config else None,
    )
    return fit_hyperparams(blocks, kernel, fit_cfg, threads=threads)


def cmd_fit(config: dict, out_dir: str, seed, threads) -> int:
    data = load_dataset(_require(config, "train", "fit"))
    kernel = KernelSpec.from_config(_require(config, "kernel", "fit"))
    master_seed = seed if seed is not None else int(config.get("master_seed", 0))
    threads = threads if threads is not None else _thread_budget(config)
    theta, trace = _fit_theta(data, config, kernel, master_seed, threads)
    write_json(
        _out_path(out_dir, "theta.json"),
        {"theta": theta.to_config(), "objective_trace": trace},
        config,
        master_seed,
    )
    return 0


def cmd_predict(config: dict, out_dir: str, seed, threads) -> int:
    train = load_dataset(_require(config, "train", "predict"))
    test = load_dataset(_require(config, "test", "predict"))
    kernel = KernelSpec.from_config(_require(config, "kernel", "predict"))
    theta = HyperParams.from_config(_require(config, "theta", "predict"))
    m = int(config.get("m", 50))
    master_seed = seed if seed is not None else int(config.get("master_seed", 0))
    means, variances = predict_dataset(
        train, test.x, theta, kernel, m, test_t=test.t, gamma_correction=bool(config.get("gamma_correction", True))
    )
    rows = [(i, float(mu), float(var)) for i, (mu, var) in enumerate(zip(means, variances))]
    write_csv(_out_path(out_dir, "predictions.csv"), ["index", "mean", "variance"], rows, config, master_seed)
    summary = empirical_metrics(test.y - means, variances)
    write_json(
        _out_path(out_dir, "metrics.json"),
        {"mse": summary.mse_hat, "cal": summary.cal_hat, "nll": summary.nll_hat, "n_test": summary.n_test},
        config,
        master_seed,
    )
    return 0


def run_workflow(config: dict, out_dir: str, seed=None, threads=None) -> dict:
    """Fit on a subset, calibrate on a held-out split, predict on test rows.

    Returns a summary dict; raises StageError (after removing partial
    artifacts) if any stage fails.
    """
    master_seed = seed if seed is not None else int(config.get("master_seed", 0))
    threads = threads if threads is not None else _thread_budget(config)
    written = []
    stage = "load"
    try:
        data = load_dataset(_require(config, "train", "workflow"))
        kernel = KernelSpec.from_config(_require(config, "kernel", "workflow"))
        m = int(config.get("m", 50))
        n_cal = min(int(config.get("n_cal", 2000)), max(1, len(data) // 4))
        rng = np.random.default_rng(master_seed)
        perm = rng.permutation(len(data))
        if "test" in config:
            test = load_dataset(config["test"])
            cal_idx = perm[:n_cal]
            train_idx = perm[n_cal:]
        else:
            n_test = min(int(config.get("n_test", 2000)), max(1, len(data) // 4))
            cal_idx = perm[:n_cal]
            test_idx = perm[n_cal : n_cal + n_test]
            train_idx = perm[n_cal + n_test :]
            test = Dataset(
                x=data.x[test_idx],
                y=data.y[test_idx],
                t=data.t[test_idx] if data.t is not None else None,
            )
        train = Dataset(
            x=data.x[train_idx],
            y=data.y[train_idx],
            t=data.t[train_idx] if data.t is not None else None,
        )
        cal = Dataset(
            x=data.x[cal_idx],
            y=data.y[cal_idx],
            t=data.t[cal_idx] if data.t is not None else None,
        )
        if m > len(train):
            raise ConfigError(f"m={m} exceeds the training size {len(train)}")

        stage = "fit"
        theta, trace = _fit_theta(train, config.get("fit", {}), kernel, master_seed, threads)

        stage = "calibrate"
        cal_means, cal_vars = predict_dataset(train, cal.x, theta, kernel, m, test_t=cal.t)
        cal_result = calibration_alpha(cal.y - cal_means, cal_vars)
        theta_cal = apply_calibration(theta, cal_result.alpha)

        stage = "predict"
        means, variances = predict_dataset(train, test.x, theta_cal, kernel, m, test_t=test.t)
        summary = empirical_metrics(test.y - means, variances)

        stage = "write"
        path = _out_path(out_dir, "predictions.csv")
        write_csv(
            path,
            ["index", "mean", "variance"],
            [(i, float(mu), float(var)) for i, (mu, var) in enumerate(zip(means, variances))],
            config,
            master_seed,
        )
        written.append(path)
        path = _out_path(out_dir, "theta.json")
        write_json(
            path,
            {
                "fitted_theta": theta.to_config(),
                "calibrated_theta": theta_cal.to_config(),
                "alpha": cal_result.alpha,
                "n_cal": cal_result.n_cal,
                "final_objective": trace[-1] if trace else None,
            },
            config,
            master_seed,
        )
        written.append(path)
        path = _out_path(out_dir, "metrics.json")
        write_json(
            path,
            {"mse": summary.mse_hat, "cal": summary.cal_hat, "nll": summary.nll_hat, "n_test": summary.n_test},
            config,
            master_seed,
        )
        written.append(path)
    except Exception as exc:
        for path in written:
            try:
                os.remove(path)
            except OSError:
                pass
        raise StageError(stage, exc) from exc
    return {
        "theta": theta_cal.to_config(),
        "alpha": cal_result.alpha,
        "metrics": {"mse": summary.mse_hat, "cal": summary.cal_hat, "nll": summary.nll_hat},
    }


def cmd_workflow(config: dict, out_dir: str, seed, threads) -> int:
    run_workflow(config, out_dir, seed, threads)
    return 0


def cmd_selfcheck(config: dict, out_dir: str, seed, threads) -> int:
    """Quick property suites: kernel envelopes, geometry inequalities, gradients."""
    from .hyperfit import block_mll, block_mll_grad
    from .local_gp import assemble_local_system, golub_perturbation_bound, limit_deviation_ratio
    from .neighbors import knn, neighbor_geometry

    failures = 0

    def report(name: str, ok: bool):
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        if not ok:
            failures += 1

    grid = np.logspace(-3, 1, 200)
    for spec in (
        KernelSpec.exponential(),
        KernelSpec.squared_exponential(),
        KernelSpec.matern(0.5),
        KernelSpec.matern(0.75),
        KernelSpec.matern(1.0),
        KernelSpec.matern(1.5),
        KernelSpec.matern(2.5),
    ):
        label = spec.family if spec.nu is None else f"{spec.family}(nu={spec.nu})"
        report(f"kernel envelope bounds: {label}", verify_kernel_bounds(spec, grid).all_ok)

    rng = np.random.default_rng(0)
    kernel = KernelSpec.exponential()
    pts = rng.uniform(-1, 1, size=(2000, 2))
    index = build_index(pts)
    eps_ok = True
    golub_ok = True
    for _ in range(100):
        theta = HyperParams(float(rng.uniform(0.05, 1.0)), 1.0, float(rng.uniform(1.0, 3.0)))
        ns = knn(index, rng.uniform(-1, 1, size=2), int(rng.integers(2, 9)))
        geo = neighbor_geometry(ns, pts, kernel, theta)
        eps_ok &= geo.pair_metric_norm <= 4 * geo.max_metric_sq + 1e-12
        eps_ok &= geo.pair_metric_norm2 <= 2 * geo.pair_metric_norm + 1e-12
        sys_ = assemble_local_system(ns.query, ns, pts, kernel, theta)
        bound = golub_perturbation_bound(sys_, theta)
        if np.isfinite(bound):
            golub_ok &= limit_deviation_ratio(sys_, theta) <= bound + 1e-12
    report("neighbourhood epsilon relations", bool(eps_ok))
    report("Gram-limit perturbation bound (sound form)", bool(golub_ok))

    grad_ok = True
    mk = KernelSpec.matern(1.5)
    for _ in range(10):
        theta = HyperParams(float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.3, 2.0)))
        blocks = [(rng.normal(size=(8, 2)), rng.normal(size=8)) for _ in range(2)]
        analytic = block_mll_grad(theta, blocks, mk)
        h = 1e-5
        logs = np.log([theta.noise_var, theta.kernel_scale, theta.lengthscale])
        for i in range(3):
            up, down = logs.copy(), logs.copy()
            up[i] += h
            down[i] -= h
            fd = (
                block_mll(HyperParams(*np.exp(up)), blocks, mk)
                - block_mll(HyperParams(*np.exp(down)), blocks, mk)
            ) / (2 * h)
            grad_ok &= abs(analytic[i] - fd) / max(abs(fd), 1e-6) < 1e-4
    report("marginal-likelihood gradient vs finite differences", bool(grad_ok))

    print(f"selfcheck: {failures} failure(s)")
    return 1 if failures else 0


COMMANDS = {
    "rates": cmd_rates,
    "landscape": cmd_landscape,
    "derivatives": cmd_derivatives,
    "calibrate": cmd_calibrate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "workflow": cmd_workflow,
    "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gpnn", description="Nearest-neighbour GP regression experiments")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file (selfcheck runs without one)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--threads", type=int, default=None, help="thread budget override")
    args = parser.parse_args(argv)
    config = {}
    if args.config:
        config = load_config(args.config)
    elif args.command != "selfcheck":
        parser.error(f"command {args.command!r} requires --config")
    try:
        return COMMANDS[args.command](config, args.out, args.seed, args.threads)
    except (ConfigError, StageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
