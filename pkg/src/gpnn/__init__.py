"""Nearest-neighbour Gaussian-process regression and its rate experiments."""

from .calibration import CalibrationResult, apply_calibration, calibration_alpha
from .hyperfit import (
    BlockPartition,
    FitConfig,
    block_mll,
    block_mll_grad,
    block_partition,
    extract_blocks,
    fit_hyperparams,
)
from .kernels import (
    KernelSpec,
    kernel_metric_sq,
    kernel_radial_derivative,
    kernel_value,
    verify_kernel_bounds,
)
from .local_gp import (
    HyperParams,
    LocalSystem,
    PredictiveDistribution,
    assemble_local_system,
    batch_predict,
    gamma_factor,
    limit_inverse,
    predict_gpnn,
    predict_nngp,
)
from .metrics import MetricSummary, RiskCurve, empirical_metrics, fit_loglog_slope, pointwise_scores
from .neighbors import NeighborGeometry, NeighborSet, build_index, knn, neighbor_geometry
from .synth import (
    CovariateSpec,
    GpnnModel,
    NngpModel,
    RateConfig,
    ScheduleSpec,
    finite_diff_derivative,
    gpnn_local_responses,
    neighbourhood_schedule,
    nngp_local_responses,
    regression_fn_tanh,
    risk_landscape_sweep,
    run_calibration_experiment,
    run_rate_experiment,
    sample_covariates,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
