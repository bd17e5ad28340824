"""Relaxed empirical Frechet mean sets on finite metric spaces."""

from .errors import InputError, NumericError, ResourceCapError
from .exact1d import MedianInterval, median_interval, sigma1_exact, two_step_median_1d
from .frechet import (
    CovarianceKernel,
    EmpiricalMeasure,
    FrechetParams,
    RelaxedMeanResult,
    covariance_kernel,
    frechet_functional,
    hausdorff,
    medoid_set,
    one_sided_hausdorff,
    relaxed_mean_set,
    sigma_hat,
)
from .metric_core import (
    ArcSpace,
    CoveringReport,
    EuclideanPoints,
    FiniteMatrix,
    MetricSpace,
    covering_number,
    diameter,
    distance,
    dudley_report,
)
from .rates import (
    RelaxationSchedule,
    compact_space_rate,
    evaluate,
    lil_rate,
    mean_rate,
    median_rate,
    suboptimal_rate,
)
from .twostep import TwoStepReport, two_step_estimate

__version__ = "0.1.0"
