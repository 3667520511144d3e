"""Dimension-reduction adaptive-to-model significance testing for nonparametric regression."""

from .exceptions import (
    ConfigError,
    DataError,
    DegenerateVarianceError,
    DreamError,
    InvalidArgumentError,
    SingularCovarianceError,
)
from .kernels import (
    KernelSpec,
    bandwidth_rule,
    gauss,
    gauss4,
    kernel_square_integral,
    normal_reference_constant,
    product_kernel,
    quartic,
    reference_bandwidth,
)
from .sdr import RidgeConfig, SdrFit, estimate_basis, rere_dimension
from .significance import (
    DreamConfig,
    TestReport,
    WildBootstrapLaw,
    dm_statistic,
    dm_wild_bootstrap,
    dream_variance,
    dream_vn,
    estimate_q1,
    fan_li_statistic,
    run_dream,
    run_fan_li,
    run_method,
)
from .simulation import PowerResult, Sample, SimulationSpec, empirical_rejection, generate_example, make_covariance

__version__ = "0.1.0"
