"""wbl: Wishart processes, Wishart bridges, and their closed-form transforms,
with a Monte Carlo verification harness that adjudicates formula variants."""

__version__ = "0.1.0"

from .besq import besq_oracle
from .bridges import (
    BridgeQuery,
    bridge_lt_drift,
    bridge_lt_hartman_watson,
    bridge_lt_joint,
    bridge_lt_quadratic,
)
from .distribution import (
    NoncentralWishartSpec,
    SeriesControl,
    density,
    hyp0f1_matrix,
    laplace,
    log_density,
    log_mvgamma,
    mvgamma,
    sample,
    sample_batch,
)
from .errors import (
    ConvergenceError,
    DomainError,
    NumericalError,
    RegimeError,
    SingularPathError,
    WblError,
)
from .girsanov import (
    DriftShift,
    delta_for_target,
    drift_rn,
    index_rn,
    nu_for_lambda,
)
from .harness import Experiment, Report, run_experiment, write_report
from .mc import McEstimate
from .model import WishartParams, endpoint_spec, sigma_t, validate, validated
from .sim import (
    PathSample,
    SimConfig,
    euler_step,
    logdet_residual,
    simulate_path,
    simulate_path_from_increments,
    simulate_terminal_batch,
)

__all__ = [
    "__version__",
    "BridgeQuery",
    "ConvergenceError",
    "DomainError",
    "DriftShift",
    "Experiment",
    "McEstimate",
    "NoncentralWishartSpec",
    "NumericalError",
    "PathSample",
    "RegimeError",
    "Report",
    "SeriesControl",
    "SimConfig",
    "SingularPathError",
    "WblError",
    "WishartParams",
    "besq_oracle",
    "bridge_lt_drift",
    "bridge_lt_hartman_watson",
    "bridge_lt_joint",
    "bridge_lt_quadratic",
    "delta_for_target",
    "density",
    "drift_rn",
    "endpoint_spec",
    "euler_step",
    "hyp0f1_matrix",
    "index_rn",
    "laplace",
    "log_density",
    "log_mvgamma",
    "logdet_residual",
    "mvgamma",
    "nu_for_lambda",
    "run_experiment",
    "sample",
    "sample_batch",
    "sigma_t",
    "simulate_path",
    "simulate_path_from_increments",
    "simulate_terminal_batch",
    "validate",
    "validated",
    "write_report",
]
