"""Prescribed-time control kernels and scenario runner."""

from ._ptlab import (
    DomainError,
    IoError,
    NumericError,
    UnsupportedError,
    ValidationError,
    __version__,
    containment_c_min,
    double_integrator_controller,
    ft_equals_pt_gain,
    ft_first_order_settling,
    lambda2,
    laplacian,
    mu,
    run_config,
    settling_bound,
    simulate_inequality,
    time_scale,
)

__all__ = [
    "DomainError",
    "IoError",
    "NumericError",
    "UnsupportedError",
    "ValidationError",
    "__version__",
    "containment_c_min",
    "double_integrator_controller",
    "ft_equals_pt_gain",
    "ft_first_order_settling",
    "lambda2",
    "laplacian",
    "mu",
    "run_config",
    "settling_bound",
    "simulate_inequality",
    "time_scale",
]
