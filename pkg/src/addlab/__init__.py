"""Numerical laboratory for generalized additivity of quantum channels.

A convex function f on [0, 1] is additive for a pair of channels when
Tr f(Phi (x) Omega(rho)) is maximised by a product input. The package
provides the channels, the function library, a closed form for the output
spectra of the 3-dimensional Werner-Holevo pair, a multi-start optimiser
over pure inputs and the experiments built from them.
"""

__version__ = "0.1.0"

from .channels import (
    Channel,
    ChannelPair,
    apply,
    check_cptp,
    check_unitary_covariance,
    depolarizing,
    identity,
    parse_channel,
    parse_pair,
    tensor,
    werner_holevo,
)
from .experiments import (
    Verdict,
    additivity_gap,
    exhw_certificate,
    kink_scan,
    operator_convex_suite,
    single_channel_bound_check,
    tensor_structure_check,
)
from .functions import builtin_functions, mu_transform, operator_convexity_test, parse_function, trace_apply
from .optimize import (
    OptimizerConfig,
    OptResult,
    max_output_eigenvalue,
    max_trace,
    max_trace_entangled,
    max_trace_product,
    max_trace_schmidt_wh3,
)
from .wh_spectra import wh3_pair_spectrum, wh_maxent_spectrum, wh_product_spectrum

__all__ = [
    "Channel", "ChannelPair", "OptResult", "OptimizerConfig", "Verdict",
    "additivity_gap", "apply", "builtin_functions", "check_cptp", "check_unitary_covariance",
    "depolarizing", "exhw_certificate", "identity", "kink_scan", "max_output_eigenvalue",
    "max_trace", "max_trace_entangled", "max_trace_product", "max_trace_schmidt_wh3",
    "mu_transform", "operator_convex_suite", "operator_convexity_test", "parse_channel",
    "parse_function", "parse_pair", "single_channel_bound_check", "tensor", "tensor_structure_check",
    "trace_apply", "werner_holevo", "wh3_pair_spectrum", "wh_maxent_spectrum", "wh_product_spectrum",
]
