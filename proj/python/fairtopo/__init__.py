"""Fair network topology inference from stationary graph signals.

Matrices are NumPy float arrays; group labels are integer sequences with ids
0..G-1. Invalid inputs raise ``DomainError`` (a ``ValueError``).
"""

from ._fairtopo import (
    DomainError,
    IoError,
    analytic_covariance,
    apply_filter,
    assign_uniform_groups,
    bias_report,
    build_b,
    build_vectorized,
    certify,
    commutativity_residual,
    default_epsilon,
    default_experiment_filter,
    delta_dp,
    delta_dp_node,
    estimation_error,
    generate_two_group_graph,
    indicator_matrix,
    minimum_commutativity_residual,
    project_to_constraint_set,
    sample_covariance,
    sample_signals,
    solve_convex,
    solve_l0_bruteforce,
    unvec_upper,
    vec_upper,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "IoError",
    "analytic_covariance",
    "apply_filter",
    "assign_uniform_groups",
    "bias_report",
    "build_b",
    "build_vectorized",
    "certify",
    "commutativity_residual",
    "default_epsilon",
    "default_experiment_filter",
    "delta_dp",
    "delta_dp_node",
    "estimation_error",
    "generate_two_group_graph",
    "indicator_matrix",
    "minimum_commutativity_residual",
    "project_to_constraint_set",
    "sample_covariance",
    "sample_signals",
    "solve_convex",
    "solve_l0_bruteforce",
    "unvec_upper",
    "vec_upper",
]
