"""Testing determinantal point processes."""

from ._core import (
    Error,
    TesterReport,
    atom_probability,
    bracketing_params,
    chi2_l1_statistic,
    distances,
    dpp_tester,
    exact_distribution,
    hard_instance,
    helper_inequality,
    is_log_submodular,
    marginal,
    project_box,
    required_samples,
    run_cli,
    sample_dpp,
    sample_table,
    validate_kernel,
    witness_set,
)

__all__ = [
    "Error",
    "TesterReport",
    "atom_probability",
    "bracketing_params",
    "chi2_l1_statistic",
    "distances",
    "dpp_tester",
    "exact_distribution",
    "hard_instance",
    "helper_inequality",
    "is_log_submodular",
    "marginal",
    "project_box",
    "required_samples",
    "run_cli",
    "sample_dpp",
    "sample_table",
    "validate_kernel",
    "witness_set",
]
