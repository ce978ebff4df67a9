from ._core import (
    Metrics,
    Model,
    ModelConfig,
    Pmf,
    PropertyReport,
    Solution,
    SolveReport,
    StateIndex,
    brute_force_optimal,
    exact_policy_evaluation,
    parse_config_file,
    parse_config_text,
    pds_value_iteration,
    run_full_suite,
    simulate_policy,
)

__all__ = [
    "Metrics",
    "Model",
    "ModelConfig",
    "Pmf",
    "PropertyReport",
    "Solution",
    "SolveReport",
    "StateIndex",
    "brute_force_optimal",
    "exact_policy_evaluation",
    "parse_config_file",
    "parse_config_text",
    "pds_value_iteration",
    "run_full_suite",
    "simulate_policy",
]
