"""Nonequilibrium steady states of boundary-driven XXZ chains."""

from ._core import (
    ConfigError,
    DenseNess,
    DenseObservables,
    DomainError,
    ExperimentConfig,
    ModelParams,
    NumericalError,
    Ordering,
    RunResult,
    SweepSchedule,
    dense_liouvillian,
    dense_ness,
    dense_ness_of,
    dense_observables,
    fit_transport_exponent,
    load_config,
    parse_config,
    run_experiment,
    solve_ness,
)

__all__ = [
    "ConfigError",
    "DenseNess",
    "DenseObservables",
    "DomainError",
    "ExperimentConfig",
    "ModelParams",
    "NumericalError",
    "Ordering",
    "RunResult",
    "SweepSchedule",
    "dense_liouvillian",
    "dense_ness",
    "dense_ness_of",
    "dense_observables",
    "fit_transport_exponent",
    "load_config",
    "parse_config",
    "run_experiment",
    "solve_ness",
]
