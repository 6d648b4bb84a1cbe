from ._core import (
    DataError,
    NumericalError,
    UsageError,
    aggregate,
    compute_onset,
    compute_peak,
    fit,
    load_panel,
    multibin_score,
    run_cli,
    sample_prior,
    season_volatility,
)

__all__ = [
    "DataError",
    "NumericalError",
    "UsageError",
    "aggregate",
    "compute_onset",
    "compute_peak",
    "fit",
    "load_panel",
    "multibin_score",
    "run_cli",
    "sample_prior",
    "season_volatility",
]
