"""Recover individual trajectories from aggregated location counts."""

from ._core import (
    AggregatedDataset,
    DataError,
    InputError,
    __version__,
    aggregate,
    metrics,
    recover_all,
    run_online,
    synthesize,
)

__all__ = [
    "AggregatedDataset",
    "DataError",
    "InputError",
    "__version__",
    "aggregate",
    "metrics",
    "recover_all",
    "run_online",
    "synthesize",
]
