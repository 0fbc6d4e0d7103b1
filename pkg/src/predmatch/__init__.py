"""Deferred acceptance with prediction-truncated preference lists."""

__version__ = "0.1.0"

from .core import (
    HOSPITALS,
    RESIDENTS,
    Instance,
    InstanceError,
    Matching,
    Verdict,
    build_instance,
    is_blocking_pair,
    verify_stability,
)
from .da import RunStats, run_da
from .truncation import (
    PredictionWindow,
    PrunedInstance,
    prune_prefix,
    prune_window,
    run_pda_adaptive,
    run_pda_once,
    run_wda,
)

__all__ = [
    "HOSPITALS",
    "RESIDENTS",
    "Instance",
    "InstanceError",
    "Matching",
    "PredictionWindow",
    "PrunedInstance",
    "RunStats",
    "Verdict",
    "build_instance",
    "is_blocking_pair",
    "prune_prefix",
    "prune_window",
    "run_da",
    "run_pda_adaptive",
    "run_pda_once",
    "run_wda",
    "verify_stability",
]
