"""Monte Carlo driver, result handling and command-line interface."""
from ..config import VARIANTS, SystemConfig
from .results import COLUMNS, FORMATS, ResultRow, emit_results, from_csv, to_csv, to_ndtext
from .sweep import (MIN_TRIALS, Estimate, SearchResult, aggregate, predict_grid, run_grid,
                    run_trials, search_target, simulate_point)
from .trial import (TrialMetrics, draw_messages, run_trial, score, simulate_frame, splitmix64,
                    trial_seed)

__all__ = [
    "COLUMNS", "Estimate", "FORMATS", "MIN_TRIALS", "ResultRow", "SearchResult", "SystemConfig",
    "TrialMetrics", "VARIANTS", "aggregate", "draw_messages", "emit_results", "from_csv",
    "predict_grid", "run_grid", "run_trial", "run_trials", "score", "search_target",
    "simulate_frame", "simulate_point", "splitmix64", "to_csv", "to_ndtext", "trial_seed",
]
