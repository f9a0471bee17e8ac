"""Trial aggregation, Eb/N0 grids and target-error search."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..config import SystemConfig
from ..errors import ConfigError
from ..scheme import Scheme
from .results import ResultRow
from .trial import TrialMetrics, run_trial, trial_seed

log = logging.getLogger(__name__)

MIN_TRIALS = 100
Z95 = 1.959963984540054


@dataclass(frozen=True)
class Estimate:
    pe: float
    pmd: float
    pfa: float
    ci_lo: float
    ci_hi: float
    trials: int


def aggregate(metrics) -> Estimate:
    """Mean per-trial error with a normal-approximation 95% interval."""
    pe = np.array([m.pe for m in metrics], dtype=float)
    n = pe.size
    if n == 0:
        raise ConfigError("no trials to aggregate")
    mean = float(pe.mean())
    half = Z95 * float(pe.std(ddof=1)) / math.sqrt(n) if n > 1 else math.inf
    return Estimate(mean, float(np.mean([m.p_md for m in metrics])),
                    float(np.mean([m.p_fa for m in metrics])),
                    max(mean - half, 0.0), mean + half, n)


def _run_chunk(cfg: SystemConfig, indices) -> list:
    scheme = Scheme(cfg)
    return [(i, run_trial(cfg, trial_seed(cfg.seed, i), scheme)) for i in indices]


def run_trials(cfg: SystemConfig, threads: int = 1) -> list:
    """All ``cfg.trials`` trials, returned in trial-index order."""
    cfg.validate()
    indices = list(range(cfg.trials))
    if threads <= 1 or cfg.trials < 2:
        pairs = _run_chunk(cfg, indices)
    else:
        chunks = [indices[w::threads] for w in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            pairs = [p for part in pool.map(_run_chunk, [cfg] * threads, chunks) for p in part]
    return [m for _, m in sorted(pairs, key=lambda p: p[0])]


def simulate_point(cfg: SystemConfig, threads: int = 1, min_trials: int = MIN_TRIALS) -> ResultRow:
    if cfg.trials < min_trials:
        raise ConfigError(f"confidence intervals need at least {min_trials} trials, got {cfg.trials}")
    est = aggregate(run_trials(cfg, threads))
    log.info("%s Eb/N0=%.2f dB: Pe=%.4f [%.4f, %.4f]", cfg.variant, cfg.ebn0_db, est.pe, est.ci_lo, est.ci_hi)
    return ResultRow.for_config(cfg, est.pe, est.pmd, est.pfa, est.ci_lo, est.ci_hi, est.trials, "simulated")


def run_grid(cfg: SystemConfig, grid, threads: int = 1) -> list:
    """One simulated row per Eb/N0 value in ``grid``."""
    grid = list(grid)
    if not grid:
        raise ConfigError("Eb/N0 grid is empty")
    return [simulate_point(cfg.replace(ebn0_db=float(e)), threads) for e in grid]


@dataclass(frozen=True)
class SearchResult:
    attained: bool
    ebn0_db: float | None
    row: ResultRow | None
    bracket: tuple
    rows: tuple


def search_target(cfg: SystemConfig, target: float, low: float, high: float,
                  resolution: float = 0.25, threads: int = 1) -> SearchResult:
    """Smallest Eb/N0 on a ``resolution`` lattice over ``[low, high]`` whose
    upper confidence bound is at most ``target``, found by bisection.

    If even ``high`` misses the target, the result is marked unattained and
    ``bracket`` holds the tested end points.
    """
    if not 0 < target < 1:
        raise ConfigError("target error must lie in (0, 1)")
    if not high > low or resolution <= 0:
        raise ConfigError("need low < high and a positive resolution")
    steps = int(math.ceil((high - low) / resolution))
    cache = {}

    def ok(step):
        if step not in cache:
            cache[step] = simulate_point(cfg.replace(ebn0_db=low + step * resolution), threads)
        return cache[step].ci_hi <= target

    if not ok(steps):
        rows = tuple(cache[k] for k in sorted(cache))
        return SearchResult(False, None, None, (low, low + steps * resolution), rows)
    lo, hi = -1, steps
    if ok(0):
        hi = 0
    else:
        lo = 0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
    rows = tuple(cache[k] for k in sorted(cache))
    bracket = (low + lo * resolution if lo >= 0 else None, low + hi * resolution)
    return SearchResult(True, low + hi * resolution, cache[hi], bracket, rows)


def predict_grid(cfg: SystemConfig, grid) -> list:
    """Analytic rows (source ``analytic``); single-group variants only.

    Repetition variants are predicted with ``M * V`` receive dimensions.
    """
    from ..analysis import AnalyticConfig, pupe_analytic

    if cfg.G > 1:
        raise ConfigError("the analytic predictor covers single-group variants only")
    grid = list(grid)
    if not grid:
        raise ConfigError("Eb/N0 grid is empty")
    rows = []
    for e in grid:
        c = cfg.replace(ebn0_db=float(e))
        c.validate()
        pe = pupe_analytic(AnalyticConfig.from_system(c))
        rows.append(ResultRow.for_config(c, pe, pe, 0.0, pe, pe, 0, "analytic"))
    return rows
