"""One Monte Carlo trial: draw users, transmit every slot, decode, score."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..channel import transmit_repeated, transmit_slot
from ..config import SystemConfig
from ..rxchain import decode_slot, message_key
from ..scheme import Scheme

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One output of the splitmix64 generator seeded at state ``x``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, index: int) -> int:
    """Seed of trial ``index``: ``splitmix64(splitmix64(master) ^ index)``."""
    return splitmix64(splitmix64(master_seed & MASK64) ^ (index & MASK64))


@dataclass(frozen=True)
class TrialMetrics:
    missed: int
    false_alarms: int
    decoded: int
    active: int
    wall_time: float

    @property
    def p_md(self) -> float:
        return self.missed / self.active if self.active else 0.0

    @property
    def p_fa(self) -> float:
        return self.false_alarms / self.decoded if self.decoded else 0.0

    @property
    def pe(self) -> float:
        return self.p_md + self.p_fa


def score(transmitted, decoded) -> tuple:
    """``(missed, false alarms, distinct decoded)`` treating both as sets."""
    sent = {message_key(m) for m in transmitted}
    got = {message_key(m) for m in decoded}
    return len(sent - got), len(got - sent), len(got)


def draw_messages(rng: np.random.Generator, count: int, B: int) -> np.ndarray:
    """``count`` distinct uniform ``B``-bit messages, resampling duplicates."""
    out = rng.integers(0, 2, (count, B), dtype=np.uint8)
    while True:
        _, first = np.unique(out, axis=0, return_index=True)
        dup = np.setdiff1d(np.arange(count), first)
        if dup.size == 0:
            return out
        out[dup] = rng.integers(0, 2, (dup.size, B), dtype=np.uint8)


def simulate_frame(cfg: SystemConfig, rng: np.random.Generator, scheme: Scheme | None = None,
                   backend=None):
    """Draw, transmit and decode one frame.

    Returns ``(messages, slots, groups, decoded)`` where ``decoded`` lists the
    message arrays recovered over all slots.
    """
    scheme = scheme or Scheme(cfg)
    messages = draw_messages(rng, cfg.K_a, cfg.B)
    slots = rng.integers(0, cfg.S, cfg.K_a)
    groups = rng.integers(0, cfg.G, cfg.K_a)
    decoded = []
    for s in range(cfg.S):
        users = np.flatnonzero(slots == s)
        signals = [scheme.transmitted(messages[u], int(groups[u])) for u in users]
        if cfg.single_antenna_repetition:
            obs, _ = transmit_repeated(signals, cfg.M, cfg.V, cfg.noise_var, rng, cfg.J, cfg.n_p, cfg.L)
        else:
            obs, _ = transmit_slot(signals, cfg.M, cfg.noise_var, rng, cfg.J, cfg.n_p, cfg.L)
        decoded.extend(decode_slot(obs, scheme, backend=backend).messages)
    return messages, slots, groups, decoded


def run_trial(cfg: SystemConfig, seed: int, scheme: Scheme | None = None, backend=None) -> TrialMetrics:
    """Simulate one frame with generator ``default_rng(seed)`` and score it."""
    cfg.validate()
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    messages, _, _, decoded = simulate_frame(cfg, rng, scheme, backend)
    missed, fa, n_dec = score(messages, decoded)
    return TrialMetrics(missed, fa, n_dec, cfg.K_a, time.perf_counter() - start)
