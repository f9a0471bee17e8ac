"""Rayleigh block-fading multiple-access channel for one slot.

``Y = H X + Z`` with unit-variance circularly symmetric Gaussian fading,
constant over the slot, and white Gaussian noise. Repetition variants see
``V`` independent draws that are stacked as extra receive antennas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ParameterError


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples (real block drawn first)."""
    scale = math.sqrt(variance / 2)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


@dataclass(frozen=True, eq=False)
class ChannelDraw:
    H: np.ndarray
    noise_var: float


@dataclass(eq=False)
class SlotObservation:
    """Received slot matrix ``Y`` and the working residual.

    Part views slice the last axis: pilot part ``j`` covers samples
    ``[j n_p, (j+1) n_p)`` and the coded part the final ``n_c`` samples.
    """

    Y: np.ndarray
    J: int
    n_p: int
    residual: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.residual is None:
            self.residual = self.Y.copy()

    @property
    def M(self) -> int:
        return self.Y.shape[0]

    @property
    def n_c(self) -> int:
        return self.Y.shape[1] - self.J * self.n_p

    def pilot_part(self, j: int, residual: bool = True) -> np.ndarray:
        src = self.residual if residual else self.Y
        return src[:, j * self.n_p:(j + 1) * self.n_p]

    def coded_part(self, residual: bool = True) -> np.ndarray:
        src = self.residual if residual else self.Y
        return src[:, self.J * self.n_p:]

    def parts(self, residual: bool = True) -> list:
        return [self.pilot_part(j, residual) for j in range(self.J)] + [self.coded_part(residual)]


def _stack(signals, length: int | None) -> np.ndarray:
    rows = [np.asarray(getattr(s, "samples", s), dtype=complex) for s in signals]
    if not rows:
        if length is None:
            raise InputError("slot length is required when no user transmits")
        return np.zeros((0, length), dtype=complex)
    sizes = {r.size for r in rows}
    if len(sizes) != 1:
        raise InputError(f"signals have differing lengths {sorted(sizes)}")
    if length is not None and sizes != {length}:
        raise InputError(f"signals have length {sizes.pop()}, expected {length}")
    return np.vstack(rows)


def transmit_slot(signals, M: int, noise_var: float, rng: np.random.Generator,
                  J: int, n_p: int, length: int | None = None, H=None, Z=None):
    """Pass the slot's signals through the channel.

    Returns ``(observation, draw)``; ``draw`` exposes the fading matrix for
    oracle checks. ``H`` and ``Z`` may be supplied to reuse a draw. The
    fading matrix is drawn before the noise.
    """
    X = _stack(signals, length)
    K, L = X.shape
    if H is None:
        H = complex_normal(rng, (M, K))
    if Z is None:
        Z = complex_normal(rng, (M, L), noise_var) if noise_var > 0 else np.zeros((M, L), complex)
    H = np.asarray(H, dtype=complex)
    if H.shape != (M, K) or np.shape(Z) != (M, L):
        raise InputError("supplied channel or noise has the wrong shape")
    Y = H @ X + Z
    return SlotObservation(Y, J, n_p), ChannelDraw(H, noise_var)


def transmit_repeated(signals, M: int, V: int, noise_var: float, rng: np.random.Generator,
                      J: int, n_p: int, length: int | None = None):
    """Send each signal once per sub-frame and stack the ``V`` observations.

    Every sub-frame draws fresh fading. The result has ``V * M`` rows, ordered
    sub-frame major, and consumes the generator exactly like a single slot
    with ``V * M`` antennas.
    """
    X = _stack(signals, length)
    K, L = X.shape
    H = complex_normal(rng, (V, M, K)).reshape(V * M, K)
    Z = complex_normal(rng, (V, M, L), noise_var).reshape(V * M, L) if noise_var > 0 \
        else np.zeros((V * M, L), complex)
    return transmit_slot(X, V * M, noise_var, rng, J, n_p, L, H=H, Z=Z)


def ebn0_db(P: float, L: int, B: int, noise_var: float, V: int = 1) -> float:
    """Energy per information bit over noise density, in dB."""
    if min(P, L, B, noise_var) <= 0 or V < 1:
        raise ParameterError("all quantities must be positive and V >= 1")
    return 10 * math.log10(V * L * P / (noise_var * B))


def power_for_ebn0(ebn0: float, L: int, B: int, noise_var: float, V: int = 1) -> float:
    """Average per-sample power that achieves ``ebn0`` dB."""
    if min(L, B, noise_var) <= 0 or V < 1:
        raise ParameterError("all quantities must be positive and V >= 1")
    return 10 ** (ebn0 / 10) * noise_var * B / (V * L)
