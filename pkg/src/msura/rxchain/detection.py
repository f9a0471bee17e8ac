"""Pilot detection, channel estimation and soft demodulation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analysis import detection_threshold
from ..errors import DegenerateEstimateError, InputError
from ..pilots import PilotCodebook


@dataclass(frozen=True, eq=False)
class PilotDetection:
    """Detected pilot rows, strongest first, with their correlator energies."""

    indices: np.ndarray
    energy: np.ndarray
    threshold: float

    def __len__(self):
        return self.indices.size


def detect_pilots(Yp: np.ndarray, codebook: PilotCodebook, gamma: float, noise_level: float) -> PilotDetection:
    """Energy detector on the normalised correlator outputs of one pilot part.

    ``noise_level`` is the per-sample variance the threshold is calibrated
    for (the thermal noise, or an inflated level when weaker groups are
    treated as noise).
    """
    Yp = np.asarray(Yp)
    if Yp.ndim != 2:
        raise InputError("pilot observation must be an M x n_p matrix")
    u = codebook.correlate(Yp)
    energy = np.sum(u.real ** 2 + u.imag ** 2, axis=1)
    tau = detection_threshold(gamma, Yp.shape[0], noise_level)
    hits = np.flatnonzero(energy >= tau)
    order = hits[np.argsort(-energy[hits], kind="stable")]
    return PilotDetection(order, energy[order], tau)


def estimate_channel(Yp: np.ndarray, pilot, pilot_power: float) -> np.ndarray:
    """Correlation estimate ``Yp b / (n_p sqrt(P_p))``.

    ``pilot`` may be one row or a ``K x n_p`` stack; the result is an
    ``M``-vector or an ``M x K`` matrix accordingly.
    """
    pilot = np.asarray(pilot, dtype=float)
    n_p = pilot.shape[-1]
    return (np.asarray(Yp) @ pilot.T) / (n_p * np.sqrt(pilot_power))


def demod_interleave(v: np.ndarray) -> np.ndarray:
    """``[Im v_1, Re v_1, Im v_2, Re v_2, ...]`` along the last axis."""
    v = np.asarray(v)
    out = np.empty(v.shape[:-1] + (2 * v.shape[-1],))
    out[..., 0::2] = v.imag
    out[..., 1::2] = v.real
    return out


def mrc_demod_llr(h: np.ndarray, Yc: np.ndarray, others, coded_power: float, noise_level: float) -> np.ndarray:
    """Maximum-ratio combine the coded part and convert to bit LLRs.

    Interference from the other detected users enters the noise estimate
    through their estimated channels. Positive LLR favours bit 0.
    """
    h = np.asarray(h)
    gain = float(np.vdot(h, h).real)
    if not gain > 0:
        raise DegenerateEstimateError("channel estimate is zero")
    others = np.asarray(others, dtype=complex).reshape(-1, h.size)
    cross = others.conj() @ h
    noise = coded_power * float(np.sum(np.abs(cross) ** 2)) + noise_level * gain
    v = h.conj() @ Yc
    return (2 * np.sqrt(2 * coded_power) * gain / noise) * demod_interleave(v)


def mmse_demod_llr(H: np.ndarray, Yc: np.ndarray, coded_power: float, noise_level: float) -> np.ndarray:
    """Per-user MMSE combining of the coded part for all columns of ``H``.

    Returns one LLR row per user. The combiner for user ``i`` is
    ``R^{-1} h_i`` with ``R = noise I + P_c H H^H``.
    """
    H = np.asarray(H, dtype=complex)
    M = H.shape[0]
    R = noise_level * np.eye(M) + coded_power * (H @ H.conj().T)
    W = np.linalg.solve(R, H)
    gain = np.real(np.sum(H.conj() * W, axis=0))
    v = W.conj().T @ Yc
    scale = 2 * np.sqrt(2 * coded_power) / (1 - coded_power * gain)
    return scale[:, None] * demod_interleave(v)
