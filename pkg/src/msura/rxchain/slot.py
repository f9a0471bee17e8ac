"""Iterative slot decoder with successive interference cancellation.

Each iteration works on one pilot part of one group. Detected rows are
processed strongest first; accepted messages are re-encoded and projected
out of the original observation once per iteration. The pilot part advances
every iteration. The decoder stays on a group while it keeps succeeding,
drops to the next weaker group after ``J`` consecutive failures (wrapping
from the weakest back to the strongest) and stops after ``G * J``
consecutive failures. A retry on an unchanged residual would repeat the same
computation, so this rule also covers the single-group case.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import SlotObservation
from ..errors import DegenerateEstimateError
from ..polar import scl_decode
from ..txchain import MessageCoder, deinterleave
from .detection import detect_pilots, estimate_channel, mrc_demod_llr
from .iisd import iisd
from .sic import ls_sic


def message_key(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes() + bytes([len(bits) % 8])


def success_check(bits, crc_ok: bool, detected_index: int, part: int, coder: MessageCoder,
                  known: set, message_crc_ok: bool | None = None) -> bool:
    """Accept a decoder output.

    Joint mode: the CRC holds and the decoded bits of pilot part ``part``
    select the row the user was detected on. Data-only mode: both CRCs
    hold. Messages already in ``known`` are rejected either way.
    """
    if bits is None or not crc_ok:
        return False
    if coder.config.wopbe:
        if not message_crc_ok:
            return False
    else:
        pilot_bits = coder.split(bits).pilot_parts[part]
        if coder.codebook.index_of(pilot_bits) != detected_index:
            return False
    return message_key(bits) not in known


@dataclass(eq=False)
class DecodedUser:
    bits: np.ndarray
    group: int
    samples: np.ndarray


@dataclass(eq=False)
class DecoderState:
    residual: np.ndarray
    group: int
    part: int = 0
    failures: int = 0
    group_failures: int = 0
    iteration: int = 0
    decoded: list = field(default_factory=list)
    known: set = field(default_factory=set)
    regularized: int = 0


@dataclass(eq=False)
class SlotResult:
    messages: list
    groups: list
    iterations: int
    regularized_sic: int
    trace: list


def _mrc_pass(R, part, detection, scheme, group, known, backend):
    cfg, coder = scheme.config, scheme.coder
    cb = coder.codebook
    n_p = cfg.n_p
    Yp = R[:, part * n_p:(part + 1) * n_p]
    Yc = R[:, cfg.J * n_p:]
    rows = np.array([cb.row(int(i)) for i in detection.indices], dtype=float).reshape(-1, n_p)
    H = estimate_channel(Yp, rows, group.pilot_power)
    accepted = []
    for k, idx in enumerate(detection.indices):
        others = np.delete(H, k, axis=1).T
        try:
            llr = mrc_demod_llr(H[:, k], Yc, others, group.coded_power, group.noise_level)
        except DegenerateEstimateError:
            continue
        info, ok = scl_decode(llr, coder.polar, coder.crc, backend)
        bits = coder.message_from_info(info)
        if success_check(bits, ok, int(idx), part, coder, known):
            known.add(message_key(bits))
            accepted.append(bits)
    return accepted


def _iisd_pass(R, part, detection, scheme, group, known, backend):
    results, _ = iisd(R, part, detection, scheme, group, backend)
    accepted = []
    for idx, (bits, ok) in zip(detection.indices, results):
        if success_check(bits, ok, int(idx), part, scheme.coder, known, message_crc_ok=ok):
            known.add(message_key(bits))
            accepted.append(bits)
    return accepted


def decode_slot(obs: SlotObservation, scheme, trace: bool = False, backend=None) -> SlotResult:
    """Recover the messages in one slot observation.

    ``obs.residual`` is left holding the final residual. With ``trace`` set,
    one record per iteration is collected (part, group, detections,
    successes, residual energy).
    """
    cfg = scheme.config
    groups = scheme.groups
    G, J, n_p, L = len(groups), cfg.J, cfg.n_p, cfg.L
    Y = obs.Y
    state = DecoderState(residual=Y.copy(), group=G - 1)
    records = []
    attempt = _iisd_pass if cfg.wopbe else _mrc_pass

    while state.failures < G * J and len(state.decoded) < L:
        grp = groups[state.group]
        R = state.residual if grp.perm is None else deinterleave(state.residual, grp.perm)
        part = state.part
        detection = detect_pilots(R[:, part * n_p:(part + 1) * n_p], scheme.coder.codebook,
                                  cfg.gamma, grp.noise_level)
        new = attempt(R, part, detection, scheme, grp, state.known, backend)
        state.iteration += 1
        if new:
            for bits in new:
                state.decoded.append(DecodedUser(bits, grp.index, scheme.transmitted(bits, grp.index)))
            X = np.vstack([u.samples for u in state.decoded])
            state.residual, reg = ls_sic(Y, X)
            state.regularized += int(reg)
            state.failures = 0
            state.group_failures = 0
        else:
            state.failures += 1
            state.group_failures += 1
        if trace:
            records.append({
                "iteration": state.iteration, "part": part, "group": grp.index,
                "detected": len(detection), "successes": len(new),
                "residual_energy": float(np.sum(np.abs(state.residual) ** 2)),
            })
        state.part = (part + 1) % J
        if state.group_failures >= J and G > 1:
            state.group = (state.group - 1) % G
            state.group_failures = 0

    obs.residual = state.residual
    return SlotResult([u.bits for u in state.decoded], [u.group for u in state.decoded],
                      state.iteration, state.regularized, records)
