"""Iterative decoder for the data-only coding mode.

Pilot bits are not protected by the polar code, so after decoding the coded
part the receiver recovers the other pilot parts by channel matching and
refines the channel estimates with progressively longer known signals:

1. MMSE-combine the coded part with the current channel estimates and list
   decode every detected user.
2. Re-estimate channels from the known pilot plus re-encoded coded part.
3. For every other pilot part pick the row whose correlation estimate best
   aligns with the refined channel.
4. Re-estimate channels from the complete reconstructed signals.

The loop ends once the number of decoder CRC passes stops changing.
"""
from __future__ import annotations

import numpy as np

from ..polar import polar_encode, scl_decode
from ..txchain import qpsk_modulate
from .detection import PilotDetection, estimate_channel, mmse_demod_llr


def mmse_channel(Y: np.ndarray, X: np.ndarray, noise_level: float) -> np.ndarray:
    """Columns ``Y (noise I + X^H X)^{-1} x_i^H``, computed in the ``K x K`` domain."""
    A = noise_level * np.eye(X.shape[0]) + X @ X.conj().T
    return np.linalg.solve(A, X @ Y.conj().T).conj().T


def iisd(R: np.ndarray, part: int, detection: PilotDetection, scheme, group, backend=None):
    """Run the iterative decoder on one pilot part.

    Parameters
    ----------
    R : M x L residual in the group's de-interleaved sample order.
    part : pilot part used for detection.
    detection : detected rows of that part.
    scheme : :class:`msura.scheme.Scheme` in the data-only mode.
    group : :class:`msura.scheme.GroupParams` being decoded.

    Returns
    -------
    list of ``(message bits, both_crcs_ok)`` for every detected row, in
    detection order, and the number of passes run.
    """
    cfg = scheme.config
    coder = scheme.coder
    cb = coder.codebook
    J, n_p = cfg.J, cfg.n_p
    K = len(detection)
    if K == 0:
        return [], 0
    P_p, P_c, noise = group.pilot_power, group.coded_power, group.noise_level
    pilot = lambda f: R[:, f * n_p:(f + 1) * n_p]  # noqa: E731
    Yc = R[:, J * n_p:]
    rows = np.array([cb.row(int(i)) for i in detection.indices], dtype=float)
    H = estimate_channel(pilot(part), rows, P_p)
    # Per-part correlation estimates for every candidate row.
    all_rows = np.array([cb.row(t) for t in range(n_p)], dtype=float)
    candidates = {f: estimate_channel(pilot(f), all_rows, P_p) for f in range(J) if f != part}

    prev = 0
    passes = 0
    words = ok1 = parts = None
    for _ in range(cfg.iisd_max_iter):
        passes += 1
        llrs = mmse_demod_llr(H, Yc, P_c, noise)
        decoded = [scl_decode(llr, coder.polar, coder.crc, backend) for llr in llrs]
        words = np.array([w for w, _ in decoded], dtype=np.uint8)
        ok1 = np.array([ok for _, ok in decoded], dtype=bool)
        count = int(ok1.sum())
        if count == 0 and prev == 0:
            return [(None, False)] * K, passes

        coded = qpsk_modulate(polar_encode(words, coder.polar), P_c)
        known = np.hstack([np.sqrt(P_p) * rows, coded])
        H = mmse_channel(np.hstack([pilot(part), Yc]), known, noise)

        parts = np.empty((K, J), dtype=np.int64)
        parts[:, part] = detection.indices
        for f, S in candidates.items():
            score = np.abs(H.conj().T @ S) ** 2 / np.sum(np.abs(S) ** 2, axis=0)
            parts[:, f] = np.argmax(score, axis=1)

        X = np.hstack([np.sqrt(P_p) * np.array([cb.row(int(t)) for t in parts[:, f]], dtype=float)
                       for f in range(J)] + [coded])
        H = mmse_channel(R, X, noise)
        if count == prev:
            break
        prev = count

    out = []
    for i in range(K):
        bits = np.concatenate([cb.bits_of(int(t)) for t in parts[i]] + [words[i, :cfg.B_c]])
        out.append((bits, bool(ok1[i] and coder.message_crc_holds(bits, words[i]))))
    return out, passes
