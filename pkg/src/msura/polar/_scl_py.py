"""Pure numpy successive-cancellation list decoder kernel.

Mirrors the compiled kernel operation for operation so the two backends
return identical paths. Per-path state lives in fixed slots:

* ``llrs[slot]`` packs the intermediate LLRs of tree levels ``1..n``; level
  ``d`` holds ``N >> d`` values starting at ``offsets[d]``.
* ``sums[slot]`` packs the partial sums, two columns per node, at twice the
  same offsets.
* ``bits[slot]`` is the decided ``u`` vector.

When a path forks, the bit-0 child keeps the parent's slot and the bit-1 child
is copied into the lowest free slot. Candidates are ranked by path metric
with ties broken by ``2 * slot + bit``.
"""
from __future__ import annotations

import numpy as np


def level_offsets(n: int) -> np.ndarray:
    """``offsets[d]`` is the start of tree level ``d`` in the packed LLR row."""
    N = 1 << n
    off = np.zeros(n + 2, dtype=np.int64)
    for d in range(1, n + 1):
        off[d + 1] = off[d] + (N >> d)
    return off


def _trailing_zeros(x: int) -> int:
    return (x & -x).bit_length() - 1


def _check_node(a, b):
    return np.where((a < 0) ^ (b < 0), -1.0, 1.0) * np.minimum(np.abs(a), np.abs(b))


def scl_paths(llr: np.ndarray, frozen: np.ndarray, list_size: int):
    """Run the list decoder and return ``(bits, metrics)`` of surviving paths.

    Parameters
    ----------
    llr : float64 array of length ``N``
        Channel LLRs, positive favouring bit 0.
    frozen : uint8 array of length ``N``
        Nonzero at frozen positions.
    list_size : int

    Returns
    -------
    bits : uint8 array, one decided ``u`` vector per surviving path
    metrics : float64 array of path metrics (lower is more likely)
    """
    N = llr.size
    n = N.bit_length() - 1
    off = level_offsets(n)
    p_len = N - 1
    llrs = np.zeros((list_size, p_len))
    sums = np.zeros((list_size, 2 * p_len), dtype=np.uint8)
    bits = np.zeros((list_size, N), dtype=np.uint8)
    pm = np.zeros(list_size)
    active = np.zeros(list_size, dtype=bool)
    active[0] = True
    leaf = off[n]

    for phi in range(N):
        act = np.flatnonzero(active)
        start = 1 if phi == 0 else n - _trailing_zeros(phi)
        for d in range(start, n + 1):
            S = N >> d
            if d == 1:
                a = np.broadcast_to(llr[:S], (act.size, S))
                b = np.broadcast_to(llr[S:], (act.size, S))
            else:
                a = llrs[act, off[d - 1]:off[d - 1] + S]
                b = llrs[act, off[d - 1] + S:off[d - 1] + 2 * S]
            if (phi >> (n - d)) & 1:
                c = sums[act, 2 * off[d]:2 * off[d] + 2 * S:2]
                llrs[act, off[d]:off[d] + S] = np.where(c != 0, b - a, b + a)
            else:
                llrs[act, off[d]:off[d] + S] = _check_node(a, b)

        lv = llrs[act, leaf]
        if frozen[phi]:
            pm[act] = pm[act] + np.where(lv < 0, np.abs(lv), 0.0)
            bits[act, phi] = 0
        else:
            pen0 = np.where(lv < 0, np.abs(lv), 0.0)
            pen1 = np.where(lv > 0, np.abs(lv), 0.0)
            metric = np.empty(2 * act.size)
            metric[0::2] = pm[act] + pen0
            metric[1::2] = pm[act] + pen1
            index = np.empty(2 * act.size, dtype=np.int64)
            index[0::2] = 2 * act
            index[1::2] = 2 * act + 1
            if index.size > list_size:
                keep_idx = index[np.lexsort((index, metric))[:list_size]]
            else:
                keep_idx = index
            keep0 = np.zeros(list_size, dtype=bool)
            keep1 = np.zeros(list_size, dtype=bool)
            keep0[keep_idx[keep_idx % 2 == 0] // 2] = True
            keep1[keep_idx[keep_idx % 2 == 1] // 2] = True
            active[act[~keep0[act] & ~keep1[act]]] = False
            for k, slot in enumerate(act):
                if keep0[slot] and keep1[slot]:
                    new = int(np.argmin(active))
                    llrs[new] = llrs[slot]
                    sums[new] = sums[slot]
                    bits[new] = bits[slot]
                    active[new] = True
                    pm[new] = pm[slot] + pen1[k]
                    bits[new, phi] = 1
                    pm[slot] = pm[slot] + pen0[k]
                    bits[slot, phi] = 0
                elif keep0[slot]:
                    pm[slot] = pm[slot] + pen0[k]
                    bits[slot, phi] = 0
                elif keep1[slot]:
                    pm[slot] = pm[slot] + pen1[k]
                    bits[slot, phi] = 1

        act = np.flatnonzero(active)
        sums[act, 2 * leaf + (phi & 1)] = bits[act, phi]
        d, psi = n, phi
        while psi & 1 and d > 1:
            S = N >> d
            col = (psi >> 1) & 1
            here = 2 * off[d]
            up = 2 * off[d - 1]
            c0 = sums[act, here:here + 2 * S:2]
            c1 = sums[act, here + 1:here + 2 * S:2]
            sums[act, up + col:up + 2 * S:2] = c0 ^ c1
            sums[act, up + 2 * S + col:up + 4 * S:2] = c1
            psi >>= 1
            d -= 1

    act = np.flatnonzero(active)
    return bits[act].copy(), pm[act].copy()
