"""Polar encoding in natural bit order."""
from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from .construction import PolarCodeSpec


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Compute ``u F^{(x)m}`` over GF(2) along the last axis.

    ``F = [[1, 0], [1, 1]]``, so a block of two maps ``[u0, u1]`` to
    ``[u0 ^ u1, u1]``. Works on a single word or a batch of rows.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    if n & (n - 1):
        raise ParameterError(f"length {n} is not a power of two")
    lead = x.shape[:-1]
    half = 1
    while half < n:
        v = x.reshape(*lead, n // (2 * half), 2, half)
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return x


def polar_encode(info, spec: PolarCodeSpec) -> np.ndarray:
    """Place ``info`` on the non-frozen positions and apply the transform.

    ``info`` may be one word of length ``spec.info_length`` or a 2-D batch.
    """
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != spec.info_length:
        raise ParameterError(f"expected {spec.info_length} info bits, got {info.shape[-1]}")
    u = np.zeros(info.shape[:-1] + (spec.block_length,), dtype=np.uint8)
    u[..., spec.info_positions] = info
    return polar_transform(u)
