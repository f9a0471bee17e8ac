"""CRC-aided successive-cancellation list decoding.

The compiled kernel is used when it imports; setting ``MSURA_PURE_PYTHON=1``
forces the numpy fallback. Both return the same paths.
"""
from __future__ import annotations

import os

import numpy as np

from ..errors import InputError, ParameterError
from . import _scl_py
from .construction import PolarCodeSpec
from .crc import CrcSpec, crc_check

_BACKENDS = {"python": _scl_py.scl_paths}
try:
    from . import _scl_ext
except ImportError:  # pragma: no cover - depends on the build
    _scl_ext = None
else:
    _BACKENDS["compiled"] = _scl_ext.scl_paths

if _scl_ext is not None and os.environ.get("MSURA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    BACKEND = "compiled"
else:
    BACKEND = "python"


def available_backends() -> list:
    return sorted(_BACKENDS)


def _validate(llr, spec: PolarCodeSpec) -> np.ndarray:
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    if llr.ndim != 1 or llr.size != spec.block_length:
        raise InputError(f"expected {spec.block_length} LLRs, got shape {llr.shape}")
    if spec.block_length < 2:
        raise ParameterError("block length must be at least 2")
    if not np.all(np.isfinite(llr)):
        raise InputError("LLRs must be finite")
    return llr


def scl_list(llr, spec: PolarCodeSpec, backend: str | None = None):
    """All surviving paths, most likely first.

    Returns ``(info_words, metrics)`` where each row of ``info_words`` holds
    the bits on the non-frozen positions. Paths are ordered by metric, then
    lexicographically by their bits, so the order does not depend on how the
    kernel arranged its slots.
    """
    llr = _validate(llr, spec)
    try:
        kernel = _BACKENDS[backend or BACKEND]
    except KeyError:
        raise ParameterError(f"unknown backend {backend!r}; choose from {available_backends()}") from None
    u, pm = kernel(llr, np.ascontiguousarray(spec.frozen_mask), spec.list_size)
    info = u[:, spec.info_positions]
    keys = [info[:, i] for i in range(info.shape[1] - 1, -1, -1)] + [pm]
    order = np.lexsort(keys)
    return info[order], pm[order]


def scl_decode(llr, spec: PolarCodeSpec, crc: CrcSpec | None = None, backend: str | None = None):
    """Decode one block.

    Returns ``(info_word, crc_ok)``: the most likely path whose CRC holds, or
    the most likely path overall with ``crc_ok = False``. Without a CRC the
    most likely path is returned with ``crc_ok = True``. The info word still
    carries its CRC tail.
    """
    info, _ = scl_list(llr, spec, backend)
    if crc is None:
        return info[0].copy(), True
    ok = np.atleast_1d(crc_check(info, crc))
    hits = np.flatnonzero(ok)
    if hits.size:
        return info[hits[0]].copy(), True
    return info[0].copy(), False


def sc_decode(llr, spec: PolarCodeSpec) -> np.ndarray:
    """Plain successive cancellation by recursion; used as a reference."""
    llr = _validate(llr, spec)
    frozen = spec.frozen_mask
    u = np.zeros(spec.block_length, dtype=np.uint8)

    def node(alpha, lo):
        # Returns the re-encoded bits of this subtree.
        if alpha.size == 1:
            bit = 0 if frozen[lo] or alpha[0] >= 0 else 1
            u[lo] = bit
            return np.array([bit], dtype=np.uint8)
        h = alpha.size // 2
        a, b = alpha[:h], alpha[h:]
        left = node(np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b)), lo)
        right = node(b + (1 - 2 * left.astype(float)) * a, lo + h)
        return np.concatenate([left ^ right, right])

    node(llr, 0)
    return u[spec.info_positions].copy()
