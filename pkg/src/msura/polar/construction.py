"""Polar code construction.

Bit-channel reliabilities come from the Gaussian approximation of density
evolution, evaluated once at a fixed design SNR and shipped as plain-text
tables (``data/reliability_v1_N<len>.txt``, one index per line, least reliable
first). The encoder uses ``x = u F^{(x)m}`` in natural order, so bit channel
``i`` sees the check-node update at tree depth ``d`` when bit ``m-1-d`` of
``i`` is zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..errors import ParameterError

DESIGN_SNR_DB = 2.0
TABLE_VERSION = 1
MAX_TABLE_LENGTH = 4096

_A, _B, _C = 0.4527, 0.86, 0.0218


def _log_phi(x: np.ndarray) -> np.ndarray:
    # log of Chung's phi(x); phi is strictly decreasing with phi(0) = 1.
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    small = (x > 0) & (x < 10)
    large = x >= 10
    out[small] = -_A * x[small] ** _B + _C
    xl = x[large]
    out[large] = 0.5 * np.log(np.pi / xl) - xl / 4 + np.log1p(-10.0 / (7.0 * xl))
    return out


def _inv_log_phi(target: np.ndarray) -> np.ndarray:
    lo = np.zeros_like(target)
    hi = np.full_like(target, 1.0)
    while np.any(_log_phi(hi) > target):
        hi = np.where(_log_phi(hi) > target, hi * 2, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = _log_phi(mid) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def _check_node_mean(m: np.ndarray) -> np.ndarray:
    # phi(out) = 1 - (1 - phi(m))^2 = phi(m) * (2 - phi(m)), evaluated in logs.
    lp = _log_phi(m)
    target = lp + np.log(2.0 - np.exp(lp))
    out = _inv_log_phi(target)
    return np.where(m > 0, out, 0.0)


def ga_mean_llrs(block_length: int, design_snr_db: float = DESIGN_SNR_DB) -> np.ndarray:
    """Mean LLR of every bit channel under the Gaussian approximation.

    The channel is BPSK over AWGN at ``Es/N0 = design_snr_db``, so the
    channel LLR mean is ``4 Es/N0``.
    """
    n = _log2(block_length)
    means = np.array([4.0 * 10 ** (design_snr_db / 10)])
    for _ in range(n):
        nxt = np.empty(2 * means.size)
        nxt[0::2] = _check_node_mean(means)
        nxt[1::2] = 2.0 * means
        means = nxt
    return means


def reliability_order(block_length: int, design_snr_db: float = DESIGN_SNR_DB) -> np.ndarray:
    """Bit-channel indices sorted from least to most reliable (ties by index)."""
    return np.argsort(ga_mean_llrs(block_length, design_snr_db), kind="stable")


def _log2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ParameterError(f"block length {n} is not a power of two")
    return n.bit_length() - 1


def table_name(block_length: int) -> str:
    return f"reliability_v{TABLE_VERSION}_N{block_length}.txt"


@lru_cache(maxsize=None)
def load_reliability(block_length: int) -> np.ndarray:
    """Read the shipped reliability table for ``block_length``."""
    _log2(block_length)
    try:
        text = resources.files("msura.polar").joinpath("data", table_name(block_length)).read_text()
    except FileNotFoundError:
        raise ParameterError(f"no shipped reliability table for block length {block_length}") from None
    seq = np.array([int(line) for line in text.split("\n") if line and not line.startswith("#")])
    if sorted(seq.tolist()) != list(range(block_length)):
        raise ParameterError(f"corrupt reliability table for block length {block_length}")
    seq.setflags(write=False)
    return seq


def build_frozen_set(block_length: int, info_length: int) -> np.ndarray:
    """Indices of the ``block_length - info_length`` least reliable channels, sorted."""
    if not 0 <= info_length <= block_length:
        raise ParameterError(f"info length {info_length} outside [0, {block_length}]")
    seq = load_reliability(block_length)
    return np.sort(seq[: block_length - info_length])


@dataclass(frozen=True, eq=False)
class PolarCodeSpec:
    block_length: int
    info_length: int
    frozen_set: np.ndarray
    list_size: int = 64

    def __post_init__(self):
        _log2(self.block_length)
        if self.list_size < 1:
            raise ParameterError("list size must be positive")
        frozen = np.asarray(self.frozen_set, dtype=np.int64)
        if frozen.size + self.info_length != self.block_length:
            raise ParameterError("frozen set size does not match block and info lengths")
        if frozen.size and (np.unique(frozen).size != frozen.size or frozen.min() < 0
                            or frozen.max() >= self.block_length):
            raise ParameterError("frozen indices must be distinct and inside the block")
        frozen = np.sort(frozen)
        frozen.setflags(write=False)
        object.__setattr__(self, "frozen_set", frozen)
        mask = np.zeros(self.block_length, dtype=np.uint8)
        mask[frozen] = 1
        mask.setflags(write=False)
        object.__setattr__(self, "frozen_mask", mask)
        info = np.flatnonzero(mask == 0)
        info.setflags(write=False)
        object.__setattr__(self, "info_positions", info)

    @classmethod
    def build(cls, block_length: int, info_length: int, list_size: int = 64) -> "PolarCodeSpec":
        return cls(block_length, info_length, build_frozen_set(block_length, info_length), list_size)

    def with_list_size(self, list_size: int) -> "PolarCodeSpec":
        return PolarCodeSpec(self.block_length, self.info_length, self.frozen_set, list_size)


def write_tables(directory, max_length: int = MAX_TABLE_LENGTH) -> list:
    """Regenerate the shipped reliability tables into ``directory``."""
    from pathlib import Path

    out = []
    n = 2
    while n <= max_length:
        order = reliability_order(n)
        path = Path(directory) / table_name(n)
        header = (f"# polar bit-channel reliability, least reliable first\n"
                  f"# version {TABLE_VERSION}; Gaussian approximation; design Es/N0 {DESIGN_SNR_DB} dB\n")
        path.write_text(header + "\n".join(str(i) for i in order) + "\n")
        out.append(path)
        n *= 2
    return out


if __name__ == "__main__":  # pragma: no cover
    import sys

    for p in write_tables(sys.argv[1] if len(sys.argv) > 1 else resources.files("msura.polar") / "data"):
        print(p)
