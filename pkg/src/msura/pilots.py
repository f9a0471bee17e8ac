"""Orthogonal Hadamard pilot codebook.

Rows of the Sylvester-Hadamard matrix of order ``n_p = 2**B_p`` serve as
pilot sequences. A block of ``B_p`` message bits selects one row; the index
is the big-endian integer value of the bits, so ``bits = 0...0`` selects the
all-ones row.

Entries are kept as signed integers. Power scaling happens at the
transmitter, which keeps the orthogonality checks exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError

MAX_PILOT_BITS = 16
# Above this order the full matrix is not materialised eagerly.
_EAGER_BITS = 12


def _popcount_parity(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint32, copy=True)
    parity = np.zeros_like(x)
    while np.any(x):
        parity ^= x & 1
        x >>= 1
    return parity


@dataclass(frozen=True, eq=False)
class PilotCodebook:
    """Sylvester-Hadamard codebook of order ``n_p``.

    ``rows[i, k] = (-1) ** popcount(i & k)``, which equals the Kronecker
    recursion ``B_2 (x) B_{n/2}``.
    """

    bits: int

    @property
    def n_p(self) -> int:
        return 1 << self.bits

    @cached_property
    def rows(self) -> np.ndarray:
        """The ``n_p x n_p`` matrix with entries in {+1, -1} (read-only, int8)."""
        h = np.ones((1, 1), dtype=np.int8)
        b2 = np.array([[1, 1], [1, -1]], dtype=np.int8)
        for _ in range(self.bits):
            h = np.kron(b2, h)
        h.setflags(write=False)
        return h

    def row(self, index: int) -> np.ndarray:
        """Return row ``index`` without materialising the whole matrix."""
        if not 0 <= index < self.n_p:
            raise ParameterError(f"row index {index} outside [0, {self.n_p})")
        if "rows" in self.__dict__:
            return self.rows[index]
        k = np.arange(self.n_p, dtype=np.uint32)
        return (1 - 2 * _popcount_parity(k & np.uint32(index))).astype(np.int8)

    def index_of(self, bits) -> int:
        """Big-endian integer value of a ``B_p``-bit sequence."""
        bits = np.asarray(bits).ravel()
        if bits.size != self.bits:
            raise ParameterError(f"expected {self.bits} pilot bits, got {bits.size}")
        if np.any((bits != 0) & (bits != 1)):
            raise ParameterError("pilot bits must be 0 or 1")
        value = 0
        for b in bits:
            value = (value << 1) | int(b)
        return value

    def bits_of(self, index: int) -> np.ndarray:
        """Inverse of :meth:`index_of`."""
        if not 0 <= index < self.n_p:
            raise ParameterError(f"row index {index} outside [0, {self.n_p})")
        shifts = np.arange(self.bits - 1, -1, -1)
        return ((index >> shifts) & 1).astype(np.uint8)

    def correlate(self, y: np.ndarray) -> np.ndarray:
        """Normalised correlator outputs ``u_l = y b_l^T / sqrt(n_p)``.

        ``y`` is ``M x n_p``; the result is ``n_p x M`` with one row per
        candidate pilot.
        """
        y = np.asarray(y)
        if y.shape[-1] != self.n_p:
            raise ParameterError(f"pilot segment length {y.shape[-1]} != n_p={self.n_p}")
        return (self.rows @ y.T) / np.sqrt(self.n_p)


def build_codebook(bits: int) -> PilotCodebook:
    """Build the Sylvester-Hadamard codebook with ``2**bits`` rows."""
    if isinstance(bits, bool) or int(bits) != bits or not 1 <= bits <= MAX_PILOT_BITS:
        raise ParameterError(f"pilot bit count must be an integer in [1, {MAX_PILOT_BITS}], got {bits!r}")
    cb = PilotCodebook(int(bits))
    if cb.bits <= _EAGER_BITS:
        cb.rows  # noqa: B018 - materialise small codebooks up front
    return cb


def pilot_row(codebook: PilotCodebook, bits) -> np.ndarray:
    """Map a block of pilot bits to its codebook row."""
    return codebook.row(codebook.index_of(bits))
