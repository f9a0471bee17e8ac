"""Cyclic redundancy checks over bit arrays.

A :class:`CrcSpec` describes a standard non-reflected CRC: the remainder of
``payload(x) * x**degree`` divided by the generator, computed by a shift
register seeded with ``init``. Because the register update is affine in the
payload, each spec caches a parity matrix per payload length so that many
candidate words can be checked with one matrix product.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError

# Generator polynomials without the leading x**degree term.
STANDARD_POLYNOMIALS = {
    3: 0x3,      # x^3 + x + 1
    4: 0x3,      # x^4 + x + 1
    5: 0x15,     # x^5 + x^4 + x^2 + 1
    6: 0x21,     # x^6 + x^5 + 1 (NR CRC6)
    7: 0x09,     # x^7 + x^3 + 1
    8: 0x9B,     # x^8 + x^7 + x^4 + x^3 + x + 1 (WCDMA CRC8)
    11: 0x621,   # x^11 + x^10 + x^9 + x^5 + 1 (NR CRC11)
    12: 0x80F,   # x^12 + x^11 + x^3 + x^2 + x + 1
    16: 0x1021,  # CCITT
    24: 0xB2B117,  # NR CRC24C
}


@dataclass(frozen=True)
class CrcSpec:
    degree: int
    polynomial: int
    init: int = 0
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.degree < 1:
            raise ParameterError("CRC degree must be positive")
        if not 0 <= self.polynomial < (1 << self.degree) or not self.polynomial & 1:
            raise ParameterError(
                f"polynomial mask {self.polynomial:#x} is not a degree-{self.degree} generator"
            )
        if not 0 <= self.init < (1 << self.degree):
            raise ParameterError("initial register value does not fit the degree")

    @classmethod
    def standard(cls, degree: int) -> "CrcSpec":
        try:
            return cls(degree, STANDARD_POLYNOMIALS[degree])
        except KeyError:
            raise ParameterError(
                f"no default polynomial for degree {degree}; pass one explicitly"
            ) from None

    def _register(self, payload: np.ndarray) -> int:
        reg = self.init
        top = 1 << (self.degree - 1)
        mask = (1 << self.degree) - 1
        for bit in payload:
            feedback = bool(reg & top) ^ bool(bit)
            reg = (reg << 1) & mask
            if feedback:
                reg ^= self.polynomial
        return reg

    def _to_bits(self, reg: int) -> np.ndarray:
        shifts = np.arange(self.degree - 1, -1, -1)
        return ((reg >> shifts) & 1).astype(np.uint8)

    def _affine(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        try:
            return self._cache[k]
        except KeyError:
            pass
        zero = np.zeros(k, dtype=np.uint8)
        offset = self._to_bits(self._register(zero))
        # Reset init to zero for the linear part.
        lin = CrcSpec(self.degree, self.polynomial)
        mat = np.empty((k, self.degree), dtype=np.uint8)
        for i in range(k):
            e = zero.copy()
            e[i] = 1
            mat[i] = lin._to_bits(lin._register(e))
        self._cache[k] = (mat, offset)
        return mat, offset

    def remainder(self, payload) -> np.ndarray:
        """CRC bits of one payload, or of each row of a 2-D batch."""
        payload = np.asarray(payload, dtype=np.uint8)
        mat, offset = self._affine(payload.shape[-1])
        return ((payload.astype(np.int64) @ mat) & 1).astype(np.uint8) ^ offset


def crc_attach(payload, spec: CrcSpec) -> np.ndarray:
    """Append the CRC of ``payload``."""
    payload = np.asarray(payload, dtype=np.uint8).ravel()
    if payload.size == 0:
        raise ParameterError("payload must be non-empty")
    return np.concatenate([payload, spec.remainder(payload)])


def crc_check(word, spec: CrcSpec):
    """True where the trailing ``degree`` bits equal the CRC of the rest.

    Accepts a single word or a 2-D batch (one word per row).
    """
    word = np.asarray(word, dtype=np.uint8)
    if word.shape[-1] <= spec.degree:
        raise ParameterError("word shorter than the CRC")
    body, tail = word[..., : -spec.degree], word[..., -spec.degree:]
    ok = np.all(spec.remainder(body) == tail, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok
