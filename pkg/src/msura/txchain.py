"""Transmitter: message splitting, coding, modulation and signal assembly.

A slot signal is ``J`` pilot segments of ``n_p`` samples followed by
``n_c`` QPSK symbols. Each pilot segment is a scaled codebook row chosen by a
block of message bits. Grouped variants additionally permute the samples
with a group-specific interleaver.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import SystemConfig
from .errors import ConfigError, ParameterError
from .pilots import PilotCodebook, build_codebook
from .polar import CrcSpec, PolarCodeSpec, crc_attach, polar_encode


@dataclass(frozen=True, eq=False)
class UserMessage:
    """A message and its pilot/coded partition."""

    bits: np.ndarray
    pilot_parts: tuple
    coded: np.ndarray

    def concat(self) -> np.ndarray:
        return np.concatenate(list(self.pilot_parts) + [self.coded])


def split_message(bits, J: int, pilot_bits: int) -> UserMessage:
    """First ``J * pilot_bits`` bits select pilots; the rest is coded data."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if J < 0 or pilot_bits < 1:
        raise ConfigError("need J >= 0 and pilot_bits >= 1")
    if bits.size < J * pilot_bits:
        raise ConfigError(f"{bits.size} bits cannot fill {J} pilot parts of {pilot_bits} bits")
    parts = tuple(bits[j * pilot_bits:(j + 1) * pilot_bits] for j in range(J))
    return UserMessage(bits, parts, bits[J * pilot_bits:])


def qpsk_modulate(bits, coded_power: float) -> np.ndarray:
    """Gray QPSK; bit ``2t`` drives the imaginary part, bit ``2t+1`` the real part."""
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise ParameterError("QPSK needs an even number of bits")
    amp = np.sqrt(coded_power / 2)
    b = 1.0 - 2.0 * bits.astype(float)
    return amp * (b[..., 1::2] + 1j * b[..., 0::2])


@dataclass(frozen=True, eq=False)
class MessageCoder:
    """Maps messages to codewords and decoder outputs back to messages.

    In the joint mode the whole message plus one CRC is polar coded. In the
    data-only mode the polar input is ``coded bits + CRC of the full message +
    CRC of both``; pilot bits travel only through the pilot choice.
    """

    config: SystemConfig

    @cached_property
    def polar(self) -> PolarCodeSpec:
        c = self.config
        return PolarCodeSpec.build(c.block_length, c.info_length, c.list_size)

    @cached_property
    def crc(self) -> CrcSpec:
        """CRC checked inside the list decoder."""
        c = self.config
        return CrcSpec.standard(c.r1 if c.wopbe else c.r)

    @cached_property
    def message_crc(self) -> CrcSpec | None:
        c = self.config
        return CrcSpec.standard(c.r2) if c.wopbe else None

    @cached_property
    def codebook(self) -> PilotCodebook:
        return build_codebook(self.config.pilot_bits)

    def polar_input(self, msg: UserMessage) -> np.ndarray:
        if self.config.wopbe:
            inner = np.concatenate([msg.coded, self.message_crc.remainder(msg.bits)])
            return crc_attach(inner, self.crc)
        return crc_attach(msg.bits, self.crc)

    def codeword(self, msg: UserMessage) -> np.ndarray:
        return polar_encode(self.polar_input(msg), self.polar)

    def split(self, bits) -> UserMessage:
        return split_message(bits, self.config.J, self.config.pilot_bits)

    def message_from_info(self, info) -> np.ndarray:
        """Joint mode: the message is the leading ``B`` bits of the info word."""
        return np.asarray(info[: self.config.B], dtype=np.uint8)

    def message_crc_holds(self, bits, info) -> bool:
        """Data-only mode: does the message CRC carried in ``info`` match ``bits``?"""
        c = self.config
        carried = np.asarray(info[c.B_c:c.B_c + c.r2], dtype=np.uint8)
        return bool(np.array_equal(self.message_crc.remainder(bits), carried))


def assemble_signal(msg: UserMessage, coder: MessageCoder, pilot_power: float, coded_power: float) -> np.ndarray:
    """Length-``L`` baseband samples: scaled pilot rows, then QPSK symbols."""
    c = coder.config
    if len(msg.pilot_parts) != c.J:
        raise ConfigError(f"message has {len(msg.pilot_parts)} pilot parts, config expects {c.J}")
    cb = coder.codebook
    pilots = [np.sqrt(pilot_power) * cb.row(cb.index_of(p)) for p in msg.pilot_parts]
    coded = qpsk_modulate(coder.codeword(msg), coded_power)
    return np.concatenate(pilots + [coded]).astype(complex)


@dataclass(frozen=True, eq=False)
class TxSignal:
    """One user's transmitted slot signal plus bookkeeping.

    ``user_id`` identifies the user within a trial and is never passed to
    the receiver.
    """

    samples: np.ndarray
    slot: int
    group: int = 0
    user_id: int = -1

    def __len__(self):
        return self.samples.size


def interleaver(seed: int, group: int, length: int, identity: bool = False) -> np.ndarray:
    """Permutation applied by group ``group``; shared by transmitter and receiver."""
    if identity:
        return np.arange(length)
    return np.random.default_rng([int(seed), int(group)]).permutation(length)


def msug_transform(samples, perm: np.ndarray) -> np.ndarray:
    """Interleave: output sample ``k`` is input sample ``perm[k]``."""
    return np.asarray(samples)[..., perm]


def deinterleave(samples, perm: np.ndarray) -> np.ndarray:
    """Inverse of :func:`msug_transform` along the last axis."""
    return np.asarray(samples)[..., np.argsort(perm)]


def sra_layout(V: int, S: int, slot: int, L: int | None = None, frame_length: int | None = None) -> list:
    """``(sub-frame, slot)`` pairs carrying one repeated signal.

    With ``frame_length`` and ``L`` given, checks ``frame_length = V * S * L``.
    """
    if V < 1 or S < 1 or not 0 <= slot < S:
        raise ConfigError(f"invalid layout V={V}, S={S}, slot={slot}")
    if frame_length is not None and L is not None and frame_length != V * S * L:
        raise ConfigError(f"frame length {frame_length} != V*S*L = {V * S * L}")
    return [(v, slot) for v in range(V)]
