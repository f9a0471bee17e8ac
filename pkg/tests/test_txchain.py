import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from msura.config import SystemConfig
from msura.errors import ConfigError, ParameterError
from msura.polar import crc_check
from msura.scheme import Scheme
from msura.txchain import (MessageCoder, assemble_signal, deinterleave, interleaver, msug_transform,
                           qpsk_modulate, split_message, sra_layout)

bitlists = st.lists(st.integers(0, 1), min_size=100, max_size=100)


@given(bitlists, st.integers(0, 4), st.integers(1, 8))
def test_split_concat_roundtrip(bits, J, pb):
    msg = split_message(bits, J, pb)
    assert len(msg.pilot_parts) == J
    assert all(p.size == pb for p in msg.pilot_parts)
    assert np.array_equal(msg.concat(), bits)


def test_split_too_short():
    with pytest.raises(ConfigError):
        split_message([0, 1, 1], 2, 2)


def test_qpsk_mapping_and_power():
    x = qpsk_modulate([0, 0, 0, 1, 1, 0, 1, 1], 2.0)
    assert np.allclose(x, [1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j])
    assert np.allclose(np.abs(x) ** 2, 2.0)
    with pytest.raises(ParameterError):
        qpsk_modulate([0, 1, 1], 1.0)


@pytest.mark.parametrize("variant", ["MS-MRA", "MS-MRA-WOPBE"])
def test_signal_layout(variant, rng):
    cfg = SystemConfig(variant=variant)
    coder = MessageCoder(cfg)
    bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
    msg = coder.split(bits)
    x = assemble_signal(msg, coder, 0.3, 0.5)
    assert x.size == cfg.L
    cb = coder.codebook
    for j, part in enumerate(msg.pilot_parts):
        seg = x[j * cfg.n_p:(j + 1) * cfg.n_p]
        assert np.allclose(seg, np.sqrt(0.3) * cb.row(cb.index_of(part)))
    assert np.allclose(np.abs(x[cfg.J * cfg.n_p:]) ** 2, 0.5)


def test_joint_polar_input_carries_whole_message(rng):
    cfg = SystemConfig()
    coder = MessageCoder(cfg)
    bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
    info = coder.polar_input(coder.split(bits))
    assert info.size == cfg.B + cfg.r
    assert crc_check(info, coder.crc)
    assert np.array_equal(coder.message_from_info(info), bits)


def test_data_only_polar_input(rng):
    cfg = SystemConfig(variant="MS-MRA-WOPBE")
    coder = MessageCoder(cfg)
    bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
    info = coder.polar_input(coder.split(bits))
    assert info.size == cfg.B_c + cfg.r1 + cfg.r2
    assert np.array_equal(info[:cfg.B_c], bits[cfg.J * cfg.pilot_bits:])
    assert crc_check(info, coder.crc)
    assert coder.message_crc_holds(bits, info)
    other = bits.copy()
    other[0] ^= 1  # a pilot bit: only the message CRC can notice
    assert not coder.message_crc_holds(other, info)


@given(st.integers(0, 2 ** 31), st.integers(0, 5), st.integers(2, 300))
def test_interleaver_roundtrip(seed, group, L):
    perm = interleaver(seed, group, L)
    assert np.array_equal(np.sort(perm), np.arange(L))
    x = np.arange(L) + 1j
    assert np.array_equal(deinterleave(msug_transform(x, perm), perm), x)


def test_identity_interleaver():
    assert np.array_equal(interleaver(3, 1, 10, identity=True), np.arange(10))


def test_group_signals_are_permuted_versions(rng):
    cfg = SystemConfig(variant="MSUG-MRA", G=2, K_a=20)
    scheme = Scheme(cfg)
    bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
    for grp in scheme.groups:
        x = scheme.transmitted(bits, grp.index)
        plain = assemble_signal(scheme.coder.split(bits), scheme.coder, grp.pilot_power, grp.coded_power)
        assert np.allclose(deinterleave(x, grp.perm), plain)


def test_sra_layout():
    assert sra_layout(3, 2, 1) == [(0, 1), (1, 1), (2, 1)]
    with pytest.raises(ConfigError):
        sra_layout(2, 2, 2)
    with pytest.raises(ConfigError):
        sra_layout(2, 2, 0, L=10, frame_length=30)
