import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from msura.errors import ParameterError
from msura.pilots import build_codebook, pilot_row


def sylvester(bits):
    h = np.array([[1]])
    for _ in range(bits):
        h = np.block([[h, h], [h, -h]])
    return h


@pytest.mark.parametrize("bits", range(1, 9))
def test_rows_match_block_recursion(bits):
    assert np.array_equal(build_codebook(bits).rows, sylvester(bits))


@pytest.mark.parametrize("bits", [11, 13])
def test_lazy_row_matches_matrix_entry_formula(bits):
    cb = build_codebook(bits)
    k = np.arange(cb.n_p)
    for index in (0, 1, cb.n_p // 3, cb.n_p - 1):
        expected = np.array([(-1) ** bin(index & int(j)).count("1") for j in k])
        assert np.array_equal(cb.row(index), expected)


@given(st.integers(1, 12).flatmap(lambda b: st.tuples(st.just(b), st.integers(0, (1 << b) - 1))))
def test_index_bits_roundtrip(args):
    bits, index = args
    cb = build_codebook(bits)
    b = cb.bits_of(index)
    assert cb.index_of(b) == index
    assert int("".join(map(str, b)), 2) == index


def test_big_endian_mapping():
    cb = build_codebook(3)
    assert cb.index_of([1, 0, 0]) == 4
    assert np.array_equal(pilot_row(cb, [0, 0, 1]), cb.rows[1])


def test_correlate_recovers_scaled_row(rng):
    cb = build_codebook(5)
    h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    y = np.outer(h, cb.row(7))
    u = cb.correlate(y)
    assert np.allclose(u[7], np.sqrt(cb.n_p) * h)
    assert np.allclose(np.delete(u, 7, axis=0), 0)


@pytest.mark.parametrize("bad", [0, 17, 2.5, True])
def test_invalid_bit_count(bad):
    with pytest.raises(ParameterError):
        build_codebook(bad)


def test_invalid_inputs():
    cb = build_codebook(4)
    with pytest.raises(ParameterError):
        cb.index_of([1, 0])
    with pytest.raises(ParameterError):
        cb.index_of([1, 0, 2, 0])
    with pytest.raises(ParameterError):
        cb.row(16)
    with pytest.raises(ParameterError):
        cb.correlate(np.zeros((2, 8)))
