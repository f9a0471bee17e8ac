import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from msura.polar.crc import STANDARD_POLYNOMIALS, CrcSpec, crc_attach, crc_check


def long_division(payload, degree, poly):
    """Bitwise polynomial division of payload * x^degree by the generator."""
    reg = 0
    top = 1 << degree
    for bit in list(payload) + [0] * degree:
        reg = (reg << 1) | int(bit)
        if reg & top:
            reg ^= top | poly
    return [(reg >> (degree - 1 - i)) & 1 for i in range(degree)]


payloads = st.lists(st.integers(0, 1), min_size=1, max_size=200)


@pytest.mark.parametrize("degree", sorted(STANDARD_POLYNOMIALS))
@given(bits=payloads)
def test_remainder_matches_long_division(degree, bits):
    spec = CrcSpec.standard(degree)
    expected = long_division(bits, degree, spec.polynomial)
    assert list(spec.remainder(np.array(bits, dtype=np.uint8))) == expected


@given(bits=payloads, degree=st.sampled_from(sorted(STANDARD_POLYNOMIALS)))
def test_attach_then_check(bits, degree):
    spec = CrcSpec.standard(degree)
    word = crc_attach(np.array(bits, dtype=np.uint8), spec)
    assert word.size == len(bits) + degree
    assert crc_check(word, spec)


@given(bits=payloads, flip=st.integers(0, 10_000))
def test_single_bit_errors_detected(bits, flip):
    spec = CrcSpec.standard(11)
    word = crc_attach(np.array(bits, dtype=np.uint8), spec)
    word[flip % word.size] ^= 1
    assert not crc_check(word, spec)


def test_batch_check(rng):
    spec = CrcSpec.standard(6)
    words = np.array([crc_attach(rng.integers(0, 2, 40), spec) for _ in range(5)])
    words[2, 3] ^= 1
    assert list(crc_check(words, spec)) == [True, True, False, True, True]
