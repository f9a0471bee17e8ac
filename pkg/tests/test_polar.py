import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from msura.errors import InputError, ParameterError
from msura.polar import (CrcSpec, PolarCodeSpec, available_backends, build_frozen_set, crc_attach,
                         load_reliability, polar_encode, polar_transform, reliability_order,
                         sc_decode, scl_decode, scl_list)
from msura.polar.construction import MAX_TABLE_LENGTH

BACKENDS = available_backends()


def kron_generator(n):
    f = np.array([[1, 0], [1, 1]], dtype=np.int64)
    g = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        g = np.kron(g, f)
    return g


@given(st.integers(1, 8).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))
def test_transform_matches_kronecker_product(u):
    u = np.array(u, dtype=np.uint8)
    n = int(np.log2(u.size))
    assert np.array_equal(polar_transform(u), (u @ kron_generator(n)) % 2)


@given(st.lists(st.integers(0, 1), min_size=64, max_size=64))
def test_transform_is_involution(u):
    u = np.array(u, dtype=np.uint8)
    assert np.array_equal(polar_transform(polar_transform(u)), u)


def test_ga_order_small_block():
    assert list(reliability_order(8)) == [0, 1, 2, 4, 3, 5, 6, 7]


@pytest.mark.parametrize("N", [2 ** k for k in range(1, 13)])
def test_shipped_tables_match_generator(N):
    assert N <= MAX_TABLE_LENGTH
    assert np.array_equal(load_reliability(N), reliability_order(N))


def bhattacharyya_order(N, z0):
    z = np.array([z0])
    while z.size < N:
        z = np.stack([2 * z - z ** 2, z ** 2], axis=1).ravel()
    return np.argsort(-z, kind="stable")


def test_frozen_set_close_to_bhattacharyya_construction():
    frozen = set(build_frozen_set(256, 111))
    other = set(bhattacharyya_order(256, np.exp(-10 ** 0.2))[:145])
    assert len(frozen & other) >= 140


@pytest.mark.slow
def test_constructed_code_beats_random_positions():
    rng = np.random.default_rng(5)
    good = PolarCodeSpec.build(256, 111, list_size=1)
    random_frozen = np.sort(rng.choice(256, 145, replace=False))
    bad = PolarCodeSpec(256, 111, random_frozen, list_size=1)
    sigma = 10 ** (-1.5 / 20)
    errors = {}
    for name, spec in (("good", good), ("bad", bad)):
        count = 0
        for _ in range(200):
            info = rng.integers(0, 2, 111, dtype=np.uint8)
            y = 1 - 2.0 * polar_encode(info, spec) + sigma * rng.standard_normal(256)
            count += not np.array_equal(sc_decode(2 * y / sigma ** 2, spec), info)
        errors[name] = count
    assert errors["good"] < errors["bad"]


@pytest.mark.parametrize("K", [0, 1, 255, 256])
def test_frozen_set_sizes(K):
    spec = PolarCodeSpec.build(256, K)
    assert spec.frozen_set.size == 256 - K
    assert spec.info_positions.size == K
    assert not np.any(spec.frozen_mask[spec.info_positions])


def test_invalid_construction():
    with pytest.raises(ParameterError):
        build_frozen_set(256, 300)
    with pytest.raises(ParameterError):
        load_reliability(100)


def noisy(spec, rng, snr_db, count=1):
    sigma = 10 ** (-snr_db / 20)
    info = rng.integers(0, 2, (count, spec.info_length), dtype=np.uint8)
    y = 1 - 2.0 * polar_encode(info, spec) + sigma * rng.standard_normal((count, spec.block_length))
    return info, 2 * y / sigma ** 2


@pytest.mark.parametrize("backend", BACKENDS)
def test_noiseless_decoding(backend, rng):
    spec = PolarCodeSpec.build(128, 60, list_size=8)
    info, _ = noisy(spec, rng, 100.0)
    llr = 20.0 * (1 - 2.0 * polar_encode(info[0], spec))
    out, ok = scl_decode(llr, spec, backend=backend)
    assert ok and np.array_equal(out, info[0])


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 8), list_size=st.sampled_from([1, 2, 4, 8, 16]),
       rate=st.floats(0.1, 0.9))
def test_backends_agree(seed, n, list_size, rate):
    rng = np.random.default_rng(seed)
    N = 1 << n
    spec = PolarCodeSpec.build(N, max(1, int(rate * N)), list_size)
    _, llr = noisy(spec, rng, float(rng.uniform(-2, 4)))
    a_bits, a_pm = scl_list(llr[0], spec, "python")
    b_bits, b_pm = scl_list(llr[0], spec, "compiled")
    assert np.array_equal(a_bits, b_bits)
    assert np.allclose(a_pm, b_pm, rtol=1e-12, atol=1e-12)


@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 7))
def test_list_of_one_is_successive_cancellation(seed, n):
    rng = np.random.default_rng(seed)
    N = 1 << n
    spec = PolarCodeSpec.build(N, N // 2 or 1, list_size=1)
    _, llr = noisy(spec, rng, 1.0)
    bits, _ = scl_list(llr[0], spec)
    assert np.array_equal(bits[0], sc_decode(llr[0], spec))


def brute_force_ml(llr, spec):
    """Exhaustive search over info words for the smallest path metric."""
    best, best_cost = None, np.inf
    for k in range(1 << spec.info_length):
        info = np.array([(k >> (spec.info_length - 1 - i)) & 1 for i in range(spec.info_length)], dtype=np.uint8)
        x = polar_encode(info, spec)
        cost = np.sum(np.abs(llr) * (x != (llr < 0)))
        if cost < best_cost:
            best, best_cost = info, cost
    return best


@given(seed=st.integers(0, 2 ** 32 - 1))
def test_large_list_reaches_maximum_likelihood(seed):
    rng = np.random.default_rng(seed)
    spec = PolarCodeSpec.build(16, 6, list_size=64)
    _, llr = noisy(spec, rng, 0.0)
    bits, _ = scl_list(llr[0], spec)
    assert np.array_equal(bits[0], brute_force_ml(llr[0], spec))


@pytest.mark.parametrize("backend", BACKENDS)
def test_crc_selects_correct_path(backend):
    rng = np.random.default_rng(11)
    crc = CrcSpec.standard(11)
    spec = PolarCodeSpec.build(256, 111, list_size=32)
    wins = 0
    for _ in range(20):
        info = crc_attach(rng.integers(0, 2, 100, dtype=np.uint8), crc)
        sigma = 10 ** (-1.0 / 20)
        y = 1 - 2.0 * polar_encode(info, spec) + sigma * rng.standard_normal(256)
        out, ok = scl_decode(2 * y / sigma ** 2, spec, crc, backend)
        wins += ok and np.array_equal(out, info)
    assert wins >= 18


def test_metrics_sorted_and_paths_distinct(rng):
    spec = PolarCodeSpec.build(64, 32, list_size=16)
    _, llr = noisy(spec, rng, 0.0)
    bits, pm = scl_list(llr[0], spec)
    assert bits.shape == (16, 32)
    assert np.all(np.diff(pm) >= 0)
    assert len({b.tobytes() for b in bits}) == 16


def test_decoder_input_validation():
    spec = PolarCodeSpec.build(16, 8)
    with pytest.raises(InputError):
        scl_decode(np.zeros(8), spec)
    with pytest.raises(InputError):
        scl_decode(np.full(16, np.nan), spec)
    with pytest.raises(ParameterError):
        scl_list(np.zeros(16), spec, backend="fortran")


def test_environment_forces_python_backend():
    import os
    import subprocess
    import sys
    env = dict(os.environ, MSURA_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import msura.polar as p; print(p.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
