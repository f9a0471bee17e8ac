"""Compare the compiled and pure-Python list-decoder kernels.

Usage: python3 benchmarks/bench_scl.py [--repeat N] [--block 256] [--list 8 32 64]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from msura.polar import PolarCodeSpec, available_backends, polar_encode, scl_list


def noisy_llrs(spec: PolarCodeSpec, count: int, snr_db: float, rng) -> list:
    sigma = 10 ** (-snr_db / 20)
    info = rng.integers(0, 2, (count, spec.info_length), dtype=np.uint8)
    x = 1.0 - 2.0 * polar_encode(info, spec)
    y = x + sigma * rng.standard_normal(x.shape)
    return list(2 * y / sigma ** 2)


def time_backend(spec, llrs, backend, repeat) -> float:
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        for llr in llrs:
            scl_list(llr, spec, backend)
        best = min(best, (time.perf_counter() - start) / len(llrs))
    return best


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--block", type=int, default=256)
    p.add_argument("--info", type=int, default=111)
    p.add_argument("--list", type=int, nargs="+", default=[8, 32, 64])
    p.add_argument("--frames", type=int, default=20)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--snr", type=float, default=1.0)
    args = p.parse_args(argv)

    backends = available_backends()
    rng = np.random.default_rng(0)
    print(f"block {args.block}, info {args.info}, backends {backends}")
    print(f"{'list':>5} " + " ".join(f"{b + ' ms':>12}" for b in backends) + f" {'speedup':>8}")
    for L in args.list:
        spec = PolarCodeSpec.build(args.block, args.info, L)
        llrs = noisy_llrs(spec, args.frames, args.snr, rng)
        for llr in llrs:
            paths = [scl_list(llr, spec, b) for b in backends]
            assert all(np.array_equal(paths[0][0], q[0]) for q in paths[1:]), "backends disagree"
        times = {b: time_backend(spec, llrs, b, args.repeat) for b in backends}
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{L:>5} " + " ".join(f"{1e3 * times[b]:>12.3f}" for b in backends) + f" {speed:>8.1f}")


if __name__ == "__main__":
    main()
