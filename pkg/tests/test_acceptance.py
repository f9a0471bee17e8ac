"""Acceptance checks with one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
A check passes only if its statistic is within tolerance and it finishes
inside its time budget.
"""
import sys

import pytest

from msura import validation as v

LINES = []

BUDGETS = {
    "hadamard_exactness": 1, "np_detector_calibration": 10, "detection_probability": 60,
    "channel_estimator_variance": 10, "collision_recursion": 60, "first_iteration_sinr": 120,
    "projection_identities": 5, "polar_crc_loopback": 30, "end_to_end_sweep": 600,
    "analytic_vs_simulated": 600, "variant_consistency": 120, "msug_power_solver": 1,
}


def record(result, extra_seconds=0.0):
    seconds = result.seconds + extra_seconds
    budget = BUDGETS[result.name]
    ok = result.passed and seconds < budget
    status = "PASS" if ok else "FAIL"
    line = f"{status} {result.name}: {result.detail} [{seconds:.1f} s of {budget} s]"
    LINES.append(line)
    print(line)
    return ok, line


_SWEEP = {}


@pytest.fixture(scope="module")
def sweep_rows():
    if "rows" not in _SWEEP:
        import time
        start = time.perf_counter()
        _SWEEP["rows"] = v.run_sweep_rows()
        _SWEEP["seconds"] = time.perf_counter() - start
    return _SWEEP["rows"], _SWEEP["seconds"]


def test_hadamard_exactness():
    ok, line = record(v.check_hadamard())
    assert ok, line


def test_np_detector_calibration():
    ok, line = record(v.check_false_alarm())
    assert ok, line


def test_detection_probability():
    ok, line = record(v.check_detection_probability())
    assert ok, line


def test_channel_estimator_variance():
    ok, line = record(v.check_estimator_variance())
    assert ok, line


def test_collision_recursion_against_brute_force():
    ok, line = record(v.check_collisions())
    assert ok, line


def test_first_iteration_sinr():
    ok, line = record(v.check_sinr())
    assert ok, line


def test_projection_identities():
    ok, line = record(v.check_projection())
    assert ok, line


def test_polar_crc_loopback():
    ok, line = record(v.check_loopback())
    assert ok, line


@pytest.mark.slow
def test_end_to_end_sweep(sweep_rows):
    rows, seconds = sweep_rows
    ok, line = record(v.check_sweep(rows), seconds)
    assert ok, line


@pytest.mark.slow
def test_analytic_matches_simulation(sweep_rows):
    rows, seconds = sweep_rows
    ok, line = record(v.check_analytic(rows), seconds)
    assert ok, line


def test_variant_consistency():
    ok, line = record(v.check_variants())
    assert ok, line


def test_msug_power_solver():
    ok, line = record(v.check_msug())
    assert ok, line


def main() -> int:
    results = [v.check_hadamard(), v.check_false_alarm(), v.check_detection_probability(),
               v.check_estimator_variance(), v.check_collisions(), v.check_sinr(),
               v.check_projection(), v.check_loopback()]
    import time
    start = time.perf_counter()
    rows = v.run_sweep_rows()
    sweep_seconds = time.perf_counter() - start
    oks = [record(r)[0] for r in results]
    oks += [record(v.check_sweep(rows), sweep_seconds)[0], record(v.check_analytic(rows), sweep_seconds)[0]]
    oks += [record(v.check_variants())[0], record(v.check_msug())[0]]
    print(f"{sum(oks)}/{len(oks)} passed")
    return 0 if all(oks) else 1


if __name__ == "__main__":
    sys.exit(main())
