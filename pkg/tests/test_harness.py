import numpy as np
import pytest

from msura.config import SystemConfig
from msura.errors import ConfigError
from msura.harness import (COLUMNS, ResultRow, TrialMetrics, aggregate, draw_messages, emit_results,
                           from_csv, run_grid, run_trial, run_trials, score, search_target,
                           splitmix64, trial_seed)
from msura.harness import sweep as sweep_mod


def test_splitmix_reference_outputs():
    # First three outputs of the reference generator seeded with 0.
    state, outs = 0, []
    for _ in range(3):
        outs.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) % 2 ** 64
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_trial_seeds_distinct():
    seeds = {trial_seed(7, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert trial_seed(7, 3) != trial_seed(8, 3)


def test_score_conventions():
    msgs = [np.array([i, 0, 1], dtype=np.uint8) for i in range(2)]
    assert score(msgs, msgs + [msgs[0]]) == (0, 0, 2)
    sent = [np.eye(10, dtype=np.uint8)[i] for i in range(10)]
    decoded = sent[:9] + [np.ones(10, dtype=np.uint8)]
    missed, fa, n = score(sent, decoded)
    m = TrialMetrics(missed, fa, n, 10, 0.0)
    assert (m.p_md, m.p_fa) == (0.1, 0.1)
    empty = TrialMetrics(0, 0, 0, 0, 0.0)
    assert (empty.p_md, empty.p_fa, empty.pe) == (0.0, 0.0, 0.0)
    assert TrialMetrics(3, 0, 0, 3, 0.0).p_fa == 0.0


def test_no_active_users():
    m = run_trial(SystemConfig(K_a=0), 1)
    assert (m.decoded, m.p_md, m.p_fa) == (0, 0.0, 0.0)


def test_distinct_messages():
    msgs = draw_messages(np.random.default_rng(0), 8, 3)
    assert len({m.tobytes() for m in msgs}) == 8


def test_perfect_decoding_at_high_snr():
    m = run_trial(SystemConfig(ebn0_db=6.0, K_a=6), 3)
    assert (m.missed, m.false_alarms, m.decoded) == (0, 0, 6)


def test_aggregate_normal_interval():
    ms = [TrialMetrics(k % 3, 0, 10 - k % 3, 10, 0.0) for k in range(100)]
    est = aggregate(ms)
    pe = np.array([m.pe for m in ms])
    half = 1.959963984540054 * pe.std(ddof=1) / 10
    assert est.pe == pytest.approx(pe.mean())
    assert (est.ci_lo, est.ci_hi) == pytest.approx((pe.mean() - half, pe.mean() + half))


def test_trials_independent_of_worker_layout():
    cfg = SystemConfig(trials=4, K_a=4, ebn0_db=-6.0)
    serial = run_trials(cfg, threads=1)
    parallel = run_trials(cfg, threads=2)
    strip = lambda ms: [(m.missed, m.false_alarms, m.decoded) for m in ms]  # noqa: E731
    assert strip(serial) == strip(parallel)


def test_minimum_trials_enforced():
    with pytest.raises(ConfigError):
        run_grid(SystemConfig(trials=50), [0.0])
    with pytest.raises(ConfigError):
        run_grid(SystemConfig(), [])


def fake_point(threshold):
    def point(cfg, threads=1):
        pe = 0.5 if cfg.ebn0_db < threshold else 0.01
        return ResultRow.for_config(cfg, pe, pe, 0.0, pe, pe + 0.01, 100, "simulated")
    return point


def test_search_bisection(monkeypatch):
    monkeypatch.setattr(sweep_mod, "simulate_point", fake_point(-1.3))
    res = search_target(SystemConfig(), 0.05, -5.0, 3.0)
    assert res.attained and res.ebn0_db == -1.25
    assert res.bracket == (-1.5, -1.25)
    assert res.row.ci_hi <= 0.05
    res = search_target(SystemConfig(), 0.05, 0.0, 3.0)
    assert res.ebn0_db == 0.0


def test_search_unattained(monkeypatch):
    monkeypatch.setattr(sweep_mod, "simulate_point", fake_point(10.0))
    res = search_target(SystemConfig(), 0.05, -2.0, 2.0)
    assert not res.attained and res.bracket == (-2.0, 2.0)
    with pytest.raises(ConfigError):
        search_target(SystemConfig(), 1.5, -2.0, 2.0)


def rows():
    cfg = SystemConfig()
    return [ResultRow.for_config(cfg.replace(ebn0_db=e), 0.1, 0.05, 0.05, 0.0, 0.2, 100, src)
            for e, src in ((0.0, "simulated"), (1.0, "analytic"))]


def test_emit_csv(tmp_path):
    path = tmp_path / "out.csv"
    emit_results([], path)
    assert path.read_text() == ",".join(COLUMNS) + "\n"
    emit_results(rows(), path, config=SystemConfig())
    first = path.read_bytes()
    emit_results(rows(), path, config=SystemConfig())
    assert path.read_bytes() == first
    assert from_csv(path.read_text()) == rows()
    assert SystemConfig.load(str(path) + ".config") == SystemConfig()


def test_emit_ndtext(tmp_path):
    import json
    path = emit_results(rows(), tmp_path / "out.nd", "ndtext")
    recs = [json.loads(line) for line in path.read_text().splitlines()]
    assert [list(r) for r in recs] == [list(COLUMNS)] * 2
    assert {r["source"] for r in recs} == {"simulated", "analytic"}
    with pytest.raises(ValueError):
        emit_results(rows(), tmp_path / "x", "xml")
    with pytest.raises(OSError):
        emit_results(rows(), tmp_path / "missing" / "x.csv")


@pytest.mark.slow
def test_grid_is_deterministic_and_monotone():
    cfg = SystemConfig(trials=100, seed=4)
    a = run_grid(cfg, [-7.0, -5.0])
    assert a == run_grid(cfg, [-7.0, -5.0])
    assert a[1].pe <= a[0].pe or a[1].ci_lo <= a[0].ci_hi


@pytest.mark.parametrize("variant,extra", [("MSUG-SRA", {"G": 2, "V": 2, "K_a": 8}),
                                           ("MS-SRA", {"V": 2}), ("MS-MRA-WOPBE", {})])
def test_other_variants_run(variant, extra):
    m = run_trial(SystemConfig(variant=variant, ebn0_db=4.0, **extra), 5)
    assert m.p_md <= 0.25 and m.p_fa == 0.0
