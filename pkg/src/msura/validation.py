"""Statistical self-checks shared by the test suite and the ``validate`` command.

Every check returns a :class:`CheckResult`; the tolerances are fixed here
and are the pass criteria, not tuning knobs.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import analysis
from .channel import complex_normal
from .config import SystemConfig
from .pilots import build_codebook
from .polar import scl_decode
from .rxchain import detect_pilots, estimate_channel, ls_sic, mrc_demod_llr
from .txchain import MessageCoder, qpsk_modulate

SINR_EBN0_DB = -7.0
SWEEP_GRID = (-8.0, -7.0, -6.0, -5.0, -4.0, -2.0, 0.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(name, fn, *args, **kwargs) -> CheckResult:
    start = time.perf_counter()
    passed, detail = fn(*args, **kwargs)
    return CheckResult(name, bool(passed), detail, time.perf_counter() - start)


def _rng(seed):
    return np.random.default_rng(seed)


# 1 -----------------------------------------------------------------------
def walsh_transform(x: np.ndarray) -> np.ndarray:
    """Integer fast Walsh-Hadamard transform along the last axis (Sylvester order)."""
    x = np.array(x, dtype=np.int64)
    n = x.shape[-1]
    h = 1
    while h < n:
        y = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        a, b = y[..., 0, :], y[..., 1, :]
        x = np.stack([a + b, a - b], axis=-2).reshape(x.shape)
        h *= 2
    return x


def _hadamard(max_bits=10):
    for bits in range(1, max_bits + 1):
        rows = build_codebook(bits).rows
        n = rows.shape[0]
        # The transform multiplies by the symmetric Sylvester matrix, so this is rows @ rows.T.
        if not np.array_equal(walsh_transform(rows), n * np.eye(n, dtype=np.int64)):
            return False, f"orthogonality broken at n_p={n}"
    return True, f"rows @ rows.T == n_p I for n_p=2..{1 << max_bits}"


def check_hadamard(max_bits=10) -> CheckResult:
    return _timed("hadamard_exactness", _hadamard, max_bits)


# 2 -----------------------------------------------------------------------
def _false_alarm(M, bits, gamma, tests, seed, tol):
    rng = _rng(seed)
    cb = build_codebook(bits)
    slots = math.ceil(tests / cb.n_p)
    hits = 0
    for _ in range(slots):
        Y = complex_normal(rng, (M, cb.n_p))
        hits += len(detect_pilots(Y, cb, gamma, 1.0))
    rate = hits / (slots * cb.n_p)
    return abs(rate - gamma) <= tol, f"false-alarm rate {rate:.4f} vs {gamma} (tol {tol})"


def check_false_alarm(M=8, bits=6, gamma=0.1, tests=100_000, seed=1, tol=0.01) -> CheckResult:
    return _timed("np_detector_calibration", _false_alarm, M, bits, gamma, tests, seed, tol)


# 3 -----------------------------------------------------------------------
def empirical_detection_rate(M, n_p, pilot_power, gamma, trials, rng, chunk=5000):
    """Fraction of single-user slots in which the user's pilot is detected."""
    cb = build_codebook(int(math.log2(n_p)))
    row = cb.row(0).astype(float)
    tau = analysis.detection_threshold(gamma, M, 1.0)
    hits = 0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        h = complex_normal(rng, (n, M, 1))
        Y = np.sqrt(pilot_power) * h * row + complex_normal(rng, (n, M, n_p))
        u = Y @ row / np.sqrt(n_p)
        hits += int(np.count_nonzero(np.sum(np.abs(u) ** 2, axis=1) >= tau))
        done += n
    return hits / trials


def _detection(Ms, energies, n_p, gamma, trials, seed, tol):
    rng = _rng(seed)
    worst = 0.0
    parts = []
    for M in Ms:
        for e in energies:
            emp = empirical_detection_rate(M, n_p, e / n_p, gamma, trials, rng)
            pred = analysis.detection_probability(gamma, M, n_p, e / n_p)
            worst = max(worst, abs(emp - pred))
            parts.append(f"M={M},E={e}:{emp:.4f}/{pred:.4f}")
    return worst <= tol, f"max |emp-pred| {worst:.4f} (tol {tol}); " + " ".join(parts)


def check_detection_probability(Ms=(1, 4, 8), energies=(1.0, 10.0), n_p=32, gamma=0.1,
                                trials=100_000, seed=2, tol=0.01) -> CheckResult:
    return _timed("detection_probability", _detection, Ms, energies, n_p, gamma, trials, seed, tol)


# 4 -----------------------------------------------------------------------
def _estimator(M, n_p, pilot_power, draws, seed, tol):
    rng = _rng(seed)
    cb = build_codebook(int(math.log2(n_p)))
    rows = cb.rows[:2].astype(float)
    n = draws // M
    H = complex_normal(rng, (n, M, 2))
    Y = np.sqrt(pilot_power) * H @ rows + complex_normal(rng, (n, M, n_p))
    est = estimate_channel(Y, rows, pilot_power)
    err = (est - H)[..., 0].ravel()
    var = float(np.mean(np.abs(err) ** 2))
    pred = 1.0 / (n_p * pilot_power)
    rel = abs(var / pred - 1)
    return rel <= tol, f"error variance {var:.5f} vs {pred:.5f} (rel {rel:.3%}, tol {tol:.0%})"


def check_estimator_variance(M=4, n_p=32, pilot_power=0.05, draws=100_000, seed=3, tol=0.05) -> CheckResult:
    return _timed("channel_estimator_variance", _estimator, M, n_p, pilot_power, draws, seed, tol)


# 5 -----------------------------------------------------------------------
def brute_force_collisions(K_s, n_p, J, iterations, trials, rng, i_max=4):
    """Pilot-draw and removal simulation of the collision recursion.

    Each user draws one pilot per part. Iteration ``k`` works on part
    ``(k - 1) mod J``: the part-averaged counts of pilots chosen by exactly
    ``i`` remaining users are recorded, then one uniformly chosen user with
    a non-colliding pilot in the active part is removed. Returns mean and
    standard error arrays of shape ``(iterations, i_max + 1)``.
    """
    total = np.zeros((iterations, i_max + 1))
    total2 = np.zeros((iterations, i_max + 1))
    for _ in range(trials):
        picks = rng.integers(0, n_p, (K_s, J))
        alive = np.ones(K_s, dtype=bool)
        stalled = False
        for k in range(iterations):
            counts = np.stack([np.bincount(picks[alive, j], minlength=n_p) for j in range(J)])
            hist = np.stack([np.bincount(c, minlength=i_max + 1)[:i_max + 1] for c in counts]).mean(axis=0)
            hist[0] = 0.0
            total[k] += hist
            total2[k] += hist ** 2
            if stalled:
                continue
            part = k % J
            single = np.flatnonzero(alive & (counts[part][picks[:, part]] == 1))
            if single.size == 0:
                stalled = True
                continue
            alive[rng.choice(single)] = False
    mean = total / trials
    se = np.sqrt(np.maximum(total2 / trials - mean ** 2, 0.0) / max(trials - 1, 1))
    return mean, se


def _collisions(K_s, n_p, J, iterations, trials, seed, i_max, z_tol):
    rng = _rng(seed)
    mean, se = brute_force_collisions(K_s, n_p, J, iterations, trials, rng, i_max)
    model = analysis.collision_model(K_s, n_p, J)
    worst = (0.0, 0, 0)
    for k in range(1, iterations + 1):
        for i in range(1, i_max + 1):
            diff = abs(model.N(i, k) - mean[k - 1, i])
            z = diff / se[k - 1, i] if se[k - 1, i] > 0 else (0.0 if diff < 1e-12 else math.inf)
            if z > worst[0]:
                worst = (z, i, k)
    z, i, k = worst
    return z <= z_tol, f"max deviation {z:.2f} standard errors at i={i}, k={k} (tol {z_tol})"


def check_collisions(K_s=50, n_p=32, J=2, iterations=20, trials=10_000, seed=5, i_max=4,
                     z_tol=2.0) -> CheckResult:
    return _timed("collision_recursion", _collisions, K_s, n_p, J, iterations, trials, seed, i_max, z_tol)


# 6 -----------------------------------------------------------------------
def measured_first_sinr(K_s, M, n_p, n_c, P_p, P_c, trials, rng, noise_var=1.0):
    """Ratio-of-means SINR at the combiner output with correlation estimates.

    Users occupy distinct pilot rows; interference is everything in the
    combined coded samples except the user's own term.
    """
    cb = build_codebook(int(math.log2(n_p)))
    sig = 0.0
    rest = 0.0
    for _ in range(trials):
        pilots = cb.rows[rng.choice(n_p, K_s, replace=False)].astype(float)
        coded = qpsk_modulate(rng.integers(0, 2, (K_s, 2 * n_c)), P_c)
        H = complex_normal(rng, (M, K_s))
        Yp = np.sqrt(P_p) * H @ pilots + complex_normal(rng, (M, n_p), noise_var)
        Yc = H @ coded + complex_normal(rng, (M, n_c), noise_var)
        est = estimate_channel(Yp, pilots, P_p)
        z = est.conj().T @ Yc
        own = (np.sum(est.conj() * H, axis=0))[:, None] * coded
        sig += float(np.sum(np.abs(own) ** 2))
        rest += float(np.sum(np.abs(z - own) ** 2))
    return sig / rest


def _sinr(K_values, M, n_p, n_c, ebn0, trials, seed, tol_db):
    rng = _rng(seed)
    cfg = SystemConfig(M=M, pilot_bits=int(math.log2(n_p)), n_c=n_c, ebn0_db=ebn0)
    worst = 0.0
    parts = []
    for K_s in K_values:
        meas = measured_first_sinr(K_s, M, n_p, n_c, cfg.pilot_power, cfg.coded_power, trials, rng)
        pred = analysis.sinr_first_iteration(K_s, cfg.coded_power, cfg.pilot_power, M, n_p)
        gap = abs(10 * math.log10(meas / pred))
        worst = max(worst, gap)
        parts.append(f"K_s={K_s}:{10 * math.log10(meas):.2f}/{10 * math.log10(pred):.2f} dB")
    return worst <= tol_db, f"max gap {worst:.2f} dB (tol {tol_db}) at Eb/N0 {ebn0} dB; " + " ".join(parts)


def check_sinr(K_values=(5, 10, 15), M=16, n_p=32, n_c=128, ebn0=SINR_EBN0_DB, trials=2000,
               seed=6, tol_db=1.0) -> CheckResult:
    return _timed("first_iteration_sinr", _sinr, K_values, M, n_p, n_c, ebn0, trials, seed, tol_db)


# 7 -----------------------------------------------------------------------
def _projection(instances, seed, tol):
    rng = _rng(seed)
    worst_orth = 0.0
    worst_idem = 0.0
    for _ in range(instances):
        M = int(rng.integers(2, 32))
        L = int(rng.integers(8, 128))
        K = int(rng.integers(1, min(L, 16)))
        Y = complex_normal(rng, (M, L))
        X = complex_normal(rng, (K, L))
        R, _ = ls_sic(Y, X)
        orth = np.linalg.norm(R @ X.conj().T) / (np.linalg.norm(Y) * np.linalg.norm(X))
        R2, _ = ls_sic(R, X)
        idem = np.linalg.norm(R2 - R) / np.linalg.norm(Y)
        worst_orth = max(worst_orth, orth)
        worst_idem = max(worst_idem, idem)
    ok = worst_orth < tol and worst_idem < tol
    return ok, f"orthogonality {worst_orth:.2e}, idempotence {worst_idem:.2e} (tol {tol:g})"


def check_projection(instances=200, seed=7, tol=1e-8) -> CheckResult:
    return _timed("projection_identities", _projection, instances, seed, tol)


# 8 -----------------------------------------------------------------------
def _loopback(payloads, seed, config):
    rng = _rng(seed)
    coder = MessageCoder(config)
    failures = 0
    for _ in range(payloads):
        bits = rng.integers(0, 2, config.B, dtype=np.uint8)
        msg = coder.split(bits)
        x = qpsk_modulate(coder.codeword(msg), 1.0)
        llr = mrc_demod_llr(np.ones(1), x[None, :], np.empty((0, 1)), 1.0, 1e-3)
        info, ok = scl_decode(llr, coder.polar, coder.crc)
        if not ok or not np.array_equal(info, coder.polar_input(msg)):
            failures += 1
    return failures == 0, f"{failures} failures in {payloads} noiseless payloads"


def check_loopback(payloads=1000, seed=8, config: SystemConfig | None = None) -> CheckResult:
    return _timed("polar_crc_loopback", _loopback, payloads, seed, config or SystemConfig())


# 9 / 10 ------------------------------------------------------------------
def sweep_config(trials=200, seed=9) -> SystemConfig:
    return SystemConfig(variant="MS-MRA", M=16, S=2, J=2, pilot_bits=5, n_c=128, K_a=12,
                        trials=trials, seed=seed)


def run_sweep_rows(grid=SWEEP_GRID, trials=200, seed=9, threads=1) -> list:
    from .harness.sweep import run_grid

    return run_grid(sweep_config(trials, seed), grid, threads)


def _sweep(rows, target):
    pe = [r.pe for r in rows]
    best = min(rows, key=lambda r: r.ci_hi)
    reached = any(r.pe <= target for r in rows[-2:])
    monotone = True
    bad = ""
    for a, b in zip(rows, rows[1:]):
        if b.pe > a.pe and b.ci_lo > a.ci_hi:
            monotone = False
            bad = f" increase between {a.ebn0_db} and {b.ebn0_db} dB"
    detail = ("Pe " + ", ".join(f"{r.ebn0_db:g}:{p:.4f}" for r, p in zip(rows, pe))
              + f"; lowest upper bound {best.ci_hi:.4f}" + bad)
    return reached and monotone, detail


def check_sweep(rows, target=0.05) -> CheckResult:
    return _timed("end_to_end_sweep", _sweep, rows, target)


def _analytic(rows, factor, band):
    from .analysis import AnalyticConfig, pupe_analytic

    compared = []
    worst = 1.0
    for r in rows:
        cfg = sweep_config(r.trials, r.seed).replace(ebn0_db=r.ebn0_db)
        pred = pupe_analytic(AnalyticConfig.from_system(cfg))
        if band[0] <= r.pe <= band[1] and band[0] <= pred <= band[1]:
            ratio = max(pred / r.pe, r.pe / pred)
            worst = max(worst, ratio)
            compared.append(f"{r.ebn0_db:g}:{r.pe:.4f}/{pred:.4f}")
    if not compared:
        return False, "no grid point has both values inside the comparison band"
    return worst <= factor, f"max ratio {worst:.2f} (tol {factor}); sim/pred " + " ".join(compared)


def check_analytic(rows, factor=2.0, band=(0.02, 0.5)) -> CheckResult:
    return _timed("analytic_vs_simulated", _analytic, rows, factor, band)


# 11 ----------------------------------------------------------------------
def _variants(trials, seed):
    from .harness.trial import simulate_frame
    from .scheme import Scheme

    def decoded_sets(cfg):
        scheme = Scheme(cfg)
        out = []
        for t in range(trials):
            _, _, _, dec = simulate_frame(cfg, _rng([seed, t]), scheme)
            out.append(sorted(d.tobytes() for d in dec))
        return out

    base = SystemConfig(variant="MS-MRA", ebn0_db=-6.0, K_a=12)
    grouped = base.replace(variant="MSUG-MRA", G=1, identity_interleaver=True)
    same_group = decoded_sets(base) == decoded_sets(grouped)
    V = 4
    mra = base.replace(M=V, ebn0_db=2.0)
    sra = base.replace(variant="MS-SRA", M=1, V=V, ebn0_db=2.0 + 10 * math.log10(V))
    same_rep = decoded_sets(mra) == decoded_sets(sra)
    return same_group and same_rep, (f"grouped G=1 identical: {same_group}; "
                                     f"repetition V={V} vs M={V} identical: {same_rep} ({trials} frames each)")


def check_variants(trials=20, seed=11) -> CheckResult:
    return _timed("variant_consistency", _variants, trials, seed)


# 12 ----------------------------------------------------------------------
def _msug(Gs, tol):
    worst_beta = 0.0
    worst_mean = 0.0
    for G in Gs:
        cfg = SystemConfig(variant="MSUG-MRA", G=G, K_a=12, ebn0_db=0.0)
        P = cfg.coded_power
        K0 = cfg.users_per_group_slot
        zeta = (cfg.J * cfg.phi * cfg.n_p + cfg.n_c) / cfg.L
        powers = analysis.msug_powers(G, P, cfg.phi, K0, cfg.M, cfg.L, cfg.n_p, J=cfg.J, n_c=cfg.n_c)
        if np.any(powers <= 0) or np.any(np.diff(powers) <= 0):
            return False, f"G={G}: powers not positive and ascending: {powers}"
        worst_mean = max(worst_mean, abs(powers.mean() / P - 1))
        betas = []
        weaker = 0.0
        for g, p in enumerate(powers, start=1):
            rho = 1 - K0 * (G - g) / cfg.L
            delta = zeta * K0 * weaker + cfg.noise_var
            betas.append(analysis.group_sinr(p, rho, delta, K0, cfg.M, cfg.n_p, cfg.phi))
            weaker += p
        betas = np.array(betas)
        worst_beta = max(worst_beta, float(np.ptp(betas) / betas.mean()))
    ok = worst_beta <= tol and worst_mean <= 1e-12
    return ok, f"SINR spread {worst_beta:.2e} (tol {tol:g}), mean power error {worst_mean:.2e}"


def check_msug(Gs=(2, 3), tol=1e-6) -> CheckResult:
    return _timed("msug_power_solver", _msug, Gs, tol)


FAST_CHECKS = (check_hadamard, check_false_alarm, check_detection_probability, check_estimator_variance,
               check_collisions, check_sinr, check_projection, check_loopback, check_variants, check_msug)


def run_all(include_sweep: bool = True, threads: int = 1) -> list:
    results = [check() for check in FAST_CHECKS]
    if include_sweep:
        rows = run_sweep_rows(threads=threads)
        results += [check_sweep(rows), check_analytic(rows)]
    return results
