"""Closed-form performance predictors for the multi-stage pilot schemes.

Everything here is a deterministic function of its arguments. The models are
approximations (Gaussian interference, uncorrelated QPSK symbols, a
mean-field collision recursion) and are reproduced as stated rather than
corrected; in particular the per-slot error composition raises the
per-iteration error to the power ``r - t + 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, stats

from .chi2 import chi2_cdf, chi2_ppf, q_function
from .errors import InfeasibleError, ParameterError

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class AnalyticConfig:
    K_a: int
    S: int
    M: int
    J: int
    n_p: int
    n_c: int
    B: int
    r: int
    P_p: float
    P_c: float
    noise_var: float = 1.0
    gamma: float = 0.1

    def __post_init__(self):
        for name in ("S", "M", "J", "n_p", "n_c", "B", "r"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.K_a < 0:
            raise ParameterError("K_a must be non-negative")
        if self.P_p < 0 or self.P_c <= 0 or self.noise_var <= 0:
            raise ParameterError("powers and noise variance must be positive")
        if not 0 < self.gamma < 1:
            raise ParameterError("gamma must lie in (0, 1)")

    @property
    def energy_per_signal(self) -> float:
        return self.J * self.n_p * self.P_p + self.n_c * self.P_c

    @classmethod
    def from_system(cls, cfg) -> "AnalyticConfig":
        return cls(cfg.K_a, cfg.S, cfg.receive_dims, cfg.J, cfg.n_p, cfg.n_c, cfg.B, cfg.r,
                   cfg.pilot_power, cfg.coded_power, cfg.noise_var, cfg.gamma)


def detection_probability(gamma: float, M: int, n_p: int, P_p: float, noise_var: float = 1.0) -> float:
    """Probability that a non-colliding pilot passes the energy detector."""
    if not 0 < gamma < 1:
        raise ParameterError("gamma must lie in (0, 1)")
    x = noise_var * chi2_ppf(1 - gamma, 2 * M) / (noise_var + n_p * P_p)
    return 1.0 - chi2_cdf(x, 2 * M)


def detection_threshold(gamma: float, M: int, noise_level: float) -> float:
    """Energy threshold on ``|u|^2`` for a false-alarm rate of ``gamma``."""
    return 0.5 * noise_level * chi2_ppf(1 - gamma, 2 * M)


@lru_cache(maxsize=4096)
def trunc_moment(k: int, K_s: int, M: int, m: int) -> float:
    """``E[|h|^(2m)]`` for the ``k`` weakest of ``K_s`` users.

    ``|h|^2`` is Gamma(M, 1); conditioning on the lower ``k / K_s`` fraction
    truncates it at ``0.5 * chi2_ppf(k / K_s, 2M)``. Both integrals use
    adaptive quadrature with relative tolerance 1e-8.
    """
    if not 1 <= k <= K_s:
        raise ParameterError(f"need 1 <= k <= K_s, got k={k}, K_s={K_s}")
    if m < 0 or M < 1:
        raise ParameterError("need m >= 0 and M >= 1")
    upper = 0.5 * chi2_ppf(k / K_s, 2 * M)
    log_norm = math.lgamma(M)

    def density(eta, power):
        if eta <= 0:
            return 0.0 if M + power > 1 else math.exp(-log_norm)
        return math.exp((M - 1 + power) * math.log(eta) - eta - log_norm)

    # Split at the mode to help the adaptive rule on narrow peaks.
    split = min(upper, max(M - 1 + m, 1.0))
    opts = dict(epsabs=0.0, epsrel=1e-10, limit=200)

    def integral(power):
        first = integrate.quad(density, 0.0, split, args=(power,), **opts)[0]
        if upper > split:
            first += integrate.quad(density, split, upper, args=(power,), **opts)[0]
        return first

    return integral(m) / integral(0)


def sinr_alpha(K_s: int, t: int, cfg: AnalyticConfig) -> float:
    """Post-combining SINR of a non-colliding user at iteration ``t``.

    Assumes ``t - 1`` users already cancelled and the remaining
    ``K_s - t + 1`` being the weakest ones.
    """
    if not 1 <= t <= K_s:
        raise ParameterError(f"need 1 <= t <= K_s, got t={t}, K_s={K_s}")
    P_p, P_c, s2 = cfg.P_p, cfg.P_c, cfg.noise_var
    e_x = cfg.energy_per_signal
    s_p = 1 - P_p * (t - 1) / e_x
    s_c = 1 - P_c * (t - 1) / e_x
    remaining = K_s - t + 1
    mu1 = trunc_moment(remaining, K_s, cfg.M, 1)
    mu2 = trunc_moment(remaining, K_s, cfg.M, 2)
    est_noise = s2 / (cfg.n_p * P_p)
    num = s_c * P_c * (s_p * mu2 + est_noise * mu1)
    den = (P_c * (K_s - t) + s2) * (s_p * mu1 + cfg.M * est_noise)
    return num / den


def sinr_first_iteration(K_s: int, P_c: float, P_p: float, M: int, n_p: int, noise_var: float = 1.0) -> float:
    """Simplified first-iteration SINR ``P_c M / ((s2 + P_c K_s)(1 + s2 / (n_p P_p)))``."""
    return P_c * M / ((noise_var + P_c * K_s) * (1 + noise_var / (n_p * P_p)))


def dec_error_prob(alpha: float, B: int, r: int, n_c: int) -> float:
    """Normal-approximation block error probability at SINR ``alpha``."""
    if not alpha > 0:
        raise ParameterError("SINR must be positive")
    rate = (B + r) / (2 * n_c)
    capacity = 0.5 * math.log2(1 + alpha)
    dispersion = alpha * (alpha + 2) * LOG2E ** 2 / (2 * (alpha + 1) ** 2)
    return q_function((capacity - rate) / math.sqrt(dispersion / (2 * n_c)))


@dataclass(frozen=True, eq=False)
class CollisionProfile:
    """Expected collision counts per iteration.

    ``counts[k - 1, i]`` is the expected number of pilots chosen by exactly
    ``i`` remaining users at iteration ``k`` (column 0 is unused).
    ``p_collision[t - 1]`` is the collision probability of a remaining user.
    """

    counts: np.ndarray
    p_collision: np.ndarray

    def N(self, i: int, k: int) -> float:
        return float(self.counts[k - 1, i]) if i < self.counts.shape[1] else 0.0


def collision_model(K_s: int, n_p: int, J: int, tail: float = 1e-12) -> CollisionProfile:
    """Mean-field collision recursion with a Poisson start.

    Pilot choices start Poisson with mean ``K_s / n_p`` per pilot, truncated
    once the PMF falls below ``tail``. Each iteration removes one
    non-colliding user from the active part and, with weight
    ``(J - 1) / J``, a size-biased user from the other parts.
    """
    if K_s < 1 or n_p < 1 or J < 1:
        raise ParameterError("K_s, n_p and J must be positive")
    lam = K_s / n_p
    i_max = 1
    while i_max <= lam or stats.poisson.pmf(i_max, lam) >= tail:
        i_max += 1
    i_max -= 1
    i = np.arange(i_max + 2)
    counts = np.zeros((K_s, i_max + 2))
    counts[0, 1:i_max + 1] = n_p * stats.poisson.pmf(i[1:i_max + 1], lam)
    for k in range(1, K_s):
        prev = counts[k - 1]
        kappa = (J - 1) / (J * (K_s - k + 1))
        nxt = prev.copy()
        nxt[1:i_max + 1] += kappa * (i[2:] * prev[2:] - i[1:i_max + 1] * prev[1:i_max + 1])
        nxt[1] -= 1.0 / J
        counts[k] = nxt
    remaining = K_s - np.arange(K_s)
    p_col = np.clip(1.0 - counts[:, 1] / remaining, 0.0, 1.0)
    return CollisionProfile(counts[:, :i_max + 1], p_col)


def slot_error(r: int, cfg: AnalyticConfig) -> float:
    """Per-user error rate of a slot holding ``r`` users."""
    if r < 1:
        return 0.0
    p_d = detection_probability(cfg.gamma, cfg.M, cfg.n_p, cfg.P_p, cfg.noise_var)
    p_col = collision_model(r, cfg.n_p, cfg.J).p_collision
    t = np.arange(1, r + 1)
    e = np.empty(r)
    for idx in range(r):
        p_dec = dec_error_prob(sinr_alpha(r, idx + 1, cfg), cfg.B, cfg.r, cfg.n_c)
        e[idx] = 1 - p_d * (1 - p_dec) * (1 - p_col[idx])
    fail = e ** (r - t + 1)
    survive = np.concatenate([[1.0], np.cumprod(1 - fail)[:-1]])
    p = fail * survive
    return float(np.sum((r - t + 1) / r * p))


def pupe_analytic(cfg: AnalyticConfig) -> float:
    """Predicted per-user error averaged over random slot occupancy."""
    if cfg.K_a == 0:
        return 0.0
    r = np.arange(1, cfg.K_a + 1)
    weights = stats.binom.pmf(r - 1, cfg.K_a - 1, 1.0 / cfg.S)
    eps = np.array([slot_error(int(ri), cfg) if w > 0 else 0.0 for ri, w in zip(r, weights)])
    return float(1.0 - np.sum((1 - eps) * weights))


def group_sinr(P: float, rho: float, delta: float, K_0: float, M: int, n_p: int, phi: float) -> float:
    """First-iteration SINR of a group decoded as dominant."""
    num = rho * M * P ** 2 + delta * P / (n_p * phi)
    den = (P * (K_0 - 1) + delta) * (P + delta / (rho * n_p * phi))
    return num / den


def _group_powers_for(beta, G, phi, K_0, M, L, n_p, noise_var, zeta):
    powers = np.empty(G)
    interference = 0.0
    for g in range(1, G + 1):
        rho = 1 - K_0 * (G - g) / L
        delta = zeta * K_0 * interference + noise_var
        c1 = (K_0 - 1) - rho * M / beta
        c2 = delta * (1 + (K_0 - 1) / (phi * n_p * rho) - 1 / (phi * n_p * beta))
        c3 = delta ** 2 / (phi * n_p * rho)
        if c1 >= 0:
            return None
        disc = c2 * c2 - 4 * c1 * c3
        powers[g - 1] = 2 * c3 / (-c2 + math.sqrt(disc))
        interference += powers[g - 1]
    return powers


def msug_powers(G: int, P: float, phi: float, K_0: float, M: int, L: int, n_p: int,
                noise_var: float = 1.0, J: int = 2, n_c: int | None = None) -> np.ndarray:
    """Coded-part power of each group, weakest first, equalising group SINR.

    Finds the common SINR target by bisection so that the mean group power
    equals ``P``; for each target, every group's power is the positive root
    of a quadratic whose noise term includes the Gaussian-modelled
    interference of the weaker groups.
    """
    if G < 1 or P <= 0 or phi <= 0 or M < 1 or L < 1 or n_p < 1:
        raise ParameterError("invalid power-allocation inputs")
    if G == 1:
        return np.array([float(P)])
    if n_c is None:
        n_c = L - J * n_p
    zeta = (J * phi * n_p + n_c) / L
    rhos = 1 - K_0 * (G - np.arange(1, G + 1)) / L
    if np.any(rhos <= 0):
        raise InfeasibleError(f"K_0={K_0} users per group exceed the slot length for G={G}")
    beta_hi = float(np.min(rhos * M / (K_0 - 1))) if K_0 > 1 else math.inf

    def mean_power(beta):
        p = _group_powers_for(beta, G, phi, K_0, M, L, n_p, noise_var, zeta)
        return math.inf if p is None or not np.all(np.isfinite(p)) else float(p.mean())

    lo = 0.0
    hi = beta_hi
    if not math.isfinite(hi):
        hi = 1.0
        while mean_power(hi) < P:
            hi *= 2
            if hi > 1e300:
                raise InfeasibleError("no SINR target reaches the requested mean power")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mean_power(mid) < P:
            lo = mid
        else:
            hi = mid
    powers = _group_powers_for(lo, G, phi, K_0, M, L, n_p, noise_var, zeta)
    if powers is None or not np.all(np.isfinite(powers)) or np.any(powers <= 0):
        raise InfeasibleError(f"no positive power allocation; SINR target range (0, {beta_hi:.6g})")
    if np.any(np.diff(powers) <= 0):
        raise InfeasibleError(f"power allocation is not ascending at SINR target {lo:.6g}: {powers}")
    return powers
