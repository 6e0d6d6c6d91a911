"""Seeded Monte-Carlo harness for single-test and multiple-testing simulations.

Every random quantity is drawn from a substream addressed by its role, grid
point and trial index, so results do not depend on the order in which trials
are evaluated. Data substreams never include the grid index: all grid points
of a sweep see the same underlying data (common random numbers).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .calibration import calibrate
from .ebh import GroundTruth, ebh, fdp_and_tp
from .errors import DomainError
from .mechanism import all_noisy_privatize, check_delta, check_mu, noise_spec
from .normal import normal_cdf, normal_quantile
from .peeling import AdaptiveConfig, PeelingConfig, peel_adaptive, peel_fixed
from .rng import RngSeed, as_seed

RESULT_HEADER = ("method", "sweep_param", "sweep_value", "metric", "value", "se", "trials", "seed")

SINGLE_METHODS = ("nonprivate_single", "markov_private", "calibrated_private")
MULTI_METHODS = ("nonprivate_ebh", "all_noisy", "peel_fixed", "peel_adaptive")
SWEEPS = ("delta", "m1", "eta", "epsilon")


class LambdaRule(str, Enum):
    SQRT_LOG = "sqrt_log"
    SQRT_TWO_LOG = "sqrt_two_log"


def mu_from_epsilon(epsilon: float, delta_dp: float = 1e-3) -> float:
    """Budget convention mu = 4 eps / sqrt(10 log(1/delta_dp)) used by the sweeps."""
    epsilon = float(epsilon)
    delta_dp = float(delta_dp)
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise DomainError("epsilon must be positive")
    if not 0.0 < delta_dp < 1.0:
        raise DomainError("delta_dp must lie in (0, 1)")
    return 4.0 * epsilon / math.sqrt(10.0 * math.log(1.0 / delta_dp))


def _check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def _check_count(value, name, minimum=1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ResultRow:
    method: str
    sweep_param: str
    sweep_value: float
    metric: str
    value: float
    se: float
    trials: int
    seed: int

    def __post_init__(self):
        if not self.se >= 0.0:
            raise DomainError("standard error must be nonnegative")


def _default_log10_grid() -> tuple[float, ...]:
    return tuple(-3.0 + 0.25 * k for k in range(17))


@dataclass(frozen=True)
class SingleTestConfig:
    mu: float = 0.25
    alpha: float = 0.05
    log10_delta_grid: tuple[float, ...] = field(default_factory=_default_log10_grid)
    trials: int = 20_000
    lambda_rule: LambdaRule = LambdaRule.SQRT_LOG

    def __post_init__(self):
        check_mu(self.mu)
        _check_alpha(self.alpha)
        _check_count(self.trials, "trials")
        grid = tuple(float(g) for g in self.log10_delta_grid)
        if not grid or not all(math.isfinite(g) for g in grid):
            raise DomainError("log10_delta_grid must be a nonempty sequence of finite numbers")
        object.__setattr__(self, "log10_delta_grid", grid)
        object.__setattr__(self, "lambda_rule", LambdaRule(self.lambda_rule))

    @property
    def lam(self) -> float:
        log_inv = math.log(1.0 / self.alpha)
        if self.lambda_rule is LambdaRule.SQRT_TWO_LOG:
            return math.sqrt(2.0 * log_inv)
        return math.sqrt(log_inv)


def nonprivate_single_power(alpha: float, lam: float) -> float:
    """P(exp(lam Z - lam^2/2) >= 1/alpha) for Z ~ N(lam, 1)."""
    return normal_cdf(lam / 2.0 - math.log(1.0 / alpha) / lam)


def _proportion(hits: np.ndarray) -> tuple[float, float]:
    n = hits.size
    p = float(np.count_nonzero(hits)) / n
    return p, math.sqrt(p * (1.0 - p) / n)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    n = x.size
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se


def run_single_test_sweep(cfg: SingleTestConfig, seed: RngSeed | int) -> list[ResultRow]:
    """Type-I error and power of the non-private, Markov and calibrated rules.

    Null data Z ~ N(0, 1), alternative Z ~ N(lam, 1), E = exp(lam Z - lam^2/2).
    Rejections are decided on the log scale.
    """
    seed = as_seed(seed)
    lam = cfg.lam
    n = cfg.trials
    log_inv_alpha = math.log(1.0 / cfg.alpha)
    z0 = normal_quantile(seed.child(0).uniforms(n))
    z1 = lam + normal_quantile(seed.child(1).uniforms(n))
    log_e = {"type1": lam * z0 - 0.5 * lam * lam, "power": lam * z1 - 0.5 * lam * lam}

    rows = []

    def emit(method, g, metric, value, se):
        rows.append(ResultRow(method, "log10_delta", g, metric, value, se, n, seed.root))

    for gi, g in enumerate(cfg.log10_delta_grid):
        delta = 10.0 ** g
        cal = calibrate(cfg.alpha, delta, cfg.mu)
        spec = noise_spec(delta, cfg.mu)
        for arm, (metric, le) in enumerate(log_e.items()):
            xi = spec.tau + spec.sigma * normal_quantile(seed.child(2 + arm, gi).uniforms(n))
            lp = le - xi
            emit("nonprivate_single", g, metric, *_proportion(le >= log_inv_alpha))
            emit("markov_private", g, metric, *_proportion(lp >= log_inv_alpha))
            emit("calibrated_private", g, metric, *_proportion(lp >= cal.log_c_star))
    return rows


@dataclass(frozen=True)
class MultiTestConfig:
    m: int = 2000
    m1: int = 20
    eta_alt: float = 4.0
    rho: float = 0.0
    alpha: float = 0.05
    delta: float = 5e-3
    mu: float = field(default_factory=lambda: mu_from_epsilon(0.5, 1e-3))
    s_fixed: int = 500
    mu0_fraction: float = 0.1
    s_min: int = 50
    trials: int = 200
    delta_dp: float = 1e-3

    def __post_init__(self):
        m = _check_count(self.m, "m")
        m1 = _check_count(self.m1, "m1", minimum=0)
        if m1 > m:
            raise DomainError(f"m1={m1} exceeds m={m}")
        if not math.isfinite(float(self.eta_alt)):
            raise DomainError("eta_alt must be finite")
        if not 0.0 <= float(self.rho) < 1.0:
            raise DomainError("rho must lie in [0, 1)")
        _check_alpha(self.alpha)
        check_delta(self.delta, positive=True)
        check_mu(self.mu)
        s = _check_count(self.s_fixed, "s_fixed")
        s_min = _check_count(self.s_min, "s_min")
        if s > m or s_min > m:
            raise DomainError("peeling sizes cannot exceed m")
        if not 0.0 < float(self.mu0_fraction) < 1.0:
            raise DomainError("mu0_fraction must lie in (0, 1)")
        _check_count(self.trials, "trials")
        if not 0.0 < float(self.delta_dp) < 1.0:
            raise DomainError("delta_dp must lie in (0, 1)")

    @property
    def lam(self) -> float:
        return math.sqrt(math.log(self.m / self.alpha))


def gen_multi_data(cfg: MultiTestConfig, trial: int, seed: RngSeed | int) -> np.ndarray:
    """E_i = exp(lam X_i - lam^2/2), X = eta + sqrt(rho) W + sqrt(1-rho) Z.

    The first ``m1`` coordinates carry the signal ``eta_alt``.
    """
    x = _gen_x(cfg, trial, as_seed(seed))
    lam = cfg.lam
    return np.exp(lam * x - 0.5 * lam * lam)


def _gen_x(cfg: MultiTestConfig, trial: int, seed: RngSeed) -> np.ndarray:
    base = seed.child(trial)
    z = normal_quantile(base.child(1).uniforms(cfg.m))
    if cfg.rho > 0.0:
        w = normal_quantile(base.child(0).uniforms())
        x = math.sqrt(cfg.rho) * w + math.sqrt(1.0 - cfg.rho) * z
    else:
        x = z
    x = np.array(x, dtype=float)
    x[: cfg.m1] += cfg.eta_alt
    return x


def multi_trial_metrics(cfg: MultiTestConfig, trial: int, data_seed: RngSeed,
                        noise_seed: RngSeed) -> dict[str, tuple[float, float, int]]:
    """(FDP, true-positive fraction, discoveries) of each method on one dataset."""
    es = gen_multi_data(cfg, trial, data_seed)
    truth = GroundTruth.of(range(cfg.m1))
    mu0 = cfg.mu0_fraction * cfg.mu
    noise = noise_seed.child(trial)
    vectors = {
        "nonprivate_ebh": es,
        "all_noisy": all_noisy_privatize(es, cfg.delta, cfg.mu, noise.child(0)).values,
        "peel_fixed": peel_fixed(es, PeelingConfig(cfg.s_fixed, cfg.delta, cfg.mu),
                                 noise.child(1)).values,
        "peel_adaptive": peel_adaptive(es, AdaptiveConfig(cfg.s_min, mu0, cfg.alpha),
                                       cfg.delta, cfg.mu, noise.child(2)).values,
    }
    out = {}
    for method, values in vectors.items():
        report = ebh(values, cfg.alpha)
        fdp, tp = fdp_and_tp(report, truth)
        out[method] = (fdp, tp, report.k_star)
    return out


def simulate_multi(cfg: MultiTestConfig, data_seed: RngSeed, noise_seed: RngSeed,
                   trials: int | None = None) -> dict[str, np.ndarray]:
    """Per-trial (fdp, tp, discoveries) arrays of shape (trials, 3) for each method."""
    trials = cfg.trials if trials is None else _check_count(trials, "trials")
    acc = {name: np.empty((trials, 3)) for name in MULTI_METHODS}
    for t in range(trials):
        for name, triple in multi_trial_metrics(cfg, t, data_seed, noise_seed).items():
            acc[name][t] = triple
    return acc


def _apply_sweep(cfg: MultiTestConfig, sweep: str, value: float) -> MultiTestConfig:
    if sweep == "delta":
        return replace(cfg, delta=10.0 ** float(value))
    if sweep == "m1":
        if int(value) != value:
            raise DomainError(f"m1 grid values must be integers, got {value!r}")
        return replace(cfg, m1=int(value))
    if sweep == "eta":
        return replace(cfg, eta_alt=float(value))
    if sweep == "epsilon":
        return replace(cfg, mu=mu_from_epsilon(value, cfg.delta_dp))
    raise DomainError(f"unknown sweep {sweep!r}; choose from {', '.join(SWEEPS)}")


def run_multi_sweep(cfg: MultiTestConfig, sweep: str, grid: Sequence[float],
                    trials: int | None = None, seed: RngSeed | int = 0) -> list[ResultRow]:
    """Mean FDR and AP (with standard errors) per grid point and method.

    For ``sweep == "delta"`` the grid holds log10 of the sensitivity.
    """
    seed = as_seed(seed)
    grid = [float(g) for g in grid]
    if not grid:
        raise DomainError("sweep grid is empty")
    trials = cfg.trials if trials is None else _check_count(trials, "trials")
    configs = [_apply_sweep(cfg, sweep, g) for g in grid]  # validate before running
    sweep_name = "log10_delta" if sweep == "delta" else sweep
    rows = []
    for gi, (g, cfg_g) in enumerate(zip(grid, configs)):
        acc = simulate_multi(cfg_g, seed.child(0), seed.child(1, gi), trials)
        for name in MULTI_METHODS:
            for col, metric in ((0, "fdr"), (1, "ap")):
                mean, se = _mean_se(acc[name][:, col])
                rows.append(ResultRow(name, sweep_name, g, metric, mean, se, trials, seed.root))
    return rows


def gwas_evalues(zscores, alpha: float) -> np.ndarray:
    z = np.asarray(zscores, dtype=float)
    lam = math.sqrt(math.log(z.size / alpha))
    return np.exp(lam * z - 0.5 * lam * lam)


def run_gwas(zscores: Sequence[float], alpha_grid: Sequence[float], mu: float, delta: float,
             s_fixed: int, acfg: AdaptiveConfig | None, seed: RngSeed | int) -> list[ResultRow]:
    """Discovery counts of each method on reported z-scores, per target level.

    ``acfg`` supplies s_min and mu0 for adaptive peeling; its alpha is replaced
    by each grid value. Pass ``None`` to skip the adaptive method.
    """
    z = np.asarray(zscores, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("need a nonempty sequence of z-scores")
    if not np.all(np.isfinite(z)):
        raise DomainError("z-scores must be finite")
    alphas = [_check_alpha(a) for a in alpha_grid]
    if not alphas:
        raise DomainError("alpha grid is empty")
    mu = check_mu(mu)
    delta = check_delta(delta, positive=True)
    s = min(_check_count(s_fixed, "s_fixed"), z.size)
    seed = as_seed(seed)

    rows = []
    for ai, alpha in enumerate(alphas):
        es = gwas_evalues(z, alpha)
        noise = seed.child(ai)
        counts = {
            "nonprivate_ebh": ebh(es, alpha).k_star,
            "all_noisy": ebh(all_noisy_privatize(es, delta, mu, noise.child(0)).values,
                             alpha).k_star,
            "peel_fixed": ebh(peel_fixed(es, PeelingConfig(s, delta, mu), noise.child(1)).values,
                              alpha).k_star,
        }
        if acfg is not None:
            a_cfg = AdaptiveConfig(min(acfg.s_min, z.size), acfg.mu0, alpha)
            counts["peel_adaptive"] = ebh(
                peel_adaptive(es, a_cfg, delta, mu, noise.child(2)).values, alpha).k_star
        for name, k in counts.items():
            rows.append(ResultRow(name, "alpha", alpha, "discoveries", float(k), 0.0, 1,
                                  seed.root))
    return rows
