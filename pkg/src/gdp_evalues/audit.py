"""Empirical privacy audit of noisy-max selection between two candidate groups.

Two groups of ``n`` candidates have centered scores 0 and ``gamma``. The audit
estimates p_error(n), the probability that the noisy maximum lands in the
lower group, and compares it with the trade-off curve G_mu the mechanism
claims. With Gaussian noise of std sqrt(8) delta / mu the error vanishes as
n grows and eventually falls below the curve; with Gumbel noise it equals
1 / (1 + exp(gamma / b)) for every n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .errors import DomainError
from .mechanism import check_delta, check_mu
from .normal import gdp_tradeoff
from .rng import RngSeed, as_seed, open_uniforms
from .selection import gumbel_from_uniform, selection_epsilon

AUDIT_HEADER = ("noise", "n", "p_error", "se", "g_mu_at_p", "violation")


class Noise(str, Enum):
    GAUSSIAN = "gaussian"
    GUMBEL = "gumbel"


@dataclass(frozen=True)
class AuditConfig:
    gamma: float = 0.49
    n_grid: tuple[int, ...] = (100, 1_000, 10_000, 100_000)
    mu: float = 1.0 / math.sqrt(2.0)
    trials: int = 10_000
    noise: Noise = Noise.GAUSSIAN
    delta: float = 1.0
    claimed_mu: float | None = None

    def __post_init__(self):
        gamma = float(self.gamma)
        if not (gamma >= 0.0 and math.isfinite(gamma)):
            raise DomainError("gamma must be a finite nonnegative number")
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(n < 1 for n in grid) or any(
                int(n) != n for n in self.n_grid):
            raise DomainError("n_grid must be a nonempty sequence of positive integers")
        object.__setattr__(self, "n_grid", grid)
        check_mu(self.mu)
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        object.__setattr__(self, "noise", Noise(self.noise))
        check_delta(self.delta, positive=True)
        if self.claimed_mu is not None and not (
                self.claimed_mu >= 0.0 and math.isfinite(self.claimed_mu)):
            raise DomainError("claimed_mu must be finite and nonnegative")

    @property
    def gaussian_std(self) -> float:
        return math.sqrt(8.0) * self.delta / self.mu

    @property
    def gumbel_scale(self) -> float:
        return 2.0 * self.delta / selection_epsilon(self.mu)

    @property
    def mu_claimed(self) -> float:
        return self.mu / math.sqrt(2.0) if self.claimed_mu is None else float(self.claimed_mu)


@dataclass(frozen=True)
class AuditRow:
    n: int
    p_error: float
    se: float
    g_mu_at_p: float
    violation: bool


def gumbel_error_closed_form(gap: float, scale: float) -> float:
    """P(max of group A > gap + max of group B) under Gumbel(scale) noise."""
    gap, scale = float(gap), float(scale)
    if not gap > 0.0 or not (scale > 0.0 and math.isfinite(scale)):
        raise DomainError("gap and scale must be positive")
    if math.isinf(gap):
        return 0.0
    # logistic tail, written to stay finite for large gap/scale
    return math.exp(-gap / scale) / (1.0 + math.exp(-gap / scale))


def pure_dp_tradeoff(alpha, epsilon: float):
    """f_{eps,0}(alpha) = max(0, 1 - e^eps alpha, e^-eps (1 - alpha))."""
    a = np.asarray(alpha, dtype=float)
    eps = float(epsilon)
    if eps < 0.0 or not math.isfinite(eps):
        raise DomainError("epsilon must be finite and nonnegative")
    if np.any((a < 0.0) | (a > 1.0)) or np.any(np.isnan(a)):
        raise DomainError("alpha must lie in [0, 1]")
    out = np.maximum(0.0, np.maximum(1.0 - math.exp(eps) * a, math.exp(-eps) * (1.0 - a)))
    return float(out) if out.ndim == 0 else out


def _group_noise(cfg: AuditConfig, gen: np.random.Generator, n: int) -> np.ndarray:
    if cfg.noise is Noise.GAUSSIAN:
        return cfg.gaussian_std * gen.standard_normal(2 * n)
    return gumbel_from_uniform(open_uniforms(gen, 2 * n), cfg.gumbel_scale)


def _lower_group_wins(cfg: AuditConfig, n: int, seed: RngSeed) -> np.ndarray:
    wins = np.empty(cfg.trials, dtype=bool)
    for t in range(cfg.trials):
        z = _group_noise(cfg, seed.child(t).generator(), n)
        wins[t] = z[:n].max() > cfg.gamma + z[n:].max()
    return wins


def _binomial(wins: np.ndarray) -> tuple[float, float]:
    p = float(np.count_nonzero(wins)) / wins.size
    return p, math.sqrt(p * (1.0 - p) / wins.size)


def selection_error_mc(cfg: AuditConfig, n: int, seed: RngSeed | int) -> tuple[float, float]:
    """Monte-Carlo p_error(n) and its binomial standard error.

    Trial t draws its 2n noise values from substream ``seed.child(t)``.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    return _binomial(_lower_group_wins(cfg, int(n), as_seed(seed)))


def swap_test_errors(cfg: AuditConfig, n: int, seed: RngSeed | int) -> tuple[float, float, float, float]:
    """Type-I and Type-II error (with SEs) of the test "selected index is in group A".

    Under the null the higher score sits in group B; under the alternative the
    groups swap. By symmetry both errors equal p_error(n).
    """
    seed = as_seed(seed)
    type1 = _binomial(_lower_group_wins(cfg, int(n), seed.child(0)))
    type2 = _binomial(_lower_group_wins(cfg, int(n), seed.child(1)))
    return (*type1, *type2)


def violation_report(cfg: AuditConfig, seed: RngSeed | int) -> list[AuditRow]:
    """One row per n; a violation is flagged when p_error + 3 se < G_claimed(p_error).

    The estimate for a given n uses substream ``seed.child(n)``, so rows do not
    depend on which other sizes are in the grid.
    """
    seed = as_seed(seed)
    rows = []
    for n in cfg.n_grid:
        p, se = selection_error_mc(cfg, n, seed.child(n))
        g = gdp_tradeoff(p, cfg.mu_claimed) if cfg.mu_claimed > 0.0 else 1.0 - p
        rows.append(AuditRow(n=n, p_error=p, se=se, g_mu_at_p=g, violation=p + 3.0 * se < g))
    return rows


def max_stability_ks(scale: float, n: int, samples: int, seed: RngSeed | int) -> float:
    """KS p-value of (max of n Gumbel(scale) draws) - scale log n against Gumbel(0, scale)."""
    seed = as_seed(seed)
    maxima = np.empty(samples)
    for k in range(samples):
        u = seed.child(k).uniforms(n)
        maxima[k] = gumbel_from_uniform(u, scale).max() - scale * math.log(n)
    return float(stats.kstest(maxima, stats.gumbel_r(loc=0.0, scale=scale).cdf).pvalue)
