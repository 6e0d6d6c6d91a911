"""Recursive private peeling with fixed or privately chosen peeling size."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .mechanism import check_delta, check_evalues, check_mu, draw_log_noise, noise_spec
from .normal import normal_quantile
from .rng import RngSeed, as_seed
from .selection import noisy_argmax, selection_split


@dataclass(frozen=True)
class PeelingConfig:
    s: int
    delta: float
    mu: float

    @property
    def mu_per_iteration(self) -> float:
        return self.mu / math.sqrt(self.s)


@dataclass(frozen=True)
class AdaptiveConfig:
    s_min: int
    mu0: float
    alpha: float

    def __post_init__(self):
        if int(self.s_min) < 1:
            raise DomainError("s_min must be at least 1")
        check_mu(self.mu0, "mu0")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class MarginVector:
    """Exact and noisy e-BH margins on the dyadic grid.

    Only ``q_noisy`` is a private release; ``q`` is kept for diagnostics and
    must not leave the trusted boundary.
    """

    grid: tuple[int, ...]
    q: np.ndarray
    q_noisy: np.ndarray


@dataclass(frozen=True, eq=False)
class PrivateEVector:
    """Length-m private e-values; entries outside ``selected`` are zero.

    ``selected`` lists indices in extraction order. ``mu`` is the total budget
    spent to produce the vector.
    """

    values: np.ndarray
    selected: tuple[int, ...]
    mu: float
    delta: float
    margins: MarginVector | None = field(default=None)
    mu_peel: float | None = None

    @property
    def s(self) -> int:
        return len(self.selected)


def peel_fixed(es, cfg: PeelingConfig, seed: RngSeed | int) -> PrivateEVector:
    """Run ``cfg.s`` Report Noisy Max extractions at budget mu/sqrt(s) each.

    Iteration t uses seed paths (t, 0) for the Gumbel block and (t, 1) for the
    release noise, matching a direct ``report_noisy_max`` call at ``seed.child(t)``.
    """
    arr = check_evalues(es)
    m = arr.size
    if m == 0:
        raise DomainError("peeling needs at least one e-value")
    s = int(cfg.s)
    if not 1 <= s <= m:
        raise DomainError(f"peeling size must satisfy 1 <= s <= m (s={s}, m={m})")
    delta = check_delta(cfg.delta, positive=True)
    mu = check_mu(cfg.mu)
    seed = as_seed(seed)

    mu_t = mu / math.sqrt(s)
    scale = selection_split(delta, mu_t).gumbel_scale
    release = noise_spec(delta, mu_t / math.sqrt(2.0))
    with np.errstate(divide="ignore"):
        log_e = np.log(arr)
    active = np.ones(m, dtype=bool)
    values = np.zeros(m)
    picked = []
    for t in range(s):
        j = noisy_argmax(log_e, active, scale, seed.child(t, 0))
        if arr[j] > 0.0:
            values[j] = arr[j] * math.exp(-draw_log_noise(release, seed.child(t, 1)))
        active[j] = False
        picked.append(j)
    return PrivateEVector(values=values, selected=tuple(picked), mu=mu, delta=delta)


def dyadic_grid(s_min: int, m: int) -> tuple[int, ...]:
    grid = []
    k = int(s_min)
    while k <= m:
        grid.append(k)
        k *= 2
    return tuple(grid)


def sorted_log_evalues(arr: np.ndarray) -> np.ndarray:
    """Log e-values in descending order; ties keep ascending index order."""
    with np.errstate(divide="ignore"):
        log_e = np.log(arr)
    order = np.argsort(-log_e, kind="stable")
    return log_e[order]


def noisy_margins(es, acfg: AdaptiveConfig, delta: float, seed: RngSeed | int) -> MarginVector:
    """Q_k = L_(k) - log(m/(alpha k)) plus N(0, |K| delta^2 / mu0^2) noise, k on the grid.

    The noise for the j-th grid point comes from substream ``seed.child(j)``.
    """
    arr = check_evalues(es)
    m = arr.size
    if acfg.s_min > m:
        raise DomainError(f"s_min={acfg.s_min} exceeds the number of hypotheses m={m}")
    delta = check_delta(delta, positive=True)
    seed = as_seed(seed)
    grid = dyadic_grid(acfg.s_min, m)
    ordered = sorted_log_evalues(arr)
    ks = np.asarray(grid)
    q = ordered[ks - 1] - np.log(m / (acfg.alpha * ks))
    noise_sd = math.sqrt(len(grid)) * delta / acfg.mu0
    z = np.array([normal_quantile(seed.child(j).uniforms()) for j in range(len(grid))])
    return MarginVector(grid=grid, q=q, q_noisy=q + noise_sd * z)


def choose_peel_size(margins: MarginVector, acfg: AdaptiveConfig, m: int) -> int:
    grid = margins.grid
    hits = [j for j, qn in enumerate(margins.q_noisy) if qn >= 0.0]
    if not hits:
        return min(acfg.s_min, m)
    j_hat = max(hits)
    k_plus = grid[j_hat + 1] if j_hat + 1 < len(grid) else grid[j_hat]
    return max(acfg.s_min, min(m, k_plus))


def split_adaptive_budget(mu: float, mu0: float) -> float:
    """mu_peel = sqrt(mu^2 - mu0^2)."""
    mu = check_mu(mu)
    mu0 = check_mu(mu0, "mu0")
    if not mu0 < mu:
        raise DomainError(f"margin budget mu0={mu0} must be below the total mu={mu}")
    return math.sqrt((mu - mu0) * (mu + mu0))


def peel_adaptive(es, acfg: AdaptiveConfig, delta: float, mu: float,
                  seed: RngSeed | int) -> PrivateEVector:
    """Choose the peeling size from noisy margins (budget mu0), then peel with the rest."""
    mu_peel = split_adaptive_budget(mu, acfg.mu0)
    arr = check_evalues(es)
    seed = as_seed(seed)
    margins = noisy_margins(arr, acfg, delta, seed.child(0))
    s_hat = choose_peel_size(margins, acfg, arr.size)
    vec = peel_fixed(arr, PeelingConfig(s_hat, delta, mu_peel), seed.child(1))
    return PrivateEVector(values=vec.values, selected=vec.selected, mu=float(mu),
                          delta=vec.delta, margins=margins, mu_peel=mu_peel)
