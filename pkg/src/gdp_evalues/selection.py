"""Report Noisy Max: Gumbel-perturbed argmax over log e-values, then a canonical release.

Half of the budget (mu/sqrt 2 in GDP terms) pays for the index via an
epsilon-DP Gumbel selection whose f_{eps,0} curve dominates G_{mu/sqrt 2};
the other half releases the winner with xi ~ N(delta^2/mu^2, 2 delta^2/mu^2).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mechanism import (
    PrivateEValue,
    check_delta,
    check_evalues,
    check_mu,
    draw_log_noise,
    noise_spec,
)
from .normal import log_normal_cdf
from .rng import RngSeed, as_seed

NOISY_MAX = "noisy_max"


@dataclass(frozen=True)
class SelectionBudgetSplit:
    epsilon: float
    gumbel_scale: float
    release_tau: float
    release_var: float


@dataclass(frozen=True)
class Extraction:
    index: int
    private_value: PrivateEValue


def selection_epsilon(mu: float) -> float:
    """eps = log(Phi(mu/(2 sqrt 2)) / Phi(-mu/(2 sqrt 2)))."""
    a = check_mu(mu) / (2.0 * math.sqrt(2.0))
    return log_normal_cdf(a) - log_normal_cdf(-a)


def selection_split(delta: float, mu: float) -> SelectionBudgetSplit:
    delta = check_delta(delta, positive=True)
    eps = selection_epsilon(mu)
    release = noise_spec(delta, mu / math.sqrt(2.0))
    return SelectionBudgetSplit(epsilon=eps, gumbel_scale=2.0 * delta / eps,
                                release_tau=release.tau, release_var=release.sigma2)


def gumbel_from_uniform(u, scale: float):
    return -scale * np.log(-np.log(u))


def gumbel_sample(scale: float, seed: RngSeed | int, size=None):
    """Gumbel(0, scale) via the inverse CDF of clamped substream uniforms."""
    scale = float(scale)
    if not (scale > 0.0 and math.isfinite(scale)):
        raise DomainError("Gumbel scale must be positive")
    u = as_seed(seed).uniforms(size)
    g = gumbel_from_uniform(u, scale)
    return float(g) if size is None else g


def noisy_argmax(log_e: np.ndarray, active: np.ndarray, scale: float, seed: RngSeed) -> int:
    """Index maximizing log_e[i] + g_i over the boolean mask ``active``.

    Candidate i always consumes the i-th uniform of the seed's substream, so
    the noise attached to an index does not depend on the rest of the set.
    Ties (including all-zero e-values at -inf) go to the lowest index.
    """
    g = gumbel_from_uniform(seed.uniforms(log_e.size), scale)
    scores = np.where(active, log_e + g, -np.inf)
    j = int(np.argmax(scores))
    if scores[j] == -np.inf:
        j = int(np.flatnonzero(active)[0])
    return j


def report_noisy_max(active: Iterable[int], es: Sequence[float], delta: float, mu: float,
                     seed: RngSeed | int) -> Extraction:
    """Select one index from ``active`` and release its e-value, mu-GDP in total.

    ``es`` is indexed by hypothesis id; ``active`` lists the ids still in play.
    """
    arr = check_evalues(es)
    seed = as_seed(seed)
    split = selection_split(delta, mu)
    mask = np.zeros(arr.size, dtype=bool)
    idx = list(active)
    if not idx:
        raise DomainError("report_noisy_max needs a nonempty active set")
    if min(idx) < 0 or max(idx) >= arr.size:
        raise DomainError("active index out of range")
    mask[idx] = True
    with np.errstate(divide="ignore"):
        log_e = np.log(arr)
    j = noisy_argmax(log_e, mask, split.gumbel_scale, seed.child(0))
    return Extraction(index=j, private_value=release_winner(arr[j], delta, mu, seed.child(1)))


def release_winner(e: float, delta: float, mu: float, seed: RngSeed) -> PrivateEValue:
    """Canonical release at budget mu/sqrt 2: xi ~ N(delta^2/mu^2, 2 delta^2/mu^2)."""
    spec = noise_spec(delta, mu / math.sqrt(2.0))
    value = float(e) * math.exp(-draw_log_noise(spec, seed)) if e > 0.0 else 0.0
    return PrivateEValue(value=value, mu=float(mu), delta=float(delta), seed_path=seed.path,
                         mechanism=NOISY_MAX)
