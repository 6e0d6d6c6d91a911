"""Canonical mu-GDP e-value mechanism: E * exp(-xi), xi ~ N(delta^2/(2 mu^2), delta^2/mu^2).

Budgets (mu) and sensitivities (delta) are plain floats; every entry point
validates them. Gaussian draws are inverse-CDF transforms of substream
uniforms, so each draw is a pure function of its :class:`RngSeed`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .normal import normal_quantile
from .rng import RngSeed, as_seed

CANONICAL = "canonical"


def check_mu(mu: float, name: str = "mu") -> float:
    mu = float(mu)
    if not (mu > 0.0 and math.isfinite(mu)):
        raise DomainError(f"{name} must be a finite positive number, got {mu!r}")
    return mu


def check_delta(delta: float, *, positive: bool = False) -> float:
    delta = float(delta)
    ok = delta > 0.0 if positive else delta >= 0.0
    if not (ok and math.isfinite(delta)):
        bound = "positive" if positive else "nonnegative"
        raise DomainError(f"sensitivity must be finite and {bound}, got {delta!r}")
    return delta


def check_evalues(es) -> np.ndarray:
    arr = np.asarray(es, dtype=float)
    if arr.ndim != 1:
        raise DomainError("e-values must be a one-dimensional sequence")
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError("e-values must be nonnegative")
    return arr


@dataclass(frozen=True)
class NoiseSpec:
    """Law of the log-scale noise xi ~ N(tau, sigma2)."""

    tau: float
    sigma2: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class PrivateEValue:
    """A released e-value together with its privacy provenance.

    ``mechanism`` names the release rule ("canonical", "noisy_max",
    "weighted_average", "independent_product"); ``independent_sources`` records
    the caller's assertion that product components came from disjoint data.
    """

    value: float
    mu: float
    delta: float | None
    seed_path: tuple[int, ...] = ()
    mechanism: str = CANONICAL
    independent_sources: bool = False


def noise_spec(delta: float, mu: float) -> NoiseSpec:
    delta = check_delta(delta)
    mu = check_mu(mu)
    ratio = delta / mu
    return NoiseSpec(tau=0.5 * ratio * ratio, sigma2=ratio * ratio)


def draw_log_noise(spec: NoiseSpec, seed: RngSeed | int, size=None):
    """xi = tau + sigma * Phi^{-1}(U), U from the seed's substream."""
    seed = as_seed(seed)
    if spec.sigma2 == 0.0:
        return 0.0 if size is None else np.zeros(size)
    u = seed.uniforms(1 if size is None else size)
    xi = spec.tau + spec.sigma * np.asarray(normal_quantile(u))
    return float(xi[0]) if size is None else xi


def privatize(e: float, delta: float, mu: float, seed: RngSeed | int) -> PrivateEValue:
    e = float(e)
    if not e >= 0.0:
        raise DomainError("e-value must be nonnegative")
    seed = as_seed(seed)
    spec = noise_spec(delta, mu)
    if spec.sigma2 == 0.0:
        value = e
    else:
        value = e * math.exp(-draw_log_noise(spec, seed))
    return PrivateEValue(value, float(mu), float(delta), seed.path)


def all_noisy_privatize(es, delta: float, mu: float, seed: RngSeed | int):
    """Privatize all m coordinates at per-coordinate budget mu/sqrt(m).

    Coordinate i consumes the i-th uniform of the seed's substream, so m = 1
    reproduces :func:`privatize` with the same seed exactly.
    """
    from .peeling import PrivateEVector

    arr = check_evalues(es)
    m = arr.size
    if m < 1:
        raise DomainError("all_noisy_privatize needs at least one e-value")
    mu = check_mu(mu)
    spec = noise_spec(delta, mu / math.sqrt(m))
    xi = draw_log_noise(spec, seed, size=m)
    values = arr * np.exp(-xi)
    return PrivateEVector(values=values, selected=tuple(range(m)), mu=mu,
                          delta=float(delta))
