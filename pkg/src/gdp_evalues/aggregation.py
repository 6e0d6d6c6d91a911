"""Privacy accounting for combined private e-values."""

from __future__ import annotations

import math
from collections.abc import Sequence

from .errors import BudgetMismatchError, DomainError, ProvenanceError
from .mechanism import CANONICAL, PrivateEValue, check_delta, check_mu


def compose(mus: Sequence[float]) -> float:
    """GDP composition: sqrt(sum mu_k^2)."""
    mus = [check_mu(m) for m in mus]
    if not mus:
        raise DomainError("cannot compose an empty ledger")
    return math.hypot(*mus)


def weighted_average(es: Sequence[PrivateEValue], weights: Sequence[float]) -> PrivateEValue:
    """Convex combination of e-values released at a common mu; costs sqrt(K) mu."""
    es = list(es)
    weights = [float(w) for w in weights]
    if not es or len(es) != len(weights):
        raise DomainError("need one weight per e-value and at least one e-value")
    if any(w < 0.0 for w in weights) or abs(math.fsum(weights) - 1.0) > 1e-12:
        raise DomainError("weights must be nonnegative and sum to 1")
    mu = es[0].mu
    if any(not math.isclose(e.mu, mu, rel_tol=1e-12) for e in es):
        raise BudgetMismatchError("weighted averaging requires a common mu")
    value = math.fsum(w * e.value for w, e in zip(weights, es))
    return PrivateEValue(value=value, mu=compose([mu] * len(es)), delta=None,
                         mechanism="weighted_average")


def product_mu(deltas: Sequence[float], mu: float) -> float:
    """mu * max_k delta_k / sqrt(sum delta_k^2)."""
    deltas = [check_delta(d, positive=True) for d in deltas]
    if not deltas:
        raise DomainError("product needs at least one component")
    mu = check_mu(mu)
    return mu * max(deltas) / math.sqrt(math.fsum(d * d for d in deltas))


def independent_product(es: Sequence[PrivateEValue], deltas: Sequence[float] | None = None,
                        mu: float | None = None) -> PrivateEValue:
    """Product of canonical private e-values computed on disjoint datasets.

    Independence of the sources cannot be checked here; calling this function
    is the caller's assertion, recorded as ``independent_sources=True``.
    """
    es = list(es)
    if not es:
        raise DomainError("product needs at least one component")
    for e in es:
        if e.mechanism != CANONICAL or e.delta is None:
            raise ProvenanceError("independent_product requires canonical-mechanism outputs")
    if deltas is None:
        deltas = [e.delta for e in es]
    elif len(deltas) != len(es) or any(
            not math.isclose(d, e.delta, rel_tol=1e-12) for d, e in zip(deltas, es)):
        raise BudgetMismatchError("stated sensitivities differ from the components' provenance")
    if mu is None:
        mu = es[0].mu
    if any(not math.isclose(e.mu, mu, rel_tol=1e-12) for e in es):
        raise BudgetMismatchError("all components must share the same mu")
    value = math.prod(e.value for e in es)
    return PrivateEValue(value=value, mu=product_mu(deltas, mu), delta=max(deltas),
                         mechanism="independent_product", independent_sources=True)
