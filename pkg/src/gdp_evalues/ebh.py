"""e-BH multiple testing and realized FDP / power against known truth."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class TestingReport:
    __test__ = False  # not a pytest class

    k_star: int
    rejected: frozenset[int]
    fdr: float | None = None
    ap: float | None = None


@dataclass(frozen=True)
class GroundTruth:
    signal_indices: frozenset[int]

    @classmethod
    def of(cls, indices: Iterable[int]) -> GroundTruth:
        return cls(frozenset(int(i) for i in indices))

    @property
    def m1(self) -> int:
        return len(self.signal_indices)


def descending_order(values: np.ndarray) -> np.ndarray:
    """Indices sorting ``values`` high to low, ties broken by ascending index."""
    return np.argsort(-values, kind="stable")


def ebh_k_star(values, alpha: float) -> int:
    """k* = max{k : E_(k) >= m/(alpha k)}, or 0."""
    v = np.asarray(values, dtype=float)
    m = v.size
    if m == 0:
        return 0
    ordered = -np.sort(-v)
    ks = np.arange(1, m + 1)
    ok = np.flatnonzero(ordered >= m / (alpha * ks))
    return int(ok[-1]) + 1 if ok.size else 0


def ebh(es, alpha: float) -> TestingReport:
    v = np.asarray(es, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DomainError("e-BH needs a nonempty one-dimensional vector")
    if np.any(np.isnan(v)) or np.any(v < 0.0):
        raise DomainError("e-values must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    k = ebh_k_star(v, alpha)
    rejected = frozenset(int(i) for i in descending_order(v)[:k])
    return TestingReport(k_star=k, rejected=rejected)


def fdp_and_tp(report: TestingReport, truth: GroundTruth) -> tuple[float, float]:
    """Realized false discovery proportion and true-positive fraction of one run."""
    rej = report.rejected
    false = len(rej - truth.signal_indices)
    true = len(rej & truth.signal_indices)
    fdp = false / max(1, len(rej))
    tp = true / truth.m1 if truth.m1 else 0.0
    return fdp, tp


def evaluate(report: TestingReport, truth: GroundTruth) -> TestingReport:
    fdp, tp = fdp_and_tp(report, truth)
    return TestingReport(report.k_star, report.rejected, fdr=fdp, ap=tp)
