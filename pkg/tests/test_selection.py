import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gdp_evalues.errors import DomainError
from gdp_evalues.mechanism import privatize
from gdp_evalues.rng import RngSeed
from gdp_evalues.selection import (
    NOISY_MAX,
    gumbel_sample,
    noisy_argmax,
    report_noisy_max,
    selection_epsilon,
    selection_split,
)

EULER_GAMMA = 0.5772156649015329


class TestEpsilon:
    def test_frozen_oracle(self):
        assert selection_epsilon(1.0) == pytest.approx(0.56740074727500385, rel=1e-13)
        assert selection_epsilon(0.25) == pytest.approx(0.1410975774187431, rel=1e-13)

    def test_rounded_reference_values(self):
        assert abs(selection_epsilon(1.0) - 0.56756) < 2e-4
        assert abs(selection_epsilon(0.25) - 0.14111) < 2e-5

    def test_small_budget_slope(self):
        for mu in (1e-4, 1e-8):
            assert selection_epsilon(mu) / mu == pytest.approx(1 / math.sqrt(math.pi), rel=1e-6)

    @given(st.floats(1e-6, 50.0), st.floats(1e-6, 50.0))
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert selection_epsilon(lo) <= selection_epsilon(hi)

    def test_split_fields(self):
        sp = selection_split(0.5, 1.0)
        assert sp.gumbel_scale == pytest.approx(2 * 0.5 / selection_epsilon(1.0))
        assert sp.release_tau == pytest.approx(0.25, rel=1e-15)
        assert sp.release_var == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("mu", [0.0, -1.0, math.inf])
    def test_domain(self, mu):
        with pytest.raises(DomainError):
            selection_epsilon(mu)


class TestGumbel:
    def test_moments(self):
        g = gumbel_sample(2.0, RngSeed(3), size=1_000_000)
        se = g.std(ddof=1) / 1000.0
        assert abs(g.mean() - 2.0 * EULER_GAMMA) <= 3 * se
        # median SE from the asymptotic order-statistic variance
        med = -2.0 * math.log(math.log(2.0))
        dens = stats.gumbel_r(scale=2.0).pdf(med)
        assert abs(np.median(g) - med) <= 3 * 0.5 / (dens * 1000.0)

    def test_scalar_and_deterministic(self):
        a = gumbel_sample(1.0, RngSeed(5, (1,)))
        assert isinstance(a, float)
        assert a == gumbel_sample(1.0, RngSeed(5, (1,)))

    @pytest.mark.parametrize("n", [1_000, 100_000])
    def test_max_stability(self, n):
        scale = 1.5
        maxima = np.array([gumbel_sample(scale, RngSeed(9, (n, k)), size=n).max()
                           for k in range(400)]) - scale * math.log(n)
        assert stats.kstest(maxima, stats.gumbel_r(scale=scale).cdf).pvalue > 0.01

    @pytest.mark.parametrize("scale", [0.0, -1.0, math.nan])
    def test_domain(self, scale):
        with pytest.raises(DomainError):
            gumbel_sample(scale, 0)


def _frequencies(log_e, scale, trials, root):
    active = np.ones(log_e.size, dtype=bool)
    counts = np.zeros(log_e.size)
    for t in range(trials):
        counts[noisy_argmax(log_e, active, scale, RngSeed(root, (t,)))] += 1
    return counts / trials


class TestSelectionLaw:
    def test_two_candidate_three_quarters(self):
        scale = 0.8
        log_e = np.array([scale * math.log(3.0), 0.0])
        p = _frequencies(log_e, scale, 100_000, 17)[0]
        assert abs(p - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / 100_000)

    def test_equal_values_uniform(self):
        freq = _frequencies(np.zeros(4), 1.0, 40_000, 18)
        se = math.sqrt(0.25 * 0.75 / 40_000)
        assert np.all(np.abs(freq - 0.25) <= 3 * se)

    def test_inactive_never_selected(self):
        log_e = np.array([5.0, 0.0, 0.0])
        active = np.array([False, True, True])
        picks = {noisy_argmax(log_e, active, 1.0, RngSeed(2, (t,))) for t in range(200)}
        assert picks <= {1, 2}

    def test_noise_of_an_index_is_independent_of_the_set(self):
        log_e = np.zeros(5)
        seed = RngSeed(4)
        u = seed.uniforms(5)
        order = np.argsort(-(-np.log(-np.log(u))), kind="stable")
        full = noisy_argmax(log_e, np.ones(5, dtype=bool), 1.0, seed)
        assert full == order[0]
        mask = np.ones(5, dtype=bool)
        mask[full] = False
        assert noisy_argmax(log_e, mask, 1.0, seed) == order[1]


class TestReportNoisyMax:
    def test_singleton(self):
        seed = RngSeed(30)
        ex = report_noisy_max([2], [1.0, 5.0, 3.0], 0.2, 1.0, seed)
        assert ex.index == 2
        want = privatize(3.0, 0.2, 1.0 / math.sqrt(2.0), seed.child(1)).value
        assert ex.private_value.value == want
        assert ex.private_value.mechanism == NOISY_MAX
        assert ex.private_value.mu == 1.0

    def test_all_zero_active_picks_lowest_index(self):
        ex = report_noisy_max([3, 1, 2], [9.0, 0.0, 0.0, 0.0], 0.2, 1.0, RngSeed(1))
        assert ex.index == 1
        assert ex.private_value.value == 0.0

    def test_zero_loses_to_positive(self):
        for t in range(50):
            ex = report_noisy_max([0, 1], [0.0, 1e-300], 1.0, 0.01, RngSeed(6, (t,)))
            assert ex.index == 1

    @pytest.mark.parametrize("active", [[], [5], [-1]])
    def test_bad_active_set(self, active):
        with pytest.raises(DomainError):
            report_noisy_max(active, [1.0, 2.0], 0.1, 1.0, 0)

    def test_released_value_law(self):
        delta, mu = 0.4, 1.0
        logs = []
        for t in range(3000):
            ex = report_noisy_max([0, 1, 2], [2.0, 1.0, 0.5], delta, mu, RngSeed(50, (t,)))
            logs.append(math.log(ex.private_value.value / [2.0, 1.0, 0.5][ex.index]))
        law = stats.norm(loc=-(delta / mu) ** 2, scale=math.sqrt(2) * delta / mu)
        assert stats.kstest(logs, law.cdf).pvalue > 0.01

    def test_deterministic(self):
        a = report_noisy_max(range(4), [1.0, 2.0, 3.0, 4.0], 0.5, 0.5, RngSeed(8))
        b = report_noisy_max(range(4), [1.0, 2.0, 3.0, 4.0], 0.5, 0.5, RngSeed(8))
        assert a == b
