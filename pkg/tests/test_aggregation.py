import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gdp_evalues.aggregation import compose, independent_product, product_mu, weighted_average
from gdp_evalues.errors import BudgetMismatchError, DomainError, ProvenanceError
from gdp_evalues.mechanism import PrivateEValue, draw_log_noise, noise_spec, privatize
from gdp_evalues.normal import gdp_tradeoff, normal_quantile
from gdp_evalues.rng import RngSeed

mus = st.lists(st.floats(1e-3, 100.0), min_size=1, max_size=20)


def test_compose_pythagorean_exact():
    assert compose([0.3, 0.4]) == 0.5


def test_compose_single_entry():
    assert compose([0.7]) == 0.7


@pytest.mark.parametrize("k", [2, 4, 9, 100])
def test_compose_equal_budgets(k):
    assert compose([0.25] * k) == pytest.approx(math.sqrt(k) * 0.25, rel=1e-15)


@given(mus)
def test_compose_dominates_max(ms):
    assert compose(ms) >= max(ms) * (1 - 1e-15)


def test_compose_rejects_empty_and_bad():
    with pytest.raises(DomainError):
        compose([])
    with pytest.raises(DomainError):
        compose([0.5, 0.0])


def _canonical(value, mu=1.0, delta=0.1):
    return PrivateEValue(value=value, mu=mu, delta=delta)


class TestWeightedAverage:
    def test_identity(self):
        out = weighted_average([_canonical(3.0, mu=0.4)], [1.0])
        assert out.value == 3.0 and out.mu == 0.4

    def test_two_components(self):
        out = weighted_average([_canonical(2.0), _canonical(0.0)], [0.5, 0.5])
        assert out.value == 1.0
        assert out.mu == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert out.mechanism == "weighted_average"

    def test_weight_sum_checked(self):
        with pytest.raises(DomainError):
            weighted_average([_canonical(1.0), _canonical(1.0)], [0.5, 0.6])
        with pytest.raises(DomainError):
            weighted_average([_canonical(1.0), _canonical(1.0)], [1.5, -0.5])
        with pytest.raises(DomainError):
            weighted_average([_canonical(1.0)], [0.5, 0.5])

    def test_mixed_budget_rejected(self):
        with pytest.raises(BudgetMismatchError):
            weighted_average([_canonical(1.0, mu=1.0), _canonical(1.0, mu=0.5)], [0.5, 0.5])

    def test_null_validity(self):
        # K = 3 dependent null e-values built from one shared Gaussian
        n, k = 5000, 3
        z = normal_quantile(RngSeed(12).uniforms(n))
        means = []
        for t in range(n):
            es = [privatize(math.exp(z[t] - 0.5), 0.2, 1.0, RngSeed(13, (t, j)))
                  for j in range(k)]
            means.append(weighted_average(es, [1 / k] * k).value)
        v = np.array(means)
        assert v.mean() <= 1 + 3 * v.std(ddof=1) / math.sqrt(v.size)


class TestProduct:
    def test_pythagorean(self):
        assert product_mu([3.0, 4.0], 1.0) == 0.8

    @pytest.mark.parametrize("k", [1, 2, 5, 16])
    def test_equal_deltas(self, k):
        assert product_mu([0.1] * k, 1.0) == pytest.approx(1 / math.sqrt(k), rel=1e-14)

    @given(st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=10), st.floats(1e-2, 10.0))
    def test_never_exceeds_mu(self, deltas, mu):
        assert product_mu(deltas, mu) <= mu * (1 + 1e-15)

    def test_value_and_provenance(self):
        a = privatize(2.0, 3.0, 1.0, RngSeed(1))
        b = privatize(5.0, 4.0, 1.0, RngSeed(2))
        out = independent_product([a, b])
        assert out.value == pytest.approx(a.value * b.value, rel=1e-15)
        assert out.mu == 0.8
        assert out.independent_sources
        assert out.delta == 4.0

    def test_requires_canonical(self):
        nm = PrivateEValue(value=1.0, mu=1.0, delta=0.1, mechanism="noisy_max")
        with pytest.raises(ProvenanceError):
            independent_product([_canonical(1.0), nm])

    def test_stated_parameters_must_match(self):
        es = [_canonical(1.0, delta=0.1), _canonical(2.0, delta=0.2)]
        with pytest.raises(BudgetMismatchError):
            independent_product(es, deltas=[0.1, 0.3])
        with pytest.raises(BudgetMismatchError):
            independent_product(es, mu=0.5)
        with pytest.raises(BudgetMismatchError):
            independent_product([_canonical(1.0, mu=1.0), _canonical(1.0, mu=2.0)])

    def test_empty(self):
        with pytest.raises(DomainError):
            independent_product([])

    def test_null_validity(self):
        n = 200_000
        root = RngSeed(40)
        prod = np.ones(n)
        for k, delta in enumerate((0.3, 0.6)):
            z = normal_quantile(root.child(k, 0).uniforms(n))
            xi = draw_log_noise(noise_spec(delta, 1.0), root.child(k, 1), size=n)
            prod *= np.exp(z - 0.5 - xi)
        se = prod.std(ddof=1) / math.sqrt(n)
        assert prod.mean() <= 1 + 3 * se

    def test_sharpness_witness(self):
        # two equal-delta releases; neighbor shifts one coordinate by delta
        delta, mu, n = 0.5, 1.0, 200_000
        mu_prod = product_mu([delta, delta], mu)
        spec = noise_spec(delta, mu)
        root = RngSeed(41)
        xi_d = sum(draw_log_noise(spec, root.child(0, j), size=n) for j in range(2))
        xi_n = sum(draw_log_noise(spec, root.child(1, j), size=n) for j in range(2))
        out_d, out_n = -xi_d, delta - xi_n
        sd = math.sqrt(2 * spec.sigma2)
        for alpha in (0.1, 0.5):
            t = -2 * spec.tau + sd * normal_quantile(1 - alpha)
            type2 = np.mean(out_n < t)
            g = gdp_tradeoff(alpha, mu_prod)
            assert abs(type2 - g) <= 3 * math.sqrt(g * (1 - g) / n)
        type2 = np.mean(out_n < -2 * spec.tau)
        g_loose = gdp_tradeoff(0.5, 0.8 * mu_prod)
        assert type2 < g_loose - 3 * math.sqrt(g_loose * (1 - g_loose) / n)
