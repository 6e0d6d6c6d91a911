import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gdp_evalues.audit import (
    AuditConfig,
    Noise,
    gumbel_error_closed_form,
    max_stability_ks,
    pure_dp_tradeoff,
    selection_error_mc,
    swap_test_errors,
    violation_report,
)
from gdp_evalues.errors import DomainError
from gdp_evalues.normal import gdp_tradeoff
from gdp_evalues.selection import selection_epsilon


class TestClosedForm:
    def test_unit_ratio(self):
        assert gumbel_error_closed_form(1.0, 1.0) == pytest.approx(0.26894142136999512,
                                                                   rel=1e-15)

    def test_limits(self):
        assert gumbel_error_closed_form(1e4, 1.0) == 0.0
        assert gumbel_error_closed_form(math.inf, 1.0) == 0.0
        assert gumbel_error_closed_form(1e-12, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_audit_default(self):
        cfg = AuditConfig(noise="gumbel")
        assert cfg.gumbel_scale == pytest.approx(2 / 0.40007768940170462, rel=1e-13)
        assert gumbel_error_closed_form(0.49, cfg.gumbel_scale) == pytest.approx(
            0.47551484228646214, rel=1e-13)

    @pytest.mark.parametrize("gap,scale", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, math.inf)])
    def test_domain(self, gap, scale):
        with pytest.raises(DomainError):
            gumbel_error_closed_form(gap, scale)


class TestPureDp:
    def test_values(self):
        assert pure_dp_tradeoff(0.0, 1.0) == 1.0
        assert pure_dp_tradeoff(1.0, 1.0) == 0.0
        assert pure_dp_tradeoff(0.1, 0.0) == pytest.approx(0.9)
        e = math.e
        assert pure_dp_tradeoff(0.1, 1.0) == pytest.approx(max(1 - e * 0.1, (1 - 0.1) / e))

    @pytest.mark.parametrize("mu", [0.25, 0.5, 1.0, 2.0])
    def test_envelope_dominates_gdp(self, mu):
        alpha = np.linspace(0.0, 1.0, 100)
        eps = selection_epsilon(mu)
        assert np.all(pure_dp_tradeoff(alpha, eps) >= gdp_tradeoff(alpha, mu / math.sqrt(2))
                      - 1e-12)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 5.0))
    def test_range(self, a, eps):
        assert 0.0 <= pure_dp_tradeoff(a, eps) <= 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            pure_dp_tradeoff(1.5, 1.0)
        with pytest.raises(DomainError):
            pure_dp_tradeoff(0.5, -1.0)


class TestConfig:
    def test_defaults(self):
        cfg = AuditConfig()
        assert cfg.gamma == 0.49 and cfg.n_grid == (100, 1_000, 10_000, 100_000)
        assert cfg.gaussian_std == pytest.approx(4.0, rel=1e-15)
        assert cfg.mu_claimed == pytest.approx(0.5, rel=1e-15)
        assert cfg.noise is Noise.GAUSSIAN

    @pytest.mark.parametrize("kwargs", [dict(gamma=-1.0), dict(n_grid=()), dict(n_grid=(0,)),
                                        dict(mu=0.0), dict(trials=0), dict(noise="laplace"),
                                        dict(delta=0.0), dict(claimed_mu=-1.0)])
    def test_validation(self, kwargs):
        with pytest.raises((DomainError, ValueError)):
            AuditConfig(**kwargs)


class TestMonteCarlo:
    def test_gaussian_symmetric_at_zero_gap(self):
        cfg = AuditConfig(gamma=0.0, trials=4000)
        p, se = selection_error_mc(cfg, 20, 1)
        assert abs(p - 0.5) <= 3 * se

    def test_binomial_se(self):
        cfg = AuditConfig(trials=1000)
        p, se = selection_error_mc(cfg, 10, 2)
        assert se == pytest.approx(math.sqrt(p * (1 - p) / 1000))

    def test_gumbel_matches_closed_form_and_is_size_free(self):
        cfg = AuditConfig(noise="gumbel", trials=4000)
        want = gumbel_error_closed_form(cfg.gamma, cfg.gumbel_scale)
        ests = [selection_error_mc(cfg, n, 3) for n in (1, 10, 1000)]
        for p, se in ests:
            assert abs(p - want) <= 3 * se
        for (p1, s1), (p2, s2) in zip(ests, ests[1:]):
            assert abs(p1 - p2) <= 3 * math.hypot(s1, s2)

    def test_swap_test_symmetry(self):
        cfg = AuditConfig(trials=4000)
        t1, s1, t2, s2 = swap_test_errors(cfg, 50, 4)
        assert abs(t1 - t2) <= 3 * math.hypot(s1, s2)

    def test_report_rows(self):
        cfg = AuditConfig(n_grid=(5, 50), trials=500)
        rows = violation_report(cfg, 5)
        assert [r.n for r in rows] == [5, 50]
        for r in rows:
            assert r.g_mu_at_p == pytest.approx(gdp_tradeoff(r.p_error, cfg.mu_claimed))
            assert r.violation == (r.p_error + 3 * r.se < r.g_mu_at_p)

    def test_rows_do_not_depend_on_grid(self):
        a = violation_report(AuditConfig(n_grid=(5, 50), trials=300), 6)
        b = violation_report(AuditConfig(n_grid=(50,), trials=300), 6)
        assert a[1] == b[0]

    def test_zero_claimed_budget_flags_everything_below_half(self):
        cfg = AuditConfig(n_grid=(50,), trials=2000, claimed_mu=0.0)
        row = violation_report(cfg, 7)[0]
        assert row.g_mu_at_p == pytest.approx(1 - row.p_error)
        assert row.violation

    def test_gumbel_no_violation(self):
        rows = violation_report(AuditConfig(noise="gumbel", n_grid=(10, 1000), trials=2000), 8)
        assert not any(r.violation for r in rows)

    @pytest.mark.parametrize("n", [1_000, 100_000])
    def test_max_stability(self, n):
        assert max_stability_ks(2.0, n, 300, 9) > 0.01

    def test_bad_size(self):
        with pytest.raises(DomainError):
            selection_error_mc(AuditConfig(trials=10), 0, 0)
