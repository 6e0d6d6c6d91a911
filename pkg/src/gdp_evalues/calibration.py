"""Noise-calibrated rejection threshold for a single canonical private e-value.

With sigma = delta/mu and z* the root of phi(z)/Phi(z) = sigma, the sharp
threshold is

    log c* = log(Phi(z*)/alpha) - sigma^2/2 - sigma z*      if alpha <= Phi(z*)
    log c* = -sigma^2/2 - sigma Phi^{-1}(alpha)             otherwise

All threshold arithmetic happens on the log scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .errors import BudgetMismatchError, DomainError
from .mechanism import PrivateEValue, check_delta, check_mu
from .normal import (
    SQRT2,
    log_normal_cdf,
    normal_cdf,
    normal_quantile,
    solve_z_star,
)


_LOG_MAX = math.log(np.finfo(float).max)


class Branch(str, Enum):
    MARKOV_LIKE = "markov_like"
    QUANTILE_LIKE = "quantile_like"


@dataclass(frozen=True)
class CalibrationResult:
    alpha: float
    delta: float
    mu: float
    sigma: float
    z_star: float
    log_c_star: float
    branch: Branch

    @property
    def c_star(self) -> float:
        return math.exp(self.log_c_star)

    @property
    def phi_z_star(self) -> float:
        return normal_cdf(self.z_star)


@dataclass(frozen=True)
class PowerProfile:
    """``x_opt`` saturates to inf for very noisy releases; ``log_x_opt`` stays finite."""

    x_opt: float
    g_max: float
    shift_neg_prob: float
    log_x_opt: float


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def calibrate(alpha: float, delta: float, mu: float) -> CalibrationResult:
    alpha = _check_alpha(alpha)
    delta = check_delta(delta, positive=True)
    mu = check_mu(mu)
    sigma = delta / mu
    z = solve_z_star(sigma)
    half_var = 0.5 * sigma * sigma
    # ties go to the first branch
    if alpha <= normal_cdf(z):
        log_c = log_normal_cdf(z) - math.log(alpha) - half_var - sigma * z
        branch = Branch.MARKOV_LIKE
    else:
        log_c = -half_var - sigma * normal_quantile(alpha)
        branch = Branch.QUANTILE_LIKE
    return CalibrationResult(alpha, delta, mu, sigma, z, log_c, branch)


def worst_case_null(cal: CalibrationResult) -> tuple[float, float]:
    """Support point x and its mass for the null e-value that makes c* exact.

    Markov-like branch: mass 1/x at x = Phi(z*)/alpha (rest at zero).
    Quantile-like branch: the constant e-value 1.
    """
    if cal.branch is Branch.MARKOV_LIKE:
        x = cal.phi_z_star / cal.alpha
        return x, 1.0 / x
    return 1.0, 1.0


def _value_of(e_dp) -> float:
    return e_dp.value if isinstance(e_dp, PrivateEValue) else float(e_dp)


def markov_reject(e_dp, alpha: float) -> bool:
    return _value_of(e_dp) >= 1.0 / _check_alpha(alpha)


def calibrated_reject(e_dp, cal: CalibrationResult) -> bool:
    if isinstance(e_dp, PrivateEValue):
        same = (e_dp.delta is not None
                and math.isclose(e_dp.delta, cal.delta, rel_tol=1e-12)
                and math.isclose(e_dp.mu, cal.mu, rel_tol=1e-12))
        if not same:
            raise BudgetMismatchError(
                f"e-value released at (delta={e_dp.delta}, mu={e_dp.mu}) but threshold "
                f"calibrated for (delta={cal.delta}, mu={cal.mu})")
    value = _value_of(e_dp)
    if value <= 0.0:
        return False
    return math.log(value) >= cal.log_c_star


def power_improvement_g(x, cal: CalibrationResult):
    """P(c* <= x e^{-xi} < 1/alpha) for a fixed non-private value x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0.0)):
        raise DomainError("x must be positive")
    s = cal.sigma
    lx = np.log(x) - 0.5 * s * s
    upper = normal_cdf((lx - cal.log_c_star) / s)
    lower = normal_cdf((lx + math.log(cal.alpha)) / s)
    out = np.asarray(upper - lower)
    return float(out) if out.ndim == 0 else out


def power_profile(cal: CalibrationResult) -> PowerProfile:
    s = cal.sigma
    log_inv_alpha = -math.log(cal.alpha)
    log_x_opt = 0.5 * s * s + 0.5 * (log_inv_alpha + cal.log_c_star)
    x_opt = math.exp(log_x_opt) if log_x_opt < _LOG_MAX else math.inf
    # 2 Phi(a) - 1 == erf(a / sqrt 2)
    g_max = float(special.erf((log_inv_alpha - cal.log_c_star) / (2.0 * s) / SQRT2))
    shift_neg = normal_cdf(cal.z_star - log_normal_cdf(cal.z_star) / s)
    return PowerProfile(x_opt=x_opt, g_max=g_max, shift_neg_prob=shift_neg, log_x_opt=log_x_opt)


def _rate_args(delta, mu, alpha, f_at):
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise DomainError("asymptotic rates need delta in (0, 1)")
    return delta, check_mu(mu), _check_alpha(alpha), float(f_at)


def calibration_benefit_rate(delta: float, mu: float, alpha: float, f_at: float) -> float:
    """Leading-order calibration benefit (also the noise-induced discovery rate).

    ``f_at`` is the alternative density of E evaluated at 1/alpha.
    """
    delta, mu, alpha, f_at = _rate_args(delta, mu, alpha, f_at)
    return f_at / (alpha * mu) * delta * math.sqrt(-2.0 * math.log(delta))


def noise_cost_rate(delta: float, mu: float, alpha: float, f_at: float) -> float:
    """Leading-order probability of losing a non-private rejection to the noise."""
    delta, mu, alpha, f_at = _rate_args(delta, mu, alpha, f_at)
    return f_at / (2.0 * math.e * alpha * mu * mu) * delta * delta / (-math.log(delta))
