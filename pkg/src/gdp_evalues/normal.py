"""Standard-normal primitives and the Mills-ratio root solver.

All functions accept scalars or numpy arrays and return the same shape
(a Python float for scalar input).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
H_AT_ZERO = math.sqrt(2.0 / math.pi)

# Below this point phi/Phi is evaluated through the continued fraction.
_TAIL_SWITCH = -8.0
_CF_DEPTH = 60
_BISECTION_CAP = 200

# Acklam's rational approximation to the normal quantile (relative error < 1.2e-9).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def normal_cdf(z):
    """Phi(z) via the complementary error function; saturates to 0/1."""
    z = np.asarray(z, dtype=float)
    return _out(0.5 * special.erfc(-z / SQRT2))


def normal_sf(z):
    """Upper tail 1 - Phi(z), accurate in relative terms for large z."""
    z = np.asarray(z, dtype=float)
    return _out(0.5 * special.erfc(z / SQRT2))


def normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return _out(INV_SQRT_2PI * np.exp(-0.5 * z * z))


def _cf_upper_mills_inverse(x):
    """1/R(x) for x >= 8, where R(x) = (1 - Phi(x))/phi(x).

    Backward evaluation of R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
    """
    t = np.array(x, dtype=float, copy=True)
    for k in range(_CF_DEPTH, 0, -1):
        t = x + k / t
    return t


def mills_ratio_h(z):
    """h(z) = phi(z)/Phi(z), strictly decreasing, with a tail-safe branch for z < -8."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    tail = z < _TAIL_SWITCH
    body = ~tail
    if np.any(body):
        zb = z[body]
        out[body] = normal_pdf(zb) / np.asarray(normal_cdf(zb))
    if np.any(tail):
        out[tail] = _cf_upper_mills_inverse(-z[tail])
    return _out(out)


def log_normal_cdf(z):
    """log Phi(z) without underflow in the lower tail."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    tail = z < _TAIL_SWITCH
    body = ~tail
    if np.any(body):
        zb = z[body]
        upper = zb > 0
        # log1p of the upper tail keeps precision near Phi = 1
        vals = np.empty_like(zb)
        vals[upper] = np.log1p(-np.asarray(normal_sf(zb[upper])))
        vals[~upper] = np.log(np.asarray(normal_cdf(zb[~upper])))
        out[body] = vals
    if np.any(tail):
        zt = z[tail]
        out[tail] = -0.5 * zt * zt - LOG_SQRT_2PI - np.log(_cf_upper_mills_inverse(-zt))
    return _out(out)


def _acklam(p):
    p = np.asarray(p, dtype=float)
    z = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)
    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        z[mid] = num / den
    for mask, sign, tail_p in ((lo, 1.0, p[lo]), (hi, -1.0, 1.0 - p[hi])):
        if np.any(mask):
            q = np.sqrt(-2.0 * np.log(tail_p))
            num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
            den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
            z[mask] = sign * num / den
    return z


def _quantile_scalar(p: float) -> float:
    # same algorithm as the array path, without the masking overhead
    if p < _P_LOW or p > 1.0 - _P_LOW:
        sign, tail_p = (1.0, p) if p < _P_LOW else (-1.0, 1.0 - p)
        q = math.sqrt(-2.0 * math.log(tail_p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        z = sign * num / den
    else:
        q = p - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        z = num / den
    for _ in range(2):
        dens = INV_SQRT_2PI * math.exp(-0.5 * z * z)
        if p > 0.5:
            resid = (1.0 - p) - 0.5 * math.erfc(z / SQRT2)
        else:
            resid = 0.5 * math.erfc(-z / SQRT2) - p
        if dens > 0.0:
            z -= resid / dens
    return z


def normal_quantile(p):
    """Phi^{-1}(p) for p in (0, 1).

    Rational starting point followed by two Newton steps. The residual is taken
    on whichever tail is smaller so the correction keeps relative accuracy.
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("normal_quantile requires p in (0, 1)")
    if p.size == 1:
        return _out(np.full(p.shape, _quantile_scalar(float(p.reshape(-1)[0]))))
    z = _acklam(p)
    upper = p > 0.5
    q_upper = 1.0 - p  # exact for p > 0.5
    for _ in range(2):
        dens = INV_SQRT_2PI * np.exp(-0.5 * z * z)
        resid = np.where(upper,
                         q_upper - 0.5 * special.erfc(z / SQRT2),
                         0.5 * special.erfc(-z / SQRT2) - p)
        step = np.divide(resid, dens, out=np.zeros_like(z), where=dens > 0)
        z = z - step
    return _out(z)


def gdp_tradeoff(alpha, mu):
    """G_mu(alpha) = Phi(Phi^{-1}(1 - alpha) - mu)."""
    alpha = np.asarray(alpha, dtype=float)
    if not (np.all(alpha >= 0.0) and np.all(alpha <= 1.0)):
        raise DomainError("alpha must lie in [0, 1]")
    if not (mu >= 0.0 and math.isfinite(mu)):
        raise DomainError("mu must be a finite nonnegative number")
    out = np.empty_like(alpha)
    zero = alpha == 0.0
    one = alpha == 1.0
    inner = ~(zero | one)
    out[zero] = 1.0
    out[one] = 0.0
    if np.any(inner):
        # Phi^{-1}(1 - a) = -Phi^{-1}(a) avoids cancellation for small a
        out[inner] = normal_cdf(-np.asarray(normal_quantile(alpha[inner])) - mu)
    return _out(out)


def solve_z_star(sigma: float) -> float:
    """Unique root of phi(z)/Phi(z) = sigma.

    Geometric bracket expansion from zero, then bisection down to adjacent
    doubles (capped at 200 halvings).
    """
    sigma = float(sigma)
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise DomainError("sigma must be a finite positive number")

    def f(z: float) -> float:
        return mills_ratio_h(z) - sigma

    if f(0.0) == 0.0:
        return 0.0
    if f(0.0) > 0.0:
        lo, hi = 0.0, 1.0
        while f(hi) > 0.0:
            lo, hi = hi, 2.0 * hi
    else:
        lo, hi = -1.0, 0.0
        while f(lo) < 0.0:
            lo, hi = 2.0 * lo, lo
    for _ in range(_BISECTION_CAP):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi
