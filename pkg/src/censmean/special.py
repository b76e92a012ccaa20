"""Special-function kernel used by the analytic conditional-mean formulas.

The incomplete gamma and beta functions are implemented here directly
(power series plus continued fractions) so their behaviour is pinned and
auditable; the error function and log-gamma ride on machine-precision
implementations from the standard library and scipy.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

_EPS = 2.220446049250313e-16
_FPMIN = 1e-300
_MAX_ITER = 600


def log_gamma(a: float) -> float:
    """Natural log of the gamma function for a > 0."""
    if not a > 0 or math.isnan(a):
        raise DomainError(f"log_gamma requires a > 0, got {a}")
    return math.lgamma(a)


def upper_incomplete_gamma_regularized(a: float, t: float) -> float:
    """Regularized upper incomplete gamma Q(a, t) = Gamma(a, t) / Gamma(a).

    Equals the survival function at t of a Gamma(a, 1) random variable.
    Power series for t < a + 1, Lentz continued fraction otherwise; the
    switchover keeps both expansions in their fast-converging regime.
    """
    if not a > 0 or math.isnan(a):
        raise DomainError(f"incomplete gamma requires a > 0, got a={a}")
    if t < 0 or math.isnan(t):
        raise DomainError(f"incomplete gamma requires t >= 0, got t={t}")
    if t == 0.0:
        return 1.0
    if math.isinf(t):
        return 0.0
    if t < a + 1.0:
        return 1.0 - _gamma_p_series(a, t)
    return _gamma_q_contfrac(a, t)


def _gamma_p_series(a: float, t: float) -> float:
    # P(a,t) = t^a e^-t / Gamma(a+1) * sum_n t^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= t / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    log_prefactor = a * math.log(t) - t - math.lgamma(a)
    return total * math.exp(log_prefactor)


def _gamma_q_contfrac(a: float, t: float) -> float:
    # Q(a,t) = t^a e^-t / Gamma(a) * 1/(t+1-a- 1*(1-a)/(t+3-a- ...))
    b = t + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(a * math.log(t) - t - math.lgamma(a))


def normal_cdf(x):
    """Standard normal CDF; accepts a scalar or ndarray."""
    if np.any(np.isnan(x)):
        raise DomainError("normal_cdf received NaN")
    out = ndtr(x)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def regularized_incomplete_beta(t: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_t(a, b), the Beta(a, b) CDF at t.

    Continued-fraction evaluation (Lentz), applied to whichever of
    I_t(a,b) and 1 - I_{1-t}(b,a) converges fast.
    """
    if not (a > 0 and b > 0) or math.isnan(a) or math.isnan(b):
        raise DomainError(f"incomplete beta requires a, b > 0, got a={a}, b={b}")
    if math.isnan(t) or t < 0.0 or t > 1.0:
        raise DomainError(f"incomplete beta requires t in [0, 1], got t={t}")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(t)
        + b * math.log1p(-t)
    )
    front = math.exp(log_front)
    if t < (a + 1.0) / (a + b + 2.0):
        return front * _beta_contfrac(t, a, b) / a
    return 1.0 - front * _beta_contfrac(1.0 - t, b, a) / b


def _beta_contfrac(t: float, a: float, b: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * t / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * t / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def log_sum_exp(terms: Sequence[float]) -> float:
    """log(sum(exp(m_k))) computed as M + log(sum(exp(m_k - M))), M = max m_k."""
    arr = np.asarray(terms, dtype=float)
    if arr.size == 0:
        raise DomainError("log_sum_exp of an empty sequence")
    m = np.max(arr)
    if np.isneginf(m):
        return float("-inf")
    if np.isnan(m):
        raise DomainError("log_sum_exp received NaN")
    return float(m + np.log(np.sum(np.exp(arr - m))))
