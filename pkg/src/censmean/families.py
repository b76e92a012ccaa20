"""Parametric survival families with covariate-resolved, subject-specific parameters.

Positive-support families are parameterized the way an accelerated
failure-time fit reports them: a shared shape and a linear predictor
``eta_i`` on the log-time scale, so that

* exponential           rate      lam_i = exp(-eta_i)
* Weibull               scale     lam_i = exp(-eta_i * alpha)      (S = exp(-lam x^alpha))
* log-normal            location  mu_i  = eta_i
* log-logistic          scale     lam_i = exp(eta_i)               (S = 1 / (1 + (x/lam)^alpha))

The piecewise exponential instead uses a proportional-hazards log link,
``lam_ij = exp(baseline_log_rates[j] + coefficients . (1, z))``, with the
intercept conventionally zero because the baseline rates absorb it.
Gaussian and logistic use the identity link for their location.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import expit, log_ndtr, ndtri

from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class Family(str, Enum):
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    LOGNORMAL = "lognormal"
    LOGLOGISTIC = "loglogistic"
    PIECEWISE_EXPONENTIAL = "piecewise_exponential"
    GAUSSIAN = "gaussian"
    LOGISTIC = "logistic"


#: Families whose support is the nonnegative half-line.
POSITIVE_FAMILIES = frozenset(
    {
        Family.EXPONENTIAL,
        Family.WEIBULL,
        Family.LOGNORMAL,
        Family.LOGLOGISTIC,
        Family.PIECEWISE_EXPONENTIAL,
    }
)

#: Families with a shared shape/scale parameter besides the coefficients.
SHAPED_FAMILIES = frozenset(
    {
        Family.WEIBULL,
        Family.LOGNORMAL,
        Family.LOGLOGISTIC,
        Family.GAUSSIAN,
        Family.LOGISTIC,
    }
)


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _maybe_scalar(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


@dataclass(frozen=True)
class FamilySpec:
    """A fitted or hypothesized family: shape, coefficients, and (for the
    piecewise exponential) cutpoints plus baseline log rates.

    ``coefficients`` is the intercept followed by one slope per covariate.
    """

    family: Family
    coefficients: tuple[float, ...]
    shape: Optional[float] = None
    cutpoints: tuple[float, ...] = field(default=())
    baseline_log_rates: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "cutpoints", tuple(float(c) for c in self.cutpoints))
        object.__setattr__(
            self, "baseline_log_rates", tuple(float(r) for r in self.baseline_log_rates)
        )
        if len(self.coefficients) < 1:
            raise DomainError("coefficients must contain at least an intercept")
        if self.family in SHAPED_FAMILIES:
            if self.shape is None or not self.shape > 0:
                raise DomainError(f"{self.family.value} requires shape > 0, got {self.shape}")
        elif self.shape is not None:
            raise DomainError(f"{self.family.value} does not take a shape parameter")
        if self.family is Family.PIECEWISE_EXPONENTIAL:
            cuts = self.cutpoints
            if any(not math.isfinite(c) for c in cuts):
                raise DomainError("cutpoints must be finite")
            if len(cuts) > 0 and cuts[0] <= 0:
                raise DomainError("first cutpoint must be > 0 (interval 1 starts at 0)")
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise DomainError("cutpoints must be strictly increasing")
            if len(self.baseline_log_rates) != len(cuts) + 1:
                raise DomainError(
                    "need one baseline log rate per interval: "
                    f"{len(cuts) + 1} intervals, {len(self.baseline_log_rates)} rates"
                )
        elif self.cutpoints or self.baseline_log_rates:
            raise DomainError("cutpoints/baseline_log_rates only apply to piecewise_exponential")

    @property
    def n_covariates(self) -> int:
        return len(self.coefficients) - 1

    def to_json(self) -> str:
        doc = {
            "family": self.family.value,
            "shape": self.shape,
            "coefficients": list(self.coefficients),
            "cutpoints": list(self.cutpoints),
            "baseline_log_rates": list(self.baseline_log_rates),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, doc: str) -> "FamilySpec":
        d = json.loads(doc)
        return cls(
            family=Family(d["family"]),
            coefficients=tuple(d["coefficients"]),
            shape=d.get("shape"),
            cutpoints=tuple(d.get("cutpoints") or ()),
            baseline_log_rates=tuple(d.get("baseline_log_rates") or ()),
        )

    def proportional_hazards_form(self) -> tuple[float, tuple[float, ...]]:
        """For exponential/Weibull, the equivalent PH parameters
        (baseline rate, covariate log-rate coefficients) so that
        lam_i = lam0 * exp(gamma . z)."""
        if self.family is Family.EXPONENTIAL:
            alpha = 1.0
        elif self.family is Family.WEIBULL:
            alpha = float(self.shape)
        else:
            raise DomainError(f"no PH form for family {self.family.value}")
        lam0 = math.exp(-alpha * self.coefficients[0])
        gamma = tuple(-alpha * c for c in self.coefficients[1:])
        return lam0, gamma


class SubjectParams:
    """Resolved per-subject distribution. Subclasses define
    ``log_survival``, ``log_density``, ``mean`` and ``ppf``; everything else
    derives from those, so density == hazard * survival holds by construction.
    """

    family: Family
    support_lower: float = 0.0

    def log_survival(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def log_density(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def ppf(self, u: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def survival(self, x: ArrayLike) -> ArrayLike:
        arr, scalar = _as_array(self.log_survival(x))
        return _maybe_scalar(np.exp(arr), scalar)

    def cum_hazard(self, x: ArrayLike) -> ArrayLike:
        arr, scalar = _as_array(self.log_survival(x))
        return _maybe_scalar(-arr, scalar)

    def density(self, x: ArrayLike) -> ArrayLike:
        arr, scalar = _as_array(self.log_density(x))
        return _maybe_scalar(np.exp(arr), scalar)

    def hazard(self, x: ArrayLike) -> ArrayLike:
        ld, scalar = _as_array(self.log_density(x))
        ls, _ = _as_array(self.log_survival(x))
        return _maybe_scalar(np.exp(ld - ls), scalar)

    def sample(self, rng: np.random.Generator, size=None) -> ArrayLike:
        return self.ppf(rng.random(size))

    def _check_support(self, x: ArrayLike) -> None:
        if self.support_lower == 0.0 and np.any(np.asarray(x) < 0):
            raise DomainError(f"{self.family.value} is supported on x >= 0")


@dataclass(frozen=True)
class ExponentialParams(SubjectParams):
    lam: float
    family = Family.EXPONENTIAL

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"exponential rate must be > 0, got {self.lam}")

    def log_survival(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        return _maybe_scalar(-self.lam * arr, scalar)

    def log_density(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        return _maybe_scalar(math.log(self.lam) - self.lam * arr, scalar)

    def mean(self):
        return 1.0 / self.lam

    def ppf(self, u):
        arr, scalar = _as_array(u)
        return _maybe_scalar(-np.log1p(-arr) / self.lam, scalar)


@dataclass(frozen=True)
class WeibullParams(SubjectParams):
    alpha: float
    lam: float
    family = Family.WEIBULL

    def __post_init__(self):
        if not (self.alpha > 0 and self.lam > 0):
            raise DomainError(f"weibull needs alpha, lam > 0, got ({self.alpha}, {self.lam})")

    def log_survival(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        return _maybe_scalar(-self.lam * arr**self.alpha, scalar)

    def log_density(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        with np.errstate(divide="ignore"):
            power = 0.0 if self.alpha == 1.0 else (self.alpha - 1.0) * np.log(arr)
        out = math.log(self.alpha * self.lam) + power - self.lam * arr**self.alpha
        return _maybe_scalar(out, scalar)

    def mean(self):
        return math.exp(math.lgamma(1.0 + 1.0 / self.alpha) - math.log(self.lam) / self.alpha)

    def ppf(self, u):
        arr, scalar = _as_array(u)
        return _maybe_scalar((-np.log1p(-arr) / self.lam) ** (1.0 / self.alpha), scalar)


@dataclass(frozen=True)
class LogNormalParams(SubjectParams):
    mu: float
    sigma: float
    family = Family.LOGNORMAL

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"lognormal scale must be > 0, got {self.sigma}")

    def _u(self, x):
        with np.errstate(divide="ignore"):
            return (np.log(x) - self.mu) / self.sigma

    def log_survival(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        return _maybe_scalar(log_ndtr(-self._u(arr)), scalar)

    def log_density(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        u = self._u(arr)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -0.5 * u * u - _LOG_SQRT_2PI - math.log(self.sigma) - np.log(arr)
        out = np.where(arr == 0.0, -np.inf, out)
        return _maybe_scalar(out, scalar)

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def ppf(self, u):
        arr, scalar = _as_array(u)
        return _maybe_scalar(np.exp(self.mu + self.sigma * ndtri(arr)), scalar)


@dataclass(frozen=True)
class LogLogisticParams(SubjectParams):
    alpha: float
    lam: float
    family = Family.LOGLOGISTIC

    def __post_init__(self):
        if not (self.alpha > 0 and self.lam > 0):
            raise DomainError(f"loglogistic needs alpha, lam > 0, got ({self.alpha}, {self.lam})")

    def log_survival(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        return _maybe_scalar(-np.log1p((arr / self.lam) ** self.alpha), scalar)

    def log_density(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        r = arr / self.lam
        with np.errstate(divide="ignore"):
            power = 0.0 if self.alpha == 1.0 else (self.alpha - 1.0) * np.log(r)
        out = math.log(self.alpha / self.lam) + power - 2.0 * np.log1p(r**self.alpha)
        return _maybe_scalar(out, scalar)

    def mean(self):
        # Finite only for alpha > 1; the +inf sentinel signals "no mean".
        if self.alpha <= 1.0:
            return math.inf
        return self.lam * math.pi / (self.alpha * math.sin(math.pi / self.alpha))

    def ppf(self, u):
        arr, scalar = _as_array(u)
        with np.errstate(divide="ignore"):
            out = self.lam * (arr / (1.0 - arr)) ** (1.0 / self.alpha)
        return _maybe_scalar(out, scalar)


@dataclass(frozen=True)
class PiecewiseExponentialParams(SubjectParams):
    rates: tuple[float, ...]
    cutpoints: tuple[float, ...]
    family = Family.PIECEWISE_EXPONENTIAL

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        object.__setattr__(self, "cutpoints", tuple(float(c) for c in self.cutpoints))
        if len(self.rates) != len(self.cutpoints) + 1:
            raise DomainError("need one rate per interval")
        if any(not r > 0 for r in self.rates):
            raise DomainError("piecewise rates must all be > 0")
        if any(b <= a for a, b in zip((0.0,) + self.cutpoints, self.cutpoints)):
            raise DomainError("cutpoints must be strictly increasing and > 0")

    def _bounds(self) -> np.ndarray:
        return np.concatenate(([0.0], self.cutpoints, [np.inf]))

    def time_at_risk(self, x: ArrayLike) -> np.ndarray:
        """Per-interval exposure R_j(x); rows follow x, columns the intervals."""
        arr = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        bounds = self._bounds()
        lower = bounds[:-1]
        width = bounds[1:] - bounds[:-1]
        return np.clip(arr[:, None] - lower[None, :], 0.0, width[None, :])

    def interval_index(self, x: ArrayLike) -> ArrayLike:
        """0-based interval containing x; intervals are [tau_{j-1}, tau_j),
        so a point exactly at a cutpoint belongs to the next interval."""
        arr, scalar = _as_array(x)
        idx = np.searchsorted(np.asarray(self.cutpoints), arr, side="right")
        return int(idx) if scalar else idx

    def log_survival(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        out = -self.time_at_risk(arr) @ np.asarray(self.rates)
        return _maybe_scalar(out[0] if scalar else out.reshape(arr.shape), scalar)

    def log_density(self, x):
        self._check_support(x)
        arr, scalar = _as_array(x)
        flat = np.atleast_1d(arr).ravel()
        rates = np.asarray(self.rates)
        log_haz = np.log(rates[self.interval_index(flat)])
        out = log_haz - self.time_at_risk(flat) @ rates
        return _maybe_scalar(out[0] if scalar else out.reshape(arr.shape), scalar)

    def mean(self):
        bounds = self._bounds()
        s_at = np.exp(self.log_survival(bounds[:-1]))
        s_next = np.concatenate((s_at[1:], [0.0]))
        return float(np.sum((s_at - s_next) / np.asarray(self.rates)))

    def ppf(self, u):
        arr, scalar = _as_array(u)
        arr1 = np.atleast_1d(arr)
        target = -np.log1p(-arr1)
        bounds = self._bounds()
        rates = np.asarray(self.rates)
        widths = bounds[1:-1] - bounds[:-2] if len(self.cutpoints) else np.empty(0)
        cum_h = np.concatenate(([0.0], np.cumsum(rates[:-1] * widths)))
        j = np.clip(np.searchsorted(cum_h, target, side="right") - 1, 0, len(rates) - 1)
        out = bounds[j] + (target - cum_h[j]) / rates[j]
        return _maybe_scalar(out[0] if scalar else out.reshape(np.shape(arr)), scalar)


@dataclass(frozen=True)
class GaussianParams(SubjectParams):
    mu: float
    sigma: float
    family = Family.GAUSSIAN
    support_lower = -math.inf

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"gaussian scale must be > 0, got {self.sigma}")

    def log_survival(self, x):
        arr, scalar = _as_array(x)
        return _maybe_scalar(log_ndtr(-(arr - self.mu) / self.sigma), scalar)

    def log_cdf(self, x):
        arr, scalar = _as_array(x)
        return _maybe_scalar(log_ndtr((arr - self.mu) / self.sigma), scalar)

    def log_density(self, x):
        arr, scalar = _as_array(x)
        u = (arr - self.mu) / self.sigma
        return _maybe_scalar(-0.5 * u * u - _LOG_SQRT_2PI - math.log(self.sigma), scalar)

    def mean(self):
        return self.mu

    def ppf(self, u):
        arr, scalar = _as_array(u)
        return _maybe_scalar(self.mu + self.sigma * ndtri(arr), scalar)


@dataclass(frozen=True)
class LogisticParams(SubjectParams):
    mu: float
    sigma: float
    family = Family.LOGISTIC
    support_lower = -math.inf

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"logistic scale must be > 0, got {self.sigma}")

    def log_survival(self, x):
        arr, scalar = _as_array(x)
        u = (arr - self.mu) / self.sigma
        return _maybe_scalar(-np.logaddexp(0.0, u), scalar)

    def log_cdf(self, x):
        arr, scalar = _as_array(x)
        u = (arr - self.mu) / self.sigma
        return _maybe_scalar(-np.logaddexp(0.0, -u), scalar)

    def log_density(self, x):
        arr, scalar = _as_array(x)
        u = np.abs((arr - self.mu) / self.sigma)
        out = -u - 2.0 * np.log1p(np.exp(-u)) - math.log(self.sigma)
        return _maybe_scalar(out, scalar)

    def mean(self):
        return self.mu

    def ppf(self, u):
        arr, scalar = _as_array(u)
        with np.errstate(divide="ignore"):
            out = self.mu + self.sigma * (np.log(arr) - np.log1p(-arr))
        return _maybe_scalar(out, scalar)


def resolve(spec: FamilySpec, z: Sequence[float]) -> SubjectParams:
    """Resolve a spec and a covariate vector into subject-specific parameters."""
    z_arr = np.asarray(z, dtype=float).ravel()
    if z_arr.size != spec.n_covariates:
        raise DomainError(
            f"covariate vector has length {z_arr.size}, "
            f"spec expects {spec.n_covariates}"
        )
    coefs = np.asarray(spec.coefficients)
    eta = float(coefs[0] + z_arr @ coefs[1:])
    fam = spec.family
    if fam is Family.EXPONENTIAL:
        return ExponentialParams(lam=math.exp(-eta))
    if fam is Family.WEIBULL:
        return WeibullParams(alpha=spec.shape, lam=math.exp(-eta * spec.shape))
    if fam is Family.LOGNORMAL:
        return LogNormalParams(mu=eta, sigma=spec.shape)
    if fam is Family.LOGLOGISTIC:
        return LogLogisticParams(alpha=spec.shape, lam=math.exp(eta))
    if fam is Family.PIECEWISE_EXPONENTIAL:
        rates = tuple(math.exp(r + eta) for r in spec.baseline_log_rates)
        return PiecewiseExponentialParams(rates=rates, cutpoints=spec.cutpoints)
    if fam is Family.GAUSSIAN:
        return GaussianParams(mu=eta, sigma=spec.shape)
    if fam is Family.LOGISTIC:
        return LogisticParams(mu=eta, sigma=spec.shape)
    raise DomainError(f"unknown family {fam}")
