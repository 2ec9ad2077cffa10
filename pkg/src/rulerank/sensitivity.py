"""Tipping-point analysis: closed-form sensitivity values and their asymptotics.

The sensitivity value gamma* of a dominance comparison is the smallest
confounding bound at which the studentized test stops rejecting; its
bounded transform is kappa* = (gamma* - 1) / (gamma* + 1). Squaring the
rejection boundary

    (mean(D) - kappa * mean|D|) / se(kappa) = z_alpha

gives a quadratic in kappa whose admissible root is kappa*. With the
1/m-normalized sample moments s2_d, s2_abs, s_cross and q = z^2 / (m - 1),
the quadratic is

    (mean_abs^2 - q*s2_abs) k^2 - 2 (mean*mean_abs - q*s_cross) k
        + mean^2 - q*s2_d = 0.

As m grows, kappa* concentrates at E[D]/E[|D|] with Gaussian fluctuations
whose location and scale have closed forms in the first two moments of D
and |D|; the limit of gamma* is the design sensitivity
(E|D| + ED) / (E|D| - ED), where asymptotic power transitions from 1 to 0.
Those asymptotics drive the power approximation used to order hypotheses.

A confounding bound gamma also amplifies into a curve of two-parameter
explanations (lambda, delta_amp): lambda bounds the confounder's effect on
treatment odds and delta_amp its effect on outcome odds, linked by
gamma = (lambda * delta_amp + 1) / (lambda + delta_amp).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri

from . import kernels
from .core import ComparisonFrame, gamma_to_kappa, kappa_to_gamma
from .errors import (
    DegenerateVariance,
    InvalidAmplification,
    InvalidGamma,
    TooFewPairs,
    ValidationError,
    ZeroDenominator,
)

__all__ = [
    "MomentSummary",
    "AsymptoticParams",
    "SensitivityValue",
    "gamma_to_kappa",
    "kappa_to_gamma",
    "moment_summary",
    "sensitivity_value",
    "asymptotic_params",
    "approx_power",
    "amplify",
]


@dataclass(frozen=True)
class MomentSummary:
    """Sample moments of the signed differences and their absolute values.

    Variances and the covariance are 1/count-normalized.
    """

    mean_d: float
    mean_abs: float
    var_d: float
    var_abs: float
    cov: float
    count: int


@dataclass(frozen=True)
class AsymptoticParams:
    """Large-sample parameters of the sensitivity-value distribution.

    kappa* is asymptotically Normal(kappa_limit + z_alpha * mu / sqrt(m),
    sigma2 / m). ``positive_drift`` records whether the comparison had a
    positive mean difference; when it does not, kappa_limit is nonpositive
    and design_sensitivity is clamped at its lower bound of 1.
    """

    kappa_limit: float
    mu: float
    sigma2: float
    design_sensitivity: float
    positive_drift: bool


class SensitivityValue(NamedTuple):
    kappa_star: float
    gamma_star: float


def moment_summary(frame: ComparisonFrame) -> MomentSummary:
    """Moments of a comparison frame (needs at least two disagreeing pairs)."""
    if frame.m < 2:
        raise TooFewPairs(f"need at least 2 disagreeing pairs, got {frame.m}")
    mean, mean_abs, var_d, var_abs, cov = kernels.signed_moments(frame.signed_d)
    return MomentSummary(mean, mean_abs, var_d, var_abs, cov, frame.m)


def _statistic(d: np.ndarray, kappa: float) -> float:
    mean, se = kernels.studentized_moments(d, kappa, 0.0)
    if se == 0.0:
        return math.inf if mean > 0 else (-math.inf if mean < 0 else 0.0)
    return mean / se


def _crossing_from_quadratic(ms: MomentSummary, z: float) -> float | None:
    q = z * z / (ms.count - 1.0)
    a = ms.mean_abs * ms.mean_abs - q * ms.var_abs
    b = ms.mean_d * ms.mean_abs - q * ms.cov
    c = ms.mean_d * ms.mean_d - q * ms.var_d
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    roots: list[float] = []
    if abs(a) <= 1e-14 * scale:
        if b != 0.0:
            roots.append(c / (2.0 * b))
    else:
        disc = b * b - a * c
        if disc < 0.0:
            return None
        sq = math.sqrt(disc)
        roots.extend(((b - sq) / a, (b + sq) / a))
    # keep roots on the rejection boundary proper: positive adjusted mean
    good = [
        k
        for k in roots
        if 0.0 < k < 1.0 and ms.mean_d - k * ms.mean_abs > 0.0
    ]
    return min(good) if good else None


def _crossing_by_bisection(d: np.ndarray, z: float) -> float:
    # first crossing from above: coarse forward scan, then bisect the bracket
    grid = np.linspace(0.0, 1.0 - 1e-15, 1025)
    lo = 0.0
    hi = None
    for k in grid[1:]:
        if _statistic(d, float(k)) <= z:
            hi = float(k)
            break
        lo = float(k)
    if hi is None:
        return 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _statistic(d, mid) > z:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sensitivity_value(frame: ComparisonFrame, alpha: float = 0.05) -> SensitivityValue:
    """Smallest confounding bound at which dominance can no longer be affirmed.

    Returns gamma* = 1 when even the randomization test fails to reject and
    gamma* = inf when the statistic never crosses the critical value (all
    signed differences nonnegative). Raises DegenerateVariance when the
    signed differences are constant and TooFewPairs below two pairs.
    """
    if frame.m < 2:
        raise TooFewPairs(f"need at least 2 disagreeing pairs, got {frame.m}")
    d = frame.signed_d
    if np.all(d == d[0]):
        raise DegenerateVariance("all signed differences are equal")
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha!r}")
    z = float(ndtri(1.0 - alpha))
    if _statistic(d, 0.0) <= z:
        return SensitivityValue(0.0, 1.0)
    if float(d.min()) >= 0.0:
        # the (1 - kappa) factor cancels from mean and se: constant statistic
        return SensitivityValue(1.0, math.inf)
    ms = moment_summary(frame)
    kappa = _crossing_from_quadratic(ms, z)
    if kappa is None or abs(_statistic(d, kappa) - z) > 1e-6 * max(1.0, z):
        kappa = _crossing_by_bisection(d, z)
    if kappa >= 1.0:
        return SensitivityValue(1.0, math.inf)
    return SensitivityValue(kappa, kappa_to_gamma(kappa))


def asymptotic_params(moments: MomentSummary) -> AsymptoticParams:
    """Location/scale of the limiting sensitivity-value distribution.

    ``sigma2`` is computed from its own closed form; it equals mu^2
    algebraically, which the test suite checks rather than assumes.
    """
    ed, ea = moments.mean_d, moments.mean_abs
    if ea <= 0.0:
        raise ZeroDenominator("mean absolute difference is zero")
    vd, va, cv = moments.var_d, moments.var_abs, moments.cov
    kappa_limit = ed / ea
    inner = va * ed * ed + vd * ea * ea - 2.0 * ed * ea * cv
    mu = -math.sqrt(max(inner, 0.0)) / (ea * ea)
    sigma2 = (vd * ea * ea - va * ed * ed - 2.0 * ed * ea * cv + 2.0 * ed * ed * va) / ea**4
    sigma2 = max(sigma2, 0.0)
    if kappa_limit >= 1.0:
        design = math.inf
    else:
        design = max(1.0, (1.0 + kappa_limit) / (1.0 - kappa_limit))
    return AsymptoticParams(
        kappa_limit=kappa_limit,
        mu=mu,
        sigma2=sigma2,
        design_sensitivity=design,
        positive_drift=ed > 0.0,
    )


def approx_power(params: AsymptoticParams, count: int, gamma: float, alpha: float = 0.05) -> float:
    """Approximate rejection probability of the dominance test at gamma.

    Uses P(kappa* >= kappa(gamma)) under the Gaussian approximation with
    ``count`` disagreeing pairs. Degenerates to a 0/1 step when sigma2 = 0.
    """
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    kap = gamma_to_kappa(gamma)
    z = float(ndtri(1.0 - alpha))
    mean = params.kappa_limit + z * params.mu / math.sqrt(count)
    if params.sigma2 == 0.0:
        return 1.0 if kap <= mean else 0.0
    sd = math.sqrt(params.sigma2 / count)
    return float(ndtr((mean - kap) / sd))


def amplify(gamma: float, lam: float) -> float:
    """Outcome-odds bound paired with treatment-odds bound ``lam`` at ``gamma``.

    Solves gamma = (lam * delta + 1) / (lam + delta) for delta, i.e.
    delta = (gamma * lam - 1) / (lam - gamma). Evaluated in exact rational
    arithmetic on the decimal rendering of the inputs so that hand-entered
    bounds amplify without float round-off.
    """
    if math.isnan(gamma) or gamma <= 1.0:
        raise InvalidGamma(f"amplification needs gamma > 1, got {gamma!r}")
    if math.isnan(lam) or lam <= gamma:
        raise InvalidAmplification(f"need lambda > gamma, got lambda={lam!r} at gamma={gamma!r}")
    if math.isinf(lam):
        return float(gamma)
    g = Fraction(Decimal(str(gamma)))
    lm = Fraction(Decimal(str(lam)))
    return float((g * lm - 1) / (lm - g))
