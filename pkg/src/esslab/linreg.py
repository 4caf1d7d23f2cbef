"""Slope tests for simple regression, centred on the two-group 0/1 design.

For the group design the slope posterior uses the no-intercept sufficient
statistics ``sxy = sum(x * (y - b0_hat))`` and ``sxx = sum(x**2)``, with the
intercept replaced by its least-squares estimate. That keeps ``sxy / sxx``
equal to the least-squares slope, so a flat slope prior reproduces the
frequentist Z exactly. General covariates (:class:`RegressionModel`) default
to centred statistics instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConcordanceProfile
from .exceptions import DegenerateDesign, ValidationError


@dataclass(frozen=True)
class SlopePrior:
    """``beta1 ~ N(mu, var1)``."""

    mu: float = 0.0
    var1: float = 1.0

    def __post_init__(self):
        if not self.var1 > 0:
            raise ValidationError("var1", f"prior variance must be > 0, got {self.var1!r}")

    @classmethod
    def from_m(cls, mu: float, m: float, sigma: float = 1.0) -> "SlopePrior":
        return cls(mu, sigma**2 / m)


@dataclass(frozen=True)
class TwoGroupData:
    group1: np.ndarray
    group2: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        g1 = np.asarray(self.group1, dtype=float).ravel()
        g2 = np.asarray(self.group2, dtype=float).ravel()
        if g1.size == 0 or g2.size == 0:
            raise ValidationError("groups", "both groups must be nonempty")
        if not self.sigma > 0:
            raise ValidationError("sigma", "must be > 0")
        object.__setattr__(self, "group1", g1)
        object.__setattr__(self, "group2", g2)

    @property
    def n(self) -> int:
        return self.group1.size + self.group2.size

    def design(self):
        x = np.concatenate([np.zeros(self.group1.size), np.ones(self.group2.size)])
        y = np.concatenate([self.group1, self.group2])
        return x, y


def lse_slope(data: TwoGroupData):
    """Least-squares slope (difference of group means) and its sampling variance."""
    beta1_hat = float(data.group2.mean() - data.group1.mean())
    var_hat = data.sigma**2 * (1.0 / data.group1.size + 1.0 / data.group2.size)
    return beta1_hat, var_hat


def sufficient_stats(x, y, center: bool = False):
    """``(beta1_hat, sxy, sxx)`` for a simple regression with an intercept.

    ``center=False`` plugs the intercept estimate into the no-intercept
    statistics (``sxx = sum(x**2)``), the form used for the 0/1 group design.
    ``center=True`` uses the centred statistics, whose ``sxx`` is the exact
    least-squares information for a general covariate.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sxx_c = np.sum((x - x.mean()) ** 2)
    if sxx_c <= 0:
        raise DegenerateDesign("covariate is constant; slope is not identifiable")
    sxy_c = float(np.sum((x - x.mean()) * (y - y.mean())))
    beta1 = sxy_c / float(sxx_c)
    if center:
        return beta1, sxy_c, float(sxx_c)
    beta0 = y.mean() - beta1 * x.mean()
    return beta1, float(np.sum(x * (y - beta0))), float(np.sum(x * x))


def z_freq_linreg(beta1_hat, sxx_per_n, sigma: float, n_tilde):
    """Slope Z with the slope and the design proportion frozen while total size varies."""
    return np.asarray(beta1_hat, dtype=float) * np.sqrt(np.asarray(n_tilde) * np.asarray(sxx_per_n)) / sigma


def posterior_slope(prior: SlopePrior, sxy, sxx, sigma: float):
    if np.any(np.asarray(sxx) < 0):
        raise ValidationError("sxx", "must be >= 0")
    s2 = sigma**2
    denom = prior.var1 * np.asarray(sxx, dtype=float) + s2
    mu = (prior.var1 * np.asarray(sxy, dtype=float) + prior.mu * s2) / denom
    var = s2 * prior.var1 / denom
    if np.ndim(mu) == 0:
        return float(mu), float(var)
    return mu, var


def z_bayes_linreg(prior: SlopePrior, sxy, sxx, sigma: float):
    mu, var = posterior_slope(prior, sxy, sxx, sigma)
    return mu / np.sqrt(var)


@dataclass(frozen=True)
class TwoGroupTruth:
    mu1: float = 0.0
    mu2: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("sigma", "must be > 0")

    @property
    def slope(self) -> float:
        return self.mu2 - self.mu1


def exact_profile_linreg(prior: SlopePrior, truth: TwoGroupTruth, n1: int, n2: int) -> ConcordanceProfile:
    """Closed-form profile for the 0/1 design: ``sxx = n2`` and ``sxy = n2 * beta1_hat``."""
    if n1 < 1 or n2 < 1:
        raise ValidationError("groups", "both group sizes must be >= 1")
    n = n1 + n2
    s2 = truth.sigma**2
    slope = truth.slope
    v_hat = s2 * (1.0 / n1 + 1.0 / n2)
    second = slope**2 + v_hat  # E beta1_hat^2
    a = prior.var1 * n2
    b = prior.mu * s2
    # Z_B = (a beta1_hat + b) / sqrt(s2 * var1 * (var1 n2 + s2))
    u_bayes = (a * a * second + 2 * a * b * slope + b * b) / (s2 * prior.var1 * (prior.var1 * n2 + s2))
    kappa = (n2 / n) * second / s2
    return ConcordanceProfile(u_bayes, kappa, n)


@dataclass(frozen=True)
class TwoGroupModel:
    """Adapter with stratified resampling: ``n1 = round(n * group1_fraction)`` per resample.

    Pools are ``(pool_size, 2)`` arrays, column ``j`` holding group ``j+1``
    responses; batches are ``(size, 2)`` arrays of group sums.
    """

    truth: TwoGroupTruth
    group1_fraction: float = 0.5

    def sizes(self, n):
        n1 = int(round(n * self.group1_fraction))
        if not 1 <= n1 < n:
            raise ValidationError("group1_fraction", f"gives empty group at n={n}")
        return n1, n - n1

    def draw_pool(self, rng, size):
        z = rng.standard_normal((size, 2)) * self.truth.sigma
        return z + np.array([self.truth.mu1, self.truth.mu2])

    def resample(self, rng, pool, n, size):
        n1, n2 = self.sizes(n)
        i1 = rng.integers(0, pool.shape[0], size=(size, n1))
        i2 = rng.integers(0, pool.shape[0], size=(size, n2))
        return np.column_stack([pool[i1, 0].sum(axis=1), pool[i2, 1].sum(axis=1)])

    def simulate(self, rng, n, size):
        n1, n2 = self.sizes(n)
        s = self.truth.sigma
        return np.column_stack(
            [rng.normal(n1 * self.truth.mu1, math.sqrt(n1) * s, size), rng.normal(n2 * self.truth.mu2, math.sqrt(n2) * s, size)]
        )

    def _slope(self, sums, n):
        n1, n2 = self.sizes(n)
        return sums[:, 1] / n2 - sums[:, 0] / n1, n2

    def z_bayes(self, prior: SlopePrior, sums, n):
        beta1, n2 = self._slope(sums, n)
        return z_bayes_linreg(prior, n2 * beta1, n2, self.truth.sigma)

    def freq_unit(self, sums, n):
        beta1, n2 = self._slope(sums, n)
        return beta1**2 * (n2 / n) / self.truth.sigma**2

    def degenerate(self, sums, n):
        return None

    def exact_profile(self, prior: SlopePrior, n: int) -> ConcordanceProfile:
        n1, n2 = self.sizes(n)
        return exact_profile_linreg(prior, self.truth, n1, n2)


def regression_sums(x, y):
    """Per-row-batch raw sums ``(Sx, Sy, Sxx, Sxy)`` along the last axis."""
    return np.stack([x.sum(-1), y.sum(-1), (x * x).sum(-1), (x * y).sum(-1)], axis=-1)


def stats_from_sums(sums, n, center: bool = False):
    """``(beta1_hat, sxy, sxx)`` per resample; NaN where the covariate is constant."""
    sx, sy, sxx, sxy_raw = (sums[..., k] for k in range(4))
    sxx_c = sxx - sx * sx / n
    sxy_c = sxy_raw - sx * sy / n
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = sxx_c > 1e-12 * np.maximum(sxx, 1.0)
        beta1 = np.where(ok, sxy_c / sxx_c, np.nan)
    if center:
        return beta1, np.where(ok, sxy_c, np.nan), sxx_c
    beta0 = (sy - beta1 * sx) / n
    return beta1, sxy_raw - beta0 * sx, sxx


@dataclass(frozen=True)
class RegressionModel:
    """Adapter for a fixed observed ``(covariate, response)`` table resampled by rows.

    ``sigma`` is treated as known (callers plug in the residual SD).
    """

    data: np.ndarray
    sigma: float
    center: bool = True

    def draw_pool(self, rng, size):
        return self.data

    def resample(self, rng, pool, n, size):
        idx = rng.integers(0, pool.shape[0], size=(size, n))
        rows = pool[idx]
        return regression_sums(rows[..., 0], rows[..., 1])

    def simulate(self, rng, n, size):
        return self.resample(rng, self.data, n, size)

    def z_bayes(self, prior: SlopePrior, sums, n):
        _, sxy, sxx = stats_from_sums(sums, n, self.center)
        return z_bayes_linreg(prior, sxy, sxx, self.sigma)

    def freq_unit(self, sums, n):
        beta1, _, sxx = stats_from_sums(sums, n, self.center)
        return beta1**2 * (sxx / n) / self.sigma**2

    def degenerate(self, sums, n):
        return None
