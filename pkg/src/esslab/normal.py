"""One-sample normal mean with known variance and a conjugate normal prior."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConcordanceProfile
from .exceptions import ValidationError


@dataclass(frozen=True)
class NormalPrior:
    """``mu ~ N(delta, sigma**2 / m)``; ``m`` acts as a prior sample count."""

    delta: float = 0.0
    m: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValidationError("m", f"must be > 0, got {self.m!r}")
        if not self.sigma > 0:
            raise ValidationError("sigma", f"must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class NormalTruth:
    mu_true: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("sigma", f"must be > 0, got {self.sigma!r}")


def _check_sigma(prior: NormalPrior, truth: NormalTruth):
    if not math.isclose(prior.sigma, truth.sigma):
        raise ValidationError("sigma", f"prior sigma {prior.sigma} != truth sigma {truth.sigma}")


def posterior_normal(prior: NormalPrior, sum_x, n: int):
    """Posterior mean and variance of ``mu`` after ``n`` observations summing to ``sum_x``."""
    mu_post = (np.asarray(sum_x, dtype=float) + prior.m * prior.delta) / (prior.m + n)
    var_post = prior.sigma**2 / (prior.m + n)
    if np.ndim(mu_post) == 0:
        mu_post = float(mu_post)
    return mu_post, var_post


def z_bayes_normal(prior: NormalPrior, sum_x, n: int, boundary: float = 0.0):
    mu_post, var_post = posterior_normal(prior, sum_x, n)
    return (mu_post - boundary) / math.sqrt(var_post)


def z_freq_normal(xbar_fixed, sigma: float, n_tilde, boundary: float = 0.0):
    """Frequentist Z with the sample mean frozen while the sample size varies."""
    return np.sqrt(n_tilde) * (np.asarray(xbar_fixed, dtype=float) - boundary) / sigma


def exact_profile_normal(prior: NormalPrior, truth: NormalTruth, n: int, boundary: float = 0.0) -> ConcordanceProfile:
    """Closed-form second moments under the normal sampling law of the sum."""
    _check_sigma(prior, truth)
    s2 = truth.sigma**2
    # E(sum_x + m*delta - (m+n)*b)^2 = n sigma^2 + (n mu + m delta - (m+n) b)^2
    shift = n * truth.mu_true + prior.m * prior.delta - (prior.m + n) * boundary
    u_bayes = (n * s2 + shift**2) / (s2 * (prior.m + n))
    kappa = 1.0 / n + (truth.mu_true - boundary) ** 2 / s2
    return ConcordanceProfile(u_bayes, kappa, n)


def closed_form_ess_normal(prior: NormalPrior, n: int) -> float:
    """Continuous ESS ``m n (1 - m (delta/sigma)^2) / (m + n)`` under a zero true mean."""
    m = prior.m
    return m * n * (1.0 - m * (prior.delta / prior.sigma) ** 2) / (m + n)


def closed_form_n_tilde_normal(prior: NormalPrior, n: int) -> float:
    """Continuous minimizer ``n (n + m^2 delta^2 / sigma^2) / (m + n)`` under a zero true mean."""
    m = prior.m
    return n * (n + (m * prior.delta / prior.sigma) ** 2) / (m + n)


@dataclass(frozen=True)
class NormalModel:
    """Bootstrap/Monte Carlo adapter; batches are per-sample sums."""

    truth: NormalTruth
    boundary: float = 0.0

    def draw_pool(self, rng, size):
        return rng.normal(self.truth.mu_true, self.truth.sigma, size)

    def resample(self, rng, pool, n, size):
        idx = rng.integers(0, pool.shape[0], size=(size, n))
        return pool[idx].sum(axis=1)

    def simulate(self, rng, n, size):
        return rng.normal(n * self.truth.mu_true, math.sqrt(n) * self.truth.sigma, size)

    def z_bayes(self, prior: NormalPrior, sums, n):
        _check_sigma(prior, self.truth)
        return z_bayes_normal(prior, sums, n, self.boundary)

    def freq_unit(self, sums, n):
        return np.square((sums / n - self.boundary) / self.truth.sigma)

    def degenerate(self, sums, n):
        return None

    def exact_profile(self, prior: NormalPrior, n: int) -> ConcordanceProfile:
        return exact_profile_normal(prior, self.truth, n, self.boundary)
