"""Beta-binomial families: one-sample rate test and two-sample rate comparison.

Posteriors are summarised by their exact mean and variance and treated as
normal when forming the Bayesian Z statistic. Exact profiles enumerate the
binomial sample space; beyond the enumeration caps use Monte Carlo.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .core import ConcordanceProfile
from .exceptions import DegenerateVariance, EnumerationCapExceeded, ValidationError

ONE_SAMPLE_CAP = 2000
TWO_SAMPLE_CAP = 400


@dataclass(frozen=True)
class BetaPrior:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValidationError("prior", f"Beta parameters must be > 0, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def strength(self) -> float:
        return self.a + self.b

    @classmethod
    def from_mean_strength(cls, mean: float, strength: float) -> "BetaPrior":
        return cls(mean * strength, (1.0 - mean) * strength)


def _open_unit(name, value):
    if not 0.0 < value < 1.0:
        raise ValidationError(name, f"must lie in (0, 1), got {value!r}")


@dataclass(frozen=True)
class BernoulliTruth:
    theta: float

    def __post_init__(self):
        _open_unit("theta", self.theta)


@dataclass(frozen=True)
class BernoulliPairTruth:
    theta1: float
    theta2: float

    def __post_init__(self):
        _open_unit("theta1", self.theta1)
        _open_unit("theta2", self.theta2)


class PosteriorApprox(NamedTuple):
    mu_tilde: float | np.ndarray
    var_tilde: float | np.ndarray


def posterior_approx_beta(prior: BetaPrior, s, n: int) -> PosteriorApprox:
    """Mean and variance of ``Beta(a + s, b + n - s)``; vectorised over ``s``."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > n):
        raise ValidationError("s", f"successes must lie in [0, {n}]")
    a_post = prior.a + s
    b_post = prior.b + n - s
    total = prior.a + prior.b + n
    mu = a_post / total
    var = a_post * b_post / (total**2 * (total + 1.0))
    if mu.ndim == 0:
        return PosteriorApprox(float(mu), float(var))
    return PosteriorApprox(mu, var)


def z_bayes_beta_one(prior: BetaPrior, s, n: int, theta0: float):
    """Posterior Z centred at the null boundary ``theta0``."""
    mu, var = posterior_approx_beta(prior, s, n)
    return (mu - theta0) / np.sqrt(var)


def z_freq_beta_one(xbar_fixed, theta0: float, n_tilde):
    _open_unit("theta0", theta0)
    return (np.asarray(xbar_fixed, dtype=float) - theta0) / np.sqrt(theta0 * (1.0 - theta0) / np.asarray(n_tilde))


def _binom_weights(n, theta):
    return stats.binom.pmf(np.arange(n + 1), n, theta)


def exact_profile_beta_one(
    prior: BetaPrior, truth: BernoulliTruth, theta0: float, n: int, cap: int = ONE_SAMPLE_CAP
) -> ConcordanceProfile:
    _open_unit("theta0", theta0)
    if n > cap:
        raise EnumerationCapExceeded(n, cap)
    s = np.arange(n + 1)
    w = _binom_weights(n, truth.theta)
    u_bayes = float(np.sum(w * z_bayes_beta_one(prior, s, n, theta0) ** 2))
    th = truth.theta
    kappa = (th * (1.0 - th) / n + (th - theta0) ** 2) / (theta0 * (1.0 - theta0))
    return ConcordanceProfile(u_bayes, kappa, n)


def z_bayes_beta_two(prior1: BetaPrior, prior2: BetaPrior, s_x, s_y, n: int):
    mx, vx = posterior_approx_beta(prior1, s_x, n)
    my, vy = posterior_approx_beta(prior2, s_y, n)
    return (mx - my) / np.sqrt(vx + vy)


def clamp_proportion(p, n: int):
    """Clamp sample proportions into ``[1/(2n), 1 - 1/(2n)]`` for the variance plug-in."""
    eps = 1.0 / (2.0 * n)
    return np.clip(p, eps, 1.0 - eps)


def z_freq_beta_two(xbar, ybar, n_tilde):
    """Unpooled two-proportion Z with the proportions frozen at sample size ``n_tilde``.

    Callers clamp degenerate proportions before calling; an all-degenerate
    pair raises :class:`DegenerateVariance`.
    """
    xbar = np.asarray(xbar, dtype=float)
    ybar = np.asarray(ybar, dtype=float)
    var_sum = xbar * (1.0 - xbar) + ybar * (1.0 - ybar)
    if np.any(var_sum <= 0):
        raise DegenerateVariance("both sample proportions are 0 or 1; clamp before calling")
    return (xbar - ybar) / np.sqrt(var_sum / np.asarray(n_tilde, dtype=float))


def freq_unit_beta_two(s_x, s_y, n: int):
    """Per-observation summand ``(xbar - ybar)^2 / (clamped variance sum)``."""
    xbar = np.asarray(s_x, dtype=float) / n
    ybar = np.asarray(s_y, dtype=float) / n
    xc = clamp_proportion(xbar, n)
    yc = clamp_proportion(ybar, n)
    return (xbar - ybar) ** 2 / (xc * (1.0 - xc) + yc * (1.0 - yc))


def exact_profile_beta_two(
    prior1: BetaPrior, prior2: BetaPrior, truth: BernoulliPairTruth, n: int, cap: int = TWO_SAMPLE_CAP
) -> ConcordanceProfile:
    """Double enumeration over independent ``(S_x, S_y)``; O(n^2)."""
    if n > cap:
        raise EnumerationCapExceeded(n, cap)
    s = np.arange(n + 1)
    wx = _binom_weights(n, truth.theta1)
    wy = _binom_weights(n, truth.theta2)
    w = np.outer(wx, wy)
    sx, sy = s[:, None], s[None, :]
    u_bayes = float(np.sum(w * z_bayes_beta_two(prior1, prior2, sx, sy, n) ** 2))
    kappa = float(np.sum(w * freq_unit_beta_two(sx, sy, n)))
    edge = (sx == 0) | (sx == n) | (sy == 0) | (sy == n)
    clamped_mass = float(np.sum(np.where(edge, w, 0.0)))
    return ConcordanceProfile(u_bayes, kappa, n, diagnostics={"clamped_fraction": clamped_mass})


@dataclass(frozen=True)
class BetaOneModel:
    """Bootstrap/Monte Carlo adapter for the one-sample rate test; batches are success counts."""

    truth: BernoulliTruth
    theta0: float

    def draw_pool(self, rng, size):
        return (rng.random(size) < self.truth.theta).astype(np.int64)

    def resample(self, rng, pool, n, size):
        idx = rng.integers(0, pool.shape[0], size=(size, n))
        return pool[idx].sum(axis=1)

    def simulate(self, rng, n, size):
        return rng.binomial(n, self.truth.theta, size)

    def z_bayes(self, prior: BetaPrior, s, n):
        return z_bayes_beta_one(prior, s, n, self.theta0)

    def freq_unit(self, s, n):
        t0 = self.theta0
        return (s / n - t0) ** 2 / (t0 * (1.0 - t0))

    def degenerate(self, s, n):
        return None

    def exact_profile(self, prior: BetaPrior, n: int) -> ConcordanceProfile:
        return exact_profile_beta_one(prior, self.truth, self.theta0, n)


@dataclass(frozen=True)
class BetaTwoModel:
    """Adapter for the two-sample comparison; priors are ``(prior1, prior2)`` pairs.

    Pools hold paired rows ``(x, y)`` of independent Bernoulli draws and
    batches are ``(size, 2)`` arrays of success counts.
    """

    truth: BernoulliPairTruth

    def draw_pool(self, rng, size):
        u = rng.random((size, 2))
        return (u < np.array([self.truth.theta1, self.truth.theta2])).astype(np.int64)

    def resample(self, rng, pool, n, size):
        idx = rng.integers(0, pool.shape[0], size=(size, n))
        return pool[idx].sum(axis=1)

    def simulate(self, rng, n, size):
        return np.column_stack(
            [rng.binomial(n, self.truth.theta1, size), rng.binomial(n, self.truth.theta2, size)]
        )

    def z_bayes(self, priors, counts, n):
        prior1, prior2 = priors
        return z_bayes_beta_two(prior1, prior2, counts[:, 0], counts[:, 1], n)

    def freq_unit(self, counts, n):
        return freq_unit_beta_two(counts[:, 0], counts[:, 1], n)

    def degenerate(self, counts, n):
        return np.any((counts == 0) | (counts == n), axis=1)

    def exact_profile(self, priors, n: int) -> ConcordanceProfile:
        return exact_profile_beta_two(priors[0], priors[1], self.truth, n)
