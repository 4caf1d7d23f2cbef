"""Estimator front end with the scikit-learn conventions.

``PValueESS`` treats the observed data as a bootstrap pool: ``fit`` draws
``n_bootstrap`` resamples of size ``bayes_n``, estimates the concordance
profile for the configured prior and stores the signed ESS in ``ess_``.
Hyperparameters live in ``__init__`` untouched, so ``get_params``,
``set_params`` and ``clone`` work as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .beta import BernoulliPairTruth, BernoulliTruth, BetaOneModel, BetaPrior, BetaTwoModel
from .core import ConcordanceProfile, EssEstimate, Family, Method, SupportDirection, estimate_ess
from .exceptions import DegenerateDesign, ValidationError
from .linreg import RegressionModel, SlopePrior, sufficient_stats
from .montecarlo import StreamRole, bootstrap_profile, derive_stream, simulate_profile
from .normal import NormalModel, NormalPrior, NormalTruth


def exact_estimate(model, prior, n: int, direction, grid=None, strict: bool = False) -> EssEstimate:
    """ESS from the model's exact profile (closed form or full enumeration)."""
    profile = model.exact_profile(prior, n)
    method = Method.EXACT_ENUMERATION if isinstance(model, (BetaOneModel, BetaTwoModel)) else Method.CLOSED_FORM
    return estimate_ess(profile, direction, method, grid, strict)


def mc_estimate(model, prior, n: int, direction, draws: int, seed: int, grid=None, strict: bool = False) -> EssEstimate:
    """ESS from a Monte Carlo profile drawn directly from the model's truth."""
    profile = simulate_profile(model, prior, n, draws, derive_stream(seed, 0, StreamRole.DIRECT))
    return estimate_ess(profile, direction, Method.MONTE_CARLO, grid, strict)


def _default_prior(family):
    return {
        Family.NORMAL_ONE_SAMPLE: NormalPrior(),
        Family.BETA_ONE_SAMPLE: BetaPrior(1.0, 1.0),
        Family.BETA_TWO_SAMPLE: (BetaPrior(1.0, 1.0), BetaPrior(1.0, 1.0)),
        Family.LINREG_TWO_GROUP: SlopePrior(),
    }[family]


class PValueESS(BaseEstimator):
    """Bootstrap ESS of a prior against an observed data pool.

    Parameters
    ----------
    family : {"normal", "beta1", "beta2", "linreg"}
        ``X`` is a 1-D sample for ``normal`` and ``beta1``, an ``(n, 2)``
        array of paired 0/1 outcomes for ``beta2`` and the covariate for
        ``linreg`` (with the response passed as ``y``).
    prior : NormalPrior, BetaPrior, (BetaPrior, BetaPrior) or SlopePrior
    null_boundary : float
        ``theta0`` for ``beta1``, the mean boundary for ``normal``.
    direction : {"null", "alternative"}
        Which hypothesis the data support; sets the ESS sign.
    bayes_n : int
        Bayesian sample size; resamples are this size.
    n_bootstrap : int
    sigma : float, optional
        Known noise SD for ``linreg``; defaults to the residual SD of the fit.
    grid : (int, int), optional
    random_state : int

    Attributes
    ----------
    profile_ : ConcordanceProfile
    estimate_ : EssEstimate
    ess_ : int
    n_tilde_ : int
    """

    def __init__(
        self,
        family="normal",
        prior=None,
        null_boundary=0.0,
        direction="null",
        bayes_n=100,
        n_bootstrap=10_000,
        sigma=None,
        grid=None,
        random_state=0,
    ):
        self.family = family
        self.prior = prior
        self.null_boundary = null_boundary
        self.direction = direction
        self.bayes_n = bayes_n
        self.n_bootstrap = n_bootstrap
        self.sigma = sigma
        self.grid = grid
        self.random_state = random_state

    def _model_and_pool(self, X, y):
        family = Family(self.family)
        prior = self.prior if self.prior is not None else _default_prior(family)
        if family is Family.NORMAL_ONE_SAMPLE:
            x = column_or_1d(check_array(X, ensure_2d=False, dtype=float))
            return NormalModel(NormalTruth(float(x.mean()), prior.sigma), float(self.null_boundary)), x, prior
        if family is Family.BETA_ONE_SAMPLE:
            x = column_or_1d(check_array(X, ensure_2d=False, dtype=float))
            if not np.isin(x, (0.0, 1.0)).all():
                raise ValidationError("X", "beta1 expects 0/1 outcomes")
            theta0 = float(self.null_boundary)
            return BetaOneModel(BernoulliTruth(theta0), theta0), x.astype(np.int64), prior
        if family is Family.BETA_TWO_SAMPLE:
            x = check_array(X, dtype=float)
            if x.shape[1] != 2 or not np.isin(x, (0.0, 1.0)).all():
                raise ValidationError("X", "beta2 expects an (n, 2) array of 0/1 outcomes")
            return BetaTwoModel(BernoulliPairTruth(0.5, 0.5)), x.astype(np.int64), prior
        if y is None:
            raise ValidationError("y", "linreg needs the response as y")
        x = column_or_1d(check_array(X, ensure_2d=False, dtype=float))
        yv = column_or_1d(check_array(y, ensure_2d=False, dtype=float))
        if x.shape != yv.shape:
            raise ValidationError("y", "X and y lengths differ")
        sigma = self.sigma
        if sigma is None:
            sigma = residual_sd(x, yv)
        return RegressionModel(np.column_stack([x, yv]), float(sigma)), np.column_stack([x, yv]), prior

    def fit(self, X, y=None):
        model, pool, prior = self._model_and_pool(X, y)
        n = int(self.bayes_n)
        if len(pool) < n:
            raise ValidationError("bayes_n", f"bayes_n={n} exceeds the {len(pool)} observations")
        stream = derive_stream(int(self.random_state), 0, StreamRole.BOOTSTRAP)
        self.profile_: ConcordanceProfile = bootstrap_profile(
            pool,
            n,
            int(self.n_bootstrap),
            lambda s: model.z_bayes(prior, s, n),
            lambda s: model.freq_unit(s, n),
            stream,
            resampler=model.resample,
            degenerate_fn=lambda s: model.degenerate(s, n),
        )
        self.estimate_: EssEstimate = estimate_ess(
            self.profile_, SupportDirection(self.direction), Method.BOOTSTRAP, self.grid
        )
        self.ess_ = self.estimate_.ess
        self.n_tilde_ = self.estimate_.n_tilde_star
        return self

    def distance_curve(self, n_tilde):
        """Distance ``|U_B - n_tilde * kappa|`` of the fitted profile."""
        check_is_fitted(self, "profile_")
        n_tilde = np.asarray(n_tilde, dtype=float)
        return np.abs(self.profile_.u_bayes - n_tilde * self.profile_.kappa)


def residual_sd(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.size < 3:
        raise ValidationError("y", "need at least 3 observations to estimate sigma")
    beta1, _, _ = sufficient_stats(x, y)
    beta0 = y.mean() - beta1 * x.mean()
    resid = y - beta0 - beta1 * x
    sd = float(np.sqrt(np.sum(resid**2) / (y.size - 2)))
    if sd <= 0:
        raise DegenerateDesign("residual variance is zero")
    return sd
