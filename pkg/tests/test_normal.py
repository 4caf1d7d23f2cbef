import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from esslab.core import Method, estimate_ess
from esslab.estimators import exact_estimate
from esslab.exceptions import ValidationError
from esslab.montecarlo import derive_stream, simulate_profile
from esslab.normal import (
    NormalModel,
    NormalPrior,
    NormalTruth,
    closed_form_ess_normal,
    closed_form_n_tilde_normal,
    exact_profile_normal,
    posterior_normal,
    z_bayes_normal,
    z_freq_normal,
)

from conftest import NULL


def quad_u_bayes(prior, truth, n, boundary=0.0):
    """E[Z_B^2] by integrating over the sampling law of the sum."""
    law = stats.norm(n * truth.mu_true, math.sqrt(n) * truth.sigma)

    def integrand(s):
        return z_bayes_normal(prior, s, n, boundary) ** 2 * law.pdf(s)

    lo, hi = law.ppf(1e-12), law.isf(1e-12)
    return integrate.quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-10)[0]


def quad_kappa(truth, n, boundary=0.0):
    law = stats.norm(n * truth.mu_true, math.sqrt(n) * truth.sigma)
    val = integrate.quad(lambda s: ((s / n - boundary) / truth.sigma) ** 2 * law.pdf(s), law.ppf(1e-12), law.isf(1e-12))
    return val[0]


def test_posterior_examples():
    assert posterior_normal(NormalPrior(0, 20, 1), 0, 100) == pytest.approx((0.0, 1 / 120))
    assert posterior_normal(NormalPrior(0.5, 10, 1), 30, 90) == pytest.approx((0.35, 0.01))


def test_posterior_flat_limit():
    mu, var = posterior_normal(NormalPrior(3.0, 1e-12, 2.0), 7.0, 10)
    assert mu == pytest.approx(0.7)
    assert var == pytest.approx(0.4)


def test_z_freq_examples():
    np.testing.assert_allclose(z_freq_normal(0.0, 1.0, [1, 10, 100]), 0.0)
    assert z_freq_normal(0.1, 1.0, 100) == pytest.approx(1.0)
    assert z_freq_normal(0.1, 1.0, 400) == pytest.approx(2.0)


def test_exact_profile_examples():
    p = exact_profile_normal(NormalPrior(0, 20), NormalTruth(0), 100)
    assert p.u_bayes == pytest.approx(100 / 120)
    assert p.kappa == pytest.approx(0.01)
    q = exact_profile_normal(NormalPrior(0.1, 20), NormalTruth(0), 100)
    assert q.u_bayes == pytest.approx(104 / 120)
    assert estimate_ess(q, NULL, Method.CLOSED_FORM).ess == 13


def test_exact_profile_noninformative_limit():
    p = exact_profile_normal(NormalPrior(5.0, 1e-10), NormalTruth(0), 100)
    assert p.u_bayes == pytest.approx(1.0, rel=1e-6)
    assert estimate_ess(p, NULL, Method.CLOSED_FORM).ess == 0


@pytest.mark.parametrize(
    "prior, truth, n, boundary",
    [
        (NormalPrior(0, 20), NormalTruth(0), 100, 0.0),
        (NormalPrior(0.5, 3, 2.0), NormalTruth(0.3, 2.0), 40, 0.1),
        (NormalPrior(-1.0, 0.5, 0.7), NormalTruth(0.2, 0.7), 7, -0.2),
    ],
)
def test_exact_profile_matches_quadrature(prior, truth, n, boundary):
    p = exact_profile_normal(prior, truth, n, boundary)
    assert p.u_bayes == pytest.approx(quad_u_bayes(prior, truth, n, boundary), rel=1e-8)
    assert p.kappa == pytest.approx(quad_kappa(truth, n, boundary), rel=1e-8)


def test_sigma_mismatch_rejected():
    with pytest.raises(ValidationError):
        exact_profile_normal(NormalPrior(0, 1, sigma=1.0), NormalTruth(0, sigma=2.0), 10)


@pytest.mark.parametrize(
    "m, delta, expected", [(20, 0.0, 16.67), (20, 0.1, 13.33), (20, 0.5, -66.67)]
)
def test_closed_form_examples(m, delta, expected):
    assert closed_form_ess_normal(NormalPrior(delta, m), 100) == pytest.approx(expected, abs=0.005)


@given(
    m=st.floats(0.01, 200),
    delta=st.floats(-1, 1),
    sigma=st.floats(0.2, 5),
    n=st.integers(1, 500),
)
def test_derived_minimizer_reproduces_closed_form(m, delta, sigma, n):
    prior = NormalPrior(delta, m, sigma)
    p = exact_profile_normal(prior, NormalTruth(0.0, sigma), n)
    assert p.n_tilde_continuous == pytest.approx(closed_form_n_tilde_normal(prior, n), rel=1e-9)
    assert n - p.n_tilde_continuous == pytest.approx(closed_form_ess_normal(prior, n), rel=1e-9, abs=1e-9)


@settings(max_examples=50)
@given(m=st.integers(1, 60), delta=st.sampled_from([0.0, 0.05, 0.1, 0.2]), n=st.integers(20, 300))
def test_grid_ess_is_rounded_closed_form(m, delta, n):
    prior = NormalPrior(delta, m)
    est = exact_estimate(NormalModel(NormalTruth(0.0)), prior, n, NULL)
    assert abs(est.ess - closed_form_ess_normal(prior, n)) <= 0.5 + 1e-9


def test_no_deviation_ess_increasing_and_bounded():
    n = 100
    values = [closed_form_ess_normal(NormalPrior(0, m), n) for m in np.linspace(0.1, 300, 400)]
    assert np.all(np.diff(values) > 0)
    for m in (0.5, 5, 50, 150, 1000):
        assert closed_form_ess_normal(NormalPrior(0, m), n) <= min(m, n)


@pytest.mark.parametrize("delta, sigma", [(0.5, 1.0), (0.1, 1.0), (0.3, 2.0)])
def test_deviation_flip_at_sigma_over_delta_squared(delta, sigma):
    m_flip = (sigma / delta) ** 2
    assert closed_form_ess_normal(NormalPrior(delta, m_flip, sigma), 100) == pytest.approx(0.0, abs=1e-9)
    assert closed_form_ess_normal(NormalPrior(delta, 0.9 * m_flip, sigma), 100) > 0
    assert closed_form_ess_normal(NormalPrior(delta, 1.1 * m_flip, sigma), 100) < 0


@pytest.mark.parametrize(
    "prior, truth, n",
    [(NormalPrior(0, 20), NormalTruth(0), 100), (NormalPrior(0.4, 5, 1.5), NormalTruth(0.2, 1.5), 30)],
)
def test_monte_carlo_within_four_se(prior, truth, n):
    model = NormalModel(truth)
    mc = simulate_profile(model, prior, n, 200_000, derive_stream(7, 0, 2))
    exact = model.exact_profile(prior, n)
    assert abs(mc.u_bayes - exact.u_bayes) <= 4 * mc.se_u_bayes
    assert abs(mc.kappa - exact.kappa) <= 4 * mc.se_kappa


def test_invalid_prior_rejected():
    with pytest.raises(ValidationError):
        NormalPrior(0, 0)
    with pytest.raises(ValidationError):
        NormalTruth(0, -1)
