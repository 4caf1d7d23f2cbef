import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from esslab.beta import (
    BernoulliPairTruth,
    BernoulliTruth,
    BetaOneModel,
    BetaPrior,
    BetaTwoModel,
    clamp_proportion,
    exact_profile_beta_one,
    exact_profile_beta_two,
    freq_unit_beta_two,
    posterior_approx_beta,
    z_bayes_beta_one,
    z_bayes_beta_two,
    z_freq_beta_one,
    z_freq_beta_two,
)
from esslab.estimators import exact_estimate
from esslab.exceptions import DegenerateVariance, EnumerationCapExceeded, ValidationError
from esslab.montecarlo import derive_stream, simulate_profile

from conftest import ALT, NULL


def pmf(n, k, p):
    return math.comb(n, k) * p**k * (1 - p) ** (n - k)


def loop_u_one(a, b, theta, theta0, n):
    total = 0.0
    for s in range(n + 1):
        big_n = a + b + n
        mu = (a + s) / big_n
        var = (a + s) * (b + n - s) / (big_n**2 * (big_n + 1))
        total += pmf(n, s, theta) * (mu - theta0) ** 2 / var
    return total


def loop_profile_two(p1, p2, t1, t2, n):
    eps = 1 / (2 * n)
    u = kappa = 0.0
    for sx in range(n + 1):
        for sy in range(n + 1):
            w = pmf(n, sx, t1) * pmf(n, sy, t2)
            mx, vx = posterior_approx_beta(p1, sx, n)
            my, vy = posterior_approx_beta(p2, sy, n)
            u += w * (mx - my) ** 2 / (vx + vy)
            x, y = sx / n, sy / n
            xc, yc = min(max(x, eps), 1 - eps), min(max(y, eps), 1 - eps)
            kappa += w * (x - y) ** 2 / (xc * (1 - xc) + yc * (1 - yc))
    return u, kappa


@pytest.mark.parametrize(
    "prior, s, n, expected",
    [
        (BetaPrior(1, 1), 5, 10, (0.5, 36 / (144 * 13))),
        (BetaPrior(4, 6), 0, 0, (0.4, 24 / 1100)),
        (BetaPrior(7, 3), 70, 100, (0.7, 77 * 33 / (110**2 * 111))),
    ],
)
def test_posterior_examples(prior, s, n, expected):
    assert posterior_approx_beta(prior, s, n) == pytest.approx(expected)


@given(a=st.floats(0.01, 50), b=st.floats(0.01, 50), n=st.integers(0, 300), frac=st.floats(0, 1))
def test_posterior_moments_are_exact_beta_moments(a, b, n, frac):
    s = round(frac * n)
    mu, var = posterior_approx_beta(BetaPrior(a, b), s, n)
    exact = stats.beta(a + s, b + n - s)
    assert mu == pytest.approx(exact.mean(), rel=1e-12)
    assert var == pytest.approx(exact.var(), rel=1e-9)


def test_posterior_rejects_out_of_range_successes():
    with pytest.raises(ValidationError):
        posterior_approx_beta(BetaPrior(1, 1), 11, 10)


def test_z_bayes_one_examples():
    assert z_bayes_beta_one(BetaPrior(7, 3), 70, 100, 0.7) == pytest.approx(0.0, abs=1e-12)
    expected = (75 / 110 - 0.7) / math.sqrt(75 * 35 / (110**2 * 111))
    assert z_bayes_beta_one(BetaPrior(5, 5), 70, 100, 0.7) == pytest.approx(expected)
    assert expected == pytest.approx(-0.4113, abs=5e-4)


def test_z_freq_one_examples():
    assert z_freq_beta_one(0.7, 0.7, 40) == 0.0
    assert z_freq_beta_one(0.8, 0.7, 100) == pytest.approx(2.182, abs=5e-4)
    assert z_freq_beta_one(0.8, 0.7, 25) == pytest.approx(1.091, abs=5e-4)


def test_z_two_sample_examples():
    assert z_bayes_beta_two(BetaPrior(3, 2), BetaPrior(3, 2), 12, 12, 30) == 0.0
    var_x = 77 * 33 / (110**2 * 111)
    var_y = 22 * 88 / (110**2 * 111)
    assert z_bayes_beta_two(BetaPrior(7, 3), BetaPrior(2, 8), 70, 20, 100) == pytest.approx(
        0.5 / math.sqrt(var_x + var_y)
    )
    assert z_bayes_beta_two(BetaPrior(7, 3), BetaPrior(2, 8), 70, 20, 100) == pytest.approx(8.66, abs=0.01)
    assert z_bayes_beta_two(BetaPrior(4, 6), BetaPrior(4, 6), 40, 40, 100) == 0.0
    assert z_freq_beta_two(0.3, 0.3, 50) == 0.0
    assert z_freq_beta_two(0.7, 0.2, 100) == pytest.approx(8.22, abs=5e-3)
    assert z_freq_beta_two(0.7, 0.2, 25) == pytest.approx(4.11, abs=5e-3)


def test_z_freq_two_degenerate_raises():
    with pytest.raises(DegenerateVariance):
        z_freq_beta_two(1.0, 0.0, 10)


def test_clamp_keeps_summand_finite():
    assert clamp_proportion(0.0, 10) == 0.05
    assert clamp_proportion(1.0, 10) == 0.95
    val = freq_unit_beta_two(10, 0, 10)
    assert val == pytest.approx(1.0 / (2 * 0.05 * 0.95))


def test_one_sample_hand_enumeration_n1():
    prior = BetaPrior(1, 1)
    # s=0: Beta(1,2) mean 1/3 var 2/36; s=1: Beta(2,1) mean 2/3 var 2/36
    z2 = (1 / 3 - 0.5) ** 2 / (2 / 36)
    p = exact_profile_beta_one(prior, BernoulliTruth(0.5), 0.5, 1)
    assert p.u_bayes == pytest.approx(0.5 * z2 + 0.5 * z2)
    assert p.kappa == pytest.approx(0.25 / 0.25)


@settings(max_examples=30, deadline=None)
@given(
    a=st.floats(0.1, 20),
    b=st.floats(0.1, 20),
    theta=st.floats(0.05, 0.95),
    theta0=st.floats(0.05, 0.95),
    n=st.integers(1, 120),
)
def test_one_sample_matches_loop_oracle(a, b, theta, theta0, n):
    p = exact_profile_beta_one(BetaPrior(a, b), BernoulliTruth(theta), theta0, n)
    assert p.u_bayes == pytest.approx(loop_u_one(a, b, theta, theta0, n), rel=1e-9)
    kappa = sum(pmf(n, s, theta) * (s / n - theta0) ** 2 for s in range(n + 1)) / (theta0 * (1 - theta0))
    assert p.kappa == pytest.approx(kappa, rel=1e-9)


@pytest.mark.parametrize(
    "p1, p2, t1, t2, n",
    [
        (BetaPrior(4, 6), BetaPrior(4, 6), 0.4, 0.4, 30),
        (BetaPrior(7, 3), BetaPrior(2, 8), 0.7, 0.2, 25),
        (BetaPrior(0.4, 0.6), BetaPrior(9, 1), 0.9, 0.05, 12),
    ],
)
def test_two_sample_matches_loop_oracle(p1, p2, t1, t2, n):
    prof = exact_profile_beta_two(p1, p2, BernoulliPairTruth(t1, t2), n)
    u, kappa = loop_profile_two(p1, p2, t1, t2, n)
    assert prof.u_bayes == pytest.approx(u, rel=1e-10)
    assert prof.kappa == pytest.approx(kappa, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(
    a1=st.floats(0.1, 10),
    b1=st.floats(0.1, 10),
    a2=st.floats(0.1, 10),
    b2=st.floats(0.1, 10),
    t1=st.floats(0.05, 0.95),
    t2=st.floats(0.05, 0.95),
    n=st.integers(1, 80),
)
def test_two_sample_swap_symmetry(a1, b1, a2, b2, t1, t2, n):
    p, q = BetaPrior(a1, b1), BetaPrior(a2, b2)
    fwd = exact_profile_beta_two(p, q, BernoulliPairTruth(t1, t2), n)
    rev = exact_profile_beta_two(q, p, BernoulliPairTruth(t2, t1), n)
    assert fwd.u_bayes == pytest.approx(rev.u_bayes, rel=1e-10)
    assert fwd.kappa == pytest.approx(rev.kappa, rel=1e-10)


def test_enumeration_caps():
    with pytest.raises(EnumerationCapExceeded):
        exact_profile_beta_one(BetaPrior(1, 1), BernoulliTruth(0.5), 0.5, 2001)
    with pytest.raises(EnumerationCapExceeded):
        exact_profile_beta_two(BetaPrior(1, 1), BetaPrior(1, 1), BernoulliPairTruth(0.5, 0.5), 401)


def test_perfect_prior_slope_near_one():
    model = BetaOneModel(BernoulliTruth(0.7), 0.7)
    ess = [exact_estimate(model, BetaPrior.from_mean_strength(0.7, k), 100, NULL).ess_continuous for k in range(1, 21)]
    assert np.all(np.diff(ess) > 0)
    # the bootstrap sweep of this setting averages about 5.85 at a+b=10
    assert exact_estimate(model, BetaPrior(7, 3), 100, NULL).ess_continuous == pytest.approx(5.85, abs=2)
    slope = np.polyfit(np.arange(1, 21), ess, 1)[0]
    assert 0.8 < slope < 1.2


def test_deviating_prior_gives_negative_ess():
    model = BetaOneModel(BernoulliTruth(0.7), 0.7)
    assert exact_estimate(model, BetaPrior(10, 10), 100, NULL).ess < 0


def test_two_sample_examples_within_acceptance_tolerance():
    null_model = BetaTwoModel(BernoulliPairTruth(0.4, 0.4))
    alt_model = BetaTwoModel(BernoulliPairTruth(0.7, 0.2))
    assert abs(exact_estimate(null_model, (BetaPrior(4, 6), BetaPrior(4, 6)), 100, NULL).ess - 10) <= 2
    assert abs(exact_estimate(alt_model, (BetaPrior(7, 3), BetaPrior(2, 8)), 100, ALT).ess - 9) <= 3
    assert abs(exact_estimate(alt_model, (BetaPrior(7, 3), BetaPrior(7, 3)), 100, ALT).ess + 16) <= 3


@pytest.mark.parametrize(
    "prior, theta, theta0, n",
    [(BetaPrior(7, 3), 0.7, 0.7, 100), (BetaPrior(1.5, 4), 0.3, 0.4, 60), (BetaPrior(10, 10), 0.7, 0.7, 200)],
)
def test_one_sample_mc_within_four_se(prior, theta, theta0, n):
    model = BetaOneModel(BernoulliTruth(theta), theta0)
    mc = simulate_profile(model, prior, n, 200_000, derive_stream(11, 0, 2))
    exact = model.exact_profile(prior, n)
    assert abs(mc.u_bayes - exact.u_bayes) <= 4 * mc.se_u_bayes
    assert abs(mc.kappa - exact.kappa) <= 4 * mc.se_kappa


def test_two_sample_mc_within_four_se():
    model = BetaTwoModel(BernoulliPairTruth(0.7, 0.2))
    priors = (BetaPrior(7, 3), BetaPrior(2, 8))
    mc = simulate_profile(model, priors, 50, 200_000, derive_stream(3, 0, 2))
    exact = model.exact_profile(priors, 50)
    assert abs(mc.u_bayes - exact.u_bayes) <= 4 * mc.se_u_bayes
    assert abs(mc.kappa - exact.kappa) <= 4 * mc.se_kappa


def test_truth_bounds_enforced():
    with pytest.raises(ValidationError):
        BernoulliTruth(1.0)
    with pytest.raises(ValidationError):
        BernoulliPairTruth(0.5, 0.0)
    with pytest.raises(ValidationError):
        BetaPrior(0, 1)
