import dataclasses

import numpy as np
import pytest

from esslab.beta import BernoulliTruth, BetaOneModel, BetaPrior
from esslab.exceptions import AllDrawsDegenerate, ValidationError
from esslab.montecarlo import (
    CHUNK,
    RunConfig,
    StreamRole,
    bootstrap_profile,
    derive_stream,
    engine_threads,
    estimate_profile_mc,
    profile_from_draws,
    run_replicated,
    run_replicated_sweep,
    simulate_profile,
)
from esslab.normal import NormalModel, NormalPrior, NormalTruth

from conftest import NULL

SMALL = RunConfig(pool_size=800, bootstrap_count=3000, bayes_n=100, replicates=6, seed=99)


def test_stream_determinism():
    a = derive_stream(42, 3, StreamRole.POOL).random(100)
    b = derive_stream(42, 3, StreamRole.POOL).random(100)
    assert np.array_equal(a, b)


def test_streams_differ_by_replicate_and_role():
    base = derive_stream(42, 0, StreamRole.POOL).random(100)
    others = [
        derive_stream(42, 1, StreamRole.POOL).random(100),
        derive_stream(42, 0, StreamRole.BOOTSTRAP).random(100),
        derive_stream(42, 0, StreamRole.DIRECT).random(100),
        derive_stream(43, 0, StreamRole.POOL).random(100),
    ]
    for other in others:
        assert not np.any(base == other)


def test_stream_rejects_negative_seed():
    with pytest.raises(ValidationError):
        derive_stream(-1, 0, StreamRole.POOL)


def test_constant_statistic_has_exact_u_and_zero_se():
    prof = estimate_profile_mc(
        lambda b: np.full(len(b), 1.5),
        lambda b: np.full(len(b), 0.02),
        lambda rng, n, size: rng.random(size),
        50,
        1000,
        derive_stream(0, 0, StreamRole.DIRECT),
    )
    assert prof.u_bayes == 2.25
    assert prof.se_u_bayes == 0.0
    assert prof.kappa == pytest.approx(0.02)


def test_profile_from_draws_drops_nan_and_reports():
    prof = profile_from_draws([1.0, 2.0, np.nan], [0.1, 0.3, 0.2], 10)
    assert prof.u_bayes == pytest.approx(2.5)
    assert prof.kappa == pytest.approx(0.2)
    assert prof.diagnostics["dropped_draws"] == 1.0
    with pytest.raises(AllDrawsDegenerate):
        profile_from_draws([np.nan], [np.nan], 10)
    with pytest.raises(AllDrawsDegenerate):
        profile_from_draws([1.0, 2.0], [0.1, 0.1], 10, degenerate_mask=np.array([True, True]))


def test_draws_must_be_at_least_two():
    with pytest.raises(ValidationError):
        estimate_profile_mc(np.asarray, np.asarray, lambda r, n, s: r.random(s), 1, 1, derive_stream(0, 0, 0))


def test_normal_mc_matches_exact_with_a_million_draws():
    model = NormalModel(NormalTruth(0.0))
    prior = NormalPrior(0, 20)
    mc = simulate_profile(model, prior, 100, 1_000_000, derive_stream(1, 0, StreamRole.DIRECT))
    assert abs(mc.u_bayes - 100 / 120) <= 4 * mc.se_u_bayes


def test_beta_mc_matches_enumeration_with_a_million_draws():
    model = BetaOneModel(BernoulliTruth(0.7), 0.7)
    prior = BetaPrior(7, 3)
    mc = simulate_profile(model, prior, 100, 1_000_000, derive_stream(2, 0, StreamRole.DIRECT))
    exact = model.exact_profile(prior, 100)
    assert abs(mc.u_bayes - exact.u_bayes) <= 4 * mc.se_u_bayes
    assert abs(mc.kappa - exact.kappa) <= 4 * mc.se_kappa


def test_se_calibration_over_seeds():
    model = NormalModel(NormalTruth(0.1))
    prior = NormalPrior(0.3, 10)
    runs = [simulate_profile(model, prior, 50, 4000, derive_stream(s, 0, StreamRole.DIRECT)) for s in range(60)]
    empirical = np.std([r.u_bayes for r in runs], ddof=1)
    reported = np.mean([r.se_u_bayes for r in runs])
    assert 1 / 1.5 <= empirical / reported <= 1.5


def test_bootstrap_of_constant_pool():
    pool = np.ones(300, dtype=np.int64)
    model = BetaOneModel(BernoulliTruth(0.5), 0.6)
    prior = BetaPrior(2, 2)
    prof = bootstrap_profile(
        pool, 40, 500, lambda s: model.z_bayes(prior, s, 40), lambda s: model.freq_unit(s, 40),
        derive_stream(0, 0, StreamRole.BOOTSTRAP), resampler=model.resample,
    )
    assert prof.u_bayes == pytest.approx(float(model.z_bayes(prior, 40, 40)) ** 2)
    assert prof.se_u_bayes == 0.0


def test_bootstrap_rejects_small_pool():
    with pytest.raises(ValidationError):
        bootstrap_profile(np.zeros(5), 10, 100, np.asarray, np.asarray, derive_stream(0, 0, 1))


def _pool_moments(pool, prior, n):
    """Exact resampling moments given the pool: only its mean and variance enter."""
    mean, var = pool.mean(), pool.var()
    m, d = prior.m, prior.delta
    u = (n * var + (n * mean + m * d) ** 2) / (m + n)
    kappa = var / n + mean**2
    return u, kappa


def _boot(model, prior, pool, n, draws, seed):
    return bootstrap_profile(
        pool, n, draws, lambda s: model.z_bayes(prior, s, n), lambda s: model.freq_unit(s, n),
        derive_stream(seed, 0, StreamRole.BOOTSTRAP), resampler=model.resample,
    )


def test_bootstrap_matches_pool_conditional_moments():
    model = NormalModel(NormalTruth(0.05))
    prior = NormalPrior(0.2, 15)
    pool = model.draw_pool(derive_stream(5, 0, StreamRole.POOL), 50_000)
    boot = _boot(model, prior, pool, 100, 100_000, 5)
    u, kappa = _pool_moments(pool, prior, 100)
    assert abs(boot.u_bayes - u) <= 4 * boot.se_u_bayes
    assert abs(boot.kappa - kappa) <= 4 * boot.se_kappa


def test_bootstrap_converges_to_truth_profile():
    mu, n, big_p = 0.05, 100, 50_000
    model = NormalModel(NormalTruth(mu))
    prior = NormalPrior(0.2, 15)
    pool = model.draw_pool(derive_stream(6, 0, StreamRole.POOL), big_p)
    boot = _boot(model, prior, pool, n, 100_000, 6)
    mc = simulate_profile(model, prior, n, 100_000, derive_stream(6, 0, StreamRole.DIRECT))
    # pool sampling error by the delta method (mean var 1/P, variance var 2/P)
    m, d = prior.m, prior.delta
    du = np.hypot(2 * n * (n * mu + m * d) / (m + n), np.sqrt(2) * n / (m + n)) / np.sqrt(big_p)
    dk = np.hypot(2 * mu, np.sqrt(2) / n) / np.sqrt(big_p)
    assert abs(boot.u_bayes - mc.u_bayes) <= 4 * np.sqrt(boot.se_u_bayes**2 + mc.se_u_bayes**2 + du**2)
    assert abs(boot.kappa - mc.kappa) <= 4 * np.sqrt(boot.se_kappa**2 + mc.se_kappa**2 + dk**2)


def test_single_replicate_mean_equals_estimate():
    series = run_replicated(SMALL.with_updates(replicates=1), NormalModel(NormalTruth(0.0)), NormalPrior(0.1, 12), NULL)
    assert len(series.per_replicate) == 1
    assert series.mean_ess == series.per_replicate[0].ess
    assert series.sd_ess == 0.0


def _series_fingerprint(series):
    return [(e.ess, e.n_tilde_continuous, e.diagnostics["u_bayes"], e.diagnostics["kappa"]) for e in series.per_replicate]


def test_results_invariant_to_thread_count(threads):
    model = BetaOneModel(BernoulliTruth(0.7), 0.7)
    priors = [BetaPrior.from_mean_strength(0.5, k) for k in (2, 10, 20)]
    threads(1)
    one = run_replicated_sweep(SMALL, model, priors, NULL)
    threads(4)
    four = run_replicated_sweep(SMALL, model, priors, NULL)
    for a, b in zip(one, four):
        assert _series_fingerprint(a) == _series_fingerprint(b)
        assert a.mean_ess == b.mean_ess


def test_same_seed_same_series_and_new_seed_differs():
    model = NormalModel(NormalTruth(0.0))
    prior = NormalPrior(0.5, 10)
    a = run_replicated(SMALL, model, prior, NULL)
    b = run_replicated(SMALL, model, prior, NULL)
    c = run_replicated(SMALL.with_updates(seed=100), model, prior, NULL)
    assert _series_fingerprint(a) == _series_fingerprint(b)
    assert _series_fingerprint(a) != _series_fingerprint(c)


def test_chunking_is_fixed():
    # draws that straddle a chunk boundary still come from one reproducible stream
    model = NormalModel(NormalTruth(0.0))
    p1 = simulate_profile(model, NormalPrior(), 10, CHUNK + 7, derive_stream(0, 0, 2))
    p2 = simulate_profile(model, NormalPrior(), 10, CHUNK + 7, derive_stream(0, 0, 2))
    assert p1 == p2


def test_shared_pool_option():
    cfg = SMALL.with_updates(fresh_pool=False, replicates=3)
    series = run_replicated(cfg, NormalModel(NormalTruth(0.0)), NormalPrior(0.5, 10), NULL)
    assert series.n_failed == 0
    assert series.diagnostics["fresh_pool"] == 0.0


@dataclasses.dataclass(frozen=True)
class FlakyModel:
    """Normal model whose statistics are unusable on odd-numbered pools."""

    inner: NormalModel

    def draw_pool(self, rng, size):
        pool = self.inner.draw_pool(rng, size)
        return pool if rng.random() < 0.5 else np.full(size, np.nan)

    def resample(self, rng, pool, n, size):
        return self.inner.resample(rng, pool, n, size)

    def simulate(self, rng, n, size):
        return self.inner.simulate(rng, n, size)

    def z_bayes(self, prior, sums, n):
        return self.inner.z_bayes(prior, sums, n)

    def freq_unit(self, sums, n):
        return self.inner.freq_unit(sums, n)

    def degenerate(self, sums, n):
        return None


def test_failed_replicates_are_excluded_and_counted():
    series = run_replicated(
        SMALL.with_updates(replicates=12), FlakyModel(NormalModel(NormalTruth(0.0))), NormalPrior(0, 10), NULL
    )
    failed = sum(e is None for e in series.per_replicate)
    assert 0 < failed < 12
    assert series.n_failed == failed
    assert series.mean_ess == pytest.approx(np.mean([e.ess for e in series.per_replicate if e is not None]))


@pytest.mark.parametrize(
    "kwargs", [dict(pool_size=50, bayes_n=100), dict(replicates=0), dict(bootstrap_count=1), dict(seed=-1), dict(grid=(5, 2))]
)
def test_run_config_validation(kwargs):
    with pytest.raises(ValidationError):
        RunConfig(**kwargs)


def test_engine_threads_env(threads):
    threads(3)
    assert engine_threads() == 3
    threads("zero")
    with pytest.raises(ValidationError):
        engine_threads()
    threads(0)
    with pytest.raises(ValidationError):
        engine_threads()
