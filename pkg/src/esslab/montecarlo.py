"""Deterministic Monte Carlo and bootstrap estimation of concordance profiles.

Random streams are derived from ``(seed, replicate, role)`` with numpy's
``SeedSequence`` spawn keys feeding a counter-based Philox generator, so a
replicate's draws never depend on which thread runs it or in what order.
"""
from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Protocol, Sequence

import numpy as np

from .core import ConcordanceProfile, EssEstimate, Method, SupportDirection, default_grid, estimate_ess
from .exceptions import AllDrawsDegenerate, EssError, ValidationError

logger = logging.getLogger(__name__)

# draws per batch; fixed so chunking never depends on the schedule
CHUNK = 4096

THREADS_ENV = "ESSLAB_THREADS"


class StreamRole(enum.IntEnum):
    POOL = 0
    BOOTSTRAP = 1
    DIRECT = 2


def derive_stream(seed: int, replicate_id: int, role: StreamRole | int) -> np.random.Generator:
    """Independent, reproducible generator keyed by ``(seed, replicate_id, role)``."""
    if seed < 0 or replicate_id < 0:
        raise ValidationError("seed", "seed and replicate_id must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replicate_id), int(StreamRole(role))))
    return np.random.Generator(np.random.Philox(ss))


def engine_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(THREADS_ENV, f"must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(THREADS_ENV, "must be >= 1")
    return value


@dataclass(frozen=True)
class RunConfig:
    """Knobs of the replicated bootstrap protocol."""

    pool_size: int = 5000
    bootstrap_count: int = 10_000
    bayes_n: int = 100
    replicates: int = 100
    seed: int = 20240501
    grid: tuple[int, int] | None = None
    fresh_pool: bool = True

    def __post_init__(self):
        for name in ("pool_size", "bootstrap_count", "bayes_n", "replicates"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValidationError(name, f"must be an integer >= 1, got {value!r}")
        if self.bootstrap_count < 2:
            raise ValidationError("bootstrap_count", "need at least 2 resamples")
        if self.bayes_n > self.pool_size:
            raise ValidationError("pool_size", f"pool_size={self.pool_size} < bayes_n={self.bayes_n}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed", "must be a 64-bit unsigned integer")
        if self.grid is not None:
            lo, hi = self.grid
            if not 1 <= lo <= hi:
                raise ValidationError("grid", f"need 1 <= lo <= hi, got {self.grid!r}")
            object.__setattr__(self, "grid", (int(lo), int(hi)))

    @property
    def search_grid(self) -> tuple[int, int]:
        return self.grid if self.grid is not None else default_grid(self.bayes_n)

    def with_updates(self, **changes) -> "RunConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class EstimateSeries:
    per_replicate: tuple[EssEstimate | None, ...]
    mean_ess: float
    sd_ess: float
    n_failed: int = 0
    diagnostics: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_estimates(cls, estimates: Sequence[EssEstimate | None], **diagnostics) -> "EstimateSeries":
        good = np.array([e.ess for e in estimates if e is not None], dtype=float)
        n_failed = sum(e is None for e in estimates)
        if good.size == 0:
            mean = sd = math.nan
        else:
            mean = float(good.mean())
            sd = float(good.std(ddof=1)) if good.size > 1 else 0.0
        return cls(tuple(estimates), mean, sd, n_failed, dict(diagnostics))

    @property
    def ess_values(self) -> np.ndarray:
        return np.array([e.ess for e in self.per_replicate if e is not None], dtype=float)


ZFn = Callable[[Any], np.ndarray]
Sampler = Callable[[np.random.Generator, int, int], Any]


def _collect(sampler: Sampler, n: int, draws: int, stream, pairs, degenerate_fn=None):
    """Draw ``draws`` samples in fixed-size chunks and evaluate every (z, f) pair."""
    zs = [[] for _ in pairs]
    fs = [[] for _ in pairs]
    degen = []
    remaining = draws
    while remaining > 0:
        size = min(CHUNK, remaining)
        batch = sampler(stream, n, size)
        for i, (z_fn, f_fn) in enumerate(pairs):
            zs[i].append(np.asarray(z_fn(batch), dtype=float))
            fs[i].append(np.asarray(f_fn(batch), dtype=float))
        flags = degenerate_fn(batch) if degenerate_fn is not None else None
        if flags is not None:
            degen.append(np.asarray(flags, dtype=bool))
        remaining -= size
    mask = np.concatenate(degen) if degen else None
    return [np.concatenate(z) for z in zs], [np.concatenate(f) for f in fs], mask


def profile_from_draws(z_values, f_values, n: int, degenerate_mask=None) -> ConcordanceProfile:
    """Sample-mean profile from per-draw Bayesian Z values and frequentist summands.

    NaN summands mark unusable draws and are dropped; ``degenerate_mask``
    only feeds the diagnostics (those draws were already clamped).
    """
    z = np.asarray(z_values, dtype=float)
    z2 = np.square(z)
    f = np.asarray(f_values, dtype=float)
    ok = np.isfinite(z2) & np.isfinite(f)
    draws = z2.size
    if not ok.any():
        raise AllDrawsDegenerate(f"all {draws} draws were degenerate")
    if degenerate_mask is not None and np.all(degenerate_mask):
        raise AllDrawsDegenerate(f"all {draws} draws hit the clamping rule")
    z2, f = z2[ok], f[ok]
    k = z2.size
    se_u = float(z2.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    se_k = float(f.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0
    diagnostics = {
        "draws": float(draws),
        "dropped_draws": float(draws - k),
        "mean_abs_z_bayes": float(np.abs(z[ok]).mean()),
        # |Z_F| at n_tilde = n
        "mean_abs_z_freq": float(np.sqrt(n * f).mean()),
    }
    if degenerate_mask is not None:
        diagnostics["clamped_fraction"] = float(np.mean(degenerate_mask))
    return ConcordanceProfile(float(z2.mean()), float(f.mean()), int(n), se_u, se_k, diagnostics)


def estimate_profile_mc(
    z_bayes_fn: ZFn,
    per_unit_freq_fn: ZFn,
    sampler: Sampler,
    n: int,
    draws: int,
    stream: np.random.Generator,
    degenerate_fn: ZFn | None = None,
) -> ConcordanceProfile:
    """Monte Carlo profile: ``sampler(stream, n, size)`` yields a batch of ``size`` samples."""
    if draws < 2:
        raise ValidationError("draws", "need at least 2 draws")
    zs, fs, mask = _collect(sampler, n, draws, stream, [(z_bayes_fn, per_unit_freq_fn)], degenerate_fn)
    return profile_from_draws(zs[0], fs[0], n, mask)


def resample_rows(stream: np.random.Generator, pool, n: int, size: int):
    """``size`` with-replacement resamples of ``n`` rows, shape ``(size, n, ...)``."""
    pool = np.asarray(pool)
    idx = stream.integers(0, pool.shape[0], size=(size, n))
    return pool[idx]


def bootstrap_profile(
    pool,
    n: int,
    b: int,
    z_bayes_fn: ZFn,
    per_unit_freq_fn: ZFn,
    stream: np.random.Generator,
    resampler: Callable | None = None,
    degenerate_fn: ZFn | None = None,
) -> ConcordanceProfile:
    """Profile estimated from ``b`` size-``n`` resamples of ``pool``.

    By default the z functions see raw resamples of shape ``(size, n, ...)``;
    a ``resampler(stream, pool, n, size)`` may reduce them to sufficient
    statistics instead.
    """
    if len(pool) < n:
        raise ValidationError("pool", f"pool of {len(pool)} rows is smaller than n={n}")
    if b < 2:
        raise ValidationError("bootstrap_count", "need at least 2 resamples")
    resampler = resampler or resample_rows
    return estimate_profile_mc(
        z_bayes_fn,
        per_unit_freq_fn,
        lambda rng, n_, size: resampler(rng, pool, n_, size),
        n,
        b,
        stream,
        degenerate_fn,
    )


class BootstrapModel(Protocol):
    """What a model family supplies to the replicated protocol.

    ``stats`` is whatever batch object ``resample``/``simulate`` return
    (usually per-resample sufficient statistics).
    """

    def draw_pool(self, rng: np.random.Generator, size: int) -> Any: ...

    def resample(self, rng: np.random.Generator, pool: Any, n: int, size: int) -> Any: ...

    def simulate(self, rng: np.random.Generator, n: int, size: int) -> Any: ...

    def z_bayes(self, prior: Any, stats: Any, n: int) -> np.ndarray: ...

    def freq_unit(self, stats: Any, n: int) -> np.ndarray: ...

    def degenerate(self, stats: Any, n: int) -> np.ndarray | None: ...


def _replicate(config: RunConfig, model: BootstrapModel, priors, direction, r, shared_pool):
    n = config.bayes_n
    pool = shared_pool
    if pool is None:
        pool = model.draw_pool(derive_stream(config.seed, r, StreamRole.POOL), config.pool_size)
    pairs = [
        (lambda s, p=p: model.z_bayes(p, s, n), lambda s: model.freq_unit(s, n)) for p in priors
    ]
    zs, fs, mask = _collect(
        lambda rng, n_, size: model.resample(rng, pool, n_, size),
        n,
        config.bootstrap_count,
        derive_stream(config.seed, r, StreamRole.BOOTSTRAP),
        pairs,
        lambda s: model.degenerate(s, n),
    )
    out = []
    for z, f in zip(zs, fs):
        try:
            profile = profile_from_draws(z, f, n, mask)
            out.append(estimate_ess(profile, direction, Method.BOOTSTRAP, config.search_grid))
        except EssError as exc:
            logger.warning("replicate %d failed: %s", r, exc)
            out.append(None)
    return out


def run_replicated_sweep(
    config: RunConfig,
    model: BootstrapModel,
    priors: Sequence[Any],
    direction: SupportDirection,
) -> list[EstimateSeries]:
    """Replicated bootstrap protocol for several priors sharing the same data.

    Every replicate draws a pool (fresh per replicate unless
    ``config.fresh_pool`` is false), takes ``bootstrap_count`` resamples of
    size ``bayes_n`` and evaluates each prior on those same resamples.
    Failed replicates are excluded from the mean and counted.
    """
    direction = SupportDirection(direction)
    shared_pool = None
    if not config.fresh_pool:
        shared_pool = model.draw_pool(derive_stream(config.seed, 0, StreamRole.POOL), config.pool_size)
    reps = range(config.replicates)
    threads = min(engine_threads(), config.replicates)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(lambda r: _replicate(config, model, priors, direction, r, shared_pool), reps))
    else:
        rows = [_replicate(config, model, priors, direction, r, shared_pool) for r in reps]
    series = []
    for j in range(len(priors)):
        estimates = [row[j] for row in rows]
        series.append(
            EstimateSeries.from_estimates(
                estimates,
                pool_size=config.pool_size,
                bootstrap_count=config.bootstrap_count,
                fresh_pool=float(config.fresh_pool),
            )
        )
    return series


def run_replicated(config: RunConfig, model: BootstrapModel, prior: Any, direction: SupportDirection) -> EstimateSeries:
    return run_replicated_sweep(config, model, [prior], direction)[0]


def simulate_profile(model: BootstrapModel, prior: Any, n: int, draws: int, stream: np.random.Generator) -> ConcordanceProfile:
    """Plain Monte Carlo profile drawn from the model's truth (no pool)."""
    return estimate_profile_mc(
        lambda s: model.z_bayes(prior, s, n),
        lambda s: model.freq_unit(s, n),
        model.simulate,
        n,
        draws,
        stream,
        lambda s: model.degenerate(s, n),
    )
