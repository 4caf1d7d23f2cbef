"""Prior audit for a regression slope on tabular data, plus a synthetic eQTL generator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats

from .core import SupportDirection
from .estimators import residual_sd
from .exceptions import ColumnMissing, DegenerateDesign, ValidationError
from .linreg import RegressionModel, SlopePrior, sufficient_stats
from .montecarlo import RunConfig, run_replicated


@dataclass(frozen=True)
class AuditRequest:
    response_column: str
    covariate_column: str
    prior: SlopePrior
    bayes_n: int = 540
    config: RunConfig = field(default_factory=lambda: RunConfig(pool_size=10**9, replicates=1, fresh_pool=False))
    direction: SupportDirection = SupportDirection.SUPPORTS_ALTERNATIVE
    sigma: float | None = None


def synthetic_eqtl(
    n: int = 576,
    beta: float = 0.08,
    allele_freq: float = 0.3,
    sigma: float | None = None,
    p_value: float = 0.0616,
    seed: int = 0,
    planted: bool = True,
) -> pd.DataFrame:
    """Genotype dosage in {0, 1, 2} and expression ``beta * genotype + noise``.

    With ``planted=True`` the noise is residualised against ``[1, genotype]``
    so the fitted slope equals ``beta`` exactly. When ``sigma`` is None it is
    set so the two-sided least-squares p-value of the slope equals
    ``p_value`` (this needs ``planted=True``).
    """
    if not 0 < allele_freq < 1:
        raise ValidationError("allele_freq", "must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    g = rng.binomial(2, allele_freq, n).astype(float)
    if np.ptp(g) == 0:
        raise DegenerateDesign("generated genotype is constant; change seed or allele_freq")
    noise = rng.standard_normal(n)
    if sigma is None:
        if not planted:
            raise ValidationError("sigma", "p-value matching needs planted=True")
        if not 0 < p_value < 1:
            raise ValidationError("p_value", "must lie in (0, 1)")
        sxx_c = np.sum((g - g.mean()) ** 2)
        sigma = abs(beta) * np.sqrt(sxx_c) / stats.norm.isf(p_value / 2)
    if planted:
        design = np.column_stack([np.ones(n), g])
        coef, *_ = np.linalg.lstsq(design, noise, rcond=None)
        noise = noise - design @ coef
        noise *= sigma / np.sqrt(np.sum(noise**2) / (n - 2))
    else:
        noise *= sigma
    return pd.DataFrame({"genotype": g.astype(int), "expression": beta * g + noise})


def prior_audit(data: pd.DataFrame, request: AuditRequest) -> dict:
    """Bootstrap ESS of a slope prior plus Bayesian/frequentist Z summaries.

    Resamples of ``bayes_n`` rows are drawn from the table and the slope
    statistics are centred (least squares with an intercept). The noise SD
    is the full-data residual SD unless the request fixes it.
    """
    for col in (request.response_column, request.covariate_column):
        if col not in data.columns:
            raise ColumnMissing(col)
    x = data[request.covariate_column].to_numpy(dtype=float)
    y = data[request.response_column].to_numpy(dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size == 0 or np.ptp(x) == 0:
        raise DegenerateDesign(f"covariate {request.covariate_column!r} is constant")
    if request.bayes_n > x.size:
        raise ValidationError("bayes_n", f"bayes_n={request.bayes_n} exceeds {x.size} usable rows")

    sigma = request.sigma if request.sigma is not None else residual_sd(x, y)
    beta1, _, sxx = sufficient_stats(x, y, center=True)
    z_full = beta1 * np.sqrt(sxx) / sigma

    config = request.config.with_updates(
        bayes_n=request.bayes_n, pool_size=max(request.config.pool_size, request.bayes_n), fresh_pool=False
    )
    model = RegressionModel(np.column_stack([x, y]), float(sigma))
    series = run_replicated(config, model, request.prior, request.direction)
    good = [e for e in series.per_replicate if e is not None]
    if not good:
        raise DegenerateDesign("every bootstrap replicate failed")
    first = good[0]
    return {
        "ess": float(series.mean_ess),
        "ess_sd": float(series.sd_ess),
        "n_tilde_star": float(np.mean([e.n_tilde_star for e in good])),
        "ess_continuous": float(np.mean([e.ess_continuous for e in good])),
        "mean_abs_z_bayes": float(np.mean([e.diagnostics["mean_abs_z_bayes"] for e in good])),
        "mean_abs_z_freq": float(np.mean([e.diagnostics["mean_abs_z_freq"] for e in good])),
        "z_freq_full": float(z_full),
        "p_value_upper": float(stats.norm.sf(z_full)),
        "p_value_two_sided": float(2 * stats.norm.sf(abs(z_full))),
        "beta1_hat": float(beta1),
        "sigma": float(sigma),
        "rows": int(x.size),
        "bayes_n": int(request.bayes_n),
        "prior_mean": float(request.prior.mu),
        "prior_var": float(request.prior.var1),
        "direction": SupportDirection(request.direction).value,
        "replicates": int(config.replicates),
        "n_failed": int(series.n_failed),
        "bootstrap_count": int(config.bootstrap_count),
        "seed": int(config.seed),
        "at_boundary": bool(first.at_boundary),
    }
