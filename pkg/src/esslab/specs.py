"""Build models, priors and sweeps from plain dictionaries (CLI flags and JSON configs)."""
from __future__ import annotations

import math
from typing import Any, Mapping

import jsonschema
import pandas as pd

from .baselines import PROVENANCE, morita_ess, reimherr_mse_ess, reimherr_mse_sweep
from .beta import BernoulliPairTruth, BernoulliTruth, BetaOneModel, BetaPrior, BetaTwoModel
from .core import Family, Method, SupportDirection, estimate_ess
from .estimators import mc_estimate
from .exceptions import MinimizerAtBoundary, ValidationError
from .linreg import SlopePrior, TwoGroupModel, TwoGroupTruth
from .montecarlo import RunConfig, run_replicated_sweep
from .normal import NormalModel, NormalPrior, NormalTruth

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 1}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "pool_size": _COUNT,
        "bootstrap_count": {"type": "integer", "minimum": 2},
        "bayes_n": _COUNT,
        "replicates": _COUNT,
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "grid": {"type": "array", "items": _COUNT, "minItems": 2, "maxItems": 2},
        "fresh_pool": {"type": "boolean"},
    },
}


def _obj(props: dict, required=()):
    return {"type": "object", "additionalProperties": False, "properties": props, "required": list(required)}


PRIOR_KEYS = {
    "normal": {"delta": _NUM, "m": _POS, "sigma": _POS},
    "beta1": {"a": _POS, "b": _POS, "mean": _POS, "strength": _POS},
    "beta2": {k: _POS for k in ("a1", "b1", "a2", "b2", "mean1", "strength1", "mean2", "strength2")},
    "linreg": {"mu": _NUM, "m": _POS, "var": _POS},
}
TRUTH_KEYS = {
    "normal": {"mu_true": _NUM, "sigma": _POS},
    "beta1": {"theta": _POS},
    "beta2": {"theta1": _POS, "theta2": _POS},
    "linreg": {"mu1": _NUM, "mu2": _NUM, "sigma": _POS, "group1_fraction": _POS},
}


def _family_rule(family: str) -> dict:
    return {
        "if": {"properties": {"family": {"const": family}}},
        "then": {
            "properties": {
                "prior": _obj(PRIOR_KEYS[family]),
                "truth": _obj(TRUTH_KEYS[family]),
                "sweep": {"properties": {"param": {"enum": sorted(PRIOR_KEYS[family])}}},
            }
        },
    }


CUSTOM_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["family", "sweep"],
    "properties": {
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "family": {"enum": [f.value for f in Family]},
        "engine": {"enum": ["exact", "mc", "bootstrap"]},
        "prior": {"type": "object"},
        "truth": {"type": "object"},
        "null_boundary": _NUM,
        "direction": {"enum": ["null", "alternative", "auto"]},
        "sweep": _obj({"param": {"type": "string"}, "values": {"type": "array", "items": _NUM, "minItems": 1}},
                      required=("param", "values")),
        "baselines": {"type": "boolean"},
        "draws": {"type": "integer", "minimum": 2},
    },
    "allOf": [_family_rule(f.value) for f in Family],
}

SIMULATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scenario": {"type": "string"},
        "custom": CUSTOM_SCHEMA,
        "config": RUN_CONFIG_SCHEMA,
    },
    "oneOf": [{"required": ["scenario"]}, {"required": ["custom"]}],
}

AUDIT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "data": {"type": "string"},
        "response_column": {"type": "string"},
        "covariate_column": {"type": "string"},
        "prior": _obj({"mean": _NUM, "var": _POS}),
        "bayes_n": _COUNT,
        "direction": {"enum": ["null", "alternative"]},
        "sigma": _POS,
        "config": RUN_CONFIG_SCHEMA,
    },
}


def validate(document: Any, schema: Mapping) -> None:
    """Schema-check ``document``; the raised error names the offending field."""
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(document), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        where = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(where, err.message)


def run_config(overrides: Mapping | None, base: RunConfig | None = None) -> RunConfig:
    base = base or RunConfig()
    if not overrides:
        return base
    changes = dict(overrides)
    if "grid" in changes:
        changes["grid"] = tuple(changes["grid"])
    return base.with_updates(**changes)


# --------------------------------------------------------------------------- family builders


def _get(d: Mapping, key: str, default):
    value = d.get(key, default)
    if value is None:
        raise ValidationError(key, "is required")
    return float(value)


def _beta_prior(d: Mapping, suffix: str = "") -> BetaPrior:
    a, b = f"a{suffix}", f"b{suffix}"
    mean, strength = f"mean{suffix}", f"strength{suffix}"
    has_ab = a in d or b in d
    has_ms = mean in d or strength in d
    if has_ab and has_ms:
        raise ValidationError(f"prior.{a}", f"give either ({a}, {b}) or ({mean}, {strength}), not both")
    if has_ms:
        mu = _get(d, mean, None)
        if not 0 < mu < 1:
            raise ValidationError(f"prior.{mean}", "must lie in (0, 1)")
        return BetaPrior.from_mean_strength(mu, _get(d, strength, None))
    return BetaPrior(_get(d, a, 1.0), _get(d, b, 1.0))


def make_prior(family: Family, prior: Mapping, truth: Mapping | None = None):
    family = Family(family)
    truth = truth or {}
    if family is Family.NORMAL_ONE_SAMPLE:
        sigma = prior.get("sigma", truth.get("sigma", 1.0))
        return NormalPrior(_get(prior, "delta", 0.0), _get(prior, "m", 1.0), float(sigma))
    if family is Family.BETA_ONE_SAMPLE:
        return _beta_prior(prior)
    if family is Family.BETA_TWO_SAMPLE:
        return (_beta_prior(prior, "1"), _beta_prior(prior, "2"))
    if "m" in prior and "var" in prior:
        raise ValidationError("prior.m", "give either m or var, not both")
    sigma = _get(truth, "sigma", 1.0)
    if "var" in prior:
        return SlopePrior(_get(prior, "mu", 0.0), _get(prior, "var", None))
    return SlopePrior.from_m(_get(prior, "mu", 0.0), _get(prior, "m", 1.0), sigma)


def make_model(family: Family, truth: Mapping, null_boundary: float | None = None):
    family = Family(family)
    if family is Family.NORMAL_ONE_SAMPLE:
        return NormalModel(
            NormalTruth(_get(truth, "mu_true", 0.0), _get(truth, "sigma", 1.0)),
            0.0 if null_boundary is None else float(null_boundary),
        )
    if family is Family.BETA_ONE_SAMPLE:
        truth_obj = BernoulliTruth(_get(truth, "theta", 0.5))
        theta0 = truth_obj.theta if null_boundary is None else float(null_boundary)
        if not 0 < theta0 < 1:
            raise ValidationError("null_boundary", "must lie in (0, 1)")
        return BetaOneModel(truth_obj, theta0)
    if family is Family.BETA_TWO_SAMPLE:
        if null_boundary is not None:
            raise ValidationError("null_boundary", "two-sample rate test has no boundary")
        return BetaTwoModel(BernoulliPairTruth(_get(truth, "theta1", 0.5), _get(truth, "theta2", 0.5)))
    fraction = _get(truth, "group1_fraction", 0.5)
    if not 0 < fraction < 1:
        raise ValidationError("truth.group1_fraction", "must lie in (0, 1)")
    truth_obj = TwoGroupTruth(_get(truth, "mu1", 0.0), _get(truth, "mu2", 0.0), _get(truth, "sigma", 1.0))
    return TwoGroupModel(truth_obj, fraction)


def auto_direction(model) -> SupportDirection:
    """Alternative when the truth lies strictly inside the alternative, else null."""
    if isinstance(model, NormalModel):
        alt = model.truth.mu_true > model.boundary
    elif isinstance(model, BetaOneModel):
        alt = model.truth.theta > model.theta0
    elif isinstance(model, BetaTwoModel):
        alt = model.truth.theta1 > model.truth.theta2
    else:
        alt = model.truth.slope > 0
    return SupportDirection.SUPPORTS_ALTERNATIVE if alt else SupportDirection.SUPPORTS_NULL


def resolve_direction(value: str | None, model) -> SupportDirection:
    if value in (None, "auto"):
        return auto_direction(model)
    return SupportDirection(value)


def exact_method(family: Family) -> Method:
    if Family(family) in (Family.BETA_ONE_SAMPLE, Family.BETA_TWO_SAMPLE):
        return Method.EXACT_ENUMERATION
    return Method.CLOSED_FORM


# --------------------------------------------------------------------------- custom sweeps


def run_custom(spec: Mapping, config: RunConfig) -> tuple[pd.DataFrame, dict]:
    """Sweep one prior field over ``spec['sweep']['values']``.

    Returns the result table (same columns as registered scenarios) and its
    metadata. The engine is ``exact`` unless stated.
    """
    validate(spec, CUSTOM_SCHEMA)
    family = Family(spec["family"])
    engine = spec.get("engine", "exact")
    truth = spec.get("truth", {})
    base_prior = dict(spec.get("prior", {}))
    model = make_model(family, truth, spec.get("null_boundary"))
    direction = resolve_direction(spec.get("direction"), model)
    param = spec["sweep"]["param"]
    values = [float(v) for v in spec["sweep"]["values"]]
    priors = [make_prior(family, {**base_prior, param: v}, truth) for v in values]
    n = config.bayes_n
    grid = config.search_grid

    frame = pd.DataFrame({"sweep_param": values})
    if engine == "bootstrap":
        series = run_replicated_sweep(config, model, priors, direction)
        frame["ess_pvalue"] = [s.mean_ess for s in series]
        frame["sd"] = [s.sd_ess for s in series]
        frame["n_failed"] = [int(s.n_failed) for s in series]
    else:
        if engine == "exact":
            ests = [estimate_ess(model.exact_profile(p, n), direction, exact_method(family), grid) for p in priors]
        else:
            draws = int(spec.get("draws", 100_000))
            ests = [mc_estimate(model, p, n, direction, draws, config.seed, grid) for p in priors]
        frame["ess_pvalue"] = [float(e.ess) for e in ests]
        frame["ess_continuous"] = [e.ess_continuous for e in ests]
        frame["at_boundary"] = [e.at_boundary for e in ests]
        frame["sd"] = 0.0
        frame["n_failed"] = 0

    meta = {
        "id": spec.get("id", "custom"),
        "family": family.value,
        "engine": engine,
        "direction": direction.value,
        "bayes_n": n,
        "sweep": {"param": param, "values": values},
        "prior": base_prior,
        "truth": dict(truth),
    }
    if spec.get("baselines"):
        if family not in (Family.NORMAL_ONE_SAMPLE, Family.BETA_ONE_SAMPLE):
            raise ValidationError("custom.baselines", f"baselines are available for normal and beta1, not {family.value}")
        frame["ess_morita"] = [morita_ess(p).ess for p in priors]
        reim_truth = model.truth
        if engine == "bootstrap":
            frame["ess_reimherr"] = [r.ess for r in reimherr_mse_sweep(priors, reim_truth, config)]
        else:
            frame["ess_reimherr"] = [_finite_or_nan(lambda p=p: reimherr_mse_ess(p, reim_truth, n).ess) for p in priors]
        meta["baseline_provenance"] = PROVENANCE
    return frame, meta


def _finite_or_nan(fn):
    try:
        return float(fn())
    except MinimizerAtBoundary:
        return math.nan
