"""``esslab`` command line: estimate, simulate, reproduce, audit.

Machine-readable results go to stdout (JSON or CSV); logs go to stderr.
Exit codes: 0 success, 2 invalid input, 3 minimiser outside the search grid.
"""
from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from pathlib import Path

import pandas as pd

from . import __version__
from . import experiments
from .audit import AuditRequest, prior_audit, synthetic_eqtl
from .core import Family, Method, SupportDirection
from .estimators import PValueESS, exact_estimate, mc_estimate
from .exceptions import EssError, MinimizerAtBoundary
from .linreg import SlopePrior, sufficient_stats
from .montecarlo import RunConfig, engine_threads, run_replicated
from .specs import (
    AUDIT_SCHEMA,
    SIMULATE_SCHEMA,
    exact_method,
    make_model,
    make_prior,
    resolve_direction,
    run_config,
    run_custom,
    validate,
)

log = logging.getLogger("esslab")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BOUNDARY = 3


class CliError(EssError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# --------------------------------------------------------------------------- helpers


def _pair(text: str, field: str) -> tuple[float, float]:
    parts = text.split(",")
    try:
        a, b = (float(p) for p in parts)
    except ValueError:
        raise CliError(field, f"expected two comma-separated numbers, got {text!r}") from None
    return a, b


def _grid(text: str | None):
    if text is None:
        return None
    lo, hi = _pair(text, "grid")
    if lo != int(lo) or hi != int(hi):
        raise CliError("grid", "bounds must be integers")
    return int(lo), int(hi)


def _pick_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(63)
        log.info("no --seed given; using seed %d", seed)
    elif seed < 0:
        raise CliError("seed", "must be >= 0")
    return seed


def _emit_json(payload, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=experiments._json_default) + "\n"
    if output:
        experiments._atomic_write(Path(output), text)
        log.info("wrote %s", output)
    else:
        sys.stdout.write(text)


def _emit_table(table: pd.DataFrame, output: str | None) -> None:
    text = experiments.table_to_csv(table)
    if output:
        experiments._atomic_write(Path(output), text)
        log.info("wrote %s", output)
    else:
        sys.stdout.write(text)


def _load_json(path: str, field: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(field, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(field, f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _read_csv(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise CliError("data", f"cannot read {path}: {exc}") from None


# --------------------------------------------------------------------------- estimate


def _estimate_inputs(args):
    family = Family(args.family)
    sigma = args.sigma if args.sigma is not None else 1.0
    if family is Family.NORMAL_ONE_SAMPLE:
        prior = {"delta": args.delta, "m": args.m}
        truth = {"mu_true": args.mu_true, "sigma": sigma}
        boundary = args.boundary
    elif family is Family.BETA_ONE_SAMPLE:
        a, b = _pair(args.prior or "1,1", "prior")
        prior = {"a": a, "b": b}
        truth = {"theta": args.theta}
        boundary = args.theta0
    elif family is Family.BETA_TWO_SAMPLE:
        a1, b1 = _pair(args.prior1 or "1,1", "prior1")
        a2, b2 = _pair(args.prior2 or "1,1", "prior2")
        prior = {"a1": a1, "b1": b1, "a2": a2, "b2": b2}
        truth = {"theta1": args.theta1, "theta2": args.theta2}
        boundary = None
    else:
        prior = {"mu": args.prior_mean}
        if args.prior_var is not None:
            prior["var"] = args.prior_var
        else:
            prior["m"] = args.m
        truth = {"mu1": args.mu1, "mu2": args.mu2, "sigma": sigma, "group1_fraction": args.group1_fraction}
        boundary = None
    return family, prior, truth, boundary


def _data_pool(args, family: Family):
    data = _read_csv(args.data)
    cols = {
        Family.NORMAL_ONE_SAMPLE: [args.column],
        Family.BETA_ONE_SAMPLE: [args.column],
        Family.BETA_TWO_SAMPLE: (args.columns or "").split(",") if args.columns else [None, None],
        Family.LINREG_TWO_GROUP: [args.covariate, args.response],
    }[family]
    for c in cols:
        if c is None:
            raise CliError("column", "name the data column(s) with --column, --columns or --covariate/--response")
        if c not in data.columns:
            raise CliError("column", f"column {c!r} not in {args.data}")
    if family is Family.LINREG_TWO_GROUP:
        return data[cols[0]].to_numpy(float), data[cols[1]].to_numpy(float)
    values = data[cols].to_numpy(float)
    return (values[:, 0] if len(cols) == 1 else values), None


def _data_direction(family: Family, x, y, boundary: float) -> SupportDirection:
    """Alternative when the data's point estimate lies inside the alternative."""
    if family is Family.BETA_TWO_SAMPLE:
        alt = x[:, 0].mean() > x[:, 1].mean()
    elif family is Family.LINREG_TWO_GROUP:
        alt = sufficient_stats(x, y)[0] > 0
    else:
        alt = x.mean() > boundary
    return SupportDirection.SUPPORTS_ALTERNATIVE if alt else SupportDirection.SUPPORTS_NULL


def cmd_estimate(args) -> int:
    family, prior_d, truth_d, boundary = _estimate_inputs(args)
    model = make_model(family, truth_d, boundary)
    prior = make_prior(family, prior_d, truth_d)
    direction = resolve_direction(args.direction, model)
    grid = _grid(args.grid)
    engine = args.engine or exact_method(family).value
    seed = _pick_seed(args.seed)
    payload = {"family": family.value, "engine": engine, "seed": seed, "prior": prior_d, "truth": truth_d}

    if engine in (Method.CLOSED_FORM.value, Method.EXACT_ENUMERATION.value):
        if engine != exact_method(family).value:
            raise CliError("engine", f"{engine} is not available for {family.value}; use {exact_method(family).value}")
        est = exact_estimate(model, prior, args.n, direction, grid, strict=True)
        payload.update(est.to_dict())
    elif engine == Method.MONTE_CARLO.value:
        est = mc_estimate(model, prior, args.n, direction, args.draws, seed, grid, strict=True)
        payload.update(est.to_dict())
    elif args.data:
        x, y = _data_pool(args, family)
        boundary_param = boundary if boundary is not None else getattr(model, "theta0", 0.0)
        if family is Family.BETA_TWO_SAMPLE:
            boundary_param = 0.0
        if args.direction == "auto":
            direction = _data_direction(family, x, y, boundary_param)
        # data-driven linreg falls back to the residual SD
        sigma = args.sigma if family is Family.LINREG_TWO_GROUP else None
        est_obj = PValueESS(
            family=family.value,
            prior=prior,
            null_boundary=boundary_param,
            direction=direction.value,
            bayes_n=args.n,
            n_bootstrap=args.bootstrap_count,
            sigma=sigma,
            grid=grid,
            random_state=seed,
        ).fit(x, y)
        if est_obj.estimate_.at_boundary:
            raise MinimizerAtBoundary(est_obj.estimate_.n_tilde_continuous, *(grid or (1, 20 * args.n)))
        payload.update(est_obj.estimate_.to_dict())
        payload["data"] = args.data
    else:
        config = RunConfig(
            pool_size=args.pool_size,
            bootstrap_count=args.bootstrap_count,
            bayes_n=args.n,
            replicates=args.replicates,
            seed=seed,
            grid=grid,
        )
        series = run_replicated(config, model, prior, direction)
        good = [e for e in series.per_replicate if e is not None]
        hit = [e for e in good if e.at_boundary]
        if hit:
            raise MinimizerAtBoundary(hit[0].n_tilde_continuous, *config.search_grid)
        payload.update(
            {
                "n": args.n,
                "method": Method.BOOTSTRAP.value,
                "direction": direction.value,
                "ess": series.mean_ess,
                "ess_sd": series.sd_ess,
                "n_failed": series.n_failed,
                "ess_per_replicate": [e.ess if e is not None else None for e in series.per_replicate],
                "config": experiments._config_dict(config),
            }
        )
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        for k, v in payload.get("diagnostics", {}).items():
            flat[f"diag_{k}"] = v
        _emit_table(experiments.round_table(pd.DataFrame([flat])), args.output)
    else:
        _emit_json(payload, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    doc = _load_json(args.config, "config")
    validate(doc, SIMULATE_SCHEMA)
    overrides = dict(doc.get("config", {}))
    if args.seed is not None or "seed" not in overrides:
        overrides["seed"] = _pick_seed(args.seed)
    if "scenario" in doc:
        scenario = experiments.get_scenario(doc["scenario"])
        config = run_config(overrides, scenario.config) if scenario.config is not None else None
        log.info("running scenario %s", scenario.id)
        result = experiments.run_scenario(scenario.id, config)
        stem = scenario.id
    else:
        config = run_config(overrides)
        table, meta = run_custom(doc["custom"], config)
        table = experiments.round_table(table)
        meta.update({"config": experiments._config_dict(config), "columns": list(table.columns)})
        result = experiments.ScenarioResult(table, meta)
        stem = meta["id"]
    result.metadata["seed"] = overrides["seed"]
    if args.out:
        csv_path, meta_path = experiments.write_result(result, args.out, stem)
        _emit_json({"csv": str(csv_path), "metadata": str(meta_path), "seed": overrides["seed"]}, None)
    else:
        _emit_table(result.table, None)
    return EXIT_OK


# --------------------------------------------------------------------------- reproduce


def cmd_reproduce(args) -> int:
    if args.all:
        ids = experiments.scenario_ids()
    elif args.id:
        ids = list(dict.fromkeys(args.id))
        for sid in ids:
            experiments.get_scenario(sid)
    else:
        raise CliError("id", "give --all or at least one --id")
    out = Path(args.out)
    entries = []
    for sid in ids:
        scenario = experiments.get_scenario(sid)
        config = None
        if scenario.config is not None:
            seed = args.seed if args.seed is not None else scenario.config.seed
            config = scenario.config.with_updates(seed=seed)
            log.info("scenario %s: seed %d", sid, seed)
        else:
            log.info("scenario %s", sid)
        result = experiments.run_scenario(sid, config)
        csv_path, meta_path = experiments.write_result(result, out, sid)
        entries.append({"id": sid, "csv": csv_path.name, "metadata": meta_path.name, "rows": len(result.table)})
    manifest = {"esslab_version": __version__, "threads": engine_threads(), "scenarios": entries}
    if args.all:
        experiments._atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    _emit_json(manifest, None)
    return EXIT_OK


# --------------------------------------------------------------------------- audit


def cmd_audit(args) -> int:
    doc = _load_json(args.config, "config") if args.config else {}
    validate(doc, AUDIT_SCHEMA)
    data_path = args.data or doc.get("data")
    if data_path:
        data = _read_csv(data_path)
    elif args.synthetic:
        data = synthetic_eqtl(seed=args.synthetic_seed)
        log.info("using the synthetic eQTL stand-in (576 rows)")
    else:
        raise CliError("data", "give --data FILE.csv or --synthetic")
    response = args.response or doc.get("response_column") or ("expression" if args.synthetic else None)
    covariate = args.covariate or doc.get("covariate_column") or ("genotype" if args.synthetic else None)
    if response is None or covariate is None:
        raise CliError("response", "name the --response and --covariate columns")
    prior_doc = doc.get("prior", {})
    if args.prior:
        mean, var = _pair(args.prior, "prior")
    else:
        mean, var = prior_doc.get("mean", 0.0), prior_doc.get("var", 0.01)
    overrides = dict(doc.get("config", {}))
    if args.bootstrap_count is not None:
        overrides["bootstrap_count"] = args.bootstrap_count
    if args.replicates is not None:
        overrides["replicates"] = args.replicates
    if args.seed is not None or "seed" not in overrides:
        overrides["seed"] = _pick_seed(args.seed)
    bayes_n = args.n or doc.get("bayes_n", 540)
    base = RunConfig(pool_size=max(bayes_n, len(data)), replicates=1, fresh_pool=False, bayes_n=bayes_n)
    config = run_config(overrides, base)
    request = AuditRequest(
        response,
        covariate,
        SlopePrior(float(mean), float(var)),
        bayes_n,
        config,
        args.direction or doc.get("direction", "alternative"),
        args.sigma if args.sigma is not None else doc.get("sigma"),
    )
    report = prior_audit(data, request)
    if report["at_boundary"]:
        raise MinimizerAtBoundary(float("nan"), *config.search_grid)
    _emit_json(report, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="esslab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"esslab {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="ESS of one prior")
    e.add_argument("--family", required=True, choices=[f.value for f in Family])
    e.add_argument("--engine", choices=[m.value for m in Method], help="default: closed-form or enum")
    e.add_argument("--n", type=int, default=100, help="Bayesian sample size")
    e.add_argument("--direction", choices=["null", "alternative", "auto"], default="auto")
    e.add_argument("--grid", help="search grid LO,HI (default 1,20n)")
    e.add_argument("--seed", type=int)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.add_argument("--output", help="write to this file instead of stdout")
    g = e.add_argument_group("normal / linreg")
    g.add_argument("--m", type=float, default=1.0, help="prior strength")
    g.add_argument("--delta", type=float, default=0.0, help="prior mean (normal)")
    g.add_argument("--sigma", type=float, help="known noise SD (default 1; linreg with --data: residual SD)")
    g.add_argument("--mu-true", type=float, default=0.0)
    g.add_argument("--boundary", type=float, default=0.0)
    g.add_argument("--prior-mean", type=float, default=0.0, help="slope prior mean (linreg)")
    g.add_argument("--prior-var", type=float, help="slope prior variance (linreg; overrides --m)")
    g.add_argument("--mu1", type=float, default=0.0)
    g.add_argument("--mu2", type=float, default=0.0)
    g.add_argument("--group1-fraction", type=float, default=0.5)
    g = e.add_argument_group("beta")
    g.add_argument("--prior", help="A,B for beta1")
    g.add_argument("--theta", type=float, default=0.5)
    g.add_argument("--theta0", type=float)
    g.add_argument("--prior1", help="A,B for the first group (beta2)")
    g.add_argument("--prior2", help="A,B for the second group (beta2)")
    g.add_argument("--theta1", type=float, default=0.5)
    g.add_argument("--theta2", type=float, default=0.5)
    g = e.add_argument_group("monte carlo / bootstrap")
    g.add_argument("--draws", type=int, default=100_000)
    g.add_argument("--pool-size", type=int, default=5000)
    g.add_argument("--bootstrap-count", type=int, default=10_000)
    g.add_argument("--replicates", type=int, default=100)
    g.add_argument("--data", help="CSV used as the bootstrap pool")
    g.add_argument("--column", help="data column (normal, beta1)")
    g.add_argument("--columns", help="X,Y data columns (beta2)")
    g.add_argument("--response", help="response column (linreg)")
    g.add_argument("--covariate", help="covariate column (linreg)")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("simulate", help="run a scenario or custom sweep from a JSON config")
    s.add_argument("config", help="JSON config file")
    s.add_argument("--out", help="directory for <id>.csv and <id>.json (default: CSV on stdout)")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="write registered scenarios to a directory")
    grp = r.add_mutually_exclusive_group(required=True)
    grp.add_argument("--all", action="store_true")
    grp.add_argument("--id", action="append", help="scenario id (repeatable)")
    r.add_argument("--out", default="esslab-results")
    r.add_argument("--seed", type=int, help="override the registered protocol seed")
    r.set_defaults(func=cmd_reproduce)

    a = sub.add_parser("audit", help="audit a slope prior against tabular data")
    a.add_argument("--data", help="CSV file")
    a.add_argument("--synthetic", action="store_true", help="use the built-in synthetic eQTL table")
    a.add_argument("--synthetic-seed", type=int, default=0)
    a.add_argument("--config", help="JSON config (flags override it)")
    a.add_argument("--response")
    a.add_argument("--covariate")
    a.add_argument("--prior", help="MEAN,VAR of the slope prior (default 0,0.01)")
    a.add_argument("--n", type=int, help="Bayesian sample size (default 540)")
    a.add_argument("--direction", choices=["null", "alternative"])
    a.add_argument("--sigma", type=float, help="noise SD (default: residual SD)")
    a.add_argument("--bootstrap-count", type=int)
    a.add_argument("--replicates", type=int)
    a.add_argument("--seed", type=int)
    a.add_argument("--output")
    a.set_defaults(func=cmd_audit)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="esslab: %(levelname)s: %(message)s",
        force=True,
    )
    try:
        return args.func(args)
    except MinimizerAtBoundary as exc:
        log.error("%s", exc)
        return EXIT_BOUNDARY
    except (EssError, ValueError, KeyError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
