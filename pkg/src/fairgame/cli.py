"""Command-line front end: ``fairgame {curves,equilibria,compare,fit,generate}``.

A run is described by a JSON config; command-line flags override it::

    {
      "scenario": {"kind": "gaussian_g1", "params": {...}, "n": 10000, "seed": 0},
      "sample": false,            # true: draw data, score/fit, then solve
      "input": "data.csv",        # scored or featured samples instead of a scenario
      "model_csv": "model.csv",   # tabulated model instead of either
      "economics": "scenario",    # or "nlsy" for dollar calibration
      "params": {"lambda1": 0.3},
      "solver": {"grid_size": 2001},
      "fit": {"method": "pooled", "bandwidth": null},
      "scorer": {"penalties": [0.1, 1, 10], "train_fraction": 0.667, "seed": 0},
      "policies": ["lf", "cb", "dp", "eo"],
      "select": "best",
      "format": ["csv", "json"],
      "aw_literal": false
    }
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import data_pipeline as dp
from .eo_derivation import write_frontier_csv
from .equilibrium import SolverConfig, eo_frontier, parse_policy, solve, verify
from .errors import ConfigurationError, FairGameError
from .game_core import GameParams, nlsy_params, response_curves
from .signal_model import fit_empirical, read_tabulated_csv, roc, write_roc_csv, write_tabulated_csv
from .welfare import compare_policies, table_to_csv, table_to_json

log = logging.getLogger("fairgame")

FORMATS = ("csv", "json")
SELECTIONS = ("best", "worst", "all", "max", "min")


@dataclass
class RunConfig:
    scenario: dp.ScenarioSpec | None = None
    sample: bool = False
    input: str | None = None
    model_csv: str | None = None
    economics: str = "scenario"
    params: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    fit: dict = field(default_factory=dict)
    scorer: dict = field(default_factory=dict)
    policies: tuple = ("LF", "CB", "DP", "EO")
    select: str = "best"
    formats: tuple = FORMATS
    aw_literal: bool = False
    out: str = "."

    def __post_init__(self):
        if not self.policies:
            raise ConfigurationError("select at least one policy")
        self.policies = tuple(parse_policy(p) for p in self.policies)
        if self.select not in SELECTIONS:
            raise ConfigurationError(f"--select must be one of {SELECTIONS}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad or not self.formats:
            raise ConfigurationError(f"unknown output format(s) {bad}; use csv or json")
        if self.economics not in ("scenario", "nlsy"):
            raise ConfigurationError("economics must be 'scenario' or 'nlsy'")
        if self.scenario is None and self.input is None and self.model_csv is None:
            self.scenario = dp.ScenarioSpec()

    def solver_config(self):
        try:
            return SolverConfig(**self.solver)
        except TypeError as exc:
            raise ConfigurationError(f"bad solver settings: {exc}") from None

    def scorer_spec(self):
        d = dict(self.scorer)
        if "penalties" in d:
            d["penalties"] = tuple(float(a) for a in d["penalties"])
        try:
            return dp.ScorerSpec(**d)
        except TypeError as exc:
            raise ConfigurationError(f"bad scorer settings: {exc}") from None


def _split_list(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def load_config(args):
    raw = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{args.config}: invalid JSON ({exc})") from None
    known = {"scenario", "sample", "input", "model_csv", "economics", "params", "solver", "fit", "scorer",
             "policies", "select", "format", "aw_literal"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
    scenario = dp.ScenarioSpec.from_dict(raw["scenario"]) if "scenario" in raw else None
    if getattr(args, "scenario", None):
        scenario = dp.ScenarioSpec(args.scenario, scenario.params if scenario and scenario.kind == args.scenario
                                   else {}, scenario.n if scenario else 10_000, scenario.seed if scenario else 0)
    scorer = dict(raw.get("scorer", {}))
    if args.seed is not None:
        if scenario is not None:
            scenario = dp.ScenarioSpec(scenario.kind, scenario.params, scenario.n, args.seed)
        scorer["seed"] = args.seed
    fmt = raw.get("format", FORMATS)
    fmt = (fmt,) if isinstance(fmt, str) else tuple(fmt)
    if args.format:
        fmt = _split_list(args.format)
    policies = tuple(raw.get("policies", ("LF", "CB", "DP", "EO")))
    if args.policies:
        policies = _split_list(args.policies)
    input_path = getattr(args, "input", None) or raw.get("input")
    return RunConfig(
        scenario=scenario,
        sample=bool(raw.get("sample", False)),
        input=input_path,
        model_csv=raw.get("model_csv"),
        economics=raw.get("economics", "nlsy" if input_path and scenario is None else "scenario"),
        params=dict(raw.get("params", {})),
        solver=dict(raw.get("solver", {})),
        fit=dict(raw.get("fit", {})),
        scorer=scorer,
        policies=policies,
        select=args.select or raw.get("select", "best"),
        formats=fmt,
        aw_literal=bool(args.aw_literal or raw.get("aw_literal", False)),
        out=args.out,
    )


# ---------------------------------------------------------------------------
# Model assembly
# ---------------------------------------------------------------------------


@dataclass
class Prepared:
    model: object
    params: GameParams
    meta: dict


def _fit_dataset(ds, cfg, meta):
    if ds.kind == "featured":
        res = dp.ridge_score(ds, cfg.scorer_spec())
        meta["ridge"] = {"alpha": res.alpha, "w": [float(v) for v in res.w], "intercept": res.intercept,
                         "cv_error": {repr(k): v for k, v in sorted(res.cv_error.items())}}
        ds = res.scored
    fit = dict(cfg.fit)
    unknown = set(fit) - {"bandwidth", "method", "n_knots"}
    if unknown:
        raise ConfigurationError(f"unknown fit settings {sorted(unknown)}")
    model = fit_empirical(ds.s, ds.e, ds.theta, bandwidth=fit.get("bandwidth"),
                          method=fit.get("method", "pooled"), n_knots=int(fit.get("n_knots", 8)))
    meta["counts"] = {f"{e}{s}": n for (e, s), n in sorted(ds.counts().items())}
    meta["lambda1_estimate"] = ds.lambda1()
    return model, ds


def prepare(cfg):
    meta = {}
    if cfg.model_csv:
        model = read_tabulated_csv(cfg.model_csv)
        base = GameParams()
    elif cfg.input:
        model, ds = _fit_dataset(dp.load_csv(cfg.input), cfg, meta)
        base = GameParams(lambda1=ds.lambda1())
    else:
        spec = cfg.scenario
        base = spec.game_params()
        meta["scenario"] = {"kind": spec.kind, "n": spec.n, "seed": spec.seed}
        if cfg.sample:
            gen = dp.generate(spec)
            model, _ = _fit_dataset(gen.dataset, cfg, meta)
        else:
            model = spec.model()
    if cfg.economics == "nlsy":
        base = nlsy_params(model, base.lambda1)
    try:
        params = base.with_(**{k: float(v) for k, v in cfg.params.items()})
    except TypeError as exc:
        raise ConfigurationError(f"bad game parameters: {exc}") from None
    meta["params"] = params.to_dict()
    return Prepared(model, params, meta)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _out_path(cfg, name):
    return os.path.join(cfg.out, name)


def _write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o).__name__}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_curves(cfg):
    prep = prepare(cfg)
    written, summary = [], {"meta": prep.meta, "groups": []}
    for s in (0, 1):
        table = response_curves(prep.model, prep.params, s)
        curve = roc(prep.model, s)
        if "csv" in cfg.formats:
            p = _out_path(cfg, f"curves_s{s}.csv")
            table.to_csv(p)
            q = _out_path(cfg, f"roc_s{s}.csv")
            write_roc_csv(curve, q)
            written += [p, q]
        summary["groups"].append({
            "s": s, "ar_mode": table.ar_mode, "ar_max": float(np.max(table.ar)),
            "theta": table.theta, "fr": np.where(np.isfinite(table.fr), table.fr, None).tolist(), "ar": table.ar,
        })
    frontier = eo_frontier(prep.model, cfg.solver_config())
    if "csv" in cfg.formats:
        written.append(_out_path(cfg, "eo_frontier.csv"))
        write_frontier_csv(frontier, written[-1])
    if "json" in cfg.formats:
        summary["eo_frontier"] = {"fp": frontier.fp, "tp": frontier.tp}
        written.append(_write_text(_out_path(cfg, "curves.json"), _dump_json(summary)))
    return written, True


def cmd_equilibria(cfg):
    prep = prepare(cfg)
    scfg = cfg.solver_config()
    written, ok = [], True
    for pol in cfg.policies:
        eqs = solve(pol, prep.model, prep.params, scfg)
        entries = []
        for q in eqs:
            rep = verify(prep.model, prep.params, q, scfg)
            ok &= rep.passed
            if not rep.passed:
                log.error("%s equilibrium (%.6g, %.6g) failed verification: %s", pol, q.theta0, q.theta1,
                          rep.residuals)
            d = q.to_dict()
            d["verified"] = rep.passed
            d["verify_residuals"] = dict(sorted(rep.residuals.items()))
            entries.append(d)
        stem = f"equilibria_{pol.lower()}"
        if "json" in cfg.formats:
            written.append(_write_text(_out_path(cfg, stem + ".json"), _dump_json(entries)))
        if "csv" in cfg.formats:
            cols = ("policy", "theta0", "theta1", "pi0", "pi1", "stability", "verified")
            lines = [",".join(cols)]
            for d in entries:
                lines.append(",".join(repr(d[c]) if isinstance(d[c], float) else str(d[c]) for c in cols))
            written.append(_write_text(_out_path(cfg, stem + ".csv"), "\n".join(lines) + "\n"))
    return written, ok


def cmd_compare(cfg):
    prep = prepare(cfg)
    scfg = cfg.solver_config()
    rows = compare_policies(prep.model, prep.params, scfg, cfg.select, cfg.policies, cfg.aw_literal)
    ok = all(verify(prep.model, prep.params, r.report.equilibrium, scfg).passed for r in rows if r.report)
    written = []
    if "csv" in cfg.formats:
        written.append(_write_text(_out_path(cfg, "compare.csv"), table_to_csv(rows)))
    if "json" in cfg.formats:
        written.append(_write_text(_out_path(cfg, "compare.json"), table_to_json(rows) + "\n"))
    return written, ok


def cmd_fit(cfg):
    if not cfg.input:
        raise ConfigurationError("fit needs an input CSV (--input or config 'input')")
    meta = {}
    model, _ = _fit_dataset(dp.load_csv(cfg.input), cfg, meta)
    written = []
    if "csv" in cfg.formats:
        written.append(_out_path(cfg, "model.csv"))
        write_tabulated_csv(model, written[-1])
    if "json" in cfg.formats:
        meta["grid"] = {"theta_min": model.theta_min, "theta_max": model.theta_max, "n": model.grid_spec.n}
        meta["bandwidth"] = {f"{e}{s}": model.dist(e, s).bandwidth for e in ("q", "u") for s in (0, 1)}
        written.append(_write_text(_out_path(cfg, "fit.json"), _dump_json(meta)))
    return written, True


def cmd_generate(cfg):
    if cfg.scenario is None:
        raise ConfigurationError("generate needs a scenario")
    gen = dp.generate(cfg.scenario)
    written = []
    if "csv" in cfg.formats:
        written.append(_out_path(cfg, "samples.csv"))
        gen.dataset.write_csv(written[-1])
    if "json" in cfg.formats:
        spec = cfg.scenario
        meta = {"kind": spec.kind, "n": spec.n, "seed": spec.seed, "schema": gen.dataset.kind,
                "counts": {f"{e}{s}": n for (e, s), n in sorted(gen.dataset.counts().items())},
                "groups": [list(g) for g in spec.groups], "params": gen.params.to_dict()}
        written.append(_write_text(_out_path(cfg, "scenario.json"), _dump_json(meta)))
    return written, True


COMMANDS = {
    "curves": cmd_curves,
    "equilibria": cmd_equilibria,
    "compare": cmd_compare,
    "fit": cmd_fit,
    "generate": cmd_generate,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default=".", help="existing output directory (default: .)")
    common.add_argument("--format", help="comma list of csv,json (default both)")
    common.add_argument("--policies", help="comma list of lf,cb,dp,eo,eopp")
    common.add_argument("--select", choices=SELECTIONS, help="equilibrium per policy in compare tables")
    common.add_argument("--aw-literal", action="store_true", help="add the raw cost integral to AW")
    common.add_argument("--seed", type=int, help="override scenario and scorer seeds")
    common.add_argument("--scenario", choices=dp.SCENARIO_KINDS, help="preset scenario kind")
    common.add_argument("--input", help="scored or featured sample CSV")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="fairgame", description="Fairness-policy equilibria and welfare.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "curves": "FR/AR response curves, ROC curves and the EO frontier",
        "equilibria": "verified equilibria per policy",
        "compare": "welfare and disparity table across policies",
        "fit": "fit a tabulated signal model from a sample CSV",
        "generate": "draw a synthetic scenario to CSV",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not os.path.isdir(args.out):
        print(f"fairgame: output directory does not exist: {args.out}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args)
        written, ok = COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        parser.error(str(exc))  # exits with status 2
    except OSError as exc:
        print(f"fairgame: {exc.filename or ''}: {exc.strerror}", file=sys.stderr)
        return 1
    except FairGameError as exc:
        print(f"fairgame: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    if not ok:
        print("fairgame: some equilibria failed verification", file=sys.stderr)
    return 0 if ok and written else 1


if __name__ == "__main__":
    sys.exit(main())
