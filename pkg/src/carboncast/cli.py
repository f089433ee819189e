"""Command-line front end.

Subcommands: gen-fixtures, forecast-factor, grid-search, forecast-price,
compare-models, replicate.  Every run writes a JSON report carrying the
resolved configuration, the tool version, SHA-256 hashes of every input
file and a hash of the whole configuration, so outputs are traceable and
byte-identical across repeated identical invocations (no timestamps).

Exit codes: 0 success, 1 validation/usage error, 2 convergence failure.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CarboncastError, NotConverged
from .fixtures import FIXTURE_FILES, write_fixtures
from .notation import format_model_string, format_spec, parse_model_string
from .pipeline import (FACTOR_ORDER, ScenarioSpec, compare_models,
                       default_factor_specs, default_price_spec,
                       forecast_factor, parse_scenario_file, run_pipeline)
from .replication import EMISSION_TARGETS_KT, deviation_table
from .selection import GridSpec, grid_search, loo_plan, make_folds
from .serialize import save_model
from .series import load_series, write_series


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the CLI contract is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")


def _report(out_dir: Path, name: str, command: str, config: dict,
            input_paths: list, body: dict) -> Path:
    hashes = {str(p): _sha256(p) for p in input_paths}
    head = {"tool": "carboncast", "version": __version__, "command": command,
            "config": config, "input_hashes": hashes}
    head["config_hash"] = hashlib.sha256(
        json.dumps(head, sort_keys=True).encode()).hexdigest()
    head.update(body)
    out = out_dir / name
    _dump_json(head, out)
    return out


def _parse_cv(text: str, n: int, seed: int = 0):
    if text == "loo":
        return loo_plan(n)
    if text.startswith("k:"):
        return make_folds(n, int(text[2:]), seed=seed)
    raise CarboncastError(f"--cv must be 'loo' or 'k:<int>', got {text!r}")


def _parse_grid_values(text: str, flag: str) -> list:
    """'start:end:step' sweeps or comma lists."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CarboncastError(f"{flag}: expected start:end:step, got {text!r}")
        start, end, step = (float(p) for p in parts)
        if step <= 0:
            raise CarboncastError(f"{flag}: step must be positive")
        values = []
        v = start
        while v <= end + 1e-12 * max(1.0, abs(end)):
            values.append(v)
            v = v + step
        return values
    return [float(p) for p in text.split(",") if p.strip()]


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands -------------------------------------------------------------


def _cmd_gen_fixtures(args) -> int:
    out = _out_dir(args)
    paths = write_fixtures(out, seed=args.seed)
    _report(out, "gen_fixtures_report.json", "gen-fixtures",
            {"seed": args.seed, "out_dir": str(out)},
            sorted(paths.values()),
            {"files": sorted(str(p) for p in paths.values())})
    print(f"wrote {len(paths)} fixture files to {out}")
    return 0


def _cmd_forecast_factor(args) -> int:
    series = load_series(args.input)
    spec = parse_model_string(args.model)
    result = forecast_factor(series, spec, args.to, standardize=args.standardize)
    out = _out_dir(args)
    forecast_path = out / f"{series.name}_forecast.csv"
    write_series(result.series, forecast_path)
    model_path = out / f"{series.name}_model.txt"
    save_model(result.model, model_path)
    _report(out, f"{series.name}_forecast_report.json", "forecast-factor",
            {"input": str(args.input), "model": format_model_string(spec),
             "to": args.to, "standardize": args.standardize,
             "feature_transform": result.transform.to_dict()},
            [args.input],
            {"forecast_csv": str(forecast_path), "model_file": str(model_path),
             "forecast": {str(y): v for y, v in result.series.points},
             "diagnostics": vars(result.model.diagnostics)})
    print(f"wrote {forecast_path}")
    return 0


def _cmd_grid_search(args) -> int:
    series = load_series(args.input)
    X = np.asarray(series.years, dtype=float)[:, None]
    y = np.asarray(series.values, dtype=float)

    c_values = _parse_grid_values(args.grid_C, "--grid-C")
    kept_c = [c for c in c_values if c > 0]
    if len(kept_c) < len(c_values):
        print("warning: dropping C=0 candidates (C must be positive)",
              file=sys.stderr)
    if not kept_c:
        raise CarboncastError("--grid-C produced no positive C values")
    kernels = [k.strip() for k in args.kernels.split(",") if k.strip()]
    epsilons = ([float(e) for e in args.epsilons.split(",")]
                if args.epsilons else [0.1])
    gammas = (args.gammas.split(",") if args.gammas else ["scale"])

    candidates = []
    for C in kept_c:
        for kernel in kernels:
            for eps in epsilons:
                for gamma in gammas:
                    gamma_txt = gamma if gamma in ("scale", "auto") else float(gamma)
                    if kernel == "linear":
                        s = f"SVR(C={C!r}, epsilon={eps!r}, kernel='linear')"
                    else:
                        gfmt = f"'{gamma_txt}'" if isinstance(gamma_txt, str) else repr(gamma_txt)
                        s = f"SVR(C={C!r}, epsilon={eps!r}, gamma={gfmt}, kernel='{kernel}')"
                    spec = parse_model_string(s)
                    if spec not in candidates:
                        candidates.append(spec)

    plan = _parse_cv(args.cv, len(y), seed=args.seed)
    report = grid_search(GridSpec(tuple(candidates)), X, y, plan,
                         workers=args.workers)
    out = _out_dir(args)
    best = report.best
    _report(out, "grid_report.json", "grid-search",
            {"input": str(args.input), "grid_C": args.grid_C,
             "kernels": args.kernels, "epsilons": args.epsilons,
             "gammas": args.gammas, "cv": args.cv, "seed": args.seed},
            [args.input],
            {"cv_report": report.to_dict(),
             "best_C": best.spec.C, "best_spec": best.spec_string})
    print(f"best: {best.spec_string}  mean neg-MSE {best.mean_score:.6g}")
    return 0


def _load_data_dir(input_dir: Path) -> dict:
    data = {}
    for name in (*FACTOR_ORDER, "price"):
        candidates = [input_dir / FIXTURE_FILES[name], input_dir / f"{name}.csv"]
        path = next((p for p in candidates if p.exists()), None)
        if path is None:
            raise CarboncastError(
                f"missing input series {name!r}: expected one of "
                + " or ".join(str(p) for p in candidates))
        data[name] = load_series(path, name=name)
        data[name + "__path"] = path
    return data


def _cmd_forecast_price(args) -> int:
    input_dir = Path(args.input)
    data = _load_data_dir(input_dir)
    series = {k: v for k, v in data.items() if not k.endswith("__path")}
    paths = [data[k + "__path"] for k in (*FACTOR_ORDER, "price")]

    scenarios = [parse_scenario_file(p) for p in args.scenario]
    if not scenarios:
        raise CarboncastError("at least one --scenario file is required")
    price_spec = (parse_model_string(args.model) if args.model
                  else default_price_spec())
    result = run_pipeline(series, scenarios, price_spec=price_spec,
                          standardize=args.standardize,
                          anchor_weight=args.anchor_weight)

    out = _out_dir(args)
    written = []
    for sf in result.scenario_forecasts:
        path = out / f"forecast_{sf.scenario.label}.csv"
        lines = ["year,price_eur"]
        lines += [f"{year},{price!r}" for year, price in sf.price_by_year]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    models = {}
    for name, ff in result.factor_forecasts.items():
        mp = out / f"model_{name}.txt"
        save_model(ff.model, mp)
        models[name] = {"file": str(mp), "spec": ff.spec_string}
    for label, ef in result.emission_forecasts.items():
        mp = out / f"model_emission_{label}.txt"
        save_model(ef.model, mp)
        models[f"emission_{label}"] = {"file": str(mp), "spec": ef.spec_string}
    for sf in result.scenario_forecasts:
        mp = out / f"model_price_{sf.scenario.label}.txt"
        save_model(sf.model, mp)
        models[f"price_{sf.scenario.label}"] = {"file": str(mp),
                                                "spec": sf.spec_string}

    _report(out, "report.json", "forecast-price",
            {"input": str(input_dir),
             "scenarios": [vars(s) for s in scenarios],
             "price_model": format_model_string(price_spec),
             "factor_models": {n: format_spec(s)
                               for n, s in default_factor_specs().items()},
             "standardize": args.standardize,
             "anchor_weight": args.anchor_weight},
            paths + list(args.scenario),
            {"models": models,
             "forecast_files": [str(p) for p in written],
             "price_by_scenario": {
                 sf.scenario.label: {str(y): p for y, p in sf.price_by_year}
                 for sf in result.scenario_forecasts},
             "emission_2030": {
                 label: ef.series.value_at(ef.series.last_year)
                 for label, ef in result.emission_forecasts.items()}})
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_compare_models(args) -> int:
    series = load_series(args.input)
    plan = _parse_cv(args.cv, len(series.points), seed=args.seed)
    table = compare_models(series, plan=plan, workers=args.workers)
    out = _out_dir(args)
    _report(out, "comparison_report.json", "compare-models",
            {"input": str(args.input), "cv": args.cv},
            [args.input],
            {"comparison": table.to_dict()})
    print(f"{'family':<15} {'best neg-MSE':>15}   best spec")
    for row in table.rows:
        print(f"{row.family:<15} {row.best_score:>15.6g}   {row.best_spec_string}")
    return 0


def _cmd_replicate(args) -> int:
    input_dir = Path(args.input)
    data = _load_data_dir(input_dir)
    series = {k: v for k, v in data.items() if not k.endswith("__path")}
    paths = [data[k + "__path"] for k in (*FACTOR_ORDER, "price")]

    scenarios = [ScenarioSpec(label, target)
                 for label, target in EMISSION_TARGETS_KT.items()]
    result = run_pipeline(series, scenarios, standardize=args.standardize,
                          anchor_weight=args.anchor_weight)
    price_by_scenario = {sf.scenario.label: dict(sf.price_by_year)
                         for sf in result.scenario_forecasts}

    loo_by_family = {}
    factor_2030 = {}
    for factor in ("oil", "dax", "coal", "gas"):
        table = compare_models(series[factor], workers=args.workers)
        for row in table.rows:
            loo_by_family.setdefault(row.family, {})[factor] = row.best_score
        factor_2030[factor] = result.factor_forecasts[factor].series.value_at(2030)

    rows = deviation_table(price_by_scenario, loo_by_family, factor_2030)
    out = _out_dir(args)
    csv_path = out / "deviations.csv"
    lines = ["group,reference_id,reference_value,computed_value,pct_deviation"]
    lines += [f"{r.group},{r.reference_id},{r.reference_value!r},"
              f"{r.computed_value!r},{r.pct_deviation!r}" for r in rows]
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    _report(out, "report.json", "replicate",
            {"input": str(input_dir), "standardize": args.standardize,
             "anchor_weight": args.anchor_weight},
            paths,
            {"deviations": [r.to_dict() for r in rows],
             "deviations_csv": str(csv_path)})
    print(f"wrote {csv_path} ({len(rows)} reference comparisons)")
    return 0


# --- argument wiring ----------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="carboncast",
                     description="SVR toolkit and carbon-price forecasting pipeline")
    parser.add_argument("--version", action="version",
                        version=f"carboncast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="fold-plan seed")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel candidate evaluations")
        p.add_argument("--standardize", action="store_true",
                       help="standardize features before training (recorded)")

    p = sub.add_parser("gen-fixtures", help="write synthetic fixture CSVs")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_gen_fixtures)

    p = sub.add_parser("forecast-factor", help="univariate year->value forecast")
    common(p)
    p.add_argument("--input", required=True, help="series CSV")
    p.add_argument("--model", required=True, help="SVR model string")
    p.add_argument("--to", type=int, default=2030, help="last forecast year")
    p.set_defaults(func=_cmd_forecast_factor)

    p = sub.add_parser("grid-search", help="exhaustive SVR hyperparameter sweep")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--grid-C", required=True,
                   help="C values: start:end:step or comma list")
    p.add_argument("--kernels", default="linear,rbf")
    p.add_argument("--epsilons", default=None, help="comma list (default 0.1)")
    p.add_argument("--gammas", default=None,
                   help="comma list of scale/auto/numbers (default scale)")
    p.add_argument("--cv", default="loo", help="loo or k:<int>")
    p.set_defaults(func=_cmd_grid_search)

    p = sub.add_parser("forecast-price",
                       help="two-stage scenario price forecast")
    common(p)
    p.add_argument("--input", required=True,
                   help="directory with oil/dax/coal/gas/emission/price CSVs")
    p.add_argument("--scenario", action="append", default=[], required=True,
                   help="scenario config file (repeatable)")
    p.add_argument("--model", default=None,
                   help="price model string (default bundled reference)")
    p.add_argument("--anchor-weight", type=float, default=1.0,
                   help="cost weight of the emission target pseudo-observation")
    p.set_defaults(func=_cmd_forecast_price)

    p = sub.add_parser("compare-models",
                       help="per-family cross-validated comparison")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--cv", default="loo", help="loo or k:<int>")
    p.set_defaults(func=_cmd_compare_models)

    p = sub.add_parser("replicate",
                       help="full pipeline plus deviation table against "
                            "bundled reference values")
    common(p)
    p.add_argument("--input", required=True,
                   help="directory with the six series CSVs")
    p.add_argument("--anchor-weight", type=float, default=1.0)
    p.set_defaults(func=_cmd_replicate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as exc:
        print(f"carboncast: convergence failure: {exc}", file=sys.stderr)
        return 2
    except CarboncastError as exc:
        print(f"carboncast: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
