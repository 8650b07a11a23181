"""Command-line interface.

Subcommands: ``fit``, ``derive``, ``concentration``, ``simulate`` and
``replay``.  Every invocation writes a run manifest sufficient to
reproduce its outputs byte for byte (numbers are printed with 9
significant digits, charts contain no timestamps, randomness enters only
through explicit seeds).

Exit codes: 0 success, 1 usage error, 2 input/data error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, concentration, fitting, models, series, svgplot, synth
from .errors import (
    DegenerateSeriesError,
    DomainError,
    EmptySelectionError,
    InsufficientDataError,
    NumericalFailureError,
    RowParseError,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_SCOPE_FLAG = {"assented": "assented_only", "all": "all_pleas"}
_MODEL_FLAG = {"logistic": "logistic", "gompertz": "gompertz_free"}


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; argparse's default of 2 is reserved for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _round9(obj):
    if isinstance(obj, float):
        return float(f"{obj:.9g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def _json_text(obj) -> str:
    return json.dumps(_round9(obj), indent=2) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _publish_dir(staging: Path, target: Path) -> None:
    if target.exists():
        shutil.rmtree(target)
    os.replace(staging, target)


def _manifest(command: str, inputs: list[str], options: dict, seed, outputs: list[str]) -> dict:
    return {
        "command": command,
        "tool_version": __version__,
        "inputs": inputs,
        "options": options,
        "seed": seed,
        "outputs": outputs,
    }


def params_to_json(p: models.GrowthParams) -> dict:
    out = {"variant": p.tag}
    for name in p.param_names:
        out[name] = float(getattr(p, name))
    return out


def params_from_json(d: dict) -> models.GrowthParams:
    if "variant" not in d:
        raise DomainError("model object needs a 'variant' field")
    tag = d["variant"]
    if tag not in models.VARIANTS:
        raise DomainError(f"unknown model variant {tag!r}")
    cls = models.VARIANTS[tag]
    try:
        values = [float(d[name]) for name in cls.param_names]
    except KeyError as exc:
        raise DomainError(f"model variant {tag!r} needs field {exc}") from None
    return cls(*values)


# ---------------------------------------------------------------- fit


def _fit_one_year(records, year: int, args) -> tuple[dict, dict[str, str]]:
    """Returns (fit.json payload, {filename: text}) for one year."""
    kind = args.kind
    scope = _SCOPE_FLAG[args.scope]
    agg = series.aggregate(records, year, kind, scope)
    opts = fitting.FitOptions(time_axis=args.time_axis)

    if args.model == "auto":
        sel = fitting.select_model(agg, opts)
        results = sel.results
        chosen = sel.chosen
    else:
        tag = _MODEL_FLAG[args.model]
        results = {tag: fitting.fit(agg, tag, opts)}
        chosen = tag

    candidates = []
    for tag in sorted(results):
        r = results[tag]
        candidates.append(
            {
                "model": tag,
                "params": params_to_json(r.params),
                "r_squared": r.r_squared,
                "rss": r.residual_sum_squares,
                "iterations": r.iterations,
                "converged": r.converged,
            }
        )
    payload = {
        "year": year,
        "kind": kind,
        "scope": scope,
        "time_axis": args.time_axis,
        "candidates": candidates,
        "chosen": chosen,
    }

    best = results[chosen]
    days = np.arange(1.0, synth.days_in_year(year) + 0.5)
    t_model = fitting.fit_times(days, chosen, args.time_axis)
    fitted = models.eval_params(best.params, t_model)
    observed = {float(t): v for t, v in zip(agg.times, agg.values)}

    lines = ["t,observed,fitted"]
    for d, f in zip(days, fitted):
        obs = observed.get(float(d))
        obs_txt = "" if obs is None else str(obs)
        lines.append(f"{int(d)},{obs_txt},{f:.9g}")
    curve_csv = "\n".join(lines) + "\n"

    chart = svgplot.Chart(
        title=f"Cumulative {kind} of credit pleas, {year} ({scope})",
        x_label="day of year",
        y_label=f"cumulative {kind}",
    )
    chart.add_points("observed", [float(t) for t in agg.times], [float(v) for v in agg.values])
    chart.add_line(f"fitted {chosen}", days.tolist(), np.asarray(fitted).tolist())
    return payload, {
        "fit.json": _json_text(payload),
        "curve.csv": curve_csv,
        "fit.svg": chart.render(),
    }


def cmd_fit(args) -> int:
    parsed = series.parse_records(args.input, on_error="raise")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.year == "all":
        years = sorted({r.date.year for r in parsed.records})
        if not years:
            raise EmptySelectionError("input contains no records")
    else:
        years = [int(args.year)]

    outputs: list[str] = []
    for year in years:
        _, files = _fit_one_year(parsed.records, year, args)
        if args.year == "all":
            staging = Path(tempfile.mkdtemp(prefix=f".fit-{year}-", dir=out_dir))
            for name, text in files.items():
                _write_atomic(staging / name, text)
            _publish_dir(staging, out_dir / str(year))
            outputs.extend(f"{year}/{name}" for name in files)
        else:
            for name, text in files.items():
                _write_atomic(out_dir / name, text)
            outputs.extend(files)

    options = {
        "year": str(args.year),
        "kind": args.kind,
        "scope": args.scope,
        "model": args.model,
        "time_axis": args.time_axis,
    }
    manifest = _manifest("fit", [args.input], options, None, outputs)
    _write_atomic(out_dir / "manifest.json", _json_text(manifest))
    print(f"fit: wrote {len(outputs)} files to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------- derive


def cmd_derive(args) -> int:
    parsed = series.parse_records(args.input, on_error="raise")
    year = int(args.year)
    agg = series.aggregate(parsed.records, year, args.kind, "all_pleas")
    deriv = series.central_difference(agg)
    t_peak, rate_peak = series.find_peak(deriv)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = ["t,rate"]
    for t, r in zip(deriv.times, deriv.rates):
        lines.append(f"{t:.9g},{r:.9g}")
    _write_atomic(out_dir / "derivative.csv", "\n".join(lines) + "\n")

    chart = svgplot.Chart(
        title=f"Daily rate of credit pleas, {year} ({args.kind})",
        x_label="day of year",
        y_label=f"{args.kind} per day",
    )
    chart.add_line("central differences", deriv.times, deriv.rates)
    chart.annotate(t_peak, rate_peak, f"peak: day {t_peak:.9g}, rate {rate_peak:.9g}")
    _write_atomic(out_dir / "derivative.svg", chart.render())

    options = {"year": str(args.year), "kind": args.kind}
    manifest = _manifest(
        "derive", [args.input], options, None, ["derivative.csv", "derivative.svg"]
    )
    _write_atomic(out_dir / "manifest.json", _json_text(manifest))
    print(f"derive: peak day {t_peak:.9g}, rate {rate_peak:.9g}")
    return EXIT_OK


# ---------------------------------------------------------------- concentration


def cmd_concentration(args) -> int:
    parsed = series.parse_records(args.input, on_error="raise")
    if not parsed.records:
        raise EmptySelectionError("input contains no records")
    q = args.top_q
    summary = concentration.lorenz(parsed.records, args.basis)
    share = summary.share_of_top(q)
    points = concentration.ccdf([r.value for r in parsed.records])

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = ["population_share,cumulative_share"]
    for p, cum in summary.lorenz_points:
        lines.append(f"{p:.9g},{cum:.9g}")
    _write_atomic(out_dir / "lorenz.csv", "\n".join(lines) + "\n")

    lines = ["value,survival"]
    for x, s in zip(points.thresholds, points.survival):
        lines.append(f"{x:.9g},{s:.9g}")
    _write_atomic(out_dir / "ccdf.csv", "\n".join(lines) + "\n")

    lorenz_chart = svgplot.Chart(
        title=f"Lorenz curve of {args.basis} by entity",
        x_label="population share",
        y_label=f"cumulative {args.basis} share",
    )
    px = [p for p, _ in summary.lorenz_points]
    py = [c for _, c in summary.lorenz_points]
    lorenz_chart.add_line("lorenz", px, py)
    lorenz_chart.add_line("equality", [0.0, 1.0], [0.0, 1.0])
    _write_atomic(out_dir / "lorenz.svg", lorenz_chart.render())

    ccdf_chart = svgplot.Chart(
        title="Survival function of operation values",
        x_label="value",
        y_label="P(V >= value)",
        log_x=True,
        log_y=True,
    )
    ccdf_chart.add_points("ccdf", points.thresholds, points.survival)
    _write_atomic(out_dir / "ccdf.svg", ccdf_chart.render())

    payload = {
        "basis": args.basis,
        "top_q": q,
        "top_share": share,
        "gini": summary.gini(),
        "entity_count": len(summary.totals_desc),
        "excluded_zero_values": points.excluded_zero_count,
    }
    _write_atomic(out_dir / "concentration.json", _json_text(payload))

    options = {"basis": args.basis, "top_q": f"{q:.9g}"}
    outputs = ["lorenz.csv", "ccdf.csv", "lorenz.svg", "ccdf.svg", "concentration.json"]
    manifest = _manifest("concentration", [args.input], options, None, outputs)
    _write_atomic(out_dir / "manifest.json", _json_text(manifest))
    print(f"top_share(q={q:.9g}) = {share:.9g}")
    return EXIT_OK


# ---------------------------------------------------------------- simulate


def load_scenario(path: str) -> synth.ScenarioConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read scenario config {path}: {exc}") from None
    if not isinstance(raw, dict) or "model" not in raw:
        raise DomainError("scenario config must be an object with a 'model' field")
    params = params_from_json(raw["model"])
    fields = {
        "year": int,
        "total_pleas": int,
        "entity_count": int,
        "entity_weight_exponent": float,
        "value_log_mean": float,
        "value_log_sd": float,
        "rejection_rate": float,
        "observation_noise_sd": float,
        "seed": int,
    }
    kwargs = {}
    for name, cast in fields.items():
        if name in raw:
            try:
                kwargs[name] = cast(raw[name])
            except (TypeError, ValueError):
                raise DomainError(f"scenario field {name!r} must be a {cast.__name__}") from None
    missing = {"year", "total_pleas", "entity_count"} - set(kwargs)
    if missing:
        raise DomainError(f"scenario config is missing fields: {sorted(missing)}")
    return synth.ScenarioConfig(params=params, **kwargs)


def cmd_simulate(args) -> int:
    cfg = load_scenario(args.config)
    records = synth.generate_events(cfg)
    out_csv = Path(args.out)
    out_csv.parent.mkdir(parents=True, exist_ok=True)

    buf = io.StringIO()
    series.write_records_csv(records, buf)
    _write_atomic(out_csv, buf.getvalue())

    manifest = _manifest(
        "simulate",
        [args.config],
        {"config": args.config},
        cfg.seed,
        [out_csv.name],
    )
    manifest_path = out_csv.with_name(out_csv.stem + ".manifest.json")
    _write_atomic(manifest_path, _json_text(manifest))
    print(f"simulate: wrote {len(records)} records to {out_csv}")
    return EXIT_OK


# ---------------------------------------------------------------- replay


def cmd_replay(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read manifest {args.manifest}: {exc}") from None
    command = manifest.get("command")
    options = manifest.get("options", {})
    inputs = manifest.get("inputs", [])

    if command == "fit":
        argv = [
            "fit",
            inputs[0],
            "--year",
            options["year"],
            "--kind",
            options["kind"],
            "--scope",
            options["scope"],
            "--model",
            options["model"],
            "--time-axis",
            options["time_axis"],
            "--out",
            args.out,
        ]
    elif command == "derive":
        argv = ["derive", inputs[0], "--year", options["year"], "--kind", options["kind"], "--out", args.out]
    elif command == "concentration":
        argv = [
            "concentration",
            inputs[0],
            "--basis",
            options["basis"],
            "--top-q",
            options["top_q"],
            "--out",
            args.out,
        ]
    elif command == "simulate":
        argv = ["simulate", "--config", options["config"], "--out", args.out]
    else:
        raise DomainError(f"manifest has unknown command {command!r}")
    return main(argv)


# ---------------------------------------------------------------- wiring


def _year_or_all(text: str):
    if text == "all":
        return "all"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a year or 'all', got {text!r}") from None


def _build_parser() -> _Parser:
    parser = _Parser(prog="creditcurves", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="calibrate growth models to a records CSV")
    p_fit.add_argument("input", help="records CSV path")
    p_fit.add_argument("--year", required=True, type=_year_or_all, help="calendar year, or 'all'")
    p_fit.add_argument("--kind", choices=series.KINDS, default="count")
    p_fit.add_argument("--scope", choices=sorted(_SCOPE_FLAG), default="all")
    p_fit.add_argument("--model", choices=["logistic", "gompertz", "auto"], default="auto")
    p_fit.add_argument("--time-axis", choices=fitting.TIME_AXES, default="day_of_year")
    p_fit.add_argument("--out", required=True, help="output directory")
    p_fit.set_defaults(func=cmd_fit)

    p_der = sub.add_parser("derive", help="empirical daily rates and peak (all pleas)")
    p_der.add_argument("input")
    p_der.add_argument("--year", required=True, type=int)
    p_der.add_argument("--kind", choices=series.KINDS, default="count")
    p_der.add_argument("--out", required=True)
    p_der.set_defaults(func=cmd_derive)

    p_con = sub.add_parser("concentration", help="Lorenz, top shares and value CCDF")
    p_con.add_argument("input")
    p_con.add_argument("--basis", choices=concentration.BASES, default="count")
    p_con.add_argument("--top-q", type=float, default=0.2, help="top fraction of entities")
    p_con.add_argument("--out", required=True)
    p_con.set_defaults(func=cmd_concentration)

    p_sim = sub.add_parser("simulate", help="generate a synthetic records CSV")
    p_sim.add_argument("--config", required=True, help="scenario JSON path")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("replay", help="re-run a command from its manifest")
    p_rep.add_argument("manifest")
    p_rep.add_argument("--out", required=True)
    p_rep.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RowParseError as exc:
        input_path = getattr(args, "input", "<input>")
        print(f"{input_path}:{exc.line}: {exc.message}", file=sys.stderr)
        return EXIT_DATA
    except (
        EmptySelectionError,
        InsufficientDataError,
        DegenerateSeriesError,
        DomainError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
