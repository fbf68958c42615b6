"""Command-line front end: analyze, batch, synth, selfcheck, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path
from typing import Any, Sequence

from .errors import AnalysisError
from .ingest import load_bundle, load_event, load_region
from .pipeline import FilterMode, FilterStage, analyze_event
from .published import CAISO_EVENTS, load_events
from .report import (
    atomic_write_text,
    dumps_json,
    read_results,
    render_table,
    series_csv,
    table_rows,
)
from .selfcheck import run_selfcheck
from .synth import GovernorSpec, SynthSpec, default_sensors, generate, write_dataset
from .trace import AnalysisResult, EventKind, SystemConstants

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ANALYSIS_FAILED = 2

# Flag dest -> SystemConstants field.
CONSTANT_FLAGS = {
    "nominal_hz": "nominal_frequency_hz",
    "rocof_window": "rocof_window_s",
    "rocof_horizon": "rocof_horizon_s",
    "onset_window": "onset_window_s",
}


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults < ``--config`` file < explicit flags."""
    resolved: dict[str, Any] = {f.name: f.default for f in fields(SystemConstants)}
    resolved.update(filter="auto", filter_stage="sensor", sample_interval=0.1)
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            from_file = json.load(fh)
        unknown = set(from_file) - set(resolved)
        if unknown:
            raise AnalysisError(f"unknown config keys: {sorted(unknown)}", module="cli", operation="config")
        resolved.update(from_file)
    for dest, key in CONSTANT_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            resolved[key] = value
    for dest in ("filter", "filter_stage", "sample_interval"):
        value = getattr(args, dest, None)
        if value is not None:
            resolved[dest] = value
    return resolved


def constants_from(config: dict[str, Any]) -> SystemConstants:
    return SystemConstants(**{f.name: config[f.name] for f in fields(SystemConstants)})


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of defaults (flags take precedence)")
    p.add_argument("--print-config", action="store_true", help="print the resolved configuration")
    p.add_argument("--rocof-window", dest="rocof_window", type=float, help="RoCoF window, s")
    p.add_argument("--rocof-horizon", dest="rocof_horizon", type=float, help="RoCoF horizon after onset, s")
    p.add_argument("--onset-window", dest="onset_window", type=float, help="onset pre/post window, s")
    p.add_argument("--nominal-hz", dest="nominal_hz", type=float, help="nominal frequency, Hz")
    p.add_argument("--filter", choices=[m.value for m in FilterMode], help="two-point filter policy")
    p.add_argument("--filter-stage", dest="filter_stage", choices=[s.value for s in FilterStage])
    p.add_argument("--sample-interval", dest="sample_interval", type=float, help="regularization grid, s")


def _analyze_one(traces: str, event_path: str, region_path: str, config: dict[str, Any]):
    region, _ = load_region(region_path)
    event = load_event(event_path)
    bundle = load_bundle(traces, region, target_interval=config["sample_interval"])
    return analyze_event(
        bundle, region, event, constants_from(config), config["filter"], config["filter_stage"]
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.print_config:
        print(dumps_json(config), end="")
    for label, path in (("event", args.event), ("region", args.region), ("traces", args.traces)):
        if not Path(path).exists():
            print(f"error: {label} path not found: {path}", file=sys.stderr)
            return EXIT_ANALYSIS_FAILED
    try:
        analysis = _analyze_one(args.traces, args.event, args.region, config)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED
    out = Path(args.out)
    atomic_write_text(out / "result.json", dumps_json(analysis.result.to_dict()))
    if args.series:
        atomic_write_text(out / "series.csv", series_csv(analysis))
    for d in analysis.result.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    print(render_table(table_rows([(analysis.result.event_id, analysis.result)]), "columns"), end="")
    return EXIT_OK


def _batch_entry(item: tuple[int, dict, Path, dict]) -> tuple[str, dict | None, str | None]:
    idx, entry, base, config = item
    label = str(entry.get("label") or f"event_{idx}")
    try:
        paths = {k: str(base / entry[k]) for k in ("traces", "event", "region")}
    except KeyError as exc:
        return label, None, f"manifest entry {idx} lacks {exc.args[0]!r}"
    try:
        label = load_event(paths["event"]).event_id
        analysis = _analyze_one(paths["traces"], paths["event"], paths["region"], config)
    except AnalysisError as exc:
        return label, None, str(exc)
    return label, analysis.result.to_dict(), None


def cmd_batch(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.print_config:
        print(dumps_json(config), end="")
    manifest_path = Path(args.manifest)
    try:
        with manifest_path.open("r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: unreadable manifest {manifest_path}: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED
    entries = manifest.get("events", []) if isinstance(manifest, dict) else manifest
    if not isinstance(entries, list):
        print(f"error: manifest {manifest_path} must list events", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED
    if not entries:
        print("warning: manifest lists no events", file=sys.stderr)
    base = manifest_path.parent
    items = [(i, e, base, config) for i, e in enumerate(entries)]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_batch_entry, items))
    else:
        outcomes = [_batch_entry(it) for it in items]

    out = Path(args.out)
    rows, diagnostics = [], {}
    for label, result, error in outcomes:
        if result is not None:
            atomic_write_text(out / label / "result.json", dumps_json(result))
            rows.append((label, AnalysisResult.from_dict(result)))
            if result["diagnostics"]:
                diagnostics[label] = result["diagnostics"]
        else:
            rows.append((label, None))
            diagnostics[label] = [f"failed: {error}"]
            print(f"warning: {label}: {error}", file=sys.stderr)
    atomic_write_text(out / "table.csv", render_table(table_rows(rows), args.layout))
    atomic_write_text(out / "table.diagnostics.json", dumps_json(diagnostics))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        if args.spec:
            with open(args.spec, "r", encoding="utf-8") as fh:
                spec = SynthSpec.from_json(json.load(fh))
        else:
            spec = SynthSpec(
                true_h_mva_s=args.h,
                delta_p_mw=args.dp,
                sensors=default_sensors(args.sensors, args.noise, args.delay),
                f_s=args.nominal_hz,
                onset_time=args.onset,
                record_length_s=args.length,
                sample_rate=args.rate,
                governor=GovernorSpec(args.droop, args.gov_tau),
                seed=args.seed,
                kind=EventKind(args.kind),
                event_id=args.event_id,
            )
    except (AnalysisError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED
    out = write_dataset(generate(spec), args.out)
    print(f"wrote {len(spec.sensors)} traces to {out}")
    return EXIT_OK


def cmd_selfcheck(args: argparse.Namespace) -> int:
    events = load_events(args.fixtures) if args.fixtures else CAISO_EVENTS
    checks = run_selfcheck(events)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


def cmd_report(args: argparse.Namespace) -> int:
    try:
        results = read_results(args.results)
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED
    text = render_table(table_rows([(r.event_id, r) for r in results]), args.layout)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regional-inertia",
        description="Regional inertia estimation from multi-sensor disturbance frequency records.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze one event")
    p.add_argument("--traces", required=True, help="directory of per-sensor trace CSVs")
    p.add_argument("--event", required=True, help="event descriptor JSON")
    p.add_argument("--region", required=True, help="region descriptor JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--series", action="store_true", help="also write series.csv for plotting")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("batch", help="analyze every event in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--layout", choices=["rows", "columns"], default="rows")
    p.add_argument("--jobs", type=int, default=1)
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--spec", help="SynthSpec JSON (overrides the flags below)")
    p.add_argument("--h", type=float, default=500_000.0, help="true H*S, MVA*s")
    p.add_argument("--dp", type=float, default=1000.0, help="power mismatch, MW")
    p.add_argument("--sensors", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="per-sensor noise std, Hz")
    p.add_argument("--delay", type=float, default=0.2, help="out-of-region sensor delay, s")
    p.add_argument("--rate", type=float, default=10.0, help="samples per second")
    p.add_argument("--onset", type=float, default=10.0, help="onset, s into the record")
    p.add_argument("--length", type=float, default=30.0, help="record length, s")
    p.add_argument("--droop", type=float, default=0.0, help="governor droop, MW/Hz")
    p.add_argument("--gov-tau", dest="gov_tau", type=float, default=5.0, help="governor lag, s")
    p.add_argument("--nominal-hz", dest="nominal_hz", type=float, default=60.0)
    p.add_argument("--kind", choices=[k.value for k in EventKind], default="generation_trip")
    p.add_argument("--event-id", dest="event_id", default="SYNTH")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("selfcheck", help="check the published table and a synthetic round trip")
    p.add_argument("--fixtures", help="JSON list of published event rows to check instead")
    p.set_defaults(func=cmd_selfcheck)

    p = sub.add_parser("report", help="tabulate result.json files")
    p.add_argument("results", nargs="+", help="result.json files or directories")
    p.add_argument("--layout", choices=["rows", "columns"], default="rows")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS_FAILED


if __name__ == "__main__":
    sys.exit(main())
