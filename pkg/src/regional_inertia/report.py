"""Table and plot-series writers; the only place units change to mHz/s and percent."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .ingest import format_timestamp
from .trace import TABLE_COLUMNS, AnalysisResult

METRIC_LABELS = {
    "power_mismatch_mw": "Power mismatch (MW)",
    "interconnection_max_rocof_mhz_s": "Interconnection max RoCoF (mHz/s)",
    "regional_rocof_mhz_s": "Regional RoCoF (mHz/s)",
    "local_rocof_mhz_s": "Local RoCoF (mHz/s)",
    "h_intercon_mva_s": "H_intercon (MVA*s)",
    "h_region_mva_s": "H_region (MVA*s)",
    "h_local_mva_s": "H_local (MVA*s)",
    "arrival_time_s": "Inertial support arrival time (s)",
    "h_region_over_h_intercon_pct": "H_region / H_intercon (%)",
}


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def dumps_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}" if abs(value) < 1e6 else f"{value:.0f}"
    return str(value)


def table_rows(results: Sequence[tuple[str, AnalysisResult | None]]) -> list[dict[str, Any]]:
    """One Table-I row per ``(label, result)``; failed events get empty cells."""
    rows = []
    for label, res in results:
        if res is None:
            row = {c: None for c in TABLE_COLUMNS}
            row["event_id"] = label
        else:
            row = res.table_row()
        rows.append(row)
    return rows


def render_table(rows: Sequence[Mapping[str, Any]], layout: str = "rows") -> str:
    """CSV text, one row per event (``rows``) or one column per event (``columns``)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if layout == "rows":
        writer.writerow(TABLE_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in TABLE_COLUMNS])
    elif layout == "columns":
        writer.writerow(["metric", *[row["event_id"] for row in rows]])
        for col in TABLE_COLUMNS[1:]:
            writer.writerow([METRIC_LABELS[col], *[_fmt(row.get(col)) for row in rows]])
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return buf.getvalue()


def series_csv(analysis) -> str:
    """Plot data for one analyzed event.

    Columns: timestamp, seconds from the regional onset, both reference
    traces, onset markers and peak-RoCoF window flags.
    """
    reg, ic = analysis.regional_trace, analysis.intercon_trace
    t0 = max(reg.t0, ic.t0)
    t1 = min(reg.t_end, ic.t_end)
    r, i = reg.crop(t0, t1), ic.crop(t0, t1)
    times = r.times

    def flag(start: float, width: float) -> np.ndarray:
        return (times >= start - 1e-6) & (times <= start + width + 1e-6)

    ro, io_ = analysis.region_onset.onset_time, analysis.intercon_onset.onset_time
    rw, iw = analysis.region_rocof, analysis.intercon_rocof
    cols = {
        "regional_onset": flag(ro, 0.0),
        "interconnection_onset": flag(io_, 0.0),
        "regional_peak_window": flag(rw.window_start, rw.window_s),
        "interconnection_peak_window": flag(iw.window_start, iw.window_s),
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["timestamp", "t_from_onset_s", "regional_hz", "interconnection_hz", *cols])
    for k, t in enumerate(times):
        w.writerow([
            format_timestamp(t),
            f"{t - ro:.6f}",
            "" if np.isnan(r.samples[k]) else f"{r.samples[k]:.9f}",
            "" if np.isnan(i.samples[k]) else f"{i.samples[k]:.9f}",
            *[int(c[k]) for c in cols.values()],
        ])
    return buf.getvalue()


def read_results(paths: Iterable[str | os.PathLike]) -> list[AnalysisResult]:
    """Load ``result.json`` files, expanding directories recursively."""
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        files.extend(sorted(p.rglob("result.json")) if p.is_dir() else [p])
    results = []
    for f in files:
        with open(f, "r", encoding="utf-8") as fh:
            results.append(AnalysisResult.from_dict(json.load(fh)))
    return results
