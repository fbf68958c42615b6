"""Reading trace CSVs and JSON descriptors, and regularizing onto a grid.

Trace CSV, one file per sensor (the file stem is the sensor id)::

    timestamp,frequency_hz
    2024-08-31T07:36:00.0Z,59.998
    2024-08-31T07:36:00.1Z,
    2024-08-31T07:36:00.2Z,59.997

An empty frequency field marks a gap.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Sequence, Union

import numpy as np
from dateutil.parser import isoparse

from .errors import BundleError, TraceFormatError
from .trace import (
    GRID_TOL,
    DisturbanceEvent,
    FrequencyTrace,
    RegionDefinition,
)

HEADER = ("timestamp", "frequency_hz")
TRACE_SUFFIX = ".csv"

Source = Union[str, os.PathLike, IO[str], IO[bytes], bytes]


class RawSample(NamedTuple):
    timestamp: float
    frequency_hz: float  # NaN marks a gap


@dataclass(frozen=True)
class SensorInfo:
    sensor_id: str
    lat: float | None = None
    lon: float | None = None
    in_region: bool = False


@dataclass(frozen=True)
class TraceBundle:
    """Regularized traces for one event, keyed by sensor id."""

    traces: dict[str, FrequencyTrace]
    common_span: tuple[float, float]
    region_present: tuple[str, ...] = ()
    region_missing: tuple[str, ...] = ()
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.traces and not self.common_span[0] <= self.common_span[1]:
            raise BundleError("traces share no common time span", operation="TraceBundle")

    @classmethod
    def from_traces(
        cls,
        traces: Iterable[FrequencyTrace],
        region: RegionDefinition | None = None,
        diagnostics: Sequence[str] = (),
    ) -> "TraceBundle":
        by_id = {}
        for tr in traces:
            if tr.sensor_id in by_id:
                raise BundleError(f"duplicate sensor {tr.sensor_id!r}", operation="from_traces")
            by_id[tr.sensor_id] = tr
        by_id = {k: by_id[k] for k in sorted(by_id)}
        span = common_span(by_id.values()) if by_id else (math.nan, math.nan)
        present: tuple[str, ...] = ()
        missing: tuple[str, ...] = ()
        diags = list(diagnostics)
        if region is not None:
            present = tuple(s for s in region.member_sensor_ids if s in by_id)
            missing = tuple(s for s in region.member_sensor_ids if s not in by_id)
            diags.extend(f"missing sensor {s}" for s in missing)
        return cls(by_id, span, present, missing, tuple(diags))

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def sample_interval(self) -> float:
        intervals = {tr.sample_interval for tr in self.traces.values()}
        if len(intervals) != 1:
            raise BundleError(
                f"traces use different sample intervals: {sorted(intervals)}",
                operation="sample_interval",
            )
        return intervals.pop()

    def subset(self, sensor_ids: Iterable[str]) -> "TraceBundle":
        return TraceBundle.from_traces(self.traces[s] for s in sensor_ids if s in self.traces)

    def map(self, fn) -> "TraceBundle":
        """Apply ``fn`` to every trace, keeping the bundle's bookkeeping."""
        traces = {k: fn(v) for k, v in self.traces.items()}
        return TraceBundle(
            traces, common_span(traces.values()), self.region_present, self.region_missing,
            self.diagnostics,
        )


def common_span(traces: Iterable[FrequencyTrace]) -> tuple[float, float]:
    traces = list(traces)
    return max(tr.t0 for tr in traces), min(tr.t_end for tr in traces)


def parse_timestamp(text: str) -> float:
    """ISO-8601 to UTC epoch seconds; naive timestamps are taken as UTC."""
    dt = isoparse(text.strip())
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(t: float) -> str:
    """UTC epoch seconds to ISO-8601 with microseconds and a ``Z`` suffix."""
    micros = round(t * 1_000_000)
    secs, us = divmod(micros, 1_000_000)
    dt = datetime.fromtimestamp(secs, tz=timezone.utc).replace(microsecond=us)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _open_text(source: Source) -> tuple[IO[str], str | None]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8")), None
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        try:
            return path.open("r", encoding="utf-8", newline=""), path.stem
        except OSError as exc:
            raise TraceFormatError(f"cannot read {path}: {exc}", operation="parse_trace_file") from exc
    if isinstance(source, io.TextIOBase):
        return source, None
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), None


def parse_trace_file(source: Source, sensor_id: str | None = None) -> tuple[str, list[RawSample]]:
    """Parse one trace CSV into ``(sensor_id, samples)``.

    ``sensor_id`` defaults to the file stem; it is required for streams.
    Row numbers in error messages are file line numbers (header = 1).
    """
    handle, stem = _open_text(source)
    sid = sensor_id or stem
    if not sid:
        raise TraceFormatError("sensor_id is required when parsing a stream", operation="parse_trace_file")
    where = f"sensor {sid}"
    samples: list[RawSample] = []
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != HEADER:
            raise TraceFormatError(
                f"{where}: missing header 'timestamp,frequency_hz'", operation="parse_trace_file"
            )
        last = -math.inf
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise TraceFormatError(
                    f"{where}: row {line}: expected 2 fields, got {len(row)}",
                    operation="parse_trace_file",
                )
            ts_text, f_text = row
            try:
                ts = parse_timestamp(ts_text)
            except (ValueError, OverflowError) as exc:
                raise TraceFormatError(
                    f"{where}: row {line}: bad timestamp {ts_text!r}", operation="parse_trace_file"
                ) from exc
            if f_text.strip() == "":
                freq = math.nan
            else:
                try:
                    freq = float(f_text)
                except ValueError as exc:
                    raise TraceFormatError(
                        f"{where}: row {line}: bad frequency {f_text!r}",
                        operation="parse_trace_file",
                    ) from exc
                if math.isnan(freq):
                    raise TraceFormatError(
                        f"{where}: row {line}: NaN frequency (leave the field empty for a gap)",
                        operation="parse_trace_file",
                    )
            if ts <= last:
                raise TraceFormatError(
                    f"{where}: row {line}: non-monotonic timestamp {ts_text.strip()}",
                    operation="parse_trace_file",
                )
            last = ts
            samples.append(RawSample(ts, freq))
    except UnicodeDecodeError as exc:
        raise TraceFormatError(f"{where}: not UTF-8 text", operation="parse_trace_file") from exc
    finally:
        if stem is not None:
            handle.close()
    return sid, samples


def write_trace_file(trace: FrequencyTrace, path: str | os.PathLike) -> None:
    lines = ["timestamp,frequency_hz"]
    for t, v in zip(trace.times, trace.samples):
        lines.append(f"{format_timestamp(t)},{'' if math.isnan(v) else f'{v:.10f}'}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def regularize(
    samples: Sequence[RawSample], target_interval: float, sensor_id: str = ""
) -> FrequencyTrace:
    """Resample raw samples onto a uniform grid by linear interpolation.

    The grid is anchored at absolute multiples of ``target_interval`` so
    that independently regularized sensors line up.  Grid points inside a
    hole between valid samples longer than ``2 * target_interval`` become
    gaps (NaN).
    """
    op = "regularize"
    if not target_interval > 0:
        raise TraceFormatError(f"target_interval must be > 0, got {target_interval!r}", operation=op)
    if len(samples) < 2:
        raise TraceFormatError(f"need at least 2 samples, got {len(samples)}", operation=op)
    ts = np.array([s.timestamp for s in samples], dtype=float)
    fs = np.array([s.frequency_hz for s in samples], dtype=float)
    valid = ~np.isnan(fs)
    if not valid.any():
        raise TraceFormatError("all samples are gap-marked", operation=op)
    ts, fs = ts[valid], fs[valid]
    dt = float(target_interval)

    k0 = math.ceil(ts[0] / dt - GRID_TOL)
    # Work in grid units relative to the first grid point; snapping keeps
    # aligned input exactly on integer positions.
    pos = ts / dt - k0
    snapped = np.round(pos)
    near = np.abs(pos - snapped) < GRID_TOL
    pos = np.where(near, snapped, pos)
    if pos[-1] - pos[0] < 2 - GRID_TOL:
        raise TraceFormatError(
            f"valid span shorter than 2 x target_interval ({2 * dt} s)", operation=op
        )
    n = int(math.floor(pos[-1] + GRID_TOL)) + 1
    grid = np.arange(n, dtype=float)
    values = np.interp(grid, pos, fs)

    holes = np.flatnonzero(np.diff(pos) > 2 + GRID_TOL)
    for h in holes:
        lo, hi = pos[h], pos[h + 1]
        inside = (grid > lo + GRID_TOL) & (grid < hi - GRID_TOL)
        values[inside] = np.nan
    # Leading/trailing gaps carry nothing; trimming keeps the operation idempotent.
    ok = np.flatnonzero(~np.isnan(values))
    if ok.size == 0 or ok[-1] - ok[0] < 2:
        raise TraceFormatError(
            f"valid output spans less than 2 x target_interval ({2 * dt} s)", operation=op
        )
    return FrequencyTrace(sensor_id, (k0 + ok[0]) * dt, dt, values[ok[0] : ok[-1] + 1])


def trace_samples(trace: FrequencyTrace) -> list[RawSample]:
    """Raw-sample view of a trace, with gaps kept as NaN."""
    return [RawSample(float(t), float(v)) for t, v in zip(trace.times, trace.samples)]


def load_region(path: str | os.PathLike) -> tuple[RegionDefinition, list[SensorInfo]]:
    """Read a region descriptor JSON.

    Each sensor entry may carry an optional ``weight``; weights are used only
    when every in-region sensor has one.
    """
    data = _read_json(path, "load_region")
    try:
        sensors = [
            SensorInfo(str(s["id"]), s.get("lat"), s.get("lon"), bool(s.get("in_region", False)))
            for s in data["sensors"]
        ]
        members = [s for s in sensors if s.in_region]
        raw_members = [raw for raw in data["sensors"] if raw.get("in_region", False)]
        weights = None
        if raw_members and all("weight" in raw for raw in raw_members):
            weights = tuple(float(raw["weight"]) for raw in raw_members)
        region = RegionDefinition(str(data["region_id"]), tuple(s.sensor_id for s in members), weights)
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{path}: invalid region descriptor: {exc}", operation="load_region") from exc
    return region, sensors


def load_event(path: str | os.PathLike) -> DisturbanceEvent:
    data = _read_json(path, "load_event")
    try:
        return DisturbanceEvent(
            event_id=str(data["event_id"]),
            approx_time=parse_timestamp(str(data["approx_time"])),
            delta_p_mw=float(data["delta_p_mw"]),
            kind=data["kind"],
            region_id=str(data["region_id"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"{path}: invalid event descriptor: {exc}", operation="load_event") from exc


def event_to_json(event: DisturbanceEvent) -> dict:
    return {
        "event_id": event.event_id,
        "approx_time": format_timestamp(event.approx_time),
        "delta_p_mw": event.delta_p_mw,
        "kind": event.kind.value,
        "region_id": event.region_id,
    }


def _read_json(path: str | os.PathLike, operation: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise BundleError(f"cannot read {path}: {exc.strerror or exc}", operation=operation) from exc
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: invalid JSON: {exc}", operation=operation) from exc
    if not isinstance(data, dict):
        raise BundleError(f"{path}: expected a JSON object", operation=operation)
    return data


def load_bundle(
    directory: str | os.PathLike,
    region: RegionDefinition,
    window: tuple[float, float] | None = None,
    target_interval: float = 0.1,
) -> TraceBundle:
    """Parse, regularize and crop every ``*.csv`` trace in ``directory``.

    Files that fail to parse are skipped with a diagnostic.  ``window``
    defaults to the common span of the usable files.
    """
    op = "load_bundle"
    directory = Path(directory)
    if not directory.is_dir():
        raise BundleError(f"trace directory not found: {directory}", operation=op)
    diagnostics: list[str] = []
    traces = []
    for path in sorted(directory.glob(f"*{TRACE_SUFFIX}")):
        try:
            sid, raw = parse_trace_file(path)
            traces.append(regularize(raw, target_interval, sid))
        except TraceFormatError as exc:
            diagnostics.append(f"skipped {path.name}: {exc}")
    if not traces:
        raise BundleError(f"no usable trace files in {directory}", operation=op)
    start, end = common_span(traces)
    if window is None:
        window = (start, end)
    w0, w1 = window
    if w1 < start or w0 > end or w1 <= w0:
        raise BundleError(
            f"window [{w0}, {w1}] lies outside the common span [{start}, {end}]", operation=op
        )
    lo, hi = max(w0, start), min(w1, end)
    cropped = [tr.crop(lo, hi) for tr in traces]
    return TraceBundle.from_traces(cropped, region, diagnostics)
