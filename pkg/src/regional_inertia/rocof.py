"""Peak sliding-window RoCoF after a detected onset."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, RocofError
from .ingest import TraceBundle
from .lsq import sliding_slopes
from .onset import OnsetResult, detect_onset, window_points
from .trace import FrequencyTrace, RegionDefinition, SystemConstants


@dataclass(frozen=True)
class RocofEstimate:
    value_hz_s: float
    window_start: float
    window_s: float
    horizon_s: float
    n_windows_evaluated: int
    sensor_id: str = ""


def peak_rocof(
    trace: FrequencyTrace,
    onset_time: float,
    window_s: float = 0.1,
    horizon_s: float = 0.5,
) -> RocofEstimate:
    """Signed least-squares slope of largest magnitude among windows in the horizon.

    Windows of ``window_s`` slide one sample at a time over
    ``[onset_time, onset_time + horizon_s]``; earliest window wins ties.
    """
    op = "peak_rocof"
    dt = trace.sample_interval
    w = window_points(window_s, dt)
    h = window_points(horizon_s, dt)
    if w < 1:
        raise RocofError(
            f"a {window_s} s window holds fewer than 2 samples at {dt} s spacing", operation=op
        )
    if h < w:
        raise RocofError(f"horizon {horizon_s} s shorter than window {window_s} s", operation=op)
    try:
        i0 = trace.index_of(onset_time)
    except AnalysisError as exc:
        raise RocofError(exc.message, operation=op) from exc
    if i0 < 0 or i0 + h > len(trace) - 1:
        raise RocofError(
            f"insufficient data on {trace.sensor_id or 'trace'} for a {horizon_s} s horizon "
            "after onset",
            operation=op,
        )
    segment = trace.samples[i0 : i0 + h + 1]
    if np.isnan(segment).any():
        raise RocofError(f"gap inside the RoCoF horizon on {trace.sensor_id or 'trace'}", operation=op)
    slopes = sliding_slopes(segment, w + 1, dt)
    mags = np.abs(slopes)
    k = int(np.flatnonzero(mags == mags.max())[0])
    return RocofEstimate(
        value_hz_s=float(slopes[k]),
        window_start=trace.time_at(i0 + k),
        window_s=window_s,
        horizon_s=horizon_s,
        n_windows_evaluated=int(slopes.size),
        sensor_id=trace.sensor_id,
    )


def interconnection_rocof(
    intercon_trace: FrequencyTrace,
    onset_time: float,
    constants: SystemConstants = SystemConstants(),
) -> RocofEstimate:
    return peak_rocof(
        intercon_trace, onset_time, constants.rocof_window_s, constants.rocof_horizon_s
    )


@dataclass(frozen=True)
class LocalSweep:
    per_sensor: dict[str, RocofEstimate]
    onsets: dict[str, OnsetResult]
    worst: RocofEstimate
    failed: dict[str, str] = field(default_factory=dict)

    @property
    def worst_sensor(self) -> str:
        return self.worst.sensor_id


def local_rocof_sweep(
    bundle: TraceBundle,
    region: RegionDefinition,
    search_span: tuple[float, float] | None = None,
    constants: SystemConstants = SystemConstants(),
) -> LocalSweep:
    """Peak RoCoF of every region member, each from its own detected onset."""
    per_sensor: dict[str, RocofEstimate] = {}
    onsets: dict[str, OnsetResult] = {}
    failed: dict[str, str] = {}
    for sid in sorted(region.member_sensor_ids):
        trace = bundle.traces.get(sid)
        if trace is None:
            failed[sid] = "missing from bundle"
            continue
        try:
            onset = detect_onset(trace, search_span, constants.onset_window_s)
            est = peak_rocof(trace, onset.onset_time, constants.rocof_window_s, constants.rocof_horizon_s)
        except AnalysisError as exc:
            failed[sid] = str(exc)
            continue
        onsets[sid] = onset
        per_sensor[sid] = est
    if not per_sensor:
        detail = "; ".join(f"{k}: {v}" for k, v in failed.items())
        raise RocofError(f"no usable member sensors ({detail})", operation="local_rocof_sweep")
    worst = max(per_sensor.values(), key=lambda e: abs(e.value_hz_s))
    return LocalSweep(per_sensor, onsets, worst, failed)
