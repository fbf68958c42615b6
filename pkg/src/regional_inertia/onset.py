"""Disturbance onset detection from the jump between pre- and post-window slopes."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataQualityWarning, OnsetError
from .lsq import sliding_slopes
from .trace import GRID_TOL, FrequencyTrace

MIN_ONSET_SCORE_HZ_S = 1e-6


@dataclass(frozen=True)
class OnsetResult:
    onset_time: float
    rocof_pre: float
    rocof_post: float
    score: float
    search_span: tuple[float, float]
    sample_interval: float
    sensor_id: str = ""


def window_points(window_s: float, dt: float) -> int:
    """Number of grid steps spanned by a window of ``window_s`` seconds."""
    return int(math.floor(window_s / dt + GRID_TOL))


def detect_onset(
    trace: FrequencyTrace,
    search_span: tuple[float, float] | None = None,
    window_s: float = 0.5,
) -> OnsetResult:
    """Locate the grid time maximizing ``|slope(t - w, t) - slope(t, t + w)|``.

    Both windows are closed and share the sample at ``t``.  Candidates whose
    windows touch a gap are skipped; ties go to the earliest candidate.
    """
    op = "detect_onset"
    dt = trace.sample_interval
    w = window_points(window_s, dt)
    if w < 1:
        raise OnsetError(f"window {window_s} s is shorter than one sample ({dt} s)", operation=op)
    n = len(trace)
    lo, hi = w, n - 1 - w
    if search_span is not None:
        lo = max(lo, trace.index_at_or_after(search_span[0]))
        hi = min(hi, trace.index_at_or_before(search_span[1]))
    if hi < lo:
        raise OnsetError(
            f"search span too short for a {window_s} s window on {trace.sensor_id or 'trace'}",
            operation=op,
        )
    slopes = sliding_slopes(trace.samples, w + 1, dt)
    idx = np.arange(lo, hi + 1)
    pre = slopes[idx - w]
    post = slopes[idx]
    score = np.abs(pre - post)
    usable = ~np.isnan(score)
    if not usable.any():
        raise OnsetError("all onset candidates touch a gap", operation=op)
    best = float(np.max(score[usable]))
    if best < MIN_ONSET_SCORE_HZ_S:
        raise OnsetError(
            f"no onset found on {trace.sensor_id or 'trace'} (max score {best:.3g} Hz/s)",
            operation=op,
        )
    k = int(np.flatnonzero(usable & (score == best))[0])
    i = int(idx[k])
    return OnsetResult(
        onset_time=trace.time_at(i),
        rocof_pre=float(pre[k]),
        rocof_post=float(post[k]),
        score=best,
        search_span=(trace.time_at(lo), trace.time_at(hi)),
        sample_interval=dt,
        sensor_id=trace.sensor_id,
    )


def arrival_time(region_onset: OnsetResult, intercon_onset: OnsetResult) -> float:
    """Interconnection onset minus regional onset, as a whole number of grid steps."""
    dt = region_onset.sample_interval
    if abs(intercon_onset.sample_interval - dt) > GRID_TOL * dt:
        raise OnsetError(
            f"mismatched grids: {dt} s vs {intercon_onset.sample_interval} s",
            operation="arrival_time",
        )
    steps = (intercon_onset.onset_time - region_onset.onset_time) / dt
    k = round(steps)
    if abs(steps - k) > GRID_TOL:
        raise OnsetError("onsets are not on a common grid", operation="arrival_time")
    if k < 0:
        warnings.warn(
            f"negative arrival: interconnection onset precedes the region by {-k * dt:.3g} s",
            DataQualityWarning,
            stacklevel=2,
        )
    return k * dt
