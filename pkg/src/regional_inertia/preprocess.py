"""Reference signals built from a bundle: regional mean, interconnection median,
and the two-point smoothing filter."""

from __future__ import annotations

import warnings
from typing import Iterable

import numpy as np

from .errors import DataQualityWarning, PreprocessError
from .ingest import TraceBundle
from .trace import GRID_TOL, FrequencyTrace, RegionDefinition

INTERCONNECTION_ID = "INTERCONNECTION"

# Std of first differences (Hz) above which a sensor counts as noisy.
NOISE_THRESHOLD_HZ = 5e-3
NOISE_LOOKBACK_S = 1.0


def align(traces: Iterable[FrequencyTrace], operation: str = "align") -> tuple[float, float, np.ndarray]:
    """Stack traces on their overlapping grid.

    Returns ``(t0, interval, matrix)`` where row ``i`` of ``matrix`` is the
    ``i``-th trace restricted to the overlap.
    """
    traces = list(traces)
    if not traces:
        raise PreprocessError("no traces to align", operation=operation)
    dt = traces[0].sample_interval
    for tr in traces[1:]:
        if abs(tr.sample_interval - dt) > GRID_TOL * dt:
            raise PreprocessError(
                f"sample interval of {tr.sensor_id!r} ({tr.sample_interval}) differs from {dt}",
                operation=operation,
            )
    start = max(tr.t0 for tr in traces)
    end = min(tr.t_end for tr in traces)
    if end < start - GRID_TOL * dt:
        raise PreprocessError("traces have zero overlap", operation=operation)
    rows = []
    for tr in traces:
        i0 = tr.index_of(start)
        i1 = tr.index_of(end)
        rows.append(tr.samples[i0 : i1 + 1])
    t0 = traces[int(np.argmax([tr.t0 for tr in traces]))].t0
    return t0, dt, np.vstack(rows)


def regional_frequency(bundle: TraceBundle, region: RegionDefinition) -> FrequencyTrace:
    """Weighted mean of the region members present in ``bundle``.

    Where some members are gapped, the remaining weights are renormalized;
    a ``DataQualityWarning`` is issued if fewer than half contribute anywhere.
    """
    op = "regional_frequency"
    weights = region.weight_map()
    members = [s for s in region.member_sensor_ids if s in bundle.traces]
    if not members:
        raise PreprocessError(f"no members of region {region.region_id!r} in bundle", operation=op)
    t0, dt, stack = align((bundle.traces[s] for s in members), op)
    w = np.array([weights[s] for s in members])[:, None]
    ok = ~np.isnan(stack)
    wsum = (w * ok).sum(axis=0)
    num = np.where(ok, stack, 0.0) * w
    with np.errstate(invalid="ignore", divide="ignore"):
        values = num.sum(axis=0) / wsum
    # Zero-weight members may all be valid while the weighted ones are gapped.
    values[wsum <= 0] = np.nan
    contributing = ok.sum(axis=0)
    sparse = contributing * 2 < len(members)
    if sparse.any():
        warnings.warn(
            f"region {region.region_id}: fewer than half of {len(members)} members contribute "
            f"at {int(sparse.sum())} grid points",
            DataQualityWarning,
            stacklevel=2,
        )
    return FrequencyTrace(region.region_id, t0, dt, values)


def interconnection_frequency(bundle: TraceBundle) -> FrequencyTrace:
    """Per-grid-point median over all non-gapped sensors in ``bundle``."""
    if len(bundle) == 0:
        raise PreprocessError("empty bundle", operation="interconnection_frequency")
    t0, dt, stack = align(bundle.traces.values(), "interconnection_frequency")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        values = np.nanmedian(stack, axis=0)
    return FrequencyTrace(INTERCONNECTION_ID, t0, dt, values)


def two_point_mean_filter(trace: FrequencyTrace) -> FrequencyTrace:
    """Average each sample with its forward neighbour; the last sample passes through."""
    x = trace.samples
    if len(x) < 2:
        raise PreprocessError(
            f"need at least 2 samples, got {len(x)}", operation="two_point_mean_filter"
        )
    y = np.empty_like(x)
    y[:-1] = (x[:-1] + x[1:]) / 2.0
    y[-1] = x[-1]
    return trace.replace(samples=y)


def noise_score(trace: FrequencyTrace, before: float, lookback_s: float = NOISE_LOOKBACK_S) -> float:
    """Std of first differences over ``[before - lookback_s, before)``.

    Returns NaN when fewer than two gap-free differences are available.
    """
    seg = trace.crop(before - lookback_s, before - trace.sample_interval).samples
    d = np.diff(seg)
    d = d[~np.isnan(d)]
    if d.size < 2:
        return float("nan")
    return float(np.std(d))


def is_noisy(trace: FrequencyTrace, before: float, threshold_hz: float = NOISE_THRESHOLD_HZ) -> bool:
    score = noise_score(trace, before)
    return bool(score == score and score > threshold_hz)
