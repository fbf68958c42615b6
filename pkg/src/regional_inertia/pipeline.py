"""End-to-end analysis of one disturbance event."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

from .errors import AnalysisError, DataQualityWarning
from .ingest import TraceBundle
from .metrics import assemble_result, inertia_from_rocof
from .onset import OnsetResult, arrival_time, detect_onset
from .preprocess import (
    interconnection_frequency,
    is_noisy,
    regional_frequency,
    two_point_mean_filter,
)
from .rocof import LocalSweep, RocofEstimate, interconnection_rocof, local_rocof_sweep, peak_rocof
from .trace import AnalysisResult, DisturbanceEvent, FrequencyTrace, RegionDefinition, SystemConstants

SEARCH_HALF_WIDTH_S = 30.0


class FilterMode(str, Enum):
    AUTO = "auto"
    ON = "on"
    OFF = "off"


class FilterStage(str, Enum):
    SENSOR = "sensor"  # filter each sensor, then aggregate
    REFERENCE = "reference"  # aggregate, then filter the reference traces


@dataclass
class EventAnalysis:
    """Everything computed for one event; ``result`` is the reportable row."""

    result: AnalysisResult
    regional_trace: FrequencyTrace
    intercon_trace: FrequencyTrace
    region_onset: OnsetResult
    intercon_onset: OnsetResult
    region_rocof: RocofEstimate
    intercon_rocof: RocofEstimate
    local: LocalSweep
    filtered_sensors: tuple[str, ...] = ()
    diagnostics: list[str] = field(default_factory=list)


def search_span(event: DisturbanceEvent, half_width_s: float = SEARCH_HALF_WIDTH_S) -> tuple[float, float]:
    return event.approx_time - half_width_s, event.approx_time + half_width_s


def _select_filtered(
    bundle: TraceBundle, span: tuple[float, float], mode: FilterMode, constants: SystemConstants
) -> tuple[str, ...]:
    if mode is FilterMode.OFF:
        return ()
    if mode is FilterMode.ON:
        return tuple(bundle.traces)
    # Noise is judged over the second before a preliminary onset on the
    # unfiltered median, which is robust to the noisy sensors themselves.
    prelim = detect_onset(interconnection_frequency(bundle), span, constants.onset_window_s)
    return tuple(
        sid for sid, tr in bundle.traces.items() if is_noisy(tr, prelim.onset_time)
    )


def analyze_event(
    bundle: TraceBundle,
    region: RegionDefinition,
    event: DisturbanceEvent,
    constants: SystemConstants = SystemConstants(),
    filter_mode: FilterMode | str = FilterMode.AUTO,
    filter_stage: FilterStage | str = FilterStage.SENSOR,
) -> EventAnalysis:
    """Run onset detection, RoCoF, inertia and ratio for one event.

    Raises :class:`AnalysisError` from whichever step fails.  Non-fatal
    conditions (``DataQualityWarning``) become result diagnostics.
    """
    filter_mode = FilterMode(filter_mode)
    filter_stage = FilterStage(filter_stage)
    constants.check_interval(bundle.sample_interval)
    if event.region_id != region.region_id:
        raise AnalysisError(
            f"event region {event.region_id!r} does not match region {region.region_id!r}",
            module="pipeline",
            operation="analyze_event",
        )
    lo, hi = bundle.common_span
    if not lo <= event.approx_time <= hi:
        raise AnalysisError(
            "event approx_time lies outside the span of the supplied traces",
            module="pipeline",
            operation="analyze_event",
        )
    span = search_span(event)
    diagnostics = list(bundle.diagnostics)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DataQualityWarning)

        filtered = _select_filtered(bundle, span, filter_mode, constants)
        work = bundle
        if filtered and filter_stage is FilterStage.SENSOR:
            work = bundle.map(lambda tr: two_point_mean_filter(tr) if tr.sensor_id in filtered else tr)

        regional = regional_frequency(work, region)
        intercon = interconnection_frequency(work)
        if filtered and filter_stage is FilterStage.REFERENCE:
            regional = two_point_mean_filter(regional)
            intercon = two_point_mean_filter(intercon)

        region_onset = detect_onset(regional, span, constants.onset_window_s)
        intercon_onset = detect_onset(intercon, span, constants.onset_window_s)
        arrival = arrival_time(region_onset, intercon_onset)

        region_rocof = peak_rocof(
            regional, region_onset.onset_time, constants.rocof_window_s, constants.rocof_horizon_s
        )
        intercon_rocof = interconnection_rocof(intercon, intercon_onset.onset_time, constants)
        local = local_rocof_sweep(work, region, span, constants)

        f_s, guard = constants.nominal_frequency_hz, constants.min_rocof_hz_per_s
        h_region = inertia_from_rocof(event.delta_p_mw, region_rocof, f_s, guard, event.event_id)
        h_intercon = inertia_from_rocof(event.delta_p_mw, intercon_rocof, f_s, guard, event.event_id)
        h_local = inertia_from_rocof(event.delta_p_mw, local.worst, f_s, guard, event.event_id)

    diagnostics.extend(str(w.message) for w in caught if issubclass(w.category, DataQualityWarning))
    if filtered:
        diagnostics.append(f"two-point filter applied ({filter_stage.value}): {', '.join(filtered)}")

    result = assemble_result(
        event,
        region_onset=region_onset,
        intercon_onset=intercon_onset,
        arrival_time_s=arrival,
        region_rocof=region_rocof,
        intercon_rocof=intercon_rocof,
        local=local,
        h_region=h_region,
        h_intercon=h_intercon,
        h_local=h_local,
        diagnostics=diagnostics,
    )
    return EventAnalysis(
        result=result,
        regional_trace=regional,
        intercon_trace=intercon,
        region_onset=region_onset,
        intercon_onset=intercon_onset,
        region_rocof=region_rocof,
        intercon_rocof=intercon_rocof,
        local=local,
        filtered_sensors=filtered,
        diagnostics=list(result.diagnostics),
    )
