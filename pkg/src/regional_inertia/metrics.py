"""Swing-equation inertia from RoCoF and power mismatch, and result assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AssemblyError, InertiaError
from .onset import OnsetResult
from .rocof import LocalSweep, RocofEstimate
from .trace import AnalysisResult, DisturbanceEvent, EventKind

DEFAULT_GUARD_HZ_S = 1e-4
RATIO_CROSSCHECK_RTOL = 1e-9


@dataclass(frozen=True)
class InertiaEstimate:
    """H*S in MVA*s together with the inputs that produced it."""

    h_times_s_mva_s: float
    rocof_hz_s: float
    delta_p_mw: float
    nominal_frequency_hz: float
    source_rocof: RocofEstimate | None = None
    event_id: str | None = None


def inertia_from_rocof(
    delta_p_mw: float,
    rocof: float | RocofEstimate,
    f_s: float = 60.0,
    guard: float = DEFAULT_GUARD_HZ_S,
    event_id: str | None = None,
) -> InertiaEstimate:
    """``delta_p * f_s / (2 |rocof|)``; the RoCoF sign is ignored here."""
    op = "inertia_from_rocof"
    source = rocof if isinstance(rocof, RocofEstimate) else None
    value = source.value_hz_s if source is not None else float(rocof)
    if not (delta_p_mw > 0 and math.isfinite(delta_p_mw)):
        raise InertiaError(f"power mismatch must be positive, got {delta_p_mw!r} MW", operation=op)
    if not (f_s > 0 and math.isfinite(f_s)):
        raise InertiaError(f"nominal frequency must be positive, got {f_s!r}", operation=op)
    if not math.isfinite(value) or abs(value) < guard:
        raise InertiaError(
            f"RoCoF below resolvable threshold: |{value:.3g}| < {guard:g} Hz/s", operation=op
        )
    h = delta_p_mw * f_s / (2.0 * abs(value))
    return InertiaEstimate(h, value, float(delta_p_mw), float(f_s), source, event_id)


def rocof_from_inertia(h_mva_s: float, delta_p_mw: float, f_s: float = 60.0) -> float:
    """Initial RoCoF of a generation trip: ``-delta_p * f_s / (2 h)``."""
    if not (h_mva_s > 0 and delta_p_mw > 0 and f_s > 0):
        raise InertiaError(
            f"inputs must be positive (h={h_mva_s!r}, delta_p={delta_p_mw!r}, f_s={f_s!r})",
            operation="rocof_from_inertia",
        )
    return -delta_p_mw * f_s / (2.0 * h_mva_s)


def region_to_system_ratio(h_region: InertiaEstimate, h_intercon: InertiaEstimate) -> float:
    """``h_region / h_intercon``, cross-checked against ``|rocof_intercon| / |rocof_region|``."""
    op = "region_to_system_ratio"
    if (
        h_region.event_id is not None
        and h_intercon.event_id is not None
        and h_region.event_id != h_intercon.event_id
    ):
        raise InertiaError(
            f"estimates belong to different events ({h_region.event_id!r}, {h_intercon.event_id!r})",
            operation=op,
        )
    ratio = h_region.h_times_s_mva_s / h_intercon.h_times_s_mva_s
    via_rocof = abs(h_intercon.rocof_hz_s) / abs(h_region.rocof_hz_s)
    if abs(ratio - via_rocof) > RATIO_CROSSCHECK_RTOL * max(abs(ratio), abs(via_rocof)):
        raise InertiaError(
            f"ratio {ratio!r} disagrees with RoCoF quotient {via_rocof!r}; "
            "estimates must share power mismatch and nominal frequency",
            operation=op,
        )
    return ratio


def sign_diagnostic(kind: EventKind, rocof_hz_s: float, label: str = "regional") -> str | None:
    """Message when a RoCoF's sign contradicts the event kind, else None."""
    if rocof_hz_s == 0 or math.copysign(1, rocof_hz_s) == kind.expected_sign:
        return None
    want = "negative" if kind.expected_sign < 0 else "positive"
    return f"sign: {label} RoCoF {rocof_hz_s:+.4g} Hz/s but {kind.value} implies {want}"


def assemble_result(
    event: DisturbanceEvent,
    *,
    region_onset: OnsetResult | None,
    intercon_onset: OnsetResult | None,
    arrival_time_s: float | None,
    region_rocof: RocofEstimate | None,
    intercon_rocof: RocofEstimate | None,
    local: LocalSweep | None,
    h_region: InertiaEstimate | None,
    h_intercon: InertiaEstimate | None,
    h_local: InertiaEstimate | None,
    diagnostics: Sequence[str] = (),
) -> AnalysisResult:
    """Combine per-metric pieces into one :class:`AnalysisResult`.

    Values stay in SI units; :meth:`AnalysisResult.table_row` converts.
    """
    parts = {
        "region onset": region_onset,
        "interconnection onset": intercon_onset,
        "arrival time": arrival_time_s,
        "regional rocof": region_rocof,
        "interconnection rocof": intercon_rocof,
        "local rocof": local,
        "regional inertia": h_region,
        "interconnection inertia": h_intercon,
        "local inertia": h_local,
    }
    missing = [name for name, value in parts.items() if value is None]
    if missing:
        raise AssemblyError(f"missing components: {', '.join(missing)}", operation="assemble_result")

    diags = list(diagnostics)
    for label, est in (("regional", region_rocof), ("interconnection", intercon_rocof), ("local", local.worst)):
        msg = sign_diagnostic(event.kind, est.value_hz_s, label)
        if msg:
            diags.append(msg)
    covered = set(local.per_sensor)
    if abs(local.worst.value_hz_s) < abs(region_rocof.value_hz_s):
        diags.append(
            f"local RoCoF |{local.worst.value_hz_s:.4g}| below regional |{region_rocof.value_hz_s:.4g}| Hz/s"
            + ("" if not local.failed else f" ({len(covered)} members swept)")
        )
    for sid, reason in sorted(local.failed.items()):
        diags.append(f"local sweep skipped {sid}: {reason}")

    return AnalysisResult(
        event_id=event.event_id,
        delta_p_mw=event.delta_p_mw,
        interconnection_rocof_hz_s=intercon_rocof.value_hz_s,
        regional_rocof_hz_s=region_rocof.value_hz_s,
        local_rocof_hz_s=local.worst.value_hz_s,
        per_sensor_rocof={k: local.per_sensor[k].value_hz_s for k in sorted(local.per_sensor)},
        h_intercon_mva_s=h_intercon.h_times_s_mva_s,
        h_region_mva_s=h_region.h_times_s_mva_s,
        h_local_mva_s=h_local.h_times_s_mva_s,
        arrival_time_s=arrival_time_s,
        region_to_system_ratio=region_to_system_ratio(h_region, h_intercon),
        onset_time_region=region_onset.onset_time,
        onset_time_intercon=intercon_onset.onset_time,
        local_sensor_id=local.worst_sensor,
        diagnostics=tuple(diags),
    )
