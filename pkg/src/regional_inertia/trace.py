"""Core domain types: traces, regions, events, constants and results.

Units are fixed throughout the package: frequency in Hz, RoCoF in Hz/s,
power mismatch in MW and inertia (the H*S product) in MVA*s.  Table-style
reporting in mHz/s happens only in :meth:`AnalysisResult.table_row`.

Gaps in a trace are stored as NaN samples.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import AnalysisError

BAND_LOW_HZ = 55.0
BAND_HIGH_HZ = 65.0

# Slack, in sample intervals, when snapping a timestamp onto a grid.  Epoch
# timestamps near 1.7e9 s carry ~2.4e-7 s of float error, which is ~3e-5
# samples at 120 samples/s.
GRID_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class FrequencyTrace:
    """One sensor's frequency record on a uniform time grid.

    Sample ``k`` sits at ``t0 + k * sample_interval`` (UTC seconds).
    """

    sensor_id: str
    t0: float
    sample_interval: float
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=float, copy=True).reshape(-1)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "sample_interval", float(self.sample_interval))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self)) * self.sample_interval

    @property
    def t_end(self) -> float:
        return self.t0 + (len(self) - 1) * self.sample_interval

    @property
    def gap_mask(self) -> np.ndarray:
        return np.isnan(self.samples)

    def time_at(self, index: int) -> float:
        return self.t0 + index * self.sample_interval

    def index_of(self, t: float) -> int:
        """Grid index of timestamp ``t``; ``t`` must sit on the grid."""
        pos = (t - self.t0) / self.sample_interval
        k = round(pos)
        if abs(pos - k) > GRID_TOL:
            raise AnalysisError(
                f"timestamp {t!r} is not on the grid of trace {self.sensor_id!r}",
                module="trace",
                operation="index_of",
            )
        return int(k)

    def index_at_or_after(self, t: float) -> int:
        return int(math.ceil((t - self.t0) / self.sample_interval - GRID_TOL))

    def index_at_or_before(self, t: float) -> int:
        return int(math.floor((t - self.t0) / self.sample_interval + GRID_TOL))

    def crop(self, start: float, end: float) -> "FrequencyTrace":
        """Samples with timestamps inside ``[start, end]``."""
        i0 = max(self.index_at_or_after(start), 0)
        i1 = min(self.index_at_or_before(end), len(self) - 1)
        if i1 < i0:
            return self.replace(t0=self.time_at(i0), samples=np.empty(0))
        return self.replace(t0=self.time_at(i0), samples=self.samples[i0 : i1 + 1])

    def replace(self, **changes: Any) -> "FrequencyTrace":
        fields = dict(
            sensor_id=self.sensor_id,
            t0=self.t0,
            sample_interval=self.sample_interval,
            samples=self.samples,
        )
        fields.update(changes)
        return FrequencyTrace(**fields)


def validate_trace(trace: FrequencyTrace) -> list[str]:
    """Return the invariant violations of ``trace``; empty means valid."""
    violations = []
    dt = trace.sample_interval
    if not (math.isfinite(dt) and dt > 0):
        violations.append(f"sample_interval: must be > 0, got {dt!r}")
    if not math.isfinite(trace.t0):
        violations.append(f"t0: must be finite, got {trace.t0!r}")
    if len(trace) < 2:
        violations.append(f"length: need at least 2 samples, got {len(trace)}")
    x = trace.samples
    # NaN is the gap marker; anything else outside the band is a violation.
    bad = ~np.isnan(x) & ~((x >= BAND_LOW_HZ) & (x <= BAND_HIGH_HZ))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        violations.append(
            f"band: sample {k} = {x[k]!r} Hz outside [{BAND_LOW_HZ}, {BAND_HIGH_HZ}]"
        )
    return violations


@dataclass(frozen=True)
class RegionDefinition:
    region_id: str
    member_sensor_ids: tuple[str, ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        members = tuple(self.member_sensor_ids)
        object.__setattr__(self, "member_sensor_ids", members)
        if not members:
            raise ValueError(f"region {self.region_id!r} has no members")
        if len(set(members)) != len(members):
            raise ValueError(f"region {self.region_id!r} has duplicate member ids")
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            object.__setattr__(self, "weights", w)
            if len(w) != len(members):
                raise ValueError("weights and members differ in length")
            if any(v < 0 or not math.isfinite(v) for v in w):
                raise ValueError("weights must be finite and non-negative")
            if abs(sum(w) - 1.0) > 1e-9:
                raise ValueError(f"weights must sum to 1, got {sum(w)!r}")

    def weight_map(self) -> dict[str, float]:
        if self.weights is None:
            n = len(self.member_sensor_ids)
            return {s: 1.0 / n for s in self.member_sensor_ids}
        return dict(zip(self.member_sensor_ids, self.weights))


class EventKind(str, enum.Enum):
    GENERATION_TRIP = "generation_trip"
    LOAD_LOSS = "load_loss"

    @property
    def expected_sign(self) -> int:
        """Sign of the RoCoF this kind of event should produce."""
        return -1 if self is EventKind.GENERATION_TRIP else 1


@dataclass(frozen=True)
class DisturbanceEvent:
    event_id: str
    approx_time: float
    delta_p_mw: float
    kind: EventKind
    region_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", EventKind(self.kind))
        if not (self.delta_p_mw > 0 and math.isfinite(self.delta_p_mw)):
            raise ValueError(f"delta_p_mw must be a positive magnitude, got {self.delta_p_mw!r}")


@dataclass(frozen=True)
class SystemConstants:
    nominal_frequency_hz: float = 60.0
    rocof_window_s: float = 0.1
    rocof_horizon_s: float = 0.5
    onset_window_s: float = 0.5
    min_rocof_hz_per_s: float = 1e-4

    def __post_init__(self) -> None:
        if not 0 < self.rocof_window_s <= self.rocof_horizon_s:
            raise ValueError("need 0 < rocof_window_s <= rocof_horizon_s")
        if self.onset_window_s <= 0:
            raise ValueError("onset_window_s must be positive")
        if self.nominal_frequency_hz <= 0:
            raise ValueError("nominal_frequency_hz must be positive")
        if self.min_rocof_hz_per_s <= 0:
            raise ValueError("min_rocof_hz_per_s must be positive")

    def check_interval(self, sample_interval: float) -> None:
        if self.onset_window_s < 2 * sample_interval * (1 - GRID_TOL):
            raise AnalysisError(
                f"onset_window_s={self.onset_window_s} shorter than two samples "
                f"of {sample_interval} s",
                module="trace",
                operation="SystemConstants",
            )


# Table-I style column names, in published order.
TABLE_COLUMNS = (
    "event_id",
    "power_mismatch_mw",
    "interconnection_max_rocof_mhz_s",
    "regional_rocof_mhz_s",
    "local_rocof_mhz_s",
    "h_intercon_mva_s",
    "h_region_mva_s",
    "h_local_mva_s",
    "arrival_time_s",
    "h_region_over_h_intercon_pct",
)


@dataclass(frozen=True)
class AnalysisResult:
    event_id: str
    delta_p_mw: float
    interconnection_rocof_hz_s: float
    regional_rocof_hz_s: float
    local_rocof_hz_s: float
    per_sensor_rocof: Mapping[str, float]
    h_intercon_mva_s: float
    h_region_mva_s: float
    h_local_mva_s: float
    arrival_time_s: float
    region_to_system_ratio: float
    onset_time_region: float
    onset_time_intercon: float
    local_sensor_id: str = ""
    diagnostics: Sequence[str] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "event_id": self.event_id,
            "delta_p_mw": self.delta_p_mw,
            "interconnection_rocof_hz_s": self.interconnection_rocof_hz_s,
            "regional_rocof_hz_s": self.regional_rocof_hz_s,
            "local_rocof_hz_s": self.local_rocof_hz_s,
            "local_sensor_id": self.local_sensor_id,
            "per_sensor_rocof": {k: self.per_sensor_rocof[k] for k in sorted(self.per_sensor_rocof)},
            "h_intercon_mva_s": self.h_intercon_mva_s,
            "h_region_mva_s": self.h_region_mva_s,
            "h_local_mva_s": self.h_local_mva_s,
            "arrival_time_s": self.arrival_time_s,
            "region_to_system_ratio": self.region_to_system_ratio,
            "onset_time_region": self.onset_time_region,
            "onset_time_intercon": self.onset_time_intercon,
            "diagnostics": list(self.diagnostics),
        }
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AnalysisResult":
        kwargs = dict(data)
        kwargs["per_sensor_rocof"] = dict(kwargs.get("per_sensor_rocof", {}))
        kwargs["diagnostics"] = tuple(kwargs.get("diagnostics", ()))
        return cls(**kwargs)

    def table_row(self) -> dict[str, Any]:
        """Reporting view: RoCoF magnitudes in mHz/s and the ratio in percent."""
        return {
            "event_id": self.event_id,
            "power_mismatch_mw": self.delta_p_mw,
            "interconnection_max_rocof_mhz_s": abs(self.interconnection_rocof_hz_s) * 1000.0,
            "regional_rocof_mhz_s": abs(self.regional_rocof_hz_s) * 1000.0,
            "local_rocof_mhz_s": abs(self.local_rocof_hz_s) * 1000.0,
            "h_intercon_mva_s": self.h_intercon_mva_s,
            "h_region_mva_s": self.h_region_mva_s,
            "h_local_mva_s": self.h_local_mva_s,
            "arrival_time_s": self.arrival_time_s,
            "h_region_over_h_intercon_pct": self.region_to_system_ratio * 100.0,
        }
