"""Synthetic multi-sensor disturbance records with known inertia.

The base frequency is flat at nominal until the onset, then follows

    df/dt  = (sign * dP + P_gov) * f_s / (2 H)
    dP_gov/dt = (droop * (f_s - f) - P_gov) / T

integrated with fixed-step RK4 at ten times the output sample rate.  The
governor output starts at zero, so the first-instant RoCoF is exactly
``sign * dP * f_s / (2 H)``.  Each sensor sees the base deviation delayed,
scaled and with white noise added.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SynthSpecError
from .ingest import TraceBundle, event_to_json, format_timestamp, write_trace_file
from .metrics import rocof_from_inertia
from .trace import DisturbanceEvent, EventKind, FrequencyTrace, RegionDefinition

OVERSAMPLE = 10
DEFAULT_START = 1725089760.0  # 2024-08-31T07:36:00Z

__all__ = [
    "GovernorSpec",
    "SensorSpec",
    "SynthSpec",
    "SynthDataset",
    "generate",
    "simulate_base",
    "rocof_from_inertia",
    "write_dataset",
    "default_sensors",
]


@dataclass(frozen=True)
class GovernorSpec:
    droop_mw_per_hz: float = 0.0
    time_constant_s: float = 5.0


@dataclass(frozen=True)
class SensorSpec:
    sensor_id: str
    delay_s: float = 0.0
    noise_std_hz: float = 0.0
    slope_scale: float = 1.0
    in_region: bool = True


@dataclass(frozen=True)
class SynthSpec:
    true_h_mva_s: float
    delta_p_mw: float
    sensors: tuple[SensorSpec, ...]
    f_s: float = 60.0
    onset_time: float = 10.0
    record_length_s: float = 30.0
    sample_rate: float = 10.0
    governor: GovernorSpec = GovernorSpec()
    seed: int = 0
    kind: EventKind = EventKind.GENERATION_TRIP
    start_time: float = DEFAULT_START
    onset_window_s: float = 0.5
    event_id: str = "SYNTH"
    region_id: str = "REGION"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "kind", EventKind(self.kind))
        self.validate()

    def validate(self) -> None:
        def bad(msg: str) -> SynthSpecError:
            return SynthSpecError(msg, operation="SynthSpec")

        if not (self.true_h_mva_s > 0 and math.isfinite(self.true_h_mva_s)):
            raise bad(f"true_h_mva_s must be > 0, got {self.true_h_mva_s!r}")
        if not (self.delta_p_mw > 0 and math.isfinite(self.delta_p_mw)):
            raise bad(f"delta_p_mw must be > 0, got {self.delta_p_mw!r}")
        if not self.f_s > 0:
            raise bad(f"f_s must be > 0, got {self.f_s!r}")
        if not self.sample_rate > 0:
            raise bad(f"sample_rate must be > 0, got {self.sample_rate!r}")
        if not 2 * self.onset_window_s < self.onset_time < self.record_length_s - 1:
            raise bad(
                f"onset_time {self.onset_time} must lie in "
                f"({2 * self.onset_window_s}, {self.record_length_s - 1})"
            )
        if self.governor.droop_mw_per_hz < 0 or not self.governor.time_constant_s > 0:
            raise bad("governor needs droop >= 0 and time constant > 0")
        if not self.sensors:
            raise bad("at least one sensor is required")
        ids = [s.sensor_id for s in self.sensors]
        if len(set(ids)) != len(ids) or not all(ids):
            raise bad("sensor ids must be unique and non-empty")
        for s in self.sensors:
            if s.delay_s < 0 or s.noise_std_hz < 0 or not s.slope_scale > 0:
                raise bad(f"sensor {s.sensor_id}: need delay >= 0, noise >= 0, slope_scale > 0")
        if not any(s.in_region for s in self.sensors):
            raise bad("no sensor is marked in_region")

    @property
    def sample_interval(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def initial_rocof_hz_s(self) -> float:
        return self.kind.expected_sign * -rocof_from_inertia(
            self.true_h_mva_s, self.delta_p_mw, self.f_s
        )

    def to_json(self) -> dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        data["sensors"] = [asdict(s) for s in self.sensors]
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "SynthSpec":
        data = dict(data)
        try:
            data["sensors"] = tuple(SensorSpec(**s) for s in data["sensors"])
            if "governor" in data:
                data["governor"] = GovernorSpec(**data["governor"])
            return cls(**data)
        except (KeyError, TypeError) as exc:
            raise SynthSpecError(f"invalid spec: {exc}", operation="SynthSpec.from_json") from exc


def default_sensors(n: int, noise_std_hz: float = 0.0, delay_s: float = 0.2) -> tuple[SensorSpec, ...]:
    """``n // 2`` in-region sensors around the event, the rest delayed and attenuated.

    In-region slope scales are symmetric about 1 so their mean is exactly 1.
    """
    if n < 1:
        raise SynthSpecError("need at least one sensor", operation="default_sensors")
    n_in = max(1, n // 2)
    spread = 0.5 if n_in > 1 else 0.0
    scales = np.linspace(1 + spread / 2, 1 - spread / 2, n_in) if n_in > 1 else np.array([1.0])
    sensors = [
        SensorSpec(f"S{i + 1:02d}", 0.0, noise_std_hz, float(scales[i]), True) for i in range(n_in)
    ]
    sensors += [
        SensorSpec(f"S{i + 1:02d}", delay_s, noise_std_hz, 0.5, False) for i in range(n_in, n)
    ]
    return tuple(sensors)


def simulate_base(spec: SynthSpec, duration_s: float) -> tuple[float, np.ndarray]:
    """Frequency after onset on the fine grid; returns ``(step, values)``."""
    step = spec.sample_interval / OVERSAMPLE
    n = int(math.ceil(duration_s / step)) + 1
    k = spec.f_s / (2.0 * spec.true_h_mva_s)
    drive = spec.kind.expected_sign * spec.delta_p_mw
    droop = spec.governor.droop_mw_per_hz
    tau = spec.governor.time_constant_s
    f_s = spec.f_s

    def rhs(f: float, p: float) -> tuple[float, float]:
        return (drive + p) * k, (droop * (f_s - f) - p) / tau

    out = np.empty(n)
    f, p = f_s, 0.0
    out[0] = f
    for j in range(1, n):
        k1f, k1p = rhs(f, p)
        k2f, k2p = rhs(f + 0.5 * step * k1f, p + 0.5 * step * k1p)
        k3f, k3p = rhs(f + 0.5 * step * k2f, p + 0.5 * step * k2p)
        k4f, k4p = rhs(f + step * k3f, p + step * k3p)
        f += step * (k1f + 2 * k2f + 2 * k3f + k4f) / 6.0
        p += step * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0
        out[j] = f
    return step, out


@dataclass(frozen=True)
class SynthDataset:
    spec: SynthSpec
    bundle: TraceBundle
    region: RegionDefinition
    event: DisturbanceEvent
    clean: dict[str, FrequencyTrace] = field(repr=False)
    ground_truth: dict[str, Any] = field(repr=False)


def generate(spec: SynthSpec) -> SynthDataset:
    """Build a noisy multi-sensor record and its ground truth from ``spec``."""
    dt = spec.sample_interval
    n = int(math.floor(spec.record_length_s * spec.sample_rate + 1e-9)) + 1
    step, base = simulate_base(spec, spec.record_length_s)
    rng = np.random.default_rng(spec.seed)
    traces, clean = [], {}
    sample_idx = np.arange(n, dtype=float)
    for s in spec.sensors:
        # Position on the fine grid, in fine steps since this sensor's onset.
        u = (sample_idx - (spec.onset_time + s.delay_s) * spec.sample_rate) * OVERSAMPLE
        snapped = np.round(u)
        u = np.where(np.abs(u - snapped) < 1e-6, snapped, u)
        dev = np.where(u >= 0, np.interp(u, np.arange(base.size), base) - spec.f_s, 0.0)
        values = spec.f_s + s.slope_scale * dev
        clean[s.sensor_id] = FrequencyTrace(s.sensor_id, spec.start_time, dt, values)
        noisy = values + (rng.normal(0.0, s.noise_std_hz, n) if s.noise_std_hz > 0 else 0.0)
        traces.append(FrequencyTrace(s.sensor_id, spec.start_time, dt, noisy))

    members = tuple(s.sensor_id for s in spec.sensors if s.in_region)
    region = RegionDefinition(spec.region_id, members)
    onset_abs = spec.start_time + spec.onset_time
    event = DisturbanceEvent(
        spec.event_id, float(round(onset_abs)), spec.delta_p_mw, spec.kind, spec.region_id
    )
    r0 = spec.initial_rocof_hz_s
    scales = [s.slope_scale for s in spec.sensors if s.in_region]
    truth = {
        "spec": spec.to_json(),
        "onset_time": onset_abs,
        "onset_time_iso": format_timestamp(onset_abs),
        "initial_rocof_hz_s": r0,
        "regional_initial_rocof_hz_s": r0 * float(np.mean(scales)),
        "true_h_mva_s": spec.true_h_mva_s,
        "sensors": {
            s.sensor_id: {
                "onset_time": onset_abs + s.delay_s,
                "initial_rocof_hz_s": r0 * s.slope_scale,
                "in_region": s.in_region,
            }
            for s in spec.sensors
        },
    }
    bundle = TraceBundle.from_traces(traces, region)
    return SynthDataset(spec, bundle, region, event, clean, truth)


def _dump_json(data: Any, path: Path) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_dataset(dataset: SynthDataset, out_dir: str | os.PathLike) -> Path:
    """Write ``traces/*.csv``, ``region.json``, ``event.json`` and ``ground_truth.json``."""
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    for sid, trace in dataset.bundle.traces.items():
        write_trace_file(trace, out / "traces" / f"{sid}.csv")
    region_doc = {
        "region_id": dataset.region.region_id,
        "sensors": [
            {"id": s.sensor_id, "lat": None, "lon": None, "in_region": s.in_region}
            for s in dataset.spec.sensors
        ],
    }
    _dump_json(region_doc, out / "region.json")
    _dump_json(event_to_json(dataset.event), out / "event.json")
    _dump_json(dataset.ground_truth, out / "ground_truth.json")
    return out
