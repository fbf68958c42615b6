"""Built-in consistency checks against the published CAISO table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import AnalysisError
from .metrics import inertia_from_rocof, region_to_system_ratio
from .published import CAISO_EVENTS, PublishedEvent

INERTIA_RTOL = 0.03
RATIO_TOL_PCT = 1.0
ROUND_TRIP_RTOL = 0.01


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def table_inertia_checks(events: Sequence[PublishedEvent] = CAISO_EVENTS, f_s: float = 60.0) -> list[Check]:
    """Published power mismatch and RoCoF reproduce each published inertia within 3%."""
    checks = []
    for ev in events:
        for level, rocof_mhz, published in (
            ("h_intercon", ev.intercon_rocof_mhz_s, ev.h_intercon_mva_s),
            ("h_region", ev.regional_rocof_mhz_s, ev.h_region_mva_s),
            ("h_local", ev.local_rocof_mhz_s, ev.h_local_mva_s),
        ):
            h = inertia_from_rocof(ev.delta_p_mw, -rocof_mhz / 1000.0, f_s).h_times_s_mva_s
            err = (h - published) / published
            checks.append(
                Check(
                    f"{ev.label} {level}",
                    abs(err) <= INERTIA_RTOL,
                    f"computed {h:,.0f} vs published {published:,.0f} MVA*s ({err:+.2%})",
                )
            )
    return checks


def table_ratio_checks(events: Sequence[PublishedEvent] = CAISO_EVENTS, f_s: float = 60.0) -> list[Check]:
    """Ratio of the computed regional and interconnection inertia vs the published percent."""
    checks = []
    for ev in events:
        h_r = inertia_from_rocof(ev.delta_p_mw, -ev.regional_rocof_mhz_s / 1000.0, f_s)
        h_i = inertia_from_rocof(ev.delta_p_mw, -ev.intercon_rocof_mhz_s / 1000.0, f_s)
        pct = 100.0 * region_to_system_ratio(h_r, h_i)
        diff = pct - ev.ratio_pct
        checks.append(
            Check(
                f"{ev.label} ratio",
                abs(diff) <= RATIO_TOL_PCT,
                f"computed {pct:.2f}% vs published {ev.ratio_pct:.1f}% ({diff:+.2f} pp)",
            )
        )
    return checks


def synthetic_round_trip_check(seed: int = 7) -> Check:
    """Noise-free generator run through the full pipeline recovers H*S within 1%."""
    from .pipeline import analyze_event
    from .synth import GovernorSpec, SynthSpec, default_sensors, generate

    spec = SynthSpec(
        true_h_mva_s=500_000.0,
        delta_p_mw=1000.0,
        sensors=default_sensors(5),
        governor=GovernorSpec(droop_mw_per_hz=3000.0, time_constant_s=2.0),
        record_length_s=20.0,
        seed=seed,
    )
    ds = generate(spec)
    name = "synthetic round trip"
    try:
        res = analyze_event(ds.bundle, ds.region, ds.event).result
    except AnalysisError as exc:
        return Check(name, False, str(exc))
    err = res.h_region_mva_s / spec.true_h_mva_s - 1.0
    return Check(
        name,
        abs(err) <= ROUND_TRIP_RTOL,
        f"h_region {res.h_region_mva_s:,.0f} vs true {spec.true_h_mva_s:,.0f} MVA*s ({err:+.3%})",
    )


def run_selfcheck(events: Sequence[PublishedEvent] = CAISO_EVENTS) -> list[Check]:
    return [*table_inertia_checks(events), *table_ratio_checks(events), synthetic_round_trip_check()]
