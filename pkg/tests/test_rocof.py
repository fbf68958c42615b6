import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regional_inertia.errors import RocofError
from regional_inertia.lsq import lsq_slope
from regional_inertia.pipeline import analyze_event
from regional_inertia.preprocess import interconnection_frequency
from regional_inertia.rocof import interconnection_rocof, local_rocof_sweep, peak_rocof
from regional_inertia.synth import GovernorSpec, SensorSpec, SynthSpec, default_sensors, generate
from regional_inertia.trace import RegionDefinition, SystemConstants

from conftest import T0, bundle_of, make_trace

ONSET_INDEX = 20
ONSET = T0 + 2.0


def shaped(fn, n=60, dt=0.1):
    t = (np.arange(n) - ONSET_INDEX) * dt
    return np.where(t >= 0, 60.0 + fn(np.clip(t, 0, None)), 60.0)


def test_pure_ramp():
    est = peak_rocof(make_trace(shaped(lambda t: -0.1 * t)), ONSET)
    assert est.value_hz_s == pytest.approx(-0.1, rel=1e-9)
    assert est.window_start == pytest.approx(ONSET)
    assert est.n_windows_evaluated == 5


def test_quadratic_chord_peak():
    est = peak_rocof(make_trace(shaped(lambda t: -0.05 * t**2)), ONSET)
    # Chord slope over [a, a + 0.1] of -0.05 t^2 is -0.05 (b^2 - a^2) / 0.1.
    chords = [-0.05 * ((a + 0.1) ** 2 - a**2) / 0.1 for a in (0.0, 0.1, 0.2, 0.3, 0.4)]
    assert chords[-1] == pytest.approx(-0.045)
    assert est.value_hz_s == pytest.approx(min(chords), rel=1e-9)
    assert est.window_start == pytest.approx(ONSET + 0.4)


def test_higher_rate_uses_all_window_samples(rng):
    dt = 1 / 60
    n = 200
    v = 60.0 + 1e-3 * rng.standard_normal(n)
    tr = make_trace(v, dt=dt)
    onset = tr.time_at(50)
    est = peak_rocof(tr, onset)
    assert est.n_windows_evaluated == math.floor((0.5 - 0.1) / dt + 1e-6) + 1
    seg_slopes = [lsq_slope(v[50 + s : 50 + s + 7], dt) for s in range(est.n_windows_evaluated)]
    best = max(seg_slopes, key=abs)
    assert est.value_hz_s == pytest.approx(best, rel=1e-9)


@pytest.mark.parametrize("dt, window, horizon", [(0.1, 0.1, 0.5), (0.1, 0.2, 0.5), (0.05, 0.1, 0.5), (0.02, 0.1, 0.3)])
def test_window_count(dt, window, horizon):
    tr = make_trace(60.0 - 0.01 * np.arange(200), dt=dt)
    est = peak_rocof(tr, tr.time_at(10), window, horizon)
    assert est.n_windows_evaluated == math.floor((horizon - window) / dt + 1e-9) + 1


def test_peak_rocof_errors():
    tr = make_trace(shaped(lambda t: -0.1 * t, n=24))
    with pytest.raises(RocofError, match="insufficient"):
        peak_rocof(tr, ONSET)
    v = shaped(lambda t: -0.1 * t)
    v[ONSET_INDEX + 2] = np.nan
    with pytest.raises(RocofError, match="gap"):
        peak_rocof(make_trace(v), ONSET)
    with pytest.raises(RocofError, match="horizon"):
        peak_rocof(make_trace(shaped(lambda t: -0.1 * t)), ONSET, 0.5, 0.2)
    with pytest.raises(RocofError, match="fewer than 2"):
        peak_rocof(make_trace(shaped(lambda t: -0.1 * t)), ONSET, 0.05, 0.5)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.0, 2.0), st.floats(-10.0, 10.0).filter(lambda c: abs(c) > 1e-3))
def test_peak_dominates_chord_and_scales(slope, curvature, c):
    v = shaped(lambda t: -slope * t - curvature * t**2)
    tr = make_trace(v)
    est = peak_rocof(tr, ONSET)
    full = lsq_slope(v[ONSET_INDEX : ONSET_INDEX + 6], 0.1)
    assert abs(est.value_hz_s) >= abs(full) - 1e-12
    scaled = peak_rocof(make_trace(60.0 + c * (v - 60.0)), ONSET)
    assert scaled.value_hz_s == pytest.approx(c * est.value_hz_s, rel=1e-7, abs=1e-12)


def test_interconnection_delegates_to_peak_rocof():
    shapes = [lambda t: -0.1 * t, lambda t: -0.05 * t**2]
    for fn in shapes:
        med = interconnection_frequency(bundle_of([shaped(fn)] * 3))
        assert interconnection_rocof(med, ONSET) == peak_rocof(med, ONSET)


def test_interconnection_ignores_ringing_sensor():
    ramp = shaped(lambda t: -0.1 * t)
    ringing = 60.0 + 0.5 * (-1) ** np.arange(ramp.size)
    med = interconnection_frequency(bundle_of([ramp, ramp.copy(), ringing]))
    est = interconnection_rocof(med, ONSET)
    assert est.value_hz_s == pytest.approx(-0.1, rel=1e-6)


def test_single_sensor_bundle():
    v = shaped(lambda t: -0.07 * t - 0.02 * t**2)
    med = interconnection_frequency(bundle_of([v]))
    assert interconnection_rocof(med, ONSET).value_hz_s == peak_rocof(make_trace(v), ONSET).value_hz_s


def _ramp_spec(scales, **kw):
    # H chosen so the unscaled first-instant RoCoF is exactly -0.2 Hz/s.
    sensors = tuple(SensorSpec(f"S{i}", slope_scale=s) for i, s in enumerate(scales))
    return SynthSpec(true_h_mva_s=1000 * 60 / 0.4, delta_p_mw=1000, sensors=sensors,
                     record_length_s=15.0, onset_time=5.0, **kw)


def test_local_sweep_picks_steepest_sensor():
    ds = generate(_ramp_spec((1.5, 1.0, 0.5)))
    sweep = local_rocof_sweep(ds.bundle, ds.region)
    got = {k: v.value_hz_s for k, v in sweep.per_sensor.items()}
    assert got == pytest.approx({"S0": -0.3, "S1": -0.2, "S2": -0.1}, rel=1e-6)
    assert sweep.worst_sensor == "S0"
    assert sweep.worst.value_hz_s == pytest.approx(-0.3, rel=1e-6)
    assert not sweep.failed


def test_local_sweep_single_and_identical():
    ds = generate(_ramp_spec((1.0, 1.0)))
    one = local_rocof_sweep(ds.bundle, RegionDefinition("R", ("S0",)))
    assert one.worst == one.per_sensor["S0"]
    both = local_rocof_sweep(ds.bundle, ds.region)
    assert both.per_sensor["S0"].value_hz_s == both.per_sensor["S1"].value_hz_s
    assert abs(both.worst.value_hz_s) == abs(both.per_sensor["S0"].value_hz_s)


def test_local_sweep_reports_failures():
    ds = generate(_ramp_spec((1.0,)))
    flat = make_trace([60.0] * len(ds.bundle.traces["S0"]), sensor_id="FLAT")
    from regional_inertia.ingest import TraceBundle

    bundle = TraceBundle.from_traces([ds.bundle.traces["S0"], flat])
    sweep = local_rocof_sweep(bundle, RegionDefinition("R", ("S0", "FLAT", "GONE")))
    assert set(sweep.failed) == {"FLAT", "GONE"}
    assert "no onset found" in sweep.failed["FLAT"]
    with pytest.raises(RocofError, match="no usable member"):
        local_rocof_sweep(bundle, RegionDefinition("R", ("FLAT",)))


def test_spatial_ordering_on_generator_output():
    spec = SynthSpec(
        true_h_mva_s=400_000.0, delta_p_mw=1200.0, sensors=default_sensors(8),
        governor=GovernorSpec(droop_mw_per_hz=4000.0, time_constant_s=2.0), record_length_s=20.0,
    )
    ds = generate(spec)
    res = analyze_event(ds.bundle, ds.region, ds.event).result
    assert abs(res.local_rocof_hz_s) >= abs(res.regional_rocof_hz_s) >= abs(res.interconnection_rocof_hz_s)


def test_table_row_reproduction_2024():
    # A regional RoCoF of 65 mHz/s with a 771 MW mismatch.
    spec = SynthSpec(
        true_h_mva_s=771 * 60 / 0.13, delta_p_mw=771.0, sensors=default_sensors(6),
        governor=GovernorSpec(droop_mw_per_hz=2000.0, time_constant_s=5.0), record_length_s=20.0,
    )
    ds = generate(spec)
    res = analyze_event(ds.bundle, ds.region, ds.event, SystemConstants()).result
    assert res.regional_rocof_hz_s == pytest.approx(-0.065, rel=5e-3)
    assert round(res.table_row()["regional_rocof_mhz_s"]) == 65
