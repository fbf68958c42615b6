import numpy as np
import pytest

from regional_inertia.errors import AnalysisError
from regional_inertia.trace import (
    AnalysisResult,
    DisturbanceEvent,
    EventKind,
    RegionDefinition,
    SystemConstants,
    validate_trace,
)

from conftest import make_trace


def test_valid_trace_has_no_violations():
    assert validate_trace(make_trace([60.0, 59.99, 60.01])) == []


def test_out_of_band_sample_is_reported_with_index():
    violations = validate_trace(make_trace([60.0, 60.0, 70.0, 60.0]))
    assert len(violations) == 1
    assert violations[0].startswith("band") and "sample 2" in violations[0]


def test_single_sample_is_a_length_violation():
    violations = validate_trace(make_trace([60.0]))
    assert [v.split(":")[0] for v in violations] == ["length"]


def test_gaps_are_not_band_violations():
    assert validate_trace(make_trace([60.0, np.nan, 60.0])) == []


def test_non_positive_interval_and_inf():
    violations = validate_trace(make_trace([60.0, np.inf], dt=0.0))
    assert {v.split(":")[0] for v in violations} == {"sample_interval", "band"}


def test_trace_is_immutable():
    tr = make_trace([60.0, 60.1])
    with pytest.raises(ValueError):
        tr.samples[0] = 1.0


def test_index_of_rejects_off_grid_time():
    tr = make_trace(np.full(10, 60.0))
    assert tr.index_of(tr.t0 + 0.3) == 3
    with pytest.raises(AnalysisError):
        tr.index_of(tr.t0 + 0.35)


@pytest.mark.parametrize(
    "members, weights",
    [((), None), (("a", "a"), None), (("a", "b"), (0.5,)), (("a", "b"), (0.7, 0.7)), (("a", "b"), (-0.5, 1.5))],
)
def test_region_invariants(members, weights):
    with pytest.raises(ValueError):
        RegionDefinition("R", members, weights)


def test_region_default_weights_are_uniform():
    assert RegionDefinition("R", ("a", "b", "c", "d")).weight_map() == {k: 0.25 for k in "abcd"}


def test_event_requires_positive_magnitude():
    with pytest.raises(ValueError):
        DisturbanceEvent("e", 0.0, -5.0, "generation_trip", "R")
    assert DisturbanceEvent("e", 0.0, 5.0, "load_loss", "R").kind is EventKind.LOAD_LOSS


def test_event_kind_signs():
    assert EventKind.GENERATION_TRIP.expected_sign == -1
    assert EventKind.LOAD_LOSS.expected_sign == 1


def test_constants_window_ordering():
    with pytest.raises(ValueError):
        SystemConstants(rocof_window_s=0.6, rocof_horizon_s=0.5)
    with pytest.raises(AnalysisError):
        SystemConstants(onset_window_s=0.1).check_interval(0.1)


def _result(**kw):
    base = dict(
        event_id="E", delta_p_mw=771.0, interconnection_rocof_hz_s=-0.027,
        regional_rocof_hz_s=-0.065, local_rocof_hz_s=-0.133, per_sensor_rocof={"b": -0.1, "a": -0.133},
        h_intercon_mva_s=856_667.0, h_region_mva_s=355_846.0, h_local_mva_s=173_910.0,
        arrival_time_s=0.2, region_to_system_ratio=0.4154, onset_time_region=1.0, onset_time_intercon=1.2,
    )
    base.update(kw)
    return AnalysisResult(**base)


def test_table_row_converts_only_at_the_boundary():
    res = _result()
    row = res.table_row()
    assert row["regional_rocof_mhz_s"] == pytest.approx(65.0)
    assert row["h_region_over_h_intercon_pct"] == pytest.approx(41.54)
    assert res.regional_rocof_hz_s == -0.065


def test_result_dict_round_trip_sorts_sensor_map():
    d = _result().to_dict()
    assert list(d["per_sensor_rocof"]) == ["a", "b"]
    assert AnalysisResult.from_dict(d).to_dict() == d
