import csv
import dataclasses
import json
import subprocess
import sys

import pytest

from regional_inertia.cli import main
from regional_inertia.published import CAISO_EVENTS, dump_events

SYNTH = ["--sensors", "6", "--droop", "3000", "--gov-tau", "2", "--length", "20"]


def synth(tmp_path, name, *extra):
    out = tmp_path / name
    assert main(["synth", "--out", str(out), *SYNTH, *extra]) == 0
    return out


def analyze(d, out, *extra):
    return main([
        "analyze", "--traces", str(d / "traces"), "--event", str(d / "event.json"),
        "--region", str(d / "region.json"), "--out", str(out), *extra,
    ])


def test_synth_writes_dataset(tmp_path, capsys):
    d = tmp_path / "ds"
    assert main(["synth", "--h", "500000", "--dp", "1000", "--sensors", "5", "--seed", "7", "--out", str(d)]) == 0
    assert len(list((d / "traces").glob("*.csv"))) == 5
    for name in ("region.json", "event.json", "ground_truth.json"):
        assert (d / name).is_file()
    assert "wrote 5 traces" in capsys.readouterr().out


def test_synth_rejects_zero_inertia(tmp_path, capsys):
    assert main(["synth", "--h", "0", "--out", str(tmp_path / "x")]) == 2
    assert "true_h_mva_s" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()


def test_synth_same_seed_byte_identical(tmp_path):
    a = synth(tmp_path, "a", "--noise", "0.002", "--seed", "9")
    b = synth(tmp_path, "b", "--noise", "0.002", "--seed", "9")
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_synth_from_spec_file(tmp_path):
    d = synth(tmp_path, "a", "--seed", "4")
    spec = json.loads((d / "ground_truth.json").read_text())["spec"]
    (tmp_path / "spec.json").write_text(json.dumps(spec))
    assert main(["synth", "--spec", str(tmp_path / "spec.json"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "b" / "traces" / "S01.csv").read_bytes() == (d / "traces" / "S01.csv").read_bytes()


def test_analyze_round_trip(tmp_path, capsys):
    d = synth(tmp_path, "ds", "--seed", "3")
    assert analyze(d, tmp_path / "out", "--series") == 0
    result = json.loads((tmp_path / "out" / "result.json").read_text())
    truth = json.loads((d / "ground_truth.json").read_text())
    assert abs(result["h_region_mva_s"] / truth["true_h_mva_s"] - 1) < 0.05
    assert list(result["per_sensor_rocof"]) == sorted(result["per_sensor_rocof"])
    with open(tmp_path / "out" / "series.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert sum(int(r["regional_onset"]) for r in rows) == 1
    assert sum(int(r["regional_peak_window"]) for r in rows) >= 2
    assert "H_region" in capsys.readouterr().out


def test_analyze_missing_event_file(tmp_path, capsys):
    d = synth(tmp_path, "ds")
    missing = tmp_path / "nope.json"
    code = main(["analyze", "--traces", str(d / "traces"), "--event", str(missing),
                 "--region", str(d / "region.json"), "--out", str(tmp_path / "o")])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_analyze_below_guard(tmp_path, capsys):
    d = synth(tmp_path, "ds", "--h", "1e9")
    assert analyze(d, tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "RoCoF below resolvable threshold" in err
    assert "[metrics.inertia_from_rocof]" in err


def test_print_config_precedence(tmp_path, capsys):
    d = synth(tmp_path, "ds")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rocof_window_s": 0.2, "onset_window_s": 0.8}))
    capsys.readouterr()
    assert analyze(d, tmp_path / "o", "--config", str(cfg), "--onset-window", "0.6", "--print-config") == 0
    out = capsys.readouterr().out
    resolved = json.loads(out[: out.index("}") + 1])
    assert resolved["rocof_window_s"] == 0.2
    assert resolved["onset_window_s"] == 0.6
    assert resolved["rocof_horizon_s"] == 0.5 and resolved["nominal_frequency_hz"] == 60.0


def test_unknown_config_key(tmp_path, capsys):
    d = synth(tmp_path, "ds")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert analyze(d, tmp_path / "o", "--config", str(cfg)) == 2
    assert "bogus" in capsys.readouterr().err


def _manifest(tmp_path, entries):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"events": entries}))
    return path


def _entry(name):
    return {"traces": f"{name}/traces", "event": f"{name}/event.json", "region": f"{name}/region.json"}


@pytest.mark.parametrize("jobs", ["1", "3"])
def test_batch_three_events(tmp_path, jobs):
    for i in range(3):
        synth(tmp_path, f"e{i}", "--seed", str(i), "--h", str(300_000 + 100_000 * i), "--event-id", f"EV{i}")
    m = _manifest(tmp_path, [_entry(f"e{i}") for i in range(3)])
    assert main(["batch", "--manifest", str(m), "--out", str(tmp_path / "out"), "--jobs", jobs]) == 0
    with open(tmp_path / "out" / "table.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["event_id"] for r in rows] == ["EV0", "EV1", "EV2"]
    for i, r in enumerate(rows):
        assert abs(float(r["h_region_mva_s"]) / (300_000 + 100_000 * i) - 1) < 0.05
        assert all(r[c] != "" for c in r)
    for i in range(3):
        assert (tmp_path / "out" / f"EV{i}" / "result.json").is_file()


def test_batch_partial_failure(tmp_path, capsys):
    for i in range(3):
        synth(tmp_path, f"e{i}", "--event-id", f"EV{i}")
    for f in (tmp_path / "e1" / "traces").iterdir():
        f.unlink()
    (tmp_path / "e1" / "traces").rmdir()
    m = _manifest(tmp_path, [_entry(f"e{i}") for i in range(3)])
    assert main(["batch", "--manifest", str(m), "--out", str(tmp_path / "out")]) == 0
    with open(tmp_path / "out" / "table.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    populated = [r for r in rows if r["h_region_mva_s"]]
    assert [r["event_id"] for r in populated] == ["EV0", "EV2"]
    diags = json.loads((tmp_path / "out" / "table.diagnostics.json").read_text())
    failures = {k: v for k, v in diags.items() if any(d.startswith("failed") for d in v)}
    assert list(failures) == ["EV1"]


def test_batch_empty_manifest(tmp_path, capsys):
    m = _manifest(tmp_path, [])
    assert main(["batch", "--manifest", str(m), "--out", str(tmp_path / "out")]) == 0
    assert "no events" in capsys.readouterr().err
    lines = (tmp_path / "out" / "table.csv").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("event_id,power_mismatch_mw")


def test_batch_unreadable_manifest(tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text("{not json")
    assert main(["batch", "--manifest", str(bad), "--out", str(tmp_path / "o")]) == 2


def test_batch_columns_layout_and_report(tmp_path, capsys):
    for i in range(2):
        synth(tmp_path, f"e{i}", "--event-id", f"EV{i}")
    m = _manifest(tmp_path, [_entry("e0"), _entry("e1")])
    assert main(["batch", "--manifest", str(m), "--out", str(tmp_path / "out"), "--layout", "columns"]) == 0
    lines = (tmp_path / "out" / "table.csv").read_text().splitlines()
    assert lines[0] == "metric,EV0,EV1"
    assert lines[1].startswith("Power mismatch (MW),1000,1000")
    assert len(lines) == 10
    capsys.readouterr()
    assert main(["report", str(tmp_path / "out")]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["event_id"] for r in rows] == ["EV0", "EV1"]


def test_selfcheck_pristine_passes(capsys):
    code = main(["selfcheck"])
    out = capsys.readouterr().out
    print(out)
    assert code == 0


def test_selfcheck_detects_perturbation(tmp_path, capsys):
    # Only the last row: every one of its checks passes unperturbed.
    ev = CAISO_EVENTS[-1]
    fixtures = tmp_path / "fixtures.json"
    dump_events([ev], fixtures)
    assert main(["selfcheck", "--fixtures", str(fixtures)]) == 0
    dump_events([dataclasses.replace(ev, h_region_mva_s=ev.h_region_mva_s * 1.10)], fixtures)
    capsys.readouterr()
    assert main(["selfcheck", "--fixtures", str(fixtures)]) == 1
    out = capsys.readouterr().out
    assert "FAIL  8/31/2024 0:36 h_region" in out
    assert "PASS  8/31/2024 0:36 h_intercon" in out


def test_selfcheck_is_deterministic(capsys):
    main(["selfcheck"])
    first = capsys.readouterr().out
    main(["selfcheck"])
    assert capsys.readouterr().out == first


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "regional_inertia", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for cmd in ("analyze", "batch", "synth", "selfcheck", "report"):
        assert cmd in proc.stdout
