import numpy as np
import pytest

from regional_inertia.ingest import TraceBundle
from regional_inertia.trace import FrequencyTrace

T0 = 1725089760.0  # 2024-08-31T07:36:00Z


def make_trace(values, dt=0.1, t0=T0, sensor_id="S"):
    return FrequencyTrace(sensor_id, t0, dt, np.asarray(values, dtype=float))


def kink_values(n, kink_index, slope_hz_s, dt=0.1, base=60.0):
    """Flat at ``base`` up to ``kink_index``, then a ramp of ``slope_hz_s``."""
    k = np.arange(n)
    return base + slope_hz_s * dt * np.clip(k - kink_index, 0, None)


def bundle_of(columns, dt=0.1, t0=T0, prefix="S"):
    traces = [make_trace(v, dt, t0, f"{prefix}{i}") for i, v in enumerate(columns)]
    return TraceBundle.from_traces(traces)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def report_criterion(name: str, passed: bool, detail: str) -> None:
    """Record (and print) one acceptance line; shown again in the terminal summary."""
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
