from pathlib import Path

import numpy as np
import pytest

from behavior_auth.data_io import load_recording
from behavior_auth.series import make_series

DATA = Path(__file__).parent / "data"
RATE = 50.0


def regular(seconds, rate=RATE, start=0.0):
    return start + np.arange(int(round(seconds * rate))) / rate


def sinusoid(seconds, period=1.0, amplitude=1.0, offset=0.0, noise=0.0, seed=0,
             rate=RATE):
    t = regular(seconds, rate)
    rng = np.random.default_rng(seed)
    y = offset + amplitude * np.sin(2 * np.pi * t / period) + noise * rng.standard_normal(t.size)
    return make_series(t, y)


@pytest.fixture(scope="session")
def jumping():
    """x axis of the converted Jumping fixture recording (1000 samples, 50 Hz)."""
    (rec,) = load_recording(DATA / "jumping_s01.csv")
    return rec


# Acceptance lines collected by tests/test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
