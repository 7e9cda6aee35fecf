import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CRITERIA = {
    1: "Gibbs state matches spectral oracle",
    2: "ground and infinite-temperature limits",
    3: "energy bookkeeping and injected energy",
    4: "teleported energy positive, closed form = 1D max",
    5: "ground-state teleported energy",
    6: "passivity under unitaries on B",
    7: "Kraus maximum: grid, Monte Carlo, worked cases",
    8: "thresholds T1, T2 and regime ordering",
    9: "discord machinery",
    10: "PPT spectrum, separability, Te ordering",
    11: "constant-C contours and dissonance-energy curves",
    12: "verify command",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _outcomes.setdefault(marker.args[0], []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in CRITERIA.items():
        runs = _outcomes.get(n)
        status = "NOT RUN" if runs is None else ("PASS" if all(runs) else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {label}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(1234)
