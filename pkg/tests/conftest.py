import os

import numpy as np
import pytest

from qhdstep.config import Config
from qhdstep.grid import VectorField, build_grid
from qhdstep.timestepper import Simulation

_RUNS = {}
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "extended: long benchmark runs (set QHDSTEP_EXTENDED=1)")
    config.addinivalue_line("markers", "slow: full steady-state runs of a few minutes")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("QHDSTEP_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended benchmark; set QHDSTEP_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def steady(config: Config, initial=None):
    """Run ``config`` to steady state once per session; returns (summary, state, simulation)."""
    key = (tuple(sorted(config.to_dict().items())), initial)
    if key not in _RUNS:
        sim = Simulation(config)
        state = None
        if initial is not None:
            state = initial(sim)
        summary, state = sim.run(state=state)
        _RUNS[key] = (summary, state, sim)
    return _RUNS[key]


@pytest.fixture
def small_grid():
    return build_grid(1.0, 0.5, dx=0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def vec(a, b):
    return VectorField(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


@pytest.fixture
def accept():
    """Record one acceptance line, then assert it."""

    def record(label: str, passed: bool, detail: str):
        ACCEPTANCE[label] = (bool(passed), detail)
        assert passed, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda k: (len(k.split()[0]), k)):
        passed, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
