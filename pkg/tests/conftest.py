import numpy as np
import pytest

from legbench import (
    AtjSpec,
    LegGeometry,
    LegInertial,
    LegParams,
    Scenario,
    SimConfig,
    SmcSpec,
    TjSpec,
    deviation_sweep,
    run_closed_loop,
    uncertainty_sweep,
)


@pytest.fixture(scope="session")
def geom():
    return LegGeometry()


@pytest.fixture(scope="session")
def inertial():
    return LegInertial()


@pytest.fixture(scope="session")
def plant():
    return LegParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def baseline_logs():
    """Default scenario (row-4 deviation) for each controller."""
    return {
        spec.name: run_closed_loop(Scenario(controller=spec), SimConfig())
        for spec in (SmcSpec(), TjSpec(), AtjSpec())
    }


@pytest.fixture(scope="session")
def deviation_result():
    return deviation_sweep(Scenario(controller=SmcSpec()), SimConfig())


@pytest.fixture(scope="session")
def uncertainty_result():
    return uncertainty_sweep(Scenario(controller=SmcSpec()), SimConfig())


CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""

    def record(number: int, ok: bool, detail: str):
        CRITERIA[number] = (ok, detail)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
