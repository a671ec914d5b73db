import pytest

from mpsearch import GridShape, Scenario, SensorModel, TargetMotionModel

_ACCEPTANCE = {}


def toy_scenario(rows, cols, start, horizon, components=None, offsets=None, p_d=1.0, name="toy"):
    """Small scenario; a huge isotropic component stands in for a uniform belief."""
    if components is None:
        components = [((rows / 2, cols / 2), ((1e12, 0.0), (0.0, 1e12)), 1.0)]
    motion = TargetMotionModel(tuple(offsets)) if offsets is not None else TargetMotionModel.static(horizon)
    return Scenario(name, GridShape(rows, cols), tuple(components), motion, SensorModel(p_d), start, horizon)


def point_scenario(rows, cols, start, horizon, target, p_d=1.0, offsets=None):
    """Static (or moving) point-mass target built from a very narrow component."""
    comp = [(target, ((1e-4, 0.0), (0.0, 1e-4)), 1.0)]
    return toy_scenario(rows, cols, start, horizon, comp, offsets, p_d, name="point")


@pytest.fixture
def oracle_scenario():
    """8x8, N = 5: two bumps, one drifting target, enumerable by brute force."""
    comps = [((5.0, 2.0), ((1.5, 0.3), (0.3, 1.0)), 0.6), ((2.0, 5.5), ((1.0, 0.0), (0.0, 2.0)), 0.4)]
    return toy_scenario(8, 8, (3, 3), 5, comps, [(0, 1), (0, 0), (-1, 0), (0, 1), (0, 0)], p_d=0.9, name="oracle8")


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=str):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")

