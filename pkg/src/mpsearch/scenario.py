"""Search scenarios: data model, JSON interchange and the six built-ins.

JSON layout (UTF-8, keys in this order on export)::

    {
      "name": "s1",
      "rows": 40, "cols": 40,
      "start": [row, col],
      "horizon": 20,
      "sensor": {"p_d": 1.0},
      "belief": [{"mean": [r, c], "cov": [[a, b], [b, d]], "weight": w}, ...],
      "motion": {"offsets": [[dr, dc], ...]}      # or {"constant": [dr, dc]}
    }

Rows grow northward and columns eastward, so "north" is ``+row``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .belief import (BeliefError, BeliefGrid, Cell, GridShape, SensorModel,
                     TargetMotionModel, check_component,
                     gaussian_mixture_belief)


class ScenarioError(ValueError):
    """Validation failure; ``field`` names the offending part of the document."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _component(mean, cov, weight):
    return (tuple(float(x) for x in mean),
            tuple(tuple(float(x) for x in row) for row in cov),
            float(weight))


@dataclass(frozen=True)
class Scenario:
    name: str
    shape: GridShape
    components: tuple
    motion: TargetMotionModel
    sensor: SensorModel
    start: Cell
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "start", Cell(*self.start))
        object.__setattr__(self, "components", tuple(_component(*c) for c in self.components))
        if not isinstance(self.horizon, (int, np.integer)) or isinstance(self.horizon, bool) or self.horizon < 1:
            raise ScenarioError("horizon", f"must be a positive integer, got {self.horizon!r}")
        if not self.shape.contains(self.start):
            raise ScenarioError("start", f"{tuple(self.start)} is outside the {self.shape.rows}x{self.shape.cols} grid")
        if len(self.motion) < self.horizon:
            raise ScenarioError("motion", f"schedule has {len(self.motion)} offsets, fewer than horizon {self.horizon}")
        if not self.components:
            raise ScenarioError("belief", "at least one component is required")
        for k, comp in enumerate(self.components):
            try:
                check_component(*comp, index=k)
            except BeliefError as exc:
                raise ScenarioError(f"belief[{k}]", str(exc).split(": ", 1)[-1]) from None
        try:
            self.initial_belief()
        except BeliefError as exc:
            raise ScenarioError("belief", str(exc)) from None

    def initial_belief(self) -> BeliefGrid:
        return self._belief

    @cached_property
    def _belief(self) -> BeliefGrid:
        return gaussian_mixture_belief(self.shape, self.components)

    def with_horizon(self, horizon: int) -> "Scenario":
        return Scenario(self.name, self.shape, self.components, self.motion, self.sensor, self.start, horizon)


_FIELDS = ("name", "rows", "cols", "start", "horizon", "sensor", "belief", "motion")


def _require(doc, key, kind, field=None):
    field = field or key
    if key not in doc:
        raise ScenarioError(field, "missing")
    value = doc[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ScenarioError(field, f"expected an integer, got {value!r}")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ScenarioError(field, f"expected a number, got {value!r}")
    if kind in (list, dict, str) and not isinstance(value, kind):
        raise ScenarioError(field, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _int_pair(value, field):
    if (not isinstance(value, list) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) for v in value)):
        raise ScenarioError(field, f"expected [int, int], got {value!r}")
    return tuple(value)


def _num_list(value, n, field):
    if (not isinstance(value, list) or len(value) != n
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ScenarioError(field, f"expected {n} numbers, got {value!r}")
    return [float(v) for v in value]


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("document", "top level must be a JSON object")
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise ScenarioError(unknown[0], "unknown field")
    name = _require(doc, "name", str)
    rows = _require(doc, "rows", int)
    cols = _require(doc, "cols", int)
    try:
        shape = GridShape(rows, cols)
    except BeliefError as exc:
        raise ScenarioError("rows", str(exc)) from None
    start = _int_pair(_require(doc, "start", list), "start")
    horizon = _require(doc, "horizon", int)

    sensor_doc = _require(doc, "sensor", dict)
    if set(sensor_doc) != {"p_d"}:
        raise ScenarioError("sensor", f"expected exactly the key 'p_d', got {sorted(sensor_doc)}")
    try:
        sensor = SensorModel(float(_require(sensor_doc, "p_d", float, "sensor.p_d")))
    except BeliefError as exc:
        raise ScenarioError("sensor.p_d", str(exc)) from None

    comps = []
    for k, c in enumerate(_require(doc, "belief", list)):
        field = f"belief[{k}]"
        if not isinstance(c, dict) or set(c) != {"mean", "cov", "weight"}:
            raise ScenarioError(field, "expected an object with keys mean, cov, weight")
        mean = _num_list(c["mean"], 2, f"{field}.mean")
        if not isinstance(c["cov"], list) or len(c["cov"]) != 2:
            raise ScenarioError(f"{field}.cov", "expected a 2x2 matrix")
        cov = [_num_list(row, 2, f"{field}.cov") for row in c["cov"]]
        weight = _require(c, "weight", float, f"{field}.weight")
        if not weight > 0:
            raise ScenarioError(f"{field}.weight", f"must be positive, got {weight}")
        comps.append((mean, cov, weight))

    motion_doc = _require(doc, "motion", dict)
    if set(motion_doc) == {"offsets"}:
        offs = motion_doc["offsets"]
        if not isinstance(offs, list):
            raise ScenarioError("motion.offsets", "expected a list of [dr, dc]")
        motion = TargetMotionModel(tuple(_int_pair(o, f"motion.offsets[{i}]") for i, o in enumerate(offs)))
    elif set(motion_doc) == {"constant"}:
        motion = TargetMotionModel.constant(_int_pair(motion_doc["constant"], "motion.constant"),
                                            horizon if isinstance(horizon, int) and horizon > 0 else 0)
    else:
        raise ScenarioError("motion", "expected exactly one of 'offsets' or 'constant'")

    return Scenario(name, shape, tuple(comps), motion, sensor, start, horizon)


def load_scenario(document: str) -> Scenario:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ScenarioError("document", f"invalid JSON ({exc})") from None
    return scenario_from_dict(doc)


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "name": s.name,
        "rows": s.shape.rows,
        "cols": s.shape.cols,
        "start": [int(s.start.row), int(s.start.col)],
        "horizon": int(s.horizon),
        "sensor": {"p_d": float(s.sensor.p_d)},
        "belief": [{"mean": list(m), "cov": [list(r) for r in cov], "weight": w} for m, cov, w in s.components],
        "motion": {"offsets": [list(o) for o in s.motion.offsets]},
    }


def export_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2, ensure_ascii=False) + "\n"


def _iso(var):
    return ((var, 0.0), (0.0, var))


# Approximations of the six published scenario maps: the original Gaussian
# parameters and target speeds were never released, so these constants are
# chosen to match the qualitative descriptions only.
_BUILTIN_SPECS = {
    "s1": dict(
        description="two adjacent regions of slightly different height; slow eastward drift",
        start=(14, 20),
        belief=[((22.0, 15.0), _iso(6.0), 0.53), ((21.0, 24.0), _iso(6.0), 0.47)],
        offsets=[(0, 0), (0, 1)] * 10,
    ),
    "s2": dict(
        description="two regions on opposite sides of the start; target moving south-west",
        start=(20, 20),
        belief=[((25.0, 15.0), _iso(4.0), 0.55), ((15.0, 25.0), _iso(4.0), 0.45)],
        offsets=[(-1, -1), (0, 0)] * 10,
    ),
    "s3": dict(
        description="one small dense region moving rapidly south-east, away from the start",
        start=(31, 9),
        belief=[((28.0, 12.0), _iso(1.5), 1.0)],
        offsets=[(-1, 1), (-1, 1), (0, 0)] * 7,
    ),
    "s4": dict(
        description="one small dense region moving toward the start",
        start=(8, 32),
        belief=[((26.0, 14.0), _iso(2.0), 1.0)],
        offsets=[(-1, 1), (-1, 1), (0, 0)] * 7,
    ),
    "s5": dict(
        description="two regions either side of the start, the right one slightly higher; target moving north",
        start=(18, 20),
        belief=[((18.0, 12.0), _iso(4.0), 0.48), ((18.0, 28.0), _iso(4.0), 0.52)],
        offsets=[(1, 0), (0, 0)] * 10,
    ),
    "s6": dict(
        description="the two regions of s5 with the start below them; target moving north-east",
        start=(12, 20),
        belief=[((18.0, 12.0), _iso(4.0), 0.48), ((18.0, 28.0), _iso(4.0), 0.52)],
        offsets=[(1, 1), (0, 0)] * 10,
    ),
}

BUILTIN_NAMES = tuple(_BUILTIN_SPECS)


def builtin_description(name: str) -> str:
    return _BUILTIN_SPECS[name]["description"]


def builtin_scenario(name: str) -> Scenario:
    if name not in _BUILTIN_SPECS:
        raise ScenarioError("name", f"unknown built-in scenario {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    spec = _BUILTIN_SPECS[name]
    return Scenario(
        name=name,
        shape=GridShape(40, 40),
        components=tuple(spec["belief"]),
        motion=TargetMotionModel(tuple(spec["offsets"])),
        sensor=SensorModel(1.0),
        start=spec["start"],
        horizon=20,
    )


def builtin_scenarios() -> list:
    return [builtin_scenario(n) for n in BUILTIN_NAMES]
