import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mpsearch import ScenarioError, builtin_scenario, builtin_scenarios, export_scenario, load_scenario
from mpsearch.scenario import BUILTIN_NAMES

MINIMAL = {
    "name": "mini",
    "rows": 40,
    "cols": 40,
    "start": [5, 6],
    "horizon": 20,
    "sensor": {"p_d": 1.0},
    "belief": [{"mean": [20, 20], "cov": [[4, 0], [0, 4]], "weight": 1}],
    "motion": {"constant": [0, 1]},
}


def doc(**changes):
    d = json.loads(json.dumps(MINIMAL))
    for k, v in changes.items():
        if v is None:
            del d[k]
        else:
            d[k] = v
    return json.dumps(d)


def local_maxima(m):
    peaks = []
    for r in range(1, m.shape[0] - 1):
        for c in range(1, m.shape[1] - 1):
            win = m[r - 1:r + 2, c - 1:c + 2]
            if m[r, c] == win.max() and np.sum(win == m[r, c]) == 1:
                peaks.append((r, c))
    return peaks


class TestLoad:
    def test_minimal(self):
        s = load_scenario(doc())
        assert (s.name, s.shape.rows, s.shape.cols, s.start, s.horizon) == ("mini", 40, 40, (5, 6), 20)
        assert s.sensor.p_d == 1.0
        assert s.motion.offsets == ((0, 1),) * 20
        assert s.initial_belief().total() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("start", [[45, 10], [-1, 0], [0, 40]])
    def test_start_outside_grid(self, start):
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(start=start))
        assert e.value.field == "start"

    def test_not_positive_definite(self):
        belief = [MINIMAL["belief"][0], {"mean": [5, 5], "cov": [[1, 2], [2, 1]], "weight": 1}]
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(belief=belief))
        assert e.value.field == "belief[1]"
        assert "positive definite" in str(e.value)

    def test_unknown_field(self):
        d = json.loads(doc())
        d["speed"] = 3
        with pytest.raises(ScenarioError) as e:
            load_scenario(json.dumps(d))
        assert e.value.field == "speed"

    @pytest.mark.parametrize("key", list(MINIMAL))
    def test_missing_field(self, key):
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(**{key: None}))
        assert e.value.field == key

    def test_short_motion_schedule(self):
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(motion={"offsets": [[0, 1]] * 5}))
        assert e.value.field == "motion"

    @pytest.mark.parametrize("horizon", [0, -3, 2.5, True])
    def test_bad_horizon(self, horizon):
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(horizon=horizon))
        assert e.value.field == "horizon"

    def test_bad_sensor(self):
        with pytest.raises(ScenarioError) as e:
            load_scenario(doc(sensor={"p_d": 1.2}))
        assert e.value.field == "sensor.p_d"

    def test_malformed_json(self):
        with pytest.raises(ScenarioError) as e:
            load_scenario("{")
        assert e.value.field == "document"


class TestExport:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_round_trip(self, name):
        s = builtin_scenario(name)
        text = export_scenario(s)
        back = load_scenario(text)
        assert back == s
        assert export_scenario(back) == text
        assert_allclose(back.initial_belief().mass, s.initial_belief().mass, rtol=0, atol=0)

    def test_repeat_export_is_byte_identical(self):
        s = builtin_scenario("s2")
        assert export_scenario(s) == export_scenario(s)
        assert export_scenario(s).endswith("}\n")

    def test_canonical_field_order(self):
        keys = list(json.loads(export_scenario(builtin_scenario("s1"))))
        assert keys == ["name", "rows", "cols", "start", "horizon", "sensor", "belief", "motion"]

    def test_doubled_weights_keep_belief(self):
        s = builtin_scenario("s5")
        d = json.loads(export_scenario(s))
        d["belief"][0]["weight"] *= 2
        d["belief"][1]["weight"] *= 2
        edited = load_scenario(json.dumps(d))
        assert_allclose(edited.initial_belief().mass, s.initial_belief().mass, rtol=1e-13, atol=1e-18)

    def test_full_precision_reals(self):
        d = json.loads(doc())
        d["belief"][0]["mean"] = [20.123456789012345, 0.1]
        s = load_scenario(json.dumps(d))
        assert json.loads(export_scenario(s))["belief"][0]["mean"][0] == 20.123456789012345


class TestBuiltins:
    def test_six_valid_scenarios(self):
        ss = builtin_scenarios()
        assert [s.name for s in ss] == ["s1", "s2", "s3", "s4", "s5", "s6"]
        for s in ss:
            assert (s.shape.rows, s.shape.cols, s.horizon, s.sensor.p_d) == (40, 40, 20, 1.0)
            assert s.initial_belief().total() == pytest.approx(1.0, abs=1e-9)
            assert load_scenario(export_scenario(s)) == s

    def test_unknown_builtin(self):
        with pytest.raises(ScenarioError):
            builtin_scenario("s7")

    def test_s1_two_adjacent_peaks_of_different_height(self):
        m = builtin_scenario("s1").initial_belief().mass
        peaks = local_maxima(m)
        assert len(peaks) == 2
        (a, b) = peaks
        assert m[a] != m[b]
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= 12

    @pytest.mark.parametrize("name", ["s2", "s5", "s6"])
    def test_two_region_maps(self, name):
        assert len(local_maxima(builtin_scenario(name).initial_belief().mass)) == 2

    def test_s2_regions_opposite_across_start(self):
        s = builtin_scenario("s2")
        m = s.initial_belief().mass
        a, b = [np.array(p) for p in local_maxima(m)]
        mid = (a + b) / 2
        assert np.all(np.abs(mid - np.array(s.start)) <= 1)

    @pytest.mark.parametrize("name", ["s3", "s4"])
    def test_single_dense_region(self, name):
        m = builtin_scenario(name).initial_belief().mass
        assert len(local_maxima(m)) == 1
        assert m.max() > 0.05

    def test_s5_right_region_higher(self):
        m = builtin_scenario("s5").initial_belief().mass
        left, right = sorted(local_maxima(m), key=lambda p: p[1])
        assert m[right] > m[left]

    def test_s6_start_below_regions(self):
        s = builtin_scenario("s6")
        rows = [p[0] for p in local_maxima(s.initial_belief().mass)]
        assert s.start.row < min(rows)

    @staticmethod
    def heading(name):
        offs = np.array(builtin_scenario(name).motion.offsets)
        return np.sign(offs.sum(axis=0))

    def test_target_heading_signs(self):
        # (row, col) with north = +row and east = +col
        assert tuple(self.heading("s2")) == (-1, -1)   # south-west
        assert tuple(self.heading("s3")) == (-1, 1)    # south-east
        assert tuple(self.heading("s5")) == (1, 0)     # north
        assert tuple(self.heading("s6")) == (1, 1)     # north-east

    def test_s3_moves_fast_and_s1_slowly(self):
        speed = {n: np.abs(np.array(builtin_scenario(n).motion.offsets)).max(axis=1).mean() for n in ("s1", "s3")}
        assert speed["s3"] > speed["s1"]

    def test_s4_target_heads_for_start(self):
        s = builtin_scenario("s4")
        peak = np.array(local_maxima(s.initial_belief().mass)[0])
        toward = np.sign(np.array(s.start) - peak)
        assert tuple(self.heading("s4")) == tuple(toward)
