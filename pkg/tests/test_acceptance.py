"""Acceptance gate: one test per criterion, each logged as a PASS/FAIL line in the summary."""

import subprocess
import sys

import numpy as np
import pytest

from mpsearch import (GridShape, MotionPath, MotionSegment, SwarmConfig, builtin_scenario,
                      builtin_scenarios, decode_path, evaluate_path, evaluate_paths_unnormalized,
                      run_apso, run_mpso)
from mpsearch.bench import brute_force_optimum, run_batch
from mpsearch.codec import decode_angles, segment_angles, valid_paths
from mpsearch.optimizers import ALGORITHMS, run_algorithm

from conftest import toy_scenario
from test_belief import random_cells, random_scenario


def record(log, key, ok, detail):
    log[key] = (bool(ok), detail)
    assert ok, detail


def test_criterion_1_oracle_equivalence(oracle_scenario, acceptance_log):
    j_star, _ = brute_force_optimum(oracle_scenario)
    cfg = dict(swarm_size=200, generations=100)
    mpso = [run_algorithm("mpso", oracle_scenario, SwarmConfig(seed=s, **cfg)).final_fitness for s in range(10)]
    de = [run_algorithm("de", oracle_scenario, SwarmConfig(seed=s, **cfg)).final_fitness for s in range(10)]
    n_mpso = sum(f >= 0.98 * j_star for f in mpso)
    n_de = sum(f >= 0.95 * j_star for f in de)
    record(acceptance_log, 1, n_mpso >= 9 and n_de >= 8,
           f"J*={j_star:.6f}; MPSO >=0.98J* in {n_mpso}/10, DE >=0.95J* in {n_de}/10")


def _ordering(cfg):
    rows = []
    for s in builtin_scenarios():
        m = run_batch(s, "mpso", cfg, runs=10).mean_fitness
        p = run_batch(s, "pso", cfg, runs=10).mean_fitness
        rows.append((s.name, m, p))
    return rows


@pytest.mark.slow
def test_criterion_2_ordering_full_profile(acceptance_log):
    rows = _ordering(SwarmConfig())
    wins = sum(m > p for _, m, p in rows)
    j = {name: m for name, m, _ in rows}
    ok = wins >= 5 and 0.50 <= j["s3"] <= 0.78 and 0.14 <= j["s1"] <= 0.24
    detail = f"MPSO > PSO on {wins}/6; s3 {j['s3']:.4f}, s1 {j['s1']:.4f}; " + \
        ", ".join(f"{n}: {m:.4f} vs {p:.4f}" for n, m, p in rows)
    record(acceptance_log, "2 (full)", ok, detail)


def test_criterion_2_ordering_reduced_profile(acceptance_log):
    rows = _ordering(SwarmConfig(swarm_size=200, generations=50))
    wins = sum(m > p for _, m, p in rows)
    record(acceptance_log, "2 (reduced)", wins >= 5,
           f"MPSO > PSO on {wins}/6 at 200 particles x 50 generations")


def test_criterion_3_apso_special_case(acceptance_log):
    s = builtin_scenario("s3")
    mismatched = []
    for seed in range(100):
        cfg = SwarmConfig(swarm_size=20, generations=10, seed=seed)
        if run_apso(s, cfg).best_path_decoded != run_mpso(s, cfg, frozen_magnitude=True).best_path_decoded:
            mismatched.append(seed)
    record(acceptance_log, 3, not mismatched, f"identical decoded paths on {100 - len(mismatched)}/100 seeds")


def test_criterion_4_bayesian_identities(acceptance_log):
    rng = np.random.default_rng(20240601)
    worst = np.zeros(3)
    for _ in range(1000):
        s = random_scenario(rng)
        cells = random_cells(rng, s)[0]
        res = evaluate_path(s, cells)
        worst[0] = max(worst[0], abs(sum(res.p_trace) - (1.0 - res.R_trace[-1])))
        for r, eta in zip(res.r_trace, res.eta_trace):
            if r > 0:
                worst[1] = max(worst[1], abs(r * eta - 1.0))
        worst[2] = max(worst[2], abs(evaluate_paths_unnormalized(s, cells[None])[0] - res.J))
    ok = worst[0] <= 1e-9 and worst[1] <= 1e-12 and worst[2] <= 1e-12
    record(acceptance_log, 4, ok,
           f"max errors: complement {worst[0]:.1e}, r*eta {worst[1]:.1e}, unnormalized {worst[2]:.1e}")


def test_criterion_5_decode_validity(acceptance_log):
    rng = np.random.default_rng(7)
    total, bad = 0, 0
    while total < 100_000:
        shape = GridShape(int(rng.integers(2, 60)), int(rng.integers(2, 60)))
        batch, n = 1000, int(rng.integers(1, 40))
        start = (int(rng.integers(shape.rows)), int(rng.integers(shape.cols)))
        comps = rng.uniform(-1, 1, size=(batch, n, 2))
        cells = decode_angles(start, segment_angles(comps), shape)
        bad += int((~valid_paths(cells, shape)).sum())
        total += batch
    three_seg = MotionPath((20, 20), [MotionSegment.from_polar(1, 0.0),
                                      MotionSegment.from_polar(1, 1.5 * np.pi),
                                      MotionSegment.from_polar(np.sqrt(2), 1.75 * np.pi)])
    steps = np.diff(decode_path(three_seg, GridShape(40, 40)).as_array(), axis=0)[:, ::-1]
    three_seg_ok = steps.tolist() == [[1, 0], [0, -1], [1, -1]]
    record(acceptance_log, 5, bad == 0 and three_seg_ok,
           f"{total - bad}/{total} decoded paths valid; three-segment offsets {'match' if three_seg_ok else 'differ'}")


def test_criterion_6_elitism_and_determinism(tmp_path, oracle_scenario, acceptance_log):
    drops = []
    for algo in ALGORITHMS:
        for seed in range(50):
            trace = run_algorithm(algo, oracle_scenario, SwarmConfig(swarm_size=16, generations=12, seed=seed)
                                  ).best_fitness_trace
            if np.any(np.diff(trace) < 0):
                drops.append((algo, seed))

    files = ("summary.csv", "traces.csv", "path_mpso_s1.csv", "path_pso_s1.csv", "belief_s1.pgm")
    outs = []
    for i, workers in enumerate(("1", "1", "4")):
        out = tmp_path / f"run{i}"
        subprocess.run([sys.executable, "-m", "mpsearch", "compare", "--scenario", "builtin:s1",
                        "--algo", "mpso", "--algo", "pso", "--runs", "3", "--swarm-size", "40",
                        "--generations", "10", "--seed", "5", "--traces", "--workers", workers,
                        "--out", str(out)], check=True, capture_output=True)
        outs.append([(out / f).read_bytes() for f in files])
    same = outs[0] == outs[1] == outs[2]
    record(acceptance_log, 6, not drops and same,
           f"{len(drops)} decreasing traces in {50 * len(ALGORITHMS)} runs; "
           f"CSVs byte-identical across processes and worker counts: {same}")


def test_criterion_7_toy_exact_values(acceptance_log):
    cases = [(toy_scenario(3, 3, (1, 1), 2), 2 / 9), (toy_scenario(2, 2, (0, 0), 1), 0.25)]
    details, ok = [], True
    for s, expected in cases:
        j_star, _ = brute_force_optimum(s)
        best = max(run_algorithm(a, s, SwarmConfig(swarm_size=20, generations=20, seed=k)).final_fitness
                   for a in ALGORITHMS for k in range(5))
        ok &= abs(j_star - expected) <= 1e-9 and best <= j_star + 1e-9
        details.append(f"{s.shape.rows}x{s.shape.cols}/N={s.horizon}: J*={j_star:.6f} (want {expected:.6f}), "
                       f"best optimizer {best:.6f}")
    record(acceptance_log, 7, ok, "; ".join(details))
