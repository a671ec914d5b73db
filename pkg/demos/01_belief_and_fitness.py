"""Belief maps and the search objective, step by step.

Run: python3 demos/01_belief_and_fitness.py
"""

import numpy as np

from mpsearch import (BeliefGrid, MotionPath, MotionSegment, SensorModel,
                      builtin_scenario, decode_path, evaluate_path, no_detection_update)
from mpsearch.fitness import PathEvaluator

# %% One no-detection update by hand.
# Two cells share the mass; a sensor with p_d = 0.6 looks at the first and misses.
b = BeliefGrid.from_mass([[0.5, 0.5], [0.0, 0.0]])
post, r = no_detection_update(b, SensorModel(0.6), (0, 0))
print("P(no detection) =", r)                # 0.7
print("posterior:", post.mass.ravel())       # [2/7, 5/7, 0, 0]

# %% A built-in scenario: one dense region drifting south-east.
s3 = builtin_scenario("s3")
m = s3.initial_belief().mass
peak = tuple(int(i) for i in np.unravel_index(np.argmax(m), m.shape))
print(f"\n{s3.name}: start {tuple(s3.start)}, belief peak at {peak} holding {m.max():.3f}")

# %% A path is a list of continuous motion vectors; decoding only keeps the heading.
# Head south-east for ten steps, then follow the target's drift.
segments = [MotionSegment.from_polar(1.0, -np.pi / 4)] * 10 + [MotionSegment(0.7, -0.8)] * 10
cells = decode_path(MotionPath(s3.start, segments), s3.shape)
print("decoded path:", " ".join(f"({r},{c})" for r, c in cells.cells[:6]), "...")

res = evaluate_path(s3, cells)
print(f"J = {res.J:.4f}   (1 - R_N = {1 - res.R_trace[-1]:.4f})")
print("first-detection probability per step:", np.round(res.p_trace, 4))

# %% The optimizers use a faster evaluator that gives the same numbers.
fast = PathEvaluator(s3)(cells.as_array()[None])[0]
print(f"fast evaluator: {fast:.12f}  reference: {res.J:.12f}")
