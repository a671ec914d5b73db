"""Checking the optimizers against an exhaustive optimum on a small map.

With 8 headings per step, a 5-step horizon has 8**5 = 32768 paths, few
enough to enumerate. Every optimizer should land at or just below J*.

Run: python3 demos/02_oracle_check.py
"""

from mpsearch import GridShape, Scenario, SensorModel, SwarmConfig, TargetMotionModel
from mpsearch.bench import brute_force_optimum
from mpsearch.optimizers import ALGORITHMS, run_algorithm

# %% An 8x8 map with two bumps and a target that wanders a little.
scenario = Scenario(
    name="small",
    shape=GridShape(8, 8),
    components=[((5.0, 2.0), ((1.5, 0.3), (0.3, 1.0)), 0.6),
                ((2.0, 5.5), ((1.0, 0.0), (0.0, 2.0)), 0.4)],
    motion=TargetMotionModel(((0, 1), (0, 0), (-1, 0), (0, 1), (0, 0))),
    sensor=SensorModel(0.9),
    start=(3, 3),
    horizon=5,
)

j_star, best = brute_force_optimum(scenario)
print(f"J* = {j_star:.6f} along", " ".join(f"({r},{c})" for r, c in best.cells))

# %% Ten seeds per algorithm.
for algo in ALGORITHMS:
    fits = [run_algorithm(algo, scenario, SwarmConfig(swarm_size=200, generations=100, seed=k)).final_fitness
            for k in range(10)]
    ratio = [f / j_star for f in fits]
    print(f"{algo:5s} worst {min(ratio):.3f}  mean {sum(ratio) / 10:.3f}  of J*")
