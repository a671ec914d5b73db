"""Comparing the four optimizers on the six built-in scenarios.

Uses a reduced budget (200 particles, 50 generations) so it finishes in
well under a minute; pass --full for the 1000 x 100 setting. Results are
written to demo_results/ as CSV and PGM files.

Run: python3 demos/03_compare_scenarios.py [--full]
"""

import argparse

from mpsearch import SwarmConfig, builtin_scenarios
from mpsearch.bench import export_results, format_table, run_batch
from mpsearch.optimizers import ALGORITHMS

parser = argparse.ArgumentParser()
parser.add_argument("--full", action="store_true")
parser.add_argument("--out", default="demo_results")
args = parser.parse_args()

cfg = SwarmConfig() if args.full else SwarmConfig(swarm_size=200, generations=50)

# %% Ten runs per (scenario, algorithm) pair; run r uses seed cfg.seed + r.
stats = []
for scenario in builtin_scenarios():
    for algo in ALGORITHMS:
        stats.append(run_batch(scenario, algo, cfg, runs=10))
    print(f"{scenario.name} done")

# %% Mean and sample std of the final detection probability; * marks each row's best.
print()
print(format_table(stats), end="")

# %% Convergence traces, belief heatmaps and best paths for external plotting.
written = export_results(stats, args.out, traces=True)
print(f"\nwrote {len(written)} files to {args.out}/")
