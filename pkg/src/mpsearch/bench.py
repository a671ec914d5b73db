"""Batch experiments, the brute-force oracle and result exporters."""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .belief import evaluate_paths_unnormalized
from .codec import HEADINGS, CellPath, decode_angles
from .optimizers import ALGORITHMS, ConfigError, DEParams, SwarmConfig, run_algorithm

DEFAULT_CAP = 10**7
SUMMARY_HEADER = ["algo", "scenario", "runs", "mean_fitness", "std_fitness", "mean_wall_time_s"]
TRACE_HEADER = ["algo", "scenario", "run", "generation", "best_fitness"]


class CapExceeded(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"enumeration needs {required} paths but the cap is {cap}; "
                         f"raise the cap to at least {required} or shorten the horizon")
        self.required = required
        self.cap = cap


@dataclass
class BatchStats:
    algo: str
    scenario: str
    runs: int
    mean_fitness: float
    std_fitness: float
    mean_wall_time: float
    per_run: list
    source: Optional[object] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_runs(cls, algo, scenario_name, records, source=None) -> "BatchStats":
        # statistics works with exact intermediates, so equal runs give std exactly 0
        fits = [float(r.final_fitness) for r in records]
        std = statistics.stdev(fits) if len(fits) > 1 else 0.0
        return cls(algo, scenario_name, len(records), statistics.fmean(fits), std,
                   statistics.fmean(float(r.wall_time) for r in records), list(records), source)

    def best_run(self):
        return max(self.per_run, key=lambda r: r.final_fitness)


def run_batch(scenario, algo: str, cfg: SwarmConfig, runs: int = 10, workers: int = 1,
              penalty: bool = False, de_params=DEParams()) -> BatchStats:
    """Run ``algo`` ``runs`` times; run ``r`` uses seed ``cfg.seed + r``."""
    if algo not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algo!r}; supported: {', '.join(ALGORITHMS)}")
    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    records = []
    for r in range(runs):
        run_cfg = SwarmConfig(cfg.w, cfg.damping, cfg.phi1, cfg.phi2, cfg.swarm_size, cfg.generations,
                              cfg.horizon, cfg.v_max, (cfg.seed + r) % 2**64)
        records.append(run_algorithm(algo, scenario, run_cfg, workers, penalty, de_params))
    return BatchStats.from_runs(algo, scenario.name, records, scenario)


def brute_force_optimum(scenario, horizon: Optional[int] = None, cap: int = DEFAULT_CAP):
    """Exact optimum over all ``8**N`` heading sequences.

    Headings are decoded with the same boundary rule as motion paths. Ties
    go to the lexicographically smallest heading sequence. Returns
    ``(J_star, CellPath)``.
    """
    if horizon is not None:
        if horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {horizon}")
        scenario = scenario.with_horizon(horizon)
    n = scenario.horizon
    total = 8**n
    if total > cap:
        raise CapExceeded(total, cap)
    cells_per_grid = scenario.shape.size
    chunk = max(1, (1 << 22) // max(cells_per_grid, 1))
    powers = 8 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_j, best_cells = -np.inf, None
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % 8
        cells = decode_angles(scenario.start, HEADINGS[digits], scenario.shape)
        j = evaluate_paths_unnormalized(scenario, cells)
        k = int(np.argmax(j))
        if j[k] > best_j:
            best_j, best_cells = float(j[k]), cells[k]
    return best_j, CellPath(best_cells)


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def pgm_text(values: np.ndarray, maxval: int = 255) -> str:
    """Plain PGM (P2) of a ``(rows, cols)`` array scaled to ``0..maxval``.

    Row 0 of the grid is the southern edge, so rows are written in reverse
    to put north at the top of the image.
    """
    v = np.asarray(values, dtype=np.float64)
    top = v.max()
    scaled = np.zeros(v.shape, dtype=np.int64) if top <= 0 else np.rint(v / top * maxval).astype(np.int64)
    lines = ["P2", f"{v.shape[1]} {v.shape[0]}", str(maxval)]
    lines += [" ".join(str(x) for x in row) for row in scaled[::-1]]
    return "\n".join(lines) + "\n"


def path_image(belief: np.ndarray, path: CellPath, maxval: int = 255) -> np.ndarray:
    """Belief rescaled below ``maxval`` with path cells drawn at ``maxval``."""
    b = np.asarray(belief, dtype=np.float64)
    img = np.zeros(b.shape) if b.max() <= 0 else b / b.max() * (maxval - 1)
    for r, c in path.cells:
        img[r, c] = maxval
    return img


def export_results(stats, out_dir, traces: bool = False, timing: bool = False) -> list:
    """Write summary/trace CSVs plus belief and best-path artifacts.

    Wall time goes into ``mean_wall_time_s`` only when ``timing`` is set, so
    that default exports are byte-for-byte reproducible.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    summary = out / "summary.csv"
    _write_csv(summary, SUMMARY_HEADER, [
        [s.algo, s.scenario, s.runs, _fmt(s.mean_fitness), _fmt(s.std_fitness),
         _fmt(s.mean_wall_time) if timing else ""]
        for s in stats])
    written.append(summary)

    if traces:
        rows = []
        for s in stats:
            for run, rec in enumerate(s.per_run):
                rows += [[s.algo, s.scenario, run, g, _fmt(f)] for g, f in enumerate(rec.best_fitness_trace, start=1)]
        path = out / "traces.csv"
        _write_csv(path, TRACE_HEADER, rows)
        written.append(path)

    seen = set()
    for s in stats:
        if s.source is None:
            continue
        belief = s.source.initial_belief().mass
        if s.scenario not in seen:
            seen.add(s.scenario)
            p = out / f"belief_{s.scenario}.pgm"
            p.write_text(pgm_text(belief), encoding="utf-8", newline="")
            written.append(p)
        best = s.best_run().best_path_decoded
        p = out / f"path_{s.algo}_{s.scenario}.pgm"
        p.write_text(pgm_text(path_image(belief, best)), encoding="utf-8", newline="")
        written.append(p)
        p = out / f"path_{s.algo}_{s.scenario}.csv"
        _write_csv(p, ["step", "row", "col"], [[t, r, c] for t, (r, c) in enumerate(best.cells)])
        written.append(p)
    return written


def format_table(stats) -> str:
    """Scenarios as rows, algorithms as columns, ``mean±std`` cells; ``*`` marks each row's best mean."""
    algos = list(dict.fromkeys(s.algo for s in stats))
    scenarios = list(dict.fromkeys(s.scenario for s in stats))
    cell = {(s.scenario, s.algo): s for s in stats}
    body = []
    for sc in scenarios:
        present = [cell[(sc, a)].mean_fitness for a in algos if (sc, a) in cell]
        top = max(present) if present else None
        row = [sc]
        for a in algos:
            s = cell.get((sc, a))
            if s is None:
                row.append("-")
                continue
            mark = "*" if s.mean_fitness == top else " "
            row.append(f"{s.mean_fitness:.4f}±{s.std_fitness:.4f}{mark}")
        body.append(row)
    header = ["scenario"] + algos
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in body]
    return "\n".join(line.rstrip() for line in lines) + "\n"
