"""Swarm and evolutionary optimizers over search paths.

* ``run_mpso`` - motion-encoded PSO: each particle is ``N`` continuous
  motion vectors ``(mx, my)``; only the heading matters when decoding.
* ``run_apso`` - angle-encoded PSO: one heading per segment, magnitude 1.
* ``run_pso_node`` - classic PSO on ``N`` continuous node coordinates,
  repaired into an 8-connected path before evaluation.
* ``run_de`` - DE/rand/1/bin on the same motion genome as MPSO.

Randomness: generation ``k`` of a run with master seed ``s`` draws from
``default_rng([s, k])`` (``k = 0`` is initialisation), and particle ``i``
always reads row ``i`` of each draw. Splitting fitness evaluation across
worker threads therefore never changes a result.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .codec import (CellPath, MotionPath, decode_angles, repair_nodes,
                    segment_angles)
from .fitness import PathEvaluator

ALGORITHMS = ("mpso", "pso", "apso", "de")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SwarmConfig:
    w: float = 1.0
    damping: float = 0.98
    phi1: float = 2.5
    phi2: float = 2.5
    swarm_size: int = 1000
    generations: int = 100
    horizon: Optional[int] = None  # None: use the scenario's horizon
    v_max: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ConfigError(f"swarm_size must be >= 1, got {self.swarm_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not self.v_max > 0:
            raise ConfigError(f"v_max must be positive, got {self.v_max}")
        if not 0 < self.damping <= 1:
            raise ConfigError(f"damping must lie in (0, 1], got {self.damping}")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class DEParams:
    F: float = 0.5
    CR: float = 0.9


@dataclass
class Particle:
    position: MotionPath
    velocity: np.ndarray
    local_best: MotionPath
    local_best_fitness: float = -np.inf


@dataclass
class RunRecord:
    algo: str
    best_fitness_trace: tuple
    best_path_encoded: Optional[MotionPath]
    best_path_decoded: CellPath
    final_fitness: float
    wall_time: float
    seed: int
    evaluations: int = field(default=0, repr=False)


def generation_rng(seed: int, generation: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(generation)])


def velocity_step(v, u, local_best, global_best, w, phi1, phi2, r1, r2, v_max):
    """Inertia plus cognitive and social pulls, clamped to ``[-v_max, v_max]``."""
    v = w * v + phi1 * r1 * (local_best - u) + phi2 * r2 * (global_best - u)
    return np.clip(v, -v_max, v_max)


def update_velocity(p: Particle, global_best: MotionPath, cfg: SwarmConfig, w_current: float,
                    rng: Optional[np.random.Generator] = None, r1=None, r2=None) -> np.ndarray:
    """New velocity for one MPSO particle.

    ``r1``/``r2`` may be given explicitly; otherwise each is drawn per scalar
    component from U[0, 1].
    """
    u = p.position.as_array()
    lb, gb = p.local_best.as_array(), global_best.as_array()
    if not (u.shape == lb.shape == gb.shape == np.shape(p.velocity)):
        raise ConfigError("position, velocity and best paths must share one horizon")
    if r1 is None:
        r1 = rng.random(u.shape)
    if r2 is None:
        r2 = rng.random(u.shape)
    return velocity_step(np.asarray(p.velocity, dtype=np.float64), u, lb, gb,
                         w_current, cfg.phi1, cfg.phi2, r1, r2, cfg.v_max)


def _prepare(scenario, cfg: SwarmConfig):
    if cfg.horizon is not None and cfg.horizon != scenario.horizon:
        scenario = scenario.with_horizon(cfg.horizon)
    return scenario


@dataclass(frozen=True)
class _Encoding:
    """How a particle's state array ``(P, N, dims)`` maps to a cell path.

    Only the ``free`` components are moved by the swarm; the rest stay at
    their initial values.
    """

    dims: int
    free: tuple
    init: Callable
    decode: Callable
    v_max: float
    bounds: Optional[Callable] = None  # projection applied after each position update
    to_motion: Optional[Callable] = None


def project_to_box(components: np.ndarray) -> np.ndarray:
    """Scale each ``(mx, my)`` pair into ``[-1, 1]^2`` along its own direction.

    Clipping components one at a time would rotate the heading, which is the
    only thing decoding looks at; scaling keeps it intact.
    """
    scale = np.maximum(1.0, np.abs(components).max(axis=-1, keepdims=True))
    return components / scale


def _motion_encoding(cfg):
    return _Encoding(
        dims=2, free=(0, 1),
        init=lambda rng, n, h: rng.uniform(-1.0, 1.0, size=(n, h, 2)),
        decode=lambda pos, sc: decode_angles(sc.start, segment_angles(pos), sc.shape),
        v_max=cfg.v_max, bounds=project_to_box,
        to_motion=lambda x: x,
    )


def _angle_init(rng, n, h):
    return rng.uniform(-np.pi, np.pi, size=(n, h, 1))


def _angle_encoding(cfg):
    # angles are unbounded reals; the default v_max of 2.0 allows one 45 degree sector per generation
    return _Encoding(
        dims=1, free=(0,), init=_angle_init,
        decode=lambda pos, sc: decode_angles(sc.start, pos[..., 0], sc.shape),
        v_max=cfg.v_max * np.pi / 8,
        to_motion=lambda x: np.stack([np.cos(x[..., 0]), np.sin(x[..., 0])], axis=-1),
    )


def _polar_unit_encoding(cfg):
    """Polar ``(rho, alpha)`` motion state with ``rho`` frozen at 1."""

    def init(rng, n, h):
        alpha = _angle_init(rng, n, h)
        return np.concatenate([np.ones_like(alpha), alpha], axis=-1)

    return _Encoding(
        dims=2, free=(1,), init=init,
        decode=lambda pos, sc: decode_angles(sc.start, pos[..., 1], sc.shape),
        v_max=cfg.v_max * np.pi / 8,
        to_motion=lambda x: np.stack([x[..., 0] * np.cos(x[..., 1]), x[..., 0] * np.sin(x[..., 1])], axis=-1),
    )


def _node_encoding(cfg, scenario, penalty: bool):
    shape = scenario.shape
    hi = np.array([shape.rows - 1, shape.cols - 1], dtype=np.float64)

    def init(rng, n, h):
        return rng.uniform(0.0, 1.0, size=(n, h, 2)) * hi

    def decode(pos, sc):
        cells, intact = repair_nodes(sc.start, pos, sc.shape)
        return (cells, intact) if penalty else cells

    return _Encoding(dims=2, free=(0, 1), init=init, decode=decode,
                     v_max=cfg.v_max * float(hi.max()) / 2, bounds=lambda x: np.clip(x, 0.0, hi))


def _evaluate(enc, pos, scenario, evaluator):
    decoded = enc.decode(pos, scenario)
    if isinstance(decoded, tuple):
        cells, intact = decoded
        return cells, np.where(intact, evaluator(cells), 0.0)
    return decoded, evaluator(decoded)


def _swarm(algo, scenario, cfg: SwarmConfig, enc: _Encoding, workers: int, on_generation=None) -> RunRecord:
    t0 = time.perf_counter()
    evaluator = PathEvaluator(scenario, workers)
    n, h = cfg.swarm_size, scenario.horizon
    free = list(enc.free)

    pos = enc.init(generation_rng(cfg.seed, 0), n, h)
    vel = np.zeros_like(pos)
    cells, fit = _evaluate(enc, pos, scenario, evaluator)
    local, local_fit, local_cells = pos.copy(), fit.copy(), cells.copy()
    g = int(np.argmax(local_fit))
    gbest, gfit, gcells = local[g].copy(), float(local_fit[g]), local_cells[g].copy()

    w = cfg.w
    trace = []
    for k in range(1, cfg.generations + 1):
        rng = generation_rng(cfg.seed, k)
        r1 = rng.random((n, h, len(free)))
        r2 = rng.random((n, h, len(free)))
        vel[..., free] = velocity_step(vel[..., free], pos[..., free], local[..., free], gbest[None][..., free],
                                       w, cfg.phi1, cfg.phi2, r1, r2, enc.v_max)
        pos[..., free] += vel[..., free]
        if enc.bounds is not None:
            pos = enc.bounds(pos)
        cells, fit = _evaluate(enc, pos, scenario, evaluator)
        better = fit > local_fit
        local[better], local_fit[better], local_cells[better] = pos[better], fit[better], cells[better]
        # global best refreshed once per generation, after every particle has moved
        g = int(np.argmax(local_fit))
        if local_fit[g] > gfit:
            gbest, gfit, gcells = local[g].copy(), float(local_fit[g]), local_cells[g].copy()
        trace.append(gfit)
        if on_generation is not None:
            on_generation(k, pos, vel)
        w *= cfg.damping

    encoded = MotionPath.from_array(scenario.start, enc.to_motion(gbest)) if enc.to_motion else None
    return RunRecord(algo, tuple(trace), encoded, CellPath(gcells), gfit,
                     time.perf_counter() - t0, cfg.seed, evaluator.n_evaluations)


def run_mpso(scenario, cfg: SwarmConfig, workers: int = 1, frozen_magnitude: bool = False,
             on_generation=None) -> RunRecord:
    """Motion-encoded PSO.

    With ``frozen_magnitude=True`` particles carry polar ``(rho, alpha)``
    segments whose magnitude is pinned at 1, which is exactly the
    angle-encoded special case (see ``run_apso``).

    ``on_generation(k, positions, velocities)`` is called after every
    generation's position update, if given.
    """
    scenario = _prepare(scenario, cfg)
    enc = _polar_unit_encoding(cfg) if frozen_magnitude else _motion_encoding(cfg)
    return _swarm("mpso", scenario, cfg, enc, workers, on_generation)


def run_apso(scenario, cfg: SwarmConfig, workers: int = 1, on_generation=None) -> RunRecord:
    scenario = _prepare(scenario, cfg)
    return _swarm("apso", scenario, cfg, _angle_encoding(cfg), workers, on_generation)


def run_pso_node(scenario, cfg: SwarmConfig, workers: int = 1, penalty: bool = False,
                 on_generation=None) -> RunRecord:
    """Classic PSO over node coordinates.

    Invalid node sequences are repaired by default; ``penalty=True`` scores
    any path that needed repair as 0 instead.
    """
    scenario = _prepare(scenario, cfg)
    return _swarm("pso", scenario, cfg, _node_encoding(cfg, scenario, penalty), workers, on_generation)


def _distinct_others(rng, n: int, k: int) -> np.ndarray:
    """For each row ``i``, ``k`` distinct indices from ``range(n)`` excluding ``i``."""
    excluded = np.arange(n)[:, None]
    picks = []
    for j in range(k):
        v = rng.integers(0, n - 1 - j, size=n)
        for col in range(excluded.shape[1]):
            v = v + (v >= excluded[:, col])
        picks.append(v)
        excluded = np.sort(np.concatenate([excluded, v[:, None]], axis=1), axis=1)
    return np.stack(picks, axis=1)


def run_de(scenario, cfg: SwarmConfig, de_params=DEParams(), workers: int = 1, on_generation=None) -> RunRecord:
    """DE/rand/1/bin over flattened motion genomes, elitist one-to-one selection."""
    F, CR = de_params if isinstance(de_params, tuple) else (de_params.F, de_params.CR)
    if cfg.swarm_size < 4:
        raise ConfigError(f"DE needs a population of at least 4, got {cfg.swarm_size}")
    scenario = _prepare(scenario, cfg)
    t0 = time.perf_counter()
    evaluator = PathEvaluator(scenario, workers)
    n, h = cfg.swarm_size, scenario.horizon
    dim = 2 * h

    def decode(x):
        return decode_angles(scenario.start, segment_angles(x.reshape(-1, h, 2)), scenario.shape)

    pop = generation_rng(cfg.seed, 0).uniform(-1.0, 1.0, size=(n, dim))
    cells = decode(pop)
    fit = evaluator(cells)
    trace = []
    rows = np.arange(n)
    for k in range(1, cfg.generations + 1):
        rng = generation_rng(cfg.seed, k)
        a, b, c = _distinct_others(rng, n, 3).T
        mutant = pop[a] + F * (pop[b] - pop[c])
        cross = rng.random((n, dim)) < CR
        cross[rows, rng.integers(0, dim, size=n)] = True
        trial = project_to_box(np.where(cross, mutant, pop).reshape(n, h, 2)).reshape(n, dim)
        trial_cells = decode(trial)
        trial_fit = evaluator(trial_cells)
        keep = trial_fit >= fit
        pop[keep], fit[keep], cells[keep] = trial[keep], trial_fit[keep], trial_cells[keep]
        trace.append(float(fit.max()))
        if on_generation is not None:
            on_generation(k, pop, None)

    best = int(np.argmax(fit))
    return RunRecord("de", tuple(trace), MotionPath.from_array(scenario.start, pop[best].reshape(h, 2)),
                     CellPath(cells[best]), float(fit[best]), time.perf_counter() - t0,
                     cfg.seed, evaluator.n_evaluations)


def run_algorithm(algo: str, scenario, cfg: SwarmConfig, workers: int = 1, penalty: bool = False,
                  de_params=DEParams()) -> RunRecord:
    if algo == "mpso":
        return run_mpso(scenario, cfg, workers)
    if algo == "apso":
        return run_apso(scenario, cfg, workers)
    if algo == "pso":
        return run_pso_node(scenario, cfg, workers, penalty=penalty)
    if algo == "de":
        return run_de(scenario, cfg, de_params, workers)
    raise ConfigError(f"unknown algorithm {algo!r}; supported: {', '.join(ALGORITHMS)}")
