"""Grid belief maps and the cumulative detection objective.

A belief map holds the probability of the target occupying each cell of a
``rows x cols`` grid. The target is conditionally deterministic: at every
step all of its probability mass is shifted by a known integer offset, with
mass that would leave the grid piled onto the nearest boundary cell. The
sensor observes a single cell and either detects (probability ``p_d`` if the
target is there) or not. Planning only ever assumes "no detection".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-9


class BeliefError(ValueError):
    """Invalid input to a belief-map operation."""


@dataclass(frozen=True)
class GridShape:
    rows: int
    cols: int

    def __post_init__(self):
        if int(self.rows) != self.rows or int(self.cols) != self.cols:
            raise BeliefError(f"grid dimensions must be integers, got {self.rows}x{self.cols}")
        if self.rows < 2 or self.cols < 2:
            raise BeliefError(f"grid must be at least 2x2, got {self.rows}x{self.cols}")

    def contains(self, cell: Sequence[int]) -> bool:
        return 0 <= cell[0] < self.rows and 0 <= cell[1] < self.cols

    @property
    def size(self) -> int:
        return self.rows * self.cols


class Cell(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True, eq=False)
class BeliefGrid:
    """Nonnegative probability mass per cell.

    ``mass`` is stored as a read-only float64 array of shape
    ``(shape.rows, shape.cols)``.
    """

    shape: GridShape
    mass: np.ndarray
    normalized: bool = True
    degenerate: bool = False

    def __post_init__(self):
        m = np.array(self.mass, dtype=np.float64)
        if m.shape != (self.shape.rows, self.shape.cols):
            raise BeliefError(f"mass has shape {m.shape}, expected {(self.shape.rows, self.shape.cols)}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise BeliefError("belief mass must be finite and nonnegative")
        if self.normalized and abs(m.sum() - 1.0) > NORM_TOL:
            raise BeliefError(f"belief flagged normalized but sums to {m.sum()!r}")
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_mass(cls, mass, normalize: bool = True) -> "BeliefGrid":
        m = np.asarray(mass, dtype=np.float64)
        shape = GridShape(*m.shape)
        if normalize:
            total = m.sum()
            if not total > 0:
                raise BeliefError("cannot normalize a belief with zero total mass")
            m = m / total
        return cls(shape, m, normalized=normalize)

    @classmethod
    def uniform(cls, shape: GridShape) -> "BeliefGrid":
        return cls(shape, np.full((shape.rows, shape.cols), 1.0 / shape.size))

    @classmethod
    def point(cls, shape: GridShape, cell: Sequence[int]) -> "BeliefGrid":
        m = np.zeros((shape.rows, shape.cols))
        m[cell[0], cell[1]] = 1.0
        return cls(shape, m)

    def total(self) -> float:
        return float(self.mass.sum())

    def __getitem__(self, cell):
        return float(self.mass[cell[0], cell[1]])


@dataclass(frozen=True)
class TargetMotionModel:
    """Per-step integer cell offsets ``(drow, dcol)``; step ``t`` uses ``offsets[t - 1]``."""

    offsets: tuple

    def __post_init__(self):
        offs = tuple((int(dr), int(dc)) for dr, dc in self.offsets)
        for (dr, dc), (r0, c0) in zip(offs, self.offsets):
            if dr != r0 or dc != c0:
                raise BeliefError(f"target offsets must be integers, got {(r0, c0)}")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def constant(cls, offset: Sequence[int], steps: int) -> "TargetMotionModel":
        return cls(tuple(tuple(offset) for _ in range(steps)))

    @classmethod
    def static(cls, steps: int) -> "TargetMotionModel":
        return cls.constant((0, 0), steps)

    def __len__(self):
        return len(self.offsets)

    def offset(self, t: int) -> tuple[int, int]:
        if not 1 <= t <= len(self.offsets):
            raise BeliefError(f"step {t} outside motion schedule of length {len(self.offsets)}")
        return self.offsets[t - 1]


@dataclass(frozen=True)
class SensorModel:
    p_d: float

    def __post_init__(self):
        if not 0.0 <= self.p_d <= 1.0:
            raise BeliefError(f"p_d must lie in [0, 1], got {self.p_d}")

    def no_detection_likelihood(self, shape: GridShape, observed: Sequence[int]) -> np.ndarray:
        """Probability of no detection for each possible target cell."""
        lik = np.ones((shape.rows, shape.cols))
        lik[observed[0], observed[1]] = 1.0 - self.p_d
        return lik


@dataclass(frozen=True)
class EvalResult:
    J: float
    p_trace: tuple
    R_trace: tuple
    r_trace: tuple = field(default=(), repr=False)
    eta_trace: tuple = field(default=(), repr=False)


def check_component(mean, cov, weight, index: int = 0):
    """Validate one mixture component; returns ``(mean, cholesky factor)``."""
    mean = np.asarray(mean, dtype=np.float64)
    cov = np.asarray(cov, dtype=np.float64)
    if mean.shape != (2,) or cov.shape != (2, 2):
        raise BeliefError(f"component {index}: mean must be a 2-vector and cov 2x2")
    if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
        raise BeliefError(f"component {index}: non-finite parameters")
    if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
        raise BeliefError(f"component {index}: covariance is not symmetric")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise BeliefError(f"component {index}: covariance is not positive definite") from None
    if not weight > 0:
        raise BeliefError(f"component {index}: weight must be positive, got {weight}")
    return mean, chol


def gaussian_mixture_belief(shape: GridShape, components) -> BeliefGrid:
    """Evaluate a weighted Gaussian mixture at cell centers and normalize.

    ``components`` is an iterable of ``(mean, cov, weight)`` with ``mean`` in
    ``(row, col)`` cell units. Cell ``(i, j)`` has its center at ``(i, j)``.
    """
    components = list(components)
    if not components:
        raise BeliefError("mixture needs at least one component")
    rr, cc = np.meshgrid(np.arange(shape.rows), np.arange(shape.cols), indexing="ij")
    pts = np.stack([rr, cc], axis=-1).astype(np.float64)
    total = np.zeros((shape.rows, shape.cols))
    for k, (mean, cov, weight) in enumerate(components):
        mean, chol = check_component(mean, cov, weight, k)
        d = pts - mean
        z = np.linalg.solve(chol, d.reshape(-1, 2).T).T.reshape(d.shape)
        maha = np.einsum("...i,...i->...", z, z)
        det = np.prod(np.diag(chol)) ** 2
        total += weight * np.exp(-0.5 * maha) / (2.0 * np.pi * np.sqrt(det))
    s = total.sum()
    if not s > 0 or not np.isfinite(s):
        raise BeliefError("mixture has zero mass on the grid")
    return BeliefGrid(shape, total / s)


def _shift_axis(mass: np.ndarray, d: int, axis: int) -> np.ndarray:
    n = mass.shape[axis]
    if d == 0:
        return mass.copy()
    out = np.zeros_like(mass)

    def sl(a, b):
        idx = [slice(None)] * mass.ndim
        idx[axis] = slice(a, b)
        return tuple(idx)

    if abs(d) >= n - 1:
        edge = n - 1 if d > 0 else 0
        out[sl(edge, edge + 1)] = mass.sum(axis=axis, keepdims=True)
        return out
    if d > 0:
        out[sl(d, n - 1)] = mass[sl(0, n - 1 - d)]
        out[sl(n - 1, n)] = mass[sl(n - 1 - d, n)].sum(axis=axis, keepdims=True)
    else:
        d = -d
        out[sl(1, n - d)] = mass[sl(d + 1, n)]
        out[sl(0, 1)] = mass[sl(0, d + 1)].sum(axis=axis, keepdims=True)
    return out


def shift_clamped(mass: np.ndarray, offset: Sequence[int]) -> np.ndarray:
    """Move mass on the last two axes by ``offset``, clamping at the borders.

    Cell ``(i, j)`` goes to ``(clip(i + dr), clip(j + dc))``; total mass is
    conserved exactly up to float summation.
    """
    dr, dc = offset
    out = _shift_axis(mass, int(dr), mass.ndim - 2)
    return _shift_axis(out, int(dc), mass.ndim - 1)


def move_cells(rows, cols, offset, shape: GridShape):
    """Apply one clamped target step to cell coordinates (arrays allowed)."""
    return (np.clip(rows + offset[0], 0, shape.rows - 1),
            np.clip(cols + offset[1], 0, shape.cols - 1))


def predict(belief: BeliefGrid, motion: TargetMotionModel, t: int) -> BeliefGrid:
    """Propagate the belief one step through the deterministic target motion."""
    moved = shift_clamped(belief.mass, motion.offset(t))
    if belief.normalized:
        # the shift only reorders and sums, so renormalizing guards against float creep only
        moved = moved / moved.sum()
    return BeliefGrid(belief.shape, moved, normalized=belief.normalized)


def no_detection_probability(belief_hat: BeliefGrid, sensor: SensorModel, observed) -> float:
    return 1.0 - sensor.p_d * belief_hat[observed]


def normalization_factor(belief_hat: BeliefGrid, sensor: SensorModel, observed) -> float:
    """Normalizer of the no-detection update, summed over the whole grid."""
    lik = sensor.no_detection_likelihood(belief_hat.shape, observed)
    s = float(np.sum(lik * belief_hat.mass))
    return np.inf if s == 0 else 1.0 / s


def no_detection_update(belief_hat: BeliefGrid, sensor: SensorModel, observed):
    """Condition the predicted belief on "not detected at ``observed``".

    Returns ``(posterior, r)`` where ``r`` is the probability of that
    no-detection event. When ``r == 0`` the target would certainly have been
    found; the posterior is then undefined and a uniform grid flagged
    ``degenerate`` is returned.
    """
    shape = belief_hat.shape
    if not shape.contains(observed):
        raise BeliefError(f"observed cell {tuple(observed)} outside grid {shape.rows}x{shape.cols}")
    r = no_detection_probability(belief_hat, sensor, observed)
    if r <= 0.0:
        uniform = BeliefGrid.uniform(shape)
        return BeliefGrid(shape, uniform.mass, degenerate=True), 0.0
    post = np.array(belief_hat.mass)
    post[observed[0], observed[1]] *= 1.0 - sensor.p_d
    post /= r
    post /= post.sum()
    return BeliefGrid(shape, post), r


def _check_path(scenario, cells):
    cells = [tuple(c) for c in cells]
    if len(cells) != scenario.horizon + 1:
        raise BeliefError(f"path has {len(cells) - 1} steps but the scenario horizon is {scenario.horizon}")
    for c in cells:
        if not scenario.shape.contains(c):
            raise BeliefError(f"path cell {c} outside grid")
    return cells


def evaluate_path(scenario, path) -> EvalResult:
    """Cumulative detection probability of a search path.

    ``path`` is a ``CellPath`` (or a sequence of ``N + 1`` cells) whose first
    cell is the start; the start itself is not observed.
    """
    cells = _check_path(scenario, getattr(path, "cells", path))
    belief = scenario.initial_belief()
    R = 1.0
    ps, Rs, rs, etas = [], [], [], []
    for t, cell in enumerate(cells[1:], start=1):
        belief_hat = predict(belief, scenario.motion, t)
        eta = normalization_factor(belief_hat, scenario.sensor, cell)
        belief, r = no_detection_update(belief_hat, scenario.sensor, cell)
        ps.append(R * (1.0 - r))
        R *= r
        Rs.append(R)
        rs.append(r)
        etas.append(eta)
    return EvalResult(float(sum(ps)), tuple(ps), tuple(Rs), tuple(rs), tuple(etas))


def evaluate_paths_unnormalized(scenario, paths) -> np.ndarray:
    """Collected detection mass for a batch of paths, without renormalizing.

    Each path carries its own unnormalized mass grid; an observation removes
    the fraction ``p_d`` of the mass at the observed cell and banks it.
    ``paths`` is an integer array ``(B, N + 1, 2)`` of ``(row, col)`` cells.
    """
    paths = np.asarray(paths, dtype=np.int64)
    if paths.ndim == 2:
        paths = paths[None]
    if paths.shape[1] != scenario.horizon + 1:
        raise BeliefError(f"paths have {paths.shape[1] - 1} steps but horizon is {scenario.horizon}")
    b = paths.shape[0]
    p_d = scenario.sensor.p_d
    mass = np.repeat(scenario.initial_belief().mass[None], b, axis=0)
    collected = np.zeros(b)
    idx = np.arange(b)
    for t in range(1, scenario.horizon + 1):
        mass = shift_clamped(mass, scenario.motion.offset(t))
        r, c = paths[:, t, 0], paths[:, t, 1]
        collected += p_d * mass[idx, r, c]
        mass[idx, r, c] *= 1.0 - p_d
    return collected


def collected_mass(scenario, path) -> float:
    cells = _check_path(scenario, getattr(path, "cells", path))
    return float(evaluate_paths_unnormalized(scenario, np.array(cells)[None])[0])
