"""Motion-encoded search paths and their decoding to 8-connected grid paths.

A path is stored as ``N`` continuous motion vectors ``(mx, my)``. Decoding
keeps only the heading: it is snapped to the nearest multiple of 45 degrees
and the UAV moves one cell that way. ``x`` runs along columns and ``y``
along rows, so a Cartesian step ``(dx, dy)`` moves the cell by
``(drow, dcol) = (dy, dx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .belief import Cell, GridShape

# unit steps for heading index k = 0..7 (k * 45 deg, counter-clockwise from East)
STEP_DX = np.array([1, 1, 0, -1, -1, -1, 0, 1], dtype=np.int64)
STEP_DY = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
HEADINGS = np.arange(8) * (np.pi / 4)
_TIE_TOL = 1e-9


class CodecError(ValueError):
    pass


@dataclass(frozen=True)
class MotionSegment:
    mx: float
    my: float

    @classmethod
    def from_polar(cls, rho: float, alpha: float) -> "MotionSegment":
        return cls(rho * math.cos(alpha), rho * math.sin(alpha))

    @property
    def rho(self) -> float:
        return math.hypot(self.mx, self.my)

    @property
    def alpha(self) -> float:
        return float(segment_angles(np.array([[self.mx, self.my]]))[0])


@dataclass(frozen=True)
class MotionPath:
    start: Cell
    segments: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", Cell(*self.start))
        segs = tuple(s if isinstance(s, MotionSegment) else MotionSegment(*s) for s in self.segments)
        if not segs:
            raise CodecError("a motion path needs at least one segment")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def from_array(cls, start, components) -> "MotionPath":
        a = np.asarray(components, dtype=np.float64).reshape(-1, 2)
        return cls(start, tuple(MotionSegment(float(x), float(y)) for x, y in a))

    def as_array(self) -> np.ndarray:
        return np.array([[s.mx, s.my] for s in self.segments], dtype=np.float64)

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True)
class QuantizedMove:
    dx: int
    dy: int

    def __post_init__(self):
        if max(abs(self.dx), abs(self.dy)) != 1:
            raise CodecError(f"quantized move must have Chebyshev norm 1, got {(self.dx, self.dy)}")

    @property
    def cell_offset(self) -> tuple[int, int]:
        return (self.dy, self.dx)


@dataclass(frozen=True)
class CellPath:
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(Cell(int(r), int(c)) for r, c in self.cells))

    def __len__(self):
        return len(self.cells)

    @property
    def start(self) -> Cell:
        return self.cells[0]

    @property
    def nodes(self) -> tuple:
        return self.cells[1:]

    def as_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int64)

    def is_valid(self, shape: GridShape) -> bool:
        return bool(valid_paths(self.as_array()[None], shape)[0])


def valid_paths(cells: np.ndarray, shape: GridShape) -> np.ndarray:
    """Per-path check: all cells in grid, consecutive Chebyshev distance 1."""
    cells = np.asarray(cells)
    inside = ((cells[..., 0] >= 0) & (cells[..., 0] < shape.rows)
              & (cells[..., 1] >= 0) & (cells[..., 1] < shape.cols)).all(axis=-1)
    step = np.abs(np.diff(cells, axis=-2)).max(axis=-1)
    return inside & (step == 1).all(axis=-1)


def segment_angles(components: np.ndarray) -> np.ndarray:
    """Headings ``atan2(my, mx)`` of ``(..., 2)`` components; zero vectors map to 0."""
    c = np.asarray(components, dtype=np.float64)
    mx, my = c[..., 0], c[..., 1]
    alpha = np.arctan2(my, mx)
    return np.where((mx == 0) & (my == 0), 0.0, alpha)


def heading_index(alpha) -> np.ndarray:
    """Nearest 45-degree heading index in 0..7, rounding halves away from zero."""
    q = np.asarray(alpha, dtype=np.float64) / (np.pi / 4)
    k = np.sign(q) * np.floor(np.abs(q) + 0.5)
    return np.mod(k, 8).astype(np.int64)


def quantize_segment(seg: MotionSegment) -> QuantizedMove:
    k = int(heading_index(seg.alpha))
    return QuantizedMove(int(STEP_DX[k]), int(STEP_DY[k]))


def _angular_distance(a, b):
    return np.abs(np.mod(a - b + np.pi, 2 * np.pi) - np.pi)


def _fallback_heading(rows, cols, alpha, shape: GridShape) -> np.ndarray:
    """Heading of the in-grid neighbour closest in angle to ``alpha``.

    Ties (within a float tolerance) go to the smallest heading index.
    """
    nr = rows[:, None] + STEP_DY[None, :]
    nc = cols[:, None] + STEP_DX[None, :]
    ok = (nr >= 0) & (nr < shape.rows) & (nc >= 0) & (nc < shape.cols)
    dist = np.where(ok, _angular_distance(alpha[:, None], HEADINGS[None, :]), np.inf)
    best = dist.min(axis=1, keepdims=True)
    return np.argmax(dist <= best + _TIE_TOL, axis=1)


def decode_angles(start: Sequence[int], alpha: np.ndarray, shape: GridShape) -> np.ndarray:
    """Decode headings ``(P, N)`` into cell paths ``(P, N + 1, 2)`` of ``(row, col)``.

    A step that would leave the grid is replaced by the valid neighbour whose
    direction is angularly closest to the continuous heading.
    """
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.float64))
    if not shape.contains(start):
        raise CodecError(f"start {tuple(start)} outside grid {shape.rows}x{shape.cols}")
    n_paths, n = alpha.shape
    k = heading_index(alpha)
    out = np.empty((n_paths, n + 1, 2), dtype=np.int64)
    r = np.full(n_paths, start[0], dtype=np.int64)
    c = np.full(n_paths, start[1], dtype=np.int64)
    out[:, 0, 0], out[:, 0, 1] = r, c
    for t in range(n):
        kt = k[:, t]
        nr, nc = r + STEP_DY[kt], c + STEP_DX[kt]
        bad = (nr < 0) | (nr >= shape.rows) | (nc < 0) | (nc >= shape.cols)
        if bad.any():
            kb = _fallback_heading(r[bad], c[bad], alpha[bad, t], shape)
            nr[bad] = r[bad] + STEP_DY[kb]
            nc[bad] = c[bad] + STEP_DX[kb]
        r, c = nr, nc
        out[:, t + 1, 0], out[:, t + 1, 1] = r, c
    return out


def decode_path(path: MotionPath, shape: GridShape) -> CellPath:
    alpha = segment_angles(path.as_array())
    return CellPath(decode_angles(path.start, alpha[None], shape)[0])


def random_motion_path(start, n: int, rng: np.random.Generator) -> MotionPath:
    if n < 1:
        raise CodecError(f"horizon must be >= 1, got {n}")
    return MotionPath.from_array(start, rng.uniform(-1.0, 1.0, size=(n, 2)))


def repair_nodes(start: Sequence[int], nodes: np.ndarray, shape: GridShape):
    """Turn continuous node coordinates ``(P, N, 2)`` into valid cell paths.

    Each node is rounded to its nearest in-grid cell. Walking from ``start``,
    a node that is not exactly one king move away is replaced by the unit
    step heading toward it. Returns ``(cells, intact)`` where ``intact``
    flags paths that needed no repair.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    n_paths, n = nodes.shape[:2]
    target_r = np.clip(np.floor(nodes[..., 0] + 0.5), 0, shape.rows - 1).astype(np.int64)
    target_c = np.clip(np.floor(nodes[..., 1] + 0.5), 0, shape.cols - 1).astype(np.int64)
    out = np.empty((n_paths, n + 1, 2), dtype=np.int64)
    r = np.full(n_paths, start[0], dtype=np.int64)
    c = np.full(n_paths, start[1], dtype=np.int64)
    out[:, 0, 0], out[:, 0, 1] = r, c
    intact = np.ones(n_paths, dtype=bool)
    for t in range(n):
        dr, dc = target_r[:, t] - r, target_c[:, t] - c
        ok = np.maximum(np.abs(dr), np.abs(dc)) == 1
        nr, nc = target_r[:, t].copy(), target_c[:, t].copy()
        bad = ~ok
        if bad.any():
            intact &= ok
            alpha = segment_angles(np.stack([dc[bad], dr[bad]], axis=-1).astype(np.float64))
            k = heading_index(alpha)
            br, bc = r[bad] + STEP_DY[k], c[bad] + STEP_DX[k]
            off = (br < 0) | (br >= shape.rows) | (bc < 0) | (bc >= shape.cols)
            if off.any():
                k[off] = _fallback_heading(r[bad][off], c[bad][off], alpha[off], shape)
                br, bc = r[bad] + STEP_DY[k], c[bad] + STEP_DX[k]
            nr[bad], nc[bad] = br, bc
        r, c = nr, nc
        out[:, t + 1, 0], out[:, t + 1, 1] = r, c
    return out, intact
