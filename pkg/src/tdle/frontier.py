"""RRT-based frontier point detection.

Two trees are grown by uniform sampling inside the current map AABB: a global
tree that persists across calls (capped at a node budget that scales with the
known area) and a local tree rooted at the robot that is reset every call.
When an extension crosses from known-free into unknown space, the last free
cell on the ray becomes a raw candidate. Raw candidates pass an unknown-disk
filter and a greedy distance dedup before being capped to ``n_fp`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .world import FREE, OCCUPIED, UNKNOWN, OccupancyGrid, Rect, RobotState, map_aabb, supercover_line


@dataclass(frozen=True)
class FrontierPoint:
    position: tuple[float, float]
    id: int


@dataclass
class FrontierSet:
    points: list[FrontierPoint]
    capacity: int

    def __len__(self) -> int:
        return len(self.points)

    def positions(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 2))
        return np.array([p.position for p in self.points])


@dataclass
class FrontierConfig:
    n_nd_min: int = 500
    n_nd_per_m2: float = 4.0
    n_nd_max: int = 20000
    rrt_step_m: float = 1.0
    epsilon_m: float = 0.5
    min_unknown_cells: int = 10
    dedup_radius_m: float = 1.0
    n_fp: int = 30
    samples_per_call: int = 600
    local_tree_cap: int = 100


_DISK_CACHE: dict[tuple[float, float], tuple[np.ndarray, np.ndarray]] = {}


def _disk_offsets(radius_m: float, resolution: float) -> tuple[np.ndarray, np.ndarray]:
    key = (radius_m, resolution)
    if key not in _DISK_CACHE:
        r = int(math.ceil(radius_m / resolution))
        dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
        keep = (dx * dx + dy * dy) * resolution**2 <= radius_m**2
        _DISK_CACHE[key] = (dx[keep].ravel(), dy[keep].ravel())
    return _DISK_CACHE[key]


def unknown_cells_within(grid: OccupancyGrid, x: float, y: float, radius_m: float) -> int:
    """Count unknown cells whose center lies within ``radius_m`` of (x, y)'s cell center."""
    dx, dy = _disk_offsets(radius_m, grid.resolution)
    cx, cy = grid.cell_of(x, y)
    xs = np.clip(cx + dx, 0, grid.nx - 1)
    ys = np.clip(cy + dy, 0, grid.ny - 1)
    in_bounds = (cx + dx == xs) & (cy + dy == ys)
    return int(((grid.cells[ys, xs] == UNKNOWN) & in_bounds).sum())


def epsilon_filter(candidate: FrontierPoint, grid: OccupancyGrid, epsilon_m: float,
                   min_unknown: int) -> bool:
    """Keep a candidate only if enough unknown cells sit inside its epsilon disk."""
    if epsilon_m <= 0:
        raise ValueError("epsilon must be positive")
    x, y = candidate.position
    return unknown_cells_within(grid, x, y, epsilon_m) >= min_unknown


def dedup(points: list[FrontierPoint], radius_m: float) -> list[FrontierPoint]:
    """Greedy pass in id order; keep a point iff it is at least ``radius_m``
    from every previously kept point."""
    if radius_m <= 0:
        raise ValueError("dedup radius must be positive")
    kept: list[FrontierPoint] = []
    for p in sorted(points, key=lambda q: q.id):
        px, py = p.position
        if all(math.hypot(px - k.position[0], py - k.position[1]) >= radius_m for k in kept):
            kept.append(p)
    return kept


def is_frontier_cell(grid: OccupancyGrid, ix: int, iy: int) -> bool:
    """Free cell with at least one unknown 8-neighbor."""
    if grid.cells[iy, ix] != FREE:
        return False
    x0, x1 = max(ix - 1, 0), min(ix + 2, grid.nx)
    y0, y1 = max(iy - 1, 0), min(iy + 2, grid.ny)
    return bool((grid.cells[y0:y1, x0:x1] == UNKNOWN).any())


def frontier_cell_mask(grid: OccupancyGrid) -> np.ndarray:
    """Brute-force scan: boolean mask of all frontier cells."""
    unknown = grid.cells == UNKNOWN
    ny, nx = unknown.shape
    padded = np.pad(unknown, 1, constant_values=False)
    near_unknown = np.zeros_like(unknown)
    for sy in (0, 1, 2):
        for sx in (0, 1, 2):
            if sx == 1 and sy == 1:
                continue
            near_unknown |= padded[sy : sy + ny, sx : sx + nx]
    return (grid.cells == FREE) & near_unknown


class _Tree:
    def __init__(self, root: tuple[float, float], cap: int) -> None:
        self.positions = [root]
        self.parents = [-1]
        self.cap = cap

    def __len__(self) -> int:
        return len(self.positions)

    def nearest(self, x: float, y: float) -> int:
        arr = np.asarray(self.positions)
        return int(((arr[:, 0] - x) ** 2 + (arr[:, 1] - y) ** 2).argmin())

    def add(self, pos: tuple[float, float], parent: int) -> bool:
        if len(self.positions) >= self.cap:
            return False
        self.positions.append(pos)
        self.parents.append(parent)
        return True


class FrontierDetector:
    """Stateful detector: the global tree persists across calls."""

    def __init__(self, cfg: FrontierConfig, rng: np.random.Generator) -> None:
        self.cfg = cfg
        self.rng = rng
        self.global_tree: _Tree | None = None

    def node_cap(self, grid: OccupancyGrid) -> int:
        area = grid.known_area_m2()
        return int(min(max(self.cfg.n_nd_min, self.cfg.n_nd_per_m2 * area), self.cfg.n_nd_max))

    def detect(self, grid: OccupancyGrid, state: RobotState) -> FrontierSet:
        cfg = self.cfg
        if grid.value_at(*state.p_bot) != FREE:
            raise ValueError("robot cell must be known free before detection")
        aabb = map_aabb(grid)
        cap = self.node_cap(grid)
        if self.global_tree is None:
            self.global_tree = _Tree(state.p_bot, cap)
        else:
            self.global_tree.cap = cap
        local = _Tree(state.p_bot, cfg.local_tree_cap)

        raw: list[tuple[float, float]] = []
        trees = (self.global_tree, local)
        for i in range(cfg.samples_per_call):
            sx = self.rng.uniform(aabb.x_min, aabb.x_max)
            sy = self.rng.uniform(aabb.y_min, aabb.y_max)
            self._extend(trees[i % 2], grid, sx, sy, raw)

        points = [FrontierPoint(pos, i) for i, pos in enumerate(raw)]
        survivors = [p for p in points
                     if self._is_valid_candidate(grid, p)
                     and epsilon_filter(p, grid, cfg.epsilon_m, cfg.min_unknown_cells)]
        survivors = dedup(survivors, cfg.dedup_radius_m)[: cfg.n_fp]
        final = [FrontierPoint(p.position, i) for i, p in enumerate(survivors)]
        return FrontierSet(final, cfg.n_fp)

    @staticmethod
    def _is_valid_candidate(grid: OccupancyGrid, p: FrontierPoint) -> bool:
        ix, iy = grid.cell_of(*p.position)
        return is_frontier_cell(grid, ix, iy)

    def _extend(self, tree: _Tree, grid: OccupancyGrid, sx: float, sy: float,
                raw: list[tuple[float, float]]) -> None:
        ni = tree.nearest(sx, sy)
        nx_, ny_ = tree.positions[ni]
        dist = math.hypot(sx - nx_, sy - ny_)
        if dist < 1e-9:
            return
        step = min(self.cfg.rrt_step_m, dist)
        ex = nx_ + (sx - nx_) / dist * step
        ey = ny_ + (sy - ny_) / dist * step

        c0 = grid.cell_of(nx_, ny_)
        c1 = grid.cell_of(ex, ey)
        prev_free: tuple[int, int] | None = None
        for cx, cy in supercover_line(c0[0], c0[1], c1[0], c1[1]):
            v = grid.cells[cy, cx]
            if v == OCCUPIED:
                return
            if v == UNKNOWN:
                if prev_free is not None:
                    raw.append(grid.cell_center(*prev_free))
                return
            prev_free = (cx, cy)
        tree.add((ex, ey), ni)


def detect_frontiers(grid: OccupancyGrid, state: RobotState, rng: np.random.Generator,
                     cfg: FrontierConfig | None = None) -> FrontierSet:
    """Single-shot detection with a fresh detector (the global tree lives only
    for this call). Long-running loops should hold a FrontierDetector."""
    return FrontierDetector(cfg or FrontierConfig(), rng).detect(grid, state)
