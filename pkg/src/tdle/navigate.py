"""A* path planning on the known grid, simple kinematic path following, and
the completion/trapped state check."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from .frontier import FrontierSet
from .world import FREE, OCCUPIED, OccupancyGrid, RobotState

SQRT2 = math.sqrt(2.0)


class PathNotFoundError(RuntimeError):
    """No path exists through known free space."""


@dataclass
class PlannedPath:
    waypoints: list[tuple[float, float]]

    @property
    def length(self) -> float:
        pts = np.asarray(self.waypoints)
        if len(pts) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


@dataclass
class NavConfig:
    robot_radius_m: float = 0.2
    speed_mps: float = 0.5
    dt_s: float = 0.1
    arrival_tol_m: float = 0.3
    stall_ticks: int = 50
    stall_progress_m: float = 0.05
    tick_budget: int = 120000
    goal_snap_m: float = 1.0


@dataclass
class ExecState:
    mode: str = "exploring"  # exploring | returning | trapped | done
    stall_ticks: int = 0
    waypoint_history: list[tuple[float, float]] = field(default_factory=list)
    fallback_goal: Optional[tuple[float, float]] = None


def traversable_mask(grid: OccupancyGrid, robot_radius_m: float) -> np.ndarray:
    """Known-free cells farther than the robot radius from any occupied cell."""
    occupied = grid.cells == OCCUPIED
    if occupied.any() and robot_radius_m > 0:
        dist = ndimage.distance_transform_edt(~occupied) * grid.resolution
        inflated = dist <= robot_radius_m
    else:
        inflated = np.zeros_like(occupied)
    return (grid.cells == FREE) & ~inflated


def _admit_start(free: np.ndarray, grid: OccupancyGrid, s: tuple[int, int],
                 robot_radius_m: float) -> np.ndarray:
    """Admit the robot's own cell and its immediate ring when inflation covers
    it (the robot may legitimately sit inside the inflation ring next to a
    wall after arriving at a snapped goal)."""
    if free[s[1], s[0]]:
        return free
    clear = int(math.ceil(robot_radius_m / grid.resolution))
    x0, x1 = max(s[0] - clear, 0), min(s[0] + clear + 1, grid.nx)
    y0, y1 = max(s[1] - clear, 0), min(s[1] + clear + 1, grid.ny)
    free = free.copy()
    free[y0:y1, x0:x1] |= grid.cells[y0:y1, x0:x1] == FREE
    return free


def _snap_to_free(free: np.ndarray, grid: OccupancyGrid, ix: int, iy: int,
                  max_m: float) -> Optional[tuple[int, int]]:
    if free[iy, ix]:
        return ix, iy
    max_cells = int(math.ceil(max_m / grid.resolution))
    best: Optional[tuple[int, int]] = None
    best_d = float("inf")
    x0, x1 = max(ix - max_cells, 0), min(ix + max_cells + 1, grid.nx)
    y0, y1 = max(iy - max_cells, 0), min(iy + max_cells + 1, grid.ny)
    sub = free[y0:y1, x0:x1]
    ys, xs = np.nonzero(sub)
    for sx, sy in zip(xs + x0, ys + y0):
        d = math.hypot((sx - ix), (sy - iy)) * grid.resolution
        if d <= max_m and d < best_d:
            best, best_d = (sx, sy), d
    return best


def _octile(dx: int, dy: int) -> float:
    dx, dy = abs(dx), abs(dy)
    return (dx + dy) + (SQRT2 - 2.0) * min(dx, dy)


_NEIGHBORS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def plan_path(grid: OccupancyGrid, start: tuple[float, float], goal: tuple[float, float],
              robot_radius_m: float = 0.2, goal_snap_m: float = 1.0) -> PlannedPath:
    """8-connected A* with octile heuristic over inflated known-free cells.

    The goal snaps to the nearest traversable cell within ``goal_snap_m`` when
    its own cell is not traversable; the start cell is always admitted (the
    robot may sit inside the inflation ring next to a wall). Diagonal moves
    require both adjacent cardinal cells to be traversable (no corner cutting).
    """
    free = traversable_mask(grid, robot_radius_m)
    s = grid.cell_of(*start)
    g0 = grid.cell_of(*goal)
    free = _admit_start(free, grid, s, robot_radius_m)
    if not free[s[1], s[0]]:
        raise PathNotFoundError("start is not in known free space")
    g = _snap_to_free(free, grid, g0[0], g0[1], goal_snap_m)
    if g is None:
        raise PathNotFoundError("goal has no traversable cell within snap radius")
    if s == g:
        return PlannedPath([grid.cell_center(*s)])

    nx = grid.nx
    g_cost: dict[int, float] = {s[1] * nx + s[0]: 0.0}
    came: dict[int, int] = {}
    goal_key = g[1] * nx + g[0]
    heap = [(_octile(g[0] - s[0], g[1] - s[1]), s[1] * nx + s[0])]
    while heap:
        f, key = heapq.heappop(heap)
        if key == goal_key:
            break
        cy, cx = divmod(key, nx)
        base = g_cost[key]
        if f - _octile(g[0] - cx, g[1] - cy) > base + 1e-12:
            continue  # stale entry
        for dx, dy in _NEIGHBORS:
            mx, my = cx + dx, cy + dy
            if not (0 <= mx < nx and 0 <= my < grid.ny) or not free[my, mx]:
                continue
            if dx != 0 and dy != 0 and not (free[cy, mx] and free[my, cx]):
                continue
            step = SQRT2 if dx != 0 and dy != 0 else 1.0
            nkey = my * nx + mx
            ncost = base + step
            if ncost < g_cost.get(nkey, float("inf")):
                g_cost[nkey] = ncost
                came[nkey] = key
                heapq.heappush(heap, (ncost + _octile(g[0] - mx, g[1] - my), nkey))
    else:
        raise PathNotFoundError("goal unreachable in known space")
    if goal_key not in g_cost:
        raise PathNotFoundError("goal unreachable in known space")

    cells = []
    key = goal_key
    while True:
        cy, cx = divmod(key, nx)
        cells.append((cx, cy))
        if key not in came:
            break
        key = came[key]
    cells.reverse()
    return PlannedPath([grid.cell_center(cx, cy) for cx, cy in cells])


def reachable_distances(grid: OccupancyGrid, start: tuple[float, float],
                        robot_radius_m: float = 0.2) -> np.ndarray:
    """Shortest 8-connected path length (meters) from the start cell to every
    traversable cell (Dijkstra; same metric as A* path lengths). Unreachable
    cells hold +inf."""
    free = traversable_mask(grid, robot_radius_m)
    s = grid.cell_of(*start)
    free = _admit_start(free, grid, s, robot_radius_m)
    dist = np.full(grid.cells.shape, np.inf)
    if not free[s[1], s[0]]:
        return dist
    dist[s[1], s[0]] = 0.0
    heap = [(0.0, s[1] * grid.nx + s[0])]
    nx = grid.nx
    while heap:
        d, key = heapq.heappop(heap)
        cy, cx = divmod(key, nx)
        if d > dist[cy, cx] + 1e-12:
            continue
        for dx, dy in _NEIGHBORS:
            mx, my = cx + dx, cy + dy
            if not (0 <= mx < nx and 0 <= my < grid.ny) or not free[my, mx]:
                continue
            if dx != 0 and dy != 0 and not (free[cy, mx] and free[my, cx]):
                continue
            step = SQRT2 if dx != 0 and dy != 0 else 1.0
            ndist = d + step
            if ndist < dist[my, mx]:
                dist[my, mx] = ndist
                heapq.heappush(heap, (ndist, my * nx + mx))
    return dist * grid.resolution


def step(state: RobotState, path: PlannedPath, speed: float, dt: float) -> RobotState:
    """Advance along the path polyline by speed*dt from the robot's current
    arc position; heading follows the active segment; odometry accumulates the
    arc displacement. Clamps at the final waypoint."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    pts = np.asarray(path.waypoints)
    if len(pts) == 1:
        target = tuple(pts[0])
        d = math.hypot(target[0] - state.p_bot[0], target[1] - state.p_bot[1])
        move = min(d, speed * dt)
        if d > 1e-12:
            ux, uy = (target[0] - state.p_bot[0]) / d, (target[1] - state.p_bot[1]) / d
            state.p_bot = (state.p_bot[0] + ux * move, state.p_bot[1] + uy * move)
            state.heading = math.atan2(uy, ux)
            state.distance_traveled += move
        return state

    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]

    # project current position onto the polyline to find the arc position
    p = np.asarray(state.p_bot)
    best_s, best_d = 0.0, float("inf")
    for i in range(len(seg)):
        if seg_len[i] < 1e-12:
            continue
        t = float(np.clip(np.dot(p - pts[i], seg[i]) / seg_len[i] ** 2, 0.0, 1.0))
        proj = pts[i] + t * seg[i]
        d = float(np.linalg.norm(p - proj))
        if d < best_d - 1e-12:
            best_d = d
            best_s = float(cum[i] + t * seg_len[i])

    new_s = min(best_s + speed * dt, total)
    advanced = new_s - best_s
    # locate the segment holding new_s
    i = int(np.searchsorted(cum, new_s, side="right")) - 1
    i = min(max(i, 0), len(seg) - 1)
    if seg_len[i] > 1e-12:
        t = (new_s - cum[i]) / seg_len[i]
        pos = pts[i] + t * seg[i]
        state.heading = math.atan2(seg[i][1], seg[i][0])
    else:
        pos = pts[i]
    state.p_bot = (float(pos[0]), float(pos[1]))
    state.distance_traveled += advanced
    return state


def state_check(fp: FrontierSet, exec_state: ExecState, state: RobotState,
                cfg: NavConfig) -> ExecState:
    """Completion/trapped transitions, evaluated when the robot has stopped."""
    if exec_state.mode == "returning":
        if math.hypot(state.p_bot[0] - state.p_ini[0],
                      state.p_bot[1] - state.p_ini[1]) <= cfg.arrival_tol_m:
            exec_state.mode = "done"
        return exec_state
    if len(fp) == 0:
        exec_state.mode = "returning"
        return exec_state
    if exec_state.stall_ticks > cfg.stall_ticks:
        exec_state.mode = "trapped"
        exec_state.fallback_goal = exec_state.waypoint_history[-1] if exec_state.waypoint_history else None
        return exec_state
    exec_state.mode = "exploring"
    return exec_state
