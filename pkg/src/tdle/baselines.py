"""Baseline target-selection strategies sharing the frontier detector and
navigator: greedy nearest-frontier and exhaustive/nearest-neighbor TSP
ordering over frontier points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frontier import FrontierPoint, FrontierSet
from .navigate import reachable_distances
from .world import OccupancyGrid, RobotState

PLANNER_TAGS = ("tdle", "greedy", "tsp")


class NoReachableFrontierError(RuntimeError):
    pass


def greedy_select(fp: FrontierSet, grid: OccupancyGrid, state: RobotState,
                  robot_radius_m: float = 0.2, snap_m: float = 1.0) -> FrontierPoint:
    """Frontier point with the minimal shortest-path length from the robot.

    Path lengths come from a single Dijkstra sweep over the inflated known-free
    grid, which yields the same optimal lengths as per-target A*. A point whose
    cell is blocked by inflation is scored at the nearest traversable cell
    within the goal-snap radius, mirroring the planner's goal snapping.
    """
    if len(fp) == 0:
        raise ValueError("frontier set is empty")
    dist = reachable_distances(grid, state.p_bot, robot_radius_m)
    snap_cells = int(math.ceil(snap_m / grid.resolution))
    best: FrontierPoint | None = None
    best_d = float("inf")
    for p in sorted(fp.points, key=lambda q: q.id):
        ix, iy = grid.cell_of(*p.position)
        x0, x1 = max(ix - snap_cells, 0), min(ix + snap_cells + 1, grid.nx)
        y0, y1 = max(iy - snap_cells, 0), min(iy + snap_cells + 1, grid.ny)
        d = float(np.min(dist[y0:y1, x0:x1]))
        if d < best_d:
            best, best_d = p, d
    if best is None or not math.isfinite(best_d):
        raise NoReachableFrontierError("no frontier point is reachable in known space")
    return best


def _open_tour_cost(order: list[int], dmat: np.ndarray, start_d: np.ndarray) -> float:
    cost = start_d[order[0]]
    for a, b in zip(order, order[1:]):
        cost += dmat[a, b]
    return float(cost)


def _held_karp_open_tour(dmat: np.ndarray, start_d: np.ndarray) -> list[int]:
    """Minimal-length open tour visiting all points, starting from the robot
    (subset dynamic program)."""
    n = dmat.shape[0]
    size = 1 << n
    dp = np.full((size, n), np.inf)
    parent = np.full((size, n), -1, dtype=np.int64)
    for j in range(n):
        dp[1 << j, j] = start_d[j]
    for mask in range(size):
        for j in range(n):
            if not mask & (1 << j) or not np.isfinite(dp[mask, j]):
                continue
            base = dp[mask, j]
            for k in range(n):
                if mask & (1 << k):
                    continue
                nmask = mask | (1 << k)
                cost = base + dmat[j, k]
                if cost < dp[nmask, k]:
                    dp[nmask, k] = cost
                    parent[nmask, k] = j
    full = size - 1
    j = int(np.argmin(dp[full]))
    order = []
    mask = full
    while j >= 0:
        order.append(j)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order.reverse()
    return order


def _nearest_neighbor_tour(dmat: np.ndarray, start_d: np.ndarray) -> list[int]:
    n = dmat.shape[0]
    unvisited = set(range(n))
    order = [int(np.argmin(start_d))]
    unvisited.remove(order[0])
    while unvisited:
        cur = order[-1]
        nxt = min(unvisited, key=lambda k: (dmat[cur, k], k))
        order.append(nxt)
        unvisited.remove(nxt)
    return order


def tsp_order(fp: FrontierSet, state: RobotState, exact_limit: int = 15) -> list[FrontierPoint]:
    """Order all frontier points by a minimal-length open tour from the robot
    (Euclidean edges); exact subset DP up to ``exact_limit`` points, greedy
    nearest-neighbor beyond."""
    if len(fp) == 0:
        raise ValueError("frontier set is empty")
    pts = fp.positions()
    dmat = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    start_d = np.hypot(pts[:, 0] - state.p_bot[0], pts[:, 1] - state.p_bot[1])
    if len(fp) <= exact_limit:
        order = _held_karp_open_tour(dmat, start_d)
    else:
        order = _nearest_neighbor_tour(dmat, start_d)
    return [fp.points[i] for i in order]


def tsp_select(fp: FrontierSet, state: RobotState, exact_limit: int = 15) -> FrontierPoint:
    """First point of the minimal open tour through all frontier points."""
    return tsp_order(fp, state, exact_limit)[0]
