"""Frontier-point indicators and comprehensive revenue target selection.

Per candidate inside the current subregion:
  - global compatibility: negated distance to the adjoining edge toward the
    next subregion on the route (nearer to the edge scores higher);
  - information gain: number of other frontier points visible from the
    candidate (range plus grid line-of-sight, unknown cells transparent);
  - motion consistency: exp(2 * (2 * alpha / pi - 1)) over the absolute
    heading difference alpha in [0, pi].
Indicator columns are z-score normalized across the candidates and combined as
lambda_c * zc + lambda_i * zi - lambda_m * zm; the argmax wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .frontier import FrontierPoint, FrontierSet
from .regions import Subregion
from .world import OCCUPIED, OccupancyGrid, Rect, supercover_line


@dataclass
class Indicators:
    g_com: float  # meters, <= 0 (negated edge distance)
    g_inf: int
    c_mot: float
    alpha_ori: float


@dataclass
class RevenueWeights:
    lambda_c: float = 1.0
    lambda_i: float = 1.0
    lambda_m: float = 0.5

    def __post_init__(self) -> None:
        if min(self.lambda_c, self.lambda_i, self.lambda_m) < 0:
            raise ValueError("weights must be non-negative")
        if max(self.lambda_c, self.lambda_i, self.lambda_m) == 0:
            raise ValueError("at least one weight must be positive")


def _edge_segments(b: Rect) -> dict[str, tuple[tuple[float, float], tuple[float, float]]]:
    return {
        "west": ((b.x_min, b.y_min), (b.x_min, b.y_max)),
        "east": ((b.x_max, b.y_min), (b.x_max, b.y_max)),
        "south": ((b.x_min, b.y_min), (b.x_max, b.y_min)),
        "north": ((b.x_min, b.y_max), (b.x_max, b.y_max)),
    }


def _point_segment_distance(p: tuple[float, float], a: tuple[float, float],
                            b: tuple[float, float]) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    seg_len_sq = vx * vx + vy * vy
    if seg_len_sq == 0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / seg_len_sq))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def adjoining_edge(current_sr: Subregion, next_sr: Optional[Subregion],
                   p_ini: tuple[float, float]) -> tuple[tuple[float, float], tuple[float, float]]:
    """Boundary segment the robot should head toward: the shared edge with a
    grid-adjacent next subregion, else the current edge nearest the next
    subregion's center, else (no next) the edge nearest the initial point."""
    b = current_sr.bounds
    if next_sr is not None:
        dc = next_sr.index[0] - current_sr.index[0]
        dr = next_sr.index[1] - current_sr.index[1]
        if abs(dc) + abs(dr) == 1:
            nb = next_sr.bounds
            if dc != 0:
                x = b.x_max if dc > 0 else b.x_min
                y0, y1 = max(b.y_min, nb.y_min), min(b.y_max, nb.y_max)
                return ((x, y0), (x, y1))
            y = b.y_max if dr > 0 else b.y_min
            x0, x1 = max(b.x_min, nb.x_min), min(b.x_max, nb.x_max)
            return ((x0, y), (x1, y))
        ref = next_sr.center
    else:
        ref = p_ini
    segments = _edge_segments(b)
    return min(segments.values(), key=lambda seg: _point_segment_distance(ref, *seg))


def global_compatibility(p: FrontierPoint, current_sr: Subregion,
                         next_sr: Optional[Subregion], p_ini: tuple[float, float]) -> float:
    seg = adjoining_edge(current_sr, next_sr, p_ini)
    return -_point_segment_distance(p.position, *seg)


def line_of_sight(grid: OccupancyGrid, a: tuple[float, float], b: tuple[float, float]) -> bool:
    """True when no occupied cell lies on the grid line between the two points
    (endpoint cells excluded; unknown cells do not block)."""
    c0 = grid.cell_of(*a)
    c1 = grid.cell_of(*b)
    for cx, cy in supercover_line(c0[0], c0[1], c1[0], c1[1]):
        if (cx, cy) in (c0, c1):
            continue
        if grid.cells[cy, cx] == OCCUPIED:
            return False
    return True


def information_gain(p: FrontierPoint, fp: FrontierSet, grid: OccupancyGrid,
                     range_m: float) -> int:
    count = 0
    px, py = p.position
    for q in fp.points:
        if q.id == p.id:
            continue
        if math.hypot(q.position[0] - px, q.position[1] - py) > range_m:
            continue
        if line_of_sight(grid, p.position, q.position):
            count += 1
    return count


def motion_consistency(alpha_ori: float) -> float:
    if not 0.0 <= alpha_ori <= math.pi:
        raise ValueError("alpha_ori must lie in [0, pi]")
    return math.exp(2.0 * (2.0 * alpha_ori / math.pi - 1.0))


def heading_difference(heading: float, p_bot: tuple[float, float],
                       target: tuple[float, float]) -> float:
    """Absolute angle between the robot heading and the bearing to a target,
    wrapped to [0, pi]."""
    bearing = math.atan2(target[1] - p_bot[1], target[0] - p_bot[0])
    diff = (bearing - heading) % (2.0 * math.pi)
    if diff > math.pi:
        diff = 2.0 * math.pi - diff
    return diff


def z_normalize(values: Sequence[float]) -> list[float]:
    """Population z-scores; all zeros when the variance is zero."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("z_normalize requires a non-empty list")
    std = float(arr.std())
    if std == 0.0:
        return [0.0] * arr.size
    mean = float(arr.mean())
    return [float((v - mean) / std) for v in arr]


def compute_indicators(p: FrontierPoint, current_sr: Subregion, next_sr: Optional[Subregion],
                       p_ini: tuple[float, float], fp: FrontierSet, grid: OccupancyGrid,
                       range_m: float, state_heading: float,
                       p_bot: tuple[float, float]) -> Indicators:
    alpha = heading_difference(state_heading, p_bot, p.position)
    return Indicators(
        g_com=global_compatibility(p, current_sr, next_sr, p_ini),
        g_inf=information_gain(p, fp, grid, range_m),
        c_mot=motion_consistency(alpha),
        alpha_ori=alpha,
    )


def select_target(candidates: Sequence[tuple[FrontierPoint, Indicators]],
                  w: RevenueWeights,
                  p_bot: tuple[float, float] = (0.0, 0.0)) -> FrontierPoint:
    """Argmax of the combined z-normalized revenue; ties broken by distance to
    the robot, then by lowest id."""
    if not candidates:
        raise ValueError("select_target requires at least one candidate")
    zc = z_normalize([ind.g_com for _, ind in candidates])
    zi = z_normalize([float(ind.g_inf) for _, ind in candidates])
    zm = z_normalize([ind.c_mot for _, ind in candidates])
    scores = [w.lambda_c * c + w.lambda_i * i - w.lambda_m * m
              for c, i, m in zip(zc, zi, zm)]

    def sort_key(idx: int):
        p = candidates[idx][0]
        d = math.hypot(p.position[0] - p_bot[0], p.position[1] - p_bot[1])
        return (-scores[idx], d, p.id)

    best = min(range(len(candidates)), key=sort_key)
    return candidates[best][0]
