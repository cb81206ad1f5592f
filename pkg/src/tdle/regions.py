"""Division of the map AABB into subregions and selection of the ones worth
exploring (contain a frontier point or are mostly unknown)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frontier import FrontierSet
from .world import UNKNOWN, OccupancyGrid, Rect, RobotState


@dataclass(frozen=True)
class Subregion:
    index: tuple[int, int]  # (col, row)
    bounds: Rect

    @property
    def center(self) -> tuple[float, float]:
        b = self.bounds
        return (0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max))


@dataclass
class Division:
    n_l: int
    n_h: int
    l_box: float
    h_box: float
    subregions: list[Subregion]  # row-major: row 0 first, col varies fastest
    aabb: Rect

    def at(self, col: int, row: int) -> Subregion:
        return self.subregions[row * self.n_l + col]

    def locate(self, x: float, y: float) -> Subregion:
        """Subregion containing a point; shared boundaries resolve toward the
        lower index (half-open bounds except the last column/row)."""
        a = self.aabb
        w, h = a.width / self.n_l, a.height / self.n_h
        col = min(int((x - a.x_min) / w), self.n_l - 1)
        row = min(int((y - a.y_min) / h), self.n_h - 1)
        return self.at(max(col, 0), max(row, 0))


@dataclass
class RegionConfig:
    n_sr: int = 25
    tau_unknown: float = 0.8
    samples_per_axis: int = 5


@dataclass
class SelectedRegions:
    regions: list[Subregion]  # regions[0] contains the robot
    cap: int

    def centers(self) -> np.ndarray:
        return np.array([sr.center for sr in self.regions])


def divide(aabb: Rect, d_lid: float) -> Division:
    """Tile the AABB evenly, starting from a 3x3 grid and adding columns/rows
    until no subregion side exceeds twice the sensor FoV diameter."""
    if aabb.width <= 0 or aabb.height <= 0:
        raise ValueError("degenerate AABB")
    if d_lid <= 0:
        raise ValueError("d_lid must be positive")
    n_l, n_h = 3, 3
    while aabb.width / n_l > 2.0 * d_lid:
        n_l += 1
    while aabb.height / n_h > 2.0 * d_lid:
        n_h += 1
    w, h = aabb.width / n_l, aabb.height / n_h
    subregions = []
    for row in range(n_h):
        for col in range(n_l):
            bounds = Rect(aabb.x_min + col * w, aabb.y_min + row * h,
                          aabb.x_min + (col + 1) * w, aabb.y_min + (row + 1) * h)
            subregions.append(Subregion((col, row), bounds))
    return Division(n_l, n_h, aabb.width, aabb.height, subregions, aabb)


def is_unknown(sr: Subregion, grid: OccupancyGrid, samples_per_axis: int,
               tau_unknown: float) -> bool:
    """Sample a deterministic lattice inside the subregion and report whether
    the unknown fraction exceeds the threshold."""
    if samples_per_axis < 2:
        raise ValueError("samples_per_axis must be at least 2")
    if not 0.0 < tau_unknown < 1.0:
        raise ValueError("tau_unknown must lie in (0, 1)")
    b = sr.bounds
    sx = b.width / samples_per_axis
    sy = b.height / samples_per_axis
    unknown = 0
    for i in range(samples_per_axis):
        for j in range(samples_per_axis):
            x = b.x_min + (i + 0.5) * sx
            y = b.y_min + (j + 0.5) * sy
            if grid.value_at(x, y) == UNKNOWN:
                unknown += 1
    return unknown / samples_per_axis**2 > tau_unknown


def select(division: Division, fp: FrontierSet, grid: OccupancyGrid, state: RobotState,
           cfg: RegionConfig) -> SelectedRegions:
    """Pick the robot's subregion first, then every subregion that holds a
    frontier point or is mostly unknown, in row-major order, capped to n_sr."""
    sr0 = division.locate(*state.p_bot)
    with_fp: set[tuple[int, int]] = set()
    for p in fp.points:
        with_fp.add(division.locate(*p.position).index)

    chosen = [sr0]
    for sr in division.subregions:
        if sr.index == sr0.index:
            continue
        if len(chosen) >= cfg.n_sr:
            break
        if sr.index in with_fp or is_unknown(sr, grid, cfg.samples_per_axis, cfg.tau_unknown):
            chosen.append(sr)
    return SelectedRegions(chosen, cfg.n_sr)
