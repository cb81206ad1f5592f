"""Ground-truth environment, robot state, simulated 2D range sensor and the
incrementally built occupancy grid.

Cell value convention for occupancy grids: 0 = unknown, 1 = free, 2 = occupied.
Arrays are indexed ``cells[iy, ix]`` with iy = 0 at y = 0 (world y grows upward);
map files and PGM images store the top row first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

UNKNOWN = 0
FREE = 1
OCCUPIED = 2


class MapFormatError(ValueError):
    """Raised when a map file cannot be parsed."""


class OpenWorldError(ValueError):
    """Raised when a ground-truth map's border is not fully occupied."""


class EmptyMapError(ValueError):
    """Raised when an operation needs at least one known cell."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in meters."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass
class GroundTruthMap:
    width_m: float
    height_m: float
    resolution: float
    occupied: np.ndarray  # bool, shape (ny, nx)

    @property
    def nx(self) -> int:
        return self.occupied.shape[1]

    @property
    def ny(self) -> int:
        return self.occupied.shape[0]

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ix = min(max(int(x / self.resolution), 0), self.nx - 1)
        iy = min(max(int(y / self.resolution), 0), self.ny - 1)
        return ix, iy

    def is_free(self, x: float, y: float) -> bool:
        ix, iy = self.cell_of(x, y)
        return not self.occupied[iy, ix]

    def free_cell_count(self) -> int:
        return int((~self.occupied).sum())


@dataclass
class OccupancyGrid:
    width_m: float
    height_m: float
    resolution: float
    cells: np.ndarray  # uint8, shape (ny, nx), values UNKNOWN/FREE/OCCUPIED

    @classmethod
    def blank_like(cls, gt: GroundTruthMap) -> "OccupancyGrid":
        cells = np.full((gt.ny, gt.nx), UNKNOWN, dtype=np.uint8)
        return cls(gt.width_m, gt.height_m, gt.resolution, cells)

    @property
    def nx(self) -> int:
        return self.cells.shape[1]

    @property
    def ny(self) -> int:
        return self.cells.shape[0]

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ix = min(max(int(x / self.resolution), 0), self.nx - 1)
        iy = min(max(int(y / self.resolution), 0), self.ny - 1)
        return ix, iy

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (ix + 0.5) * self.resolution, (iy + 0.5) * self.resolution

    def value_at(self, x: float, y: float) -> int:
        ix, iy = self.cell_of(x, y)
        return int(self.cells[iy, ix])

    def known_mask(self) -> np.ndarray:
        return self.cells != UNKNOWN

    def known_count(self) -> int:
        return int((self.cells != UNKNOWN).sum())

    def known_area_m2(self) -> float:
        return self.known_count() * self.resolution**2

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.width_m, self.height_m, self.resolution, self.cells.copy())


@dataclass
class RobotState:
    p_bot: tuple[float, float]
    heading: float
    p_ini: tuple[float, float]
    distance_traveled: float = 0.0


@dataclass
class SensorModel:
    range_m: float = 10.0
    beam_count: int = 360

    def __post_init__(self) -> None:
        if self.range_m <= 0:
            raise ValueError("sensor range must be positive")
        if self.beam_count < 8:
            raise ValueError("beam_count must be at least 8")

    @property
    def d_lid(self) -> float:
        """Diameter of the sensor's field of view."""
        return 2.0 * self.range_m


# ---------------------------------------------------------------------------
# Map file I/O


def load_ground_truth(path: str | Path) -> GroundTruthMap:
    """Parse an ASCII map file (header lines width_m/height_m/resolution, then
    one row per line with '#' occupied and '.' free, top row first)."""
    path = Path(path)
    lines = path.read_text().splitlines()
    header: dict[str, float] = {}
    row_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        if set(line) <= {"#", "."}:
            row_lines.append((lineno, line))
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("width_m", "height_m", "resolution"):
            raise MapFormatError(f"{path}:{lineno}: unrecognized header line {line!r}")
        try:
            header[parts[0]] = float(parts[1])
        except ValueError as exc:
            raise MapFormatError(f"{path}:{lineno}: bad number {parts[1]!r}") from exc

    for key in ("width_m", "height_m", "resolution"):
        if key not in header:
            raise MapFormatError(f"{path}: missing header line {key!r}")
        if header[key] <= 0:
            raise MapFormatError(f"{path}: {key} must be positive")

    res = header["resolution"]
    nx = round(header["width_m"] / res)
    ny = round(header["height_m"] / res)
    if len(row_lines) != ny:
        raise MapFormatError(f"{path}: expected {ny} rows, found {len(row_lines)}")
    occupied = np.zeros((ny, nx), dtype=bool)
    for i, (lineno, line) in enumerate(row_lines):
        if len(line) != nx:
            raise MapFormatError(f"{path}:{lineno}: expected {nx} columns, found {len(line)}")
        # first file row is the top of the map (largest y)
        occupied[ny - 1 - i] = np.frombuffer(line.encode(), dtype=np.uint8) == ord("#")

    gt = GroundTruthMap(header["width_m"], header["height_m"], res, occupied)
    _check_closed_border(gt, path)
    return gt


def _check_closed_border(gt: GroundTruthMap, path: Path) -> None:
    occ = gt.occupied
    border = np.concatenate([occ[0], occ[-1], occ[:, 0], occ[:, -1]])
    if not border.all():
        raise OpenWorldError(f"{path}: open world (border contains non-occupied cells)")


def save_ground_truth(gt: GroundTruthMap, path: str | Path) -> None:
    rows = ["width_m %g" % gt.width_m, "height_m %g" % gt.height_m, "resolution %g" % gt.resolution]
    for iy in range(gt.ny - 1, -1, -1):
        rows.append("".join("#" if gt.occupied[iy, ix] else "." for ix in range(gt.nx)))
    Path(path).write_text("\n".join(rows) + "\n")


def write_pgm(cells: np.ndarray, path: str | Path) -> None:
    """Write a grid (or any uint8 image in grid orientation) as binary PGM.

    Occupancy values are mapped unknown -> 127, free -> 255, occupied -> 0;
    any other values are passed through as raw gray levels.
    """
    img = cells[::-1]  # top row first
    lut = np.arange(256, dtype=np.uint8)
    lut[UNKNOWN] = 127
    lut[FREE] = 255
    lut[OCCUPIED] = 0
    out = lut[img]
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (out.shape[1], out.shape[0]))
        fh.write(out.tobytes())


# ---------------------------------------------------------------------------
# Sensing


def supercover_line(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer grid traversal between two cells; no crossed cell is skipped
    (exact corner crossings step diagonally through the corner)."""
    cells = [(x0, y0)]
    dx, dy = x1 - x0, y1 - y0
    nx_steps, ny_steps = abs(dx), abs(dy)
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    ix = iy = 0
    x, y = x0, y0
    while ix < nx_steps or iy < ny_steps:
        decision = (1 + 2 * ix) * ny_steps - (1 + 2 * iy) * nx_steps
        if decision == 0:
            x += sx
            y += sy
            ix += 1
            iy += 1
        elif decision < 0:
            x += sx
            ix += 1
        else:
            y += sy
            iy += 1
        cells.append((x, y))
    return cells


class _RayTable:
    """Precomputed supercover cell offsets for every beam of a sensor at a
    given resolution, padded into (beams, max_len) index matrices."""

    _cache: dict[tuple[float, int, float], "_RayTable"] = {}

    def __init__(self, sensor: SensorModel, resolution: float) -> None:
        r_cells = sensor.range_m / resolution
        max_sq = r_cells * r_cells
        rays: list[list[tuple[int, int]]] = []
        for k in range(sensor.beam_count):
            theta = 2.0 * math.pi * k / sensor.beam_count
            ex = int(math.floor(0.5 + (r_cells + 1.5) * math.cos(theta)))
            ey = int(math.floor(0.5 + (r_cells + 1.5) * math.sin(theta)))
            cells = [(cx, cy) for cx, cy in supercover_line(0, 0, ex, ey)
                     if cx * cx + cy * cy <= max_sq]
            rays.append(cells)
        max_len = max(len(r) for r in rays)
        self.dx = np.zeros((sensor.beam_count, max_len), dtype=np.int32)
        self.dy = np.zeros((sensor.beam_count, max_len), dtype=np.int32)
        self.valid = np.zeros((sensor.beam_count, max_len), dtype=bool)
        for i, cells in enumerate(rays):
            self.dx[i, : len(cells)] = [c[0] for c in cells]
            self.dy[i, : len(cells)] = [c[1] for c in cells]
            self.valid[i, : len(cells)] = True

    @classmethod
    def get(cls, sensor: SensorModel, resolution: float) -> "_RayTable":
        key = (sensor.range_m, sensor.beam_count, resolution)
        if key not in cls._cache:
            cls._cache[key] = cls(sensor, resolution)
        return cls._cache[key]


def sense(gt: GroundTruthMap, state: RobotState, sensor: SensorModel,
          grid: OccupancyGrid) -> OccupancyGrid:
    """Cast all beams from the robot's cell and mark traversed cells known.

    Each ray reveals cells up to and including the first occupied cell (or out
    to the sensor range). Previously known cells are never reverted; the grid
    is updated in place and returned.
    """
    if not gt.is_free(*state.p_bot):
        raise ValueError("robot position is not in free space")
    table = _RayTable.get(sensor, gt.resolution)
    cx, cy = gt.cell_of(*state.p_bot)

    xs = np.clip(cx + table.dx, 0, gt.nx - 1)
    ys = np.clip(cy + table.dy, 0, gt.ny - 1)
    in_bounds = table.valid & (cx + table.dx == xs) & (cy + table.dy == ys)

    occ = gt.occupied[ys, xs] & in_bounds
    # first occupied cell index per beam; rays without one run to full length
    any_occ = occ.any(axis=1)
    first_occ = np.where(any_occ, occ.argmax(axis=1), occ.shape[1])
    col = np.arange(occ.shape[1])[None, :]
    visible = in_bounds & (col <= first_occ[:, None])

    vx, vy = xs[visible], ys[visible]
    grid.cells[vy, vx] = np.where(gt.occupied[vy, vx], OCCUPIED, FREE)
    return grid


def map_aabb(grid: OccupancyGrid) -> Rect:
    """Minimal axis-aligned rectangle (meters) covering all known cells."""
    known = grid.cells != UNKNOWN
    if not known.any():
        raise EmptyMapError("all cells unknown; map AABB undefined")
    ys, xs = np.nonzero(known)
    res = grid.resolution
    return Rect(xs.min() * res, ys.min() * res, (xs.max() + 1) * res, (ys.max() + 1) * res)
