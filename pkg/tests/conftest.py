"""Shared fixtures and map-building helpers for the test suite."""

import numpy as np
import pytest

from tdle.world import GroundTruthMap, OccupancyGrid, RobotState, SensorModel, sense

RES = 0.1


def make_world(width_m: float, height_m: float, boxes=(), resolution: float = RES) -> GroundTruthMap:
    """Closed-border ground truth with optional rectangular obstacles
    given as (x0, y0, x1, y1) in meters."""
    nx, ny = round(width_m / resolution), round(height_m / resolution)
    occ = np.zeros((ny, nx), dtype=bool)
    occ[0, :] = occ[-1, :] = True
    occ[:, 0] = occ[:, -1] = True
    occ[1, :] = occ[-2, :] = True
    occ[:, 1] = occ[:, -2] = True
    for x0, y0, x1, y1 in boxes:
        ix0, iy0 = round(x0 / resolution), round(y0 / resolution)
        ix1, iy1 = round(x1 / resolution), round(y1 / resolution)
        occ[iy0:iy1, ix0:ix1] = True
    return GroundTruthMap(width_m, height_m, resolution, occ)


def explore_from(gt: GroundTruthMap, position, sensor: SensorModel | None = None) -> OccupancyGrid:
    """Blank grid plus one full sensor sweep from the given position."""
    sensor = sensor or SensorModel()
    grid = OccupancyGrid.blank_like(gt)
    state = RobotState(p_bot=position, heading=0.0, p_ini=position)
    sense(gt, state, sensor, grid)
    return grid


@pytest.fixture
def small_world() -> GroundTruthMap:
    return make_world(8.0, 6.0)


@pytest.fixture
def walled_world() -> GroundTruthMap:
    # a wall splitting the room, with a gap near the top
    return make_world(10.0, 8.0, boxes=[(5.0, 0.0, 5.4, 6.0)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
