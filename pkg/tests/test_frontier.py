"""Frontier predicate, filters, dedup and the RRT detector."""

import math

import numpy as np
import pytest

from conftest import explore_from, make_world
from tdle.frontier import (FrontierConfig, FrontierDetector, FrontierPoint, FrontierSet,
                           dedup, detect_frontiers, epsilon_filter, frontier_cell_mask,
                           is_frontier_cell, unknown_cells_within)
from tdle.world import FREE, UNKNOWN, OccupancyGrid, RobotState


class TestFrontierPredicate:
    def test_matches_brute_force(self, walled_world):
        grid = explore_from(walled_world, (2.0, 4.0))
        mask = frontier_cell_mask(grid)
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                expected = False
                if grid.cells[iy, ix] == FREE:
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            if dx == 0 and dy == 0:
                                continue
                            jx, jy = ix + dx, iy + dy
                            if 0 <= jx < grid.nx and 0 <= jy < grid.ny \
                                    and grid.cells[jy, jx] == UNKNOWN:
                                expected = True
                assert mask[iy, ix] == expected
                assert is_frontier_cell(grid, ix, iy) == expected

    def test_fully_known_grid_has_no_frontier(self, small_world):
        grid = explore_from(small_world, (4.0, 3.0))
        grid.cells[grid.cells == UNKNOWN] = FREE
        assert not frontier_cell_mask(grid).any()


class TestUnknownDisk:
    def test_counts_exact_disk(self, small_world):
        grid = OccupancyGrid.blank_like(small_world)
        grid.cells[:] = FREE
        # one unknown cell exactly at distance 0.3 m from the query cell center
        cx, cy = grid.cell_of(4.0, 3.0)
        grid.cells[cy, cx + 3] = UNKNOWN
        assert unknown_cells_within(grid, 4.0, 3.0, 0.31) == 1
        assert unknown_cells_within(grid, 4.0, 3.0, 0.29) == 0

    def test_out_of_bounds_cells_not_counted(self, small_world):
        grid = OccupancyGrid.blank_like(small_world)
        grid.cells[:] = FREE
        # corner query: the clipped out-of-map part of the disk contributes 0
        assert unknown_cells_within(grid, 0.05, 0.05, 1.0) == 0

    def test_epsilon_filter_threshold(self, small_world):
        grid = OccupancyGrid.blank_like(small_world)
        grid.cells[:] = FREE
        cx, cy = grid.cell_of(4.0, 3.0)
        grid.cells[cy - 1 : cy + 2, cx - 1 : cx + 2] = UNKNOWN
        p = FrontierPoint((4.0, 3.0), 0)
        assert epsilon_filter(p, grid, 0.5, 9)
        assert not epsilon_filter(p, grid, 0.5, 10)

    def test_epsilon_must_be_positive(self, small_world):
        grid = OccupancyGrid.blank_like(small_world)
        with pytest.raises(ValueError):
            epsilon_filter(FrontierPoint((1.0, 1.0), 0), grid, 0.0, 1)


class TestDedup:
    def test_greedy_in_id_order(self):
        pts = [FrontierPoint((0.0, 0.0), 0), FrontierPoint((0.5, 0.0), 1),
               FrontierPoint((1.5, 0.0), 2)]
        kept = dedup(pts, 1.0)
        assert [p.id for p in kept] == [0, 2]

    def test_all_kept_when_far_apart(self):
        pts = [FrontierPoint((float(i) * 3.0, 0.0), i) for i in range(5)]
        assert dedup(pts, 1.0) == pts

    def test_pairwise_distance_invariant(self, rng):
        pts = [FrontierPoint((float(x), float(y)), i)
               for i, (x, y) in enumerate(rng.uniform(0, 5, size=(40, 2)))]
        kept = dedup(pts, 1.0)
        for i, a in enumerate(kept):
            for b in kept[i + 1:]:
                assert math.dist(a.position, b.position) >= 1.0

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            dedup([], 0.0)


class TestDetector:
    def test_points_are_frontier_cells(self, walled_world, rng):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        fp = detect_frontiers(grid, state, rng)
        assert len(fp) > 0
        cfg = FrontierConfig()
        for p in fp.points:
            ix, iy = grid.cell_of(*p.position)
            assert is_frontier_cell(grid, ix, iy)
            assert epsilon_filter(p, grid, cfg.epsilon_m, cfg.min_unknown_cells)

    def test_ids_sequential_and_capped(self, walled_world, rng):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        fp = detect_frontiers(grid, state, rng)
        assert [p.id for p in fp.points] == list(range(len(fp)))
        assert len(fp) <= FrontierConfig().n_fp

    def test_dedup_applies(self, walled_world, rng):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        fp = detect_frontiers(grid, state, rng)
        r = FrontierConfig().dedup_radius_m
        for i, a in enumerate(fp.points):
            for b in fp.points[i + 1:]:
                assert math.dist(a.position, b.position) >= r

    def test_deterministic_for_seed(self, walled_world):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        a = detect_frontiers(grid, state, np.random.default_rng(7))
        b = detect_frontiers(grid, state, np.random.default_rng(7))
        assert [p.position for p in a.points] == [p.position for p in b.points]

    def test_fully_known_grid_yields_nothing(self, small_world, rng):
        grid = explore_from(small_world, (4.0, 3.0))
        grid.cells[grid.cells == UNKNOWN] = FREE
        state = RobotState(p_bot=(4.0, 3.0), heading=0.0, p_ini=(4.0, 3.0))
        assert len(detect_frontiers(grid, state, rng)) == 0

    def test_requires_free_robot_cell(self, small_world, rng):
        grid = OccupancyGrid.blank_like(small_world)
        state = RobotState(p_bot=(4.0, 3.0), heading=0.0, p_ini=(4.0, 3.0))
        with pytest.raises(ValueError):
            detect_frontiers(grid, state, rng)

    def test_global_tree_persists_and_cap_scales(self, walled_world, rng):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        det = FrontierDetector(FrontierConfig(), rng)
        det.detect(grid, state)
        size_first = len(det.global_tree)
        det.detect(grid, state)
        assert len(det.global_tree) >= size_first
        area = grid.known_area_m2()
        assert det.node_cap(grid) == int(min(max(500, 4.0 * area), 20000))

    def test_node_cap_bounds(self, small_world):
        det = FrontierDetector(FrontierConfig(), np.random.default_rng(0))
        grid = OccupancyGrid.blank_like(small_world)
        assert det.node_cap(grid) == 500  # empty grid clamps to the minimum
        grid.cells[:] = FREE
        big = FrontierDetector(FrontierConfig(n_nd_per_m2=1e9), np.random.default_rng(0))
        assert big.node_cap(grid) == 20000


class TestFrontierSet:
    def test_positions_shape(self):
        fs = FrontierSet([], 30)
        assert fs.positions().shape == (0, 2)
        fs = FrontierSet([FrontierPoint((1.0, 2.0), 0)], 30)
        assert fs.positions().tolist() == [[1.0, 2.0]]
