"""AABB division, unknown-fraction test and subregion selection."""

import numpy as np
import pytest

from conftest import explore_from
from tdle.frontier import FrontierPoint, FrontierSet
from tdle.regions import Division, RegionConfig, divide, is_unknown, select
from tdle.world import FREE, UNKNOWN, OccupancyGrid, Rect, RobotState


class TestDivide:
    def test_minimum_is_three_by_three(self):
        d = divide(Rect(0, 0, 10, 10), 20.0)
        assert d.n_l == 3 and d.n_h == 3
        assert len(d.subregions) == 9

    def test_split_rule_tightness(self):
        # every side must satisfy the bound, and one fewer split must violate it
        for width, d_lid in [(121.0, 20.0), (200.0, 20.0), (90.5, 10.0), (385.0, 30.0)]:
            d = divide(Rect(0, 0, width, 10.0), d_lid)
            assert width / d.n_l <= 2.0 * d_lid
            if d.n_l > 3:
                assert width / (d.n_l - 1) > 2.0 * d_lid

    def test_tiling_covers_aabb_exactly(self):
        aabb = Rect(1.0, 2.0, 13.0, 11.0)
        d = divide(aabb, 1.5)
        total = sum(sr.bounds.width * sr.bounds.height for sr in d.subregions)
        assert total == pytest.approx(aabb.width * aabb.height)
        for sr in d.subregions:
            b = sr.bounds
            assert aabb.x_min - 1e-9 <= b.x_min < b.x_max <= aabb.x_max + 1e-9
            assert aabb.y_min - 1e-9 <= b.y_min < b.y_max <= aabb.y_max + 1e-9
        # no two subregions overlap (pairwise interior disjointness via centers)
        centers = {sr.index for sr in d.subregions}
        assert len(centers) == len(d.subregions)

    def test_row_major_indexing(self):
        d = divide(Rect(0, 0, 9, 9), 20.0)
        assert d.subregions[0].index == (0, 0)
        assert d.subregions[1].index == (1, 0)
        assert d.subregions[3].index == (0, 1)
        assert d.at(2, 1).index == (2, 1)

    def test_degenerate_inputs(self):
        with pytest.raises(ValueError):
            divide(Rect(0, 0, 0, 5), 1.0)
        with pytest.raises(ValueError):
            divide(Rect(0, 0, 5, 5), 0.0)


class TestLocate:
    def test_interior_points(self):
        d = divide(Rect(0, 0, 9, 9), 20.0)
        assert d.locate(0.5, 0.5).index == (0, 0)
        assert d.locate(8.5, 0.5).index == (2, 0)
        assert d.locate(4.5, 4.5).index == (1, 1)

    def test_boundaries_resolve_to_lower_index(self):
        d = divide(Rect(0, 0, 9, 9), 20.0)
        assert d.locate(3.0, 0.5).index == (1, 0)  # half-open: boundary joins the right cell
        assert d.locate(9.0, 9.0).index == (2, 2)  # except on the outer edge

    def test_every_subregion_center_locates_to_itself(self):
        d = divide(Rect(0.3, 0.3, 39.7, 11.7), 20.0)
        for sr in d.subregions:
            assert d.locate(*sr.center).index == sr.index


class TestIsUnknown:
    def _grid(self, small_world, value):
        grid = OccupancyGrid.blank_like(small_world)
        grid.cells[:] = value
        return grid

    def test_all_unknown(self, small_world):
        sr = divide(Rect(0, 0, 8, 6), 20.0).subregions[0]
        assert is_unknown(sr, self._grid(small_world, UNKNOWN), 5, 0.8)

    def test_all_known(self, small_world):
        sr = divide(Rect(0, 0, 8, 6), 20.0).subregions[0]
        assert not is_unknown(sr, self._grid(small_world, FREE), 5, 0.8)

    def test_threshold_is_strict(self, small_world):
        # exactly tau fraction unknown must NOT qualify (strict inequality)
        grid = self._grid(small_world, FREE)
        sr = divide(Rect(0, 0, 8, 6), 20.0).subregions[0]
        b = sr.bounds
        sx, sy = b.width / 5, b.height / 5
        lattice = []
        for i in range(5):
            for j in range(5):
                lattice.append((b.x_min + (i + 0.5) * sx, b.y_min + (j + 0.5) * sy))
        for x, y in lattice[:20]:  # 20/25 = 0.8 exactly
            ix, iy = grid.cell_of(x, y)
            grid.cells[iy, ix] = UNKNOWN
        assert not is_unknown(sr, grid, 5, 0.8)
        ix, iy = grid.cell_of(*lattice[20])  # 21/25 > 0.8
        grid.cells[iy, ix] = UNKNOWN
        assert is_unknown(sr, grid, 5, 0.8)

    def test_validation(self, small_world):
        sr = divide(Rect(0, 0, 8, 6), 20.0).subregions[0]
        grid = self._grid(small_world, FREE)
        with pytest.raises(ValueError):
            is_unknown(sr, grid, 1, 0.8)
        with pytest.raises(ValueError):
            is_unknown(sr, grid, 5, 1.0)


class TestSelect:
    def _setup(self, walled_world):
        grid = explore_from(walled_world, (2.0, 4.0))
        state = RobotState(p_bot=(2.0, 4.0), heading=0.0, p_ini=(2.0, 4.0))
        from tdle.world import map_aabb

        return grid, state, divide(map_aabb(grid), 20.0)

    def test_robot_subregion_first(self, walled_world):
        grid, state, division = self._setup(walled_world)
        sel = select(division, FrontierSet([], 30), grid, state, RegionConfig())
        assert sel.regions[0].index == division.locate(2.0, 4.0).index

    def test_frontier_subregions_included_row_major(self, walled_world):
        grid, state, division = self._setup(walled_world)
        corner = division.subregions[-1]
        fp = FrontierSet([FrontierPoint(corner.center, 0)], 30)
        sel = select(division, fp, grid, state, RegionConfig())
        assert corner.index in [sr.index for sr in sel.regions]
        # all regions after the first appear in row-major order
        rest = [sr.index for sr in sel.regions[1:]]
        keys = [(r, c) for c, r in rest]
        assert keys == sorted(keys)

    def test_cap_respected(self, walled_world):
        grid, state, division = self._setup(walled_world)
        fp = FrontierSet([FrontierPoint(sr.center, i)
                          for i, sr in enumerate(division.subregions)], 30)
        sel = select(division, fp, grid, state, RegionConfig(n_sr=4))
        assert len(sel.regions) == 4

    def test_known_free_region_without_frontier_excluded(self, small_world):
        grid = explore_from(small_world, (4.0, 3.0))
        grid.cells[grid.cells == UNKNOWN] = FREE
        state = RobotState(p_bot=(4.0, 3.0), heading=0.0, p_ini=(4.0, 3.0))
        from tdle.world import map_aabb

        division = divide(map_aabb(grid), 20.0)
        sel = select(division, FrontierSet([], 30), grid, state, RegionConfig())
        assert len(sel.regions) == 1  # only the robot's subregion
