"""Single exploration run: the sense / plan / act loop shared by every
planner. Planner kind only changes how the next target is chosen; sensing,
mapping and navigation are identical."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from . import revenue as rev
from .baselines import NoReachableFrontierError, greedy_select, tsp_select
from .config import ScenarioConfig
from .frontier import (FrontierDetector, FrontierPoint, FrontierSet, frontier_cell_mask,
                       unknown_cells_within)
from .navigate import ExecState, PathNotFoundError, plan_path, state_check, step
from .ordering import Route, arrange
from .regions import divide, select
from .world import (FREE, GroundTruthMap, OccupancyGrid, RobotState, SensorModel,
                    map_aabb, sense)


class RunBudgetExceeded(RuntimeError):
    def __init__(self, seed: int, ticks: int) -> None:
        super().__init__(f"tick budget exhausted after {ticks} ticks (seed {seed})")
        self.seed = seed


@dataclass
class RunResult:
    seed: int
    planner: str
    ticks: int
    mode: str
    final_position: tuple[float, float]
    distance_m: float
    explored_area_m2: float
    tick_series: list[int]
    distance_series: list[float]
    area_series: list[float]
    plan_latencies_ms: list[float]
    trajectory: list[tuple[float, float]]
    grid: OccupancyGrid

    @property
    def exploration_rate(self) -> float:
        return self.explored_area_m2 / self.distance_m if self.distance_m > 0 else 0.0


def _disk_kernel(radius_m: float, resolution: float) -> np.ndarray:
    r = int(math.ceil(radius_m / resolution))
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    return ((dx * dx + dy * dy) * resolution**2 <= radius_m**2).astype(np.int32)


class ExplorationRun:
    def __init__(self, gt: GroundTruthMap, planner: str, seed: int,
                 cfg: Optional[ScenarioConfig] = None) -> None:
        if planner not in ("tdle", "greedy", "tsp"):
            raise ValueError(f"unknown planner {planner!r}")
        self.gt = gt
        self.planner = planner
        self.seed = seed
        self.cfg = cfg or ScenarioConfig()
        self.rng = np.random.default_rng(seed)
        self.sensor = SensorModel(self.cfg.sensor_range_m, self.cfg.beam_count)
        self.nav = self.cfg.nav()

    # -- completion backstop -------------------------------------------------

    def _surviving_frontier_mask(self, grid: OccupancyGrid) -> np.ndarray:
        """Frontier cells whose epsilon disk still holds enough unknown cells.
        Exhaustive scan; backs the RRT detector so a missed sample cannot end
        a run early."""
        mask = frontier_cell_mask(grid)
        if not mask.any():
            return mask
        kernel = _disk_kernel(self.cfg.epsilon_m, grid.resolution)
        unknown_counts = ndimage.convolve((grid.cells == 0).astype(np.int32), kernel,
                                          mode="constant", cval=0)
        return mask & (unknown_counts >= self.cfg.min_unknown_cells)

    def _scan_candidates(self, grid: OccupancyGrid) -> FrontierSet:
        """Cluster the surviving frontier cells and return one representative
        per cluster (used only when the sampled detector comes up empty)."""
        mask = self._surviving_frontier_mask(grid)
        labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=np.int32))
        points: list[FrontierPoint] = []
        for lab in range(1, n + 1):
            ys, xs = np.nonzero(labels == lab)
            k = len(xs) // 2
            points.append(FrontierPoint(grid.cell_center(int(xs[k]), int(ys[k])), lab - 1))
        return FrontierSet(points[: self.cfg.n_fp], self.cfg.n_fp)

    # -- target selection ----------------------------------------------------

    def _tdle_target(self, fp: FrontierSet, grid: OccupancyGrid, state: RobotState,
                     excluded: set[int], r_prev: Optional[Route],
                     latencies: list[float]) -> tuple[Optional[FrontierPoint], Optional[Route]]:
        t_start = time.perf_counter()
        aabb = map_aabb(grid)
        division = divide(aabb, self.sensor.d_lid)
        sel = select(division, fp, grid, state, self.cfg.regions())
        route = arrange(sel, r_prev, state.p_ini, self.cfg.asa(), self.rng)
        latencies.append((time.perf_counter() - t_start) * 1e3)

        by_index = {sr.index: sr for sr in sel.regions}
        order = [by_index[idx] for idx in route.region_ids]
        candidates_left = [p for p in fp.points if p.id not in excluded]
        for pos, sr in enumerate(order):
            cands = [p for p in candidates_left
                     if division.locate(*p.position).index == sr.index]
            if not cands:
                continue
            next_sr = order[pos + 1] if pos + 1 < len(order) else None
            table = [(p, rev.compute_indicators(p, sr, next_sr, state.p_ini, fp, grid,
                                                self.sensor.range_m, state.heading,
                                                state.p_bot))
                     for p in cands]
            return rev.select_target(table, self.cfg.revenue(), state.p_bot), route
        return None, route

    def _pick_target(self, fp: FrontierSet, grid: OccupancyGrid, state: RobotState,
                     excluded: set[int], r_prev: Optional[Route],
                     latencies: list[float]) -> tuple[Optional[FrontierPoint], Optional[Route]]:
        remaining = FrontierSet([p for p in fp.points if p.id not in excluded], fp.capacity)
        if len(remaining) == 0:
            return None, r_prev
        if self.planner == "tdle":
            return self._tdle_target(fp, grid, state, excluded, r_prev, latencies)
        if self.planner == "greedy":
            try:
                return greedy_select(remaining, grid, state, self.nav.robot_radius_m,
                                     self.nav.goal_snap_m), r_prev
            except NoReachableFrontierError:
                return None, r_prev
        t_start = time.perf_counter()
        target = tsp_select(remaining, state)
        latencies.append((time.perf_counter() - t_start) * 1e3)
        return target, r_prev

    # -- main loop -----------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        gt = self.gt
        start = (cfg.start_x_m, cfg.start_y_m)
        if not gt.is_free(*start):
            raise ValueError(f"start position {start} is not free in the map")
        state = RobotState(p_bot=start, heading=0.0, p_ini=start)
        grid = OccupancyGrid.blank_like(gt)
        sense(gt, state, self.sensor, grid)
        detector = FrontierDetector(cfg.frontier(), self.rng)
        exec_state = ExecState()
        r_prev: Optional[Route] = None

        ticks = 0
        fruitless = 0  # consecutive plan cycles with no reachable target
        since_sense = 0.0
        anchor_pos, anchor_tick = state.p_bot, 0
        tick_series: list[int] = [0]
        distance_series: list[float] = [0.0]
        area_series: list[float] = [grid.known_area_m2()]
        latencies: list[float] = []
        trajectory: list[tuple[float, float]] = [state.p_bot]

        while exec_state.mode != "done":
            # ---- plan phase
            fp = detector.detect(grid, state)
            if exec_state.mode != "returning" and len(fp) == 0:
                fp = self._scan_candidates(grid)
            exec_state = state_check(fp, exec_state, state, self.nav)
            if exec_state.mode == "done":
                break

            goal: Optional[tuple[float, float]] = None
            target: Optional[FrontierPoint] = None
            path = None
            if exec_state.mode == "returning":
                goal = state.p_ini
            elif exec_state.mode == "trapped":
                goal = exec_state.fallback_goal or state.p_ini
                exec_state.mode = "exploring"
                exec_state.stall_ticks = 0
                anchor_pos, anchor_tick = state.p_bot, ticks
            else:
                excluded: set[int] = set()
                while True:
                    target, r_prev = self._pick_target(fp, grid, state, excluded,
                                                       r_prev, latencies)
                    if target is None:
                        break
                    try:
                        path = plan_path(grid, state.p_bot, target.position,
                                         self.nav.robot_radius_m, self.nav.goal_snap_m)
                        goal = target.position
                        break
                    except PathNotFoundError:
                        excluded.add(target.id)
                if target is None:
                    # nothing reachable this cycle: head home once the scan
                    # agrees or the retries run out, otherwise let the
                    # detector try again next cycle
                    fruitless += 1
                    if fruitless > 10 or not self._surviving_frontier_mask(grid).any():
                        exec_state.mode = "returning"
                    goal = None
                else:
                    fruitless = 0

            if goal is None and exec_state.mode != "returning":
                ticks += 1  # burn a tick so the budget still bounds the loop
                if ticks > self.nav.tick_budget:
                    raise RunBudgetExceeded(self.seed, ticks)
                continue
            if exec_state.mode == "returning":
                goal = state.p_ini
            if path is None:
                try:
                    path = plan_path(grid, state.p_bot, goal,
                                     self.nav.robot_radius_m, self.nav.goal_snap_m)
                except PathNotFoundError:
                    if exec_state.mode == "returning":
                        raise
                    ticks += 1
                    if ticks > self.nav.tick_budget:
                        raise RunBudgetExceeded(self.seed, ticks)
                    continue
            if target is not None:
                exec_state.waypoint_history.append(target.position)
                del exec_state.waypoint_history[:-20]

            # ---- act phase: follow the path until a replan trigger fires
            path_end = path.waypoints[-1]
            while True:
                prev_pos = state.p_bot
                state = step(state, path, self.nav.speed_mps, self.nav.dt_s)
                ticks += 1
                moved = math.hypot(state.p_bot[0] - prev_pos[0], state.p_bot[1] - prev_pos[1])
                since_sense += moved
                if since_sense >= cfg.sense_interval_m:
                    sense(gt, state, self.sensor, grid)
                    since_sense = 0.0
                if ticks % cfg.metrics_every == 0:
                    tick_series.append(ticks)
                    distance_series.append(state.distance_traveled)
                    area_series.append(grid.known_area_m2())
                    trajectory.append(state.p_bot)
                if ticks > self.nav.tick_budget:
                    raise RunBudgetExceeded(self.seed, ticks)

                # stall bookkeeping
                if math.hypot(state.p_bot[0] - anchor_pos[0],
                              state.p_bot[1] - anchor_pos[1]) >= self.nav.stall_progress_m:
                    anchor_pos, anchor_tick = state.p_bot, ticks
                exec_state.stall_ticks = ticks - anchor_tick

                arrived = math.hypot(state.p_bot[0] - path_end[0],
                                     state.p_bot[1] - path_end[1]) <= self.nav.arrival_tol_m
                if arrived:
                    sense(gt, state, self.sensor, grid)
                    since_sense = 0.0
                    break
                if exec_state.stall_ticks > self.nav.stall_ticks:
                    break
                if target is not None and ticks % 5 == 0:
                    if unknown_cells_within(grid, *target.position, cfg.epsilon_m) == 0:
                        break  # target's epsilon disk fully known

            if exec_state.mode == "returning":
                exec_state = state_check(FrontierSet([], cfg.n_fp), exec_state, state, self.nav)

        tick_series.append(ticks)
        distance_series.append(state.distance_traveled)
        area_series.append(grid.known_area_m2())
        trajectory.append(state.p_bot)
        return RunResult(
            seed=self.seed, planner=self.planner, ticks=ticks, mode=exec_state.mode,
            final_position=state.p_bot, distance_m=state.distance_traveled,
            explored_area_m2=grid.known_area_m2(), tick_series=tick_series,
            distance_series=distance_series, area_series=area_series,
            plan_latencies_ms=latencies, trajectory=trajectory, grid=grid)


def reachable_free_cells(gt: GroundTruthMap, start: tuple[float, float]) -> int:
    """Count of ground-truth free cells connected (8-connectivity) to the
    start cell; the denominator for completion checks."""
    free = ~gt.occupied
    labels, _ = ndimage.label(free, structure=np.ones((3, 3), dtype=np.int32))
    ix, iy = gt.cell_of(*start)
    return int((labels == labels[iy, ix]).sum())
