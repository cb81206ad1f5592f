"""Runner integration, aggregation and report emission."""

import json
import math

import numpy as np
import pytest

from conftest import make_world
from tdle.bench import (AggregateStats, aggregate, bundled_map_path, emit_report,
                        resolve_map, run_experiment, warm_up_kernels)
from tdle.config import ScenarioConfig
from tdle.runner import ExplorationRun, RunBudgetExceeded, RunResult, reachable_free_cells
from tdle.world import FREE, save_ground_truth


@pytest.fixture(scope="module")
def tiny_map(tmp_path_factory):
    path = tmp_path_factory.mktemp("maps") / "tiny.map"
    save_ground_truth(make_world(6.0, 5.0), path)
    return path


@pytest.fixture(scope="module")
def tiny_runs(tiny_map):
    warm_up_kernels()
    cfg = ScenarioConfig(speed_mps=1.0)
    return run_experiment(tiny_map, "tdle", [1, 2], cfg), cfg


class TestRunner:
    def test_completes_and_returns(self, tiny_runs, tiny_map):
        runs, _cfg = tiny_runs
        from tdle.world import load_ground_truth

        gt = load_ground_truth(tiny_map)
        denom = reachable_free_cells(gt, (1.5, 1.5))
        for r in runs:
            assert r.mode == "done"
            assert math.dist(r.final_position, (1.5, 1.5)) <= 0.3
            assert int((r.grid.cells == FREE).sum()) / denom >= 0.95
            assert r.distance_m > 0
            assert r.exploration_rate > 0

    def test_series_monotone(self, tiny_runs):
        runs, _cfg = tiny_runs
        for r in runs:
            assert r.tick_series == sorted(r.tick_series)
            assert all(b >= a - 1e-9 for a, b in zip(r.distance_series, r.distance_series[1:]))
            assert all(b >= a - 1e-9 for a, b in zip(r.area_series, r.area_series[1:]))
            assert len(r.tick_series) == len(r.distance_series) == len(r.area_series)

    def test_unknown_planner_rejected(self, tiny_map):
        from tdle.world import load_ground_truth

        with pytest.raises(ValueError):
            ExplorationRun(load_ground_truth(tiny_map), "astar", 1)

    def test_occupied_start_rejected(self):
        gt = make_world(6.0, 5.0)
        cfg = ScenarioConfig(start_x_m=0.05, start_y_m=0.05)
        with pytest.raises(ValueError):
            ExplorationRun(gt, "tdle", 1, cfg).run()

    def test_tick_budget_enforced(self):
        gt = make_world(6.0, 5.0)
        cfg = ScenarioConfig(tick_budget=5)
        with pytest.raises(RunBudgetExceeded):
            ExplorationRun(gt, "greedy", 1, cfg).run()

    def test_reachable_free_cells_excludes_sealed_room(self):
        gt = make_world(10.0, 8.0, boxes=[(5.0, 0.0, 5.4, 8.0)])  # full divider
        total_free = gt.free_cell_count()
        reachable = reachable_free_cells(gt, (2.0, 4.0))
        assert 0 < reachable < total_free


class TestAggregate:
    def test_stats_match_numpy(self, tiny_runs):
        runs, _cfg = tiny_runs
        stats = aggregate(runs)
        dists = np.array([r.distance_m for r in runs])
        rates = np.array([r.exploration_rate for r in runs])
        assert stats.runs == len(runs)
        assert stats.distance_max == pytest.approx(dists.max())
        assert stats.distance_min == pytest.approx(dists.min())
        assert stats.distance_avg == pytest.approx(dists.mean())
        assert stats.distance_std == pytest.approx(dists.std())  # population std
        assert stats.rate_avg == pytest.approx(rates.mean())

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_duplicate_seeds_rejected(self, tiny_map):
        with pytest.raises(ValueError):
            run_experiment(tiny_map, "tdle", [1, 1])

    def test_run_error_names_planner_and_seed(self, tiny_map):
        cfg = ScenarioConfig(tick_budget=5)
        with pytest.raises(RuntimeError, match=r"'greedy', seed 3"):
            run_experiment(tiny_map, "greedy", [3], cfg)


class TestReport:
    def test_emits_all_files(self, tiny_runs, tiny_map, tmp_path):
        runs, cfg = tiny_runs
        stats = [aggregate(runs)]
        written = emit_report(stats, runs, tmp_path / "out", cfg, tiny_map)
        names = {p.name for p in written}
        assert {"table1.csv", "table2.csv", "rate_curve.csv", "run.json"} <= names
        assert "trajectory_tdle_1.pgm" in names and "trajectory_tdle_2.pgm" in names
        for p in written:
            assert p.exists() and p.stat().st_size > 0

    def test_table1_contents(self, tiny_runs, tiny_map, tmp_path):
        runs, cfg = tiny_runs
        stats = [aggregate(runs)]
        emit_report(stats, runs, tmp_path / "out", cfg, tiny_map)
        lines = (tmp_path / "out" / "table1.csv").read_text().splitlines()
        assert lines[0].startswith("planner,runs,")
        cells = lines[1].split(",")
        assert cells[0] == "tdle" and int(cells[1]) == 2
        assert float(cells[5]) == pytest.approx(stats[0].distance_avg, abs=1e-6)

    def test_run_json_structure(self, tiny_runs, tiny_map, tmp_path):
        runs, cfg = tiny_runs
        emit_report([aggregate(runs)], runs, tmp_path / "out", cfg, tiny_map)
        report = json.loads((tmp_path / "out" / "run.json").read_text())
        assert report["config"]["speed_mps"] == 1.0
        assert [r["seed"] for r in report["runs"]] == [1, 2]
        assert report["runs"][0]["mode"] == "done"
        assert "timing" in report

    def test_trajectory_pgm_has_overlay(self, tiny_runs, tiny_map, tmp_path):
        runs, cfg = tiny_runs
        emit_report([aggregate(runs)], runs, tmp_path / "out", cfg, tiny_map)
        data = (tmp_path / "out" / "trajectory_tdle_1.pgm").read_bytes()
        assert data.startswith(b"P5\n")
        assert 64 in data[data.index(b"255\n") + 4:]

    def test_byte_deterministic_reports(self, tiny_map, tmp_path):
        # same (map, planner, seed, config) twice: all artifacts identical
        # except wall-clock latency measurements
        cfg = ScenarioConfig(speed_mps=1.0)
        outs = []
        for tag in ("a", "b"):
            runs = run_experiment(tiny_map, "tdle", [7], cfg)
            out = tmp_path / tag
            emit_report([aggregate(runs)], runs, out, cfg, tiny_map)
            outs.append(out)
        for name in ("table1.csv", "rate_curve.csv", "trajectory_tdle_7.pgm"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        reports = []
        for out in outs:
            rep = json.loads((out / "run.json").read_text())
            rep.pop("timing")
            rep["map"] = "normalized"
            reports.append(rep)
        assert reports[0] == reports[1]


class TestMapResolution:
    def test_bundled_names(self):
        for name in ("museum", "library"):
            assert bundled_map_path(name).exists()
            assert resolve_map(name) == bundled_map_path(name)

    def test_unknown_name(self):
        with pytest.raises(FileNotFoundError):
            bundled_map_path("atrium")
        with pytest.raises(FileNotFoundError):
            resolve_map("missing_file.map")

    def test_existing_path_passthrough(self, tiny_map):
        assert resolve_map(str(tiny_map)) == tiny_map
