"""Seeded multi-run benchmark harness: runs exploration experiments, computes
travel-distance / exploration-rate statistics and emits CSV, JSON and PGM
report files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import ScenarioConfig
from .runner import ExplorationRun, RunResult
from .world import GroundTruthMap, load_ground_truth, write_pgm

TRAJECTORY_GRAY = 64  # overlay value in trajectory PGMs


@dataclass
class AggregateStats:
    planner: str
    runs: int
    distance_max: float
    distance_min: float
    distance_std: float
    distance_avg: float
    rate_avg: float
    mean_plan_latency_ms: float | None


def bundled_map_path(name: str) -> Path:
    """Resolve a bundled map name ('museum', 'library') to its file path."""
    path = Path(__file__).parent / "maps" / f"{name}.map"
    if not path.exists():
        raise FileNotFoundError(f"no bundled map named {name!r}")
    return path


def resolve_map(name: str) -> Path:
    """Resolve a path or bundled map name to an existing map file."""
    p = Path(name)
    if p.exists():
        return p
    bundled = Path(__file__).parent / "maps" / f"{p.stem}.map"
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"map file not found: {name}")


def run_experiment(map_path: str | Path, planner: str, seeds: Sequence[int],
                   cfg: ScenarioConfig | None = None) -> list[RunResult]:
    """One full exploration run per seed, each independently deterministic."""
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    gt = load_ground_truth(resolve_map(str(map_path)))
    cfg = cfg or ScenarioConfig()
    warm_up_kernels()
    results = []
    for seed in seeds:
        try:
            results.append(ExplorationRun(gt, planner, seed, cfg).run())
        except Exception as exc:
            raise RuntimeError(f"run failed for planner {planner!r}, seed {seed}: {exc}") from exc
    return results


def warm_up_kernels() -> None:
    """Trigger JIT compilation of the annealing kernels so the first measured
    plan latency is steady-state."""
    from .ordering import _anneal_kernel, _dtw_kernel

    pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    _dtw_kernel(pts, pts)
    _anneal_kernel(pts, pts, True, np.zeros(2), 100.0, 0.01, 5, 0.008,
                   0.2, 0.5, 1.0, 0)


def aggregate(runs: Sequence[RunResult]) -> AggregateStats:
    """Population statistics over final distances and rates of one planner."""
    if not runs:
        raise ValueError("no runs to aggregate")
    planner = runs[0].planner
    dists = np.array([r.distance_m for r in runs])
    rates = np.array([r.exploration_rate for r in runs])
    lat = [s for r in runs for s in r.plan_latencies_ms]
    return AggregateStats(
        planner=planner, runs=len(runs),
        distance_max=float(dists.max()), distance_min=float(dists.min()),
        distance_std=float(dists.std()), distance_avg=float(dists.mean()),
        rate_avg=float(rates.mean()),
        mean_plan_latency_ms=float(np.mean(lat)) if lat else None)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def emit_report(stats: Sequence[AggregateStats], runs: Sequence[RunResult],
                out_dir: str | Path, cfg: ScenarioConfig, map_path: str | Path) -> list[Path]:
    """Write table1.csv / table2.csv / rate_curve.csv / trajectory PGMs and
    run.json. Everything except the timing block of run.json and table2.csv is
    byte-deterministic for a fixed (map, planner, seed, config)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    p = out / "table1.csv"
    with open(p, "w") as fh:
        fh.write("planner,runs,distance_max_m,distance_min_m,distance_std_m,"
                 "distance_avg_m,exploration_rate_avg\n")
        for s in stats:
            fh.write(f"{s.planner},{s.runs},{_fmt(s.distance_max)},{_fmt(s.distance_min)},"
                     f"{_fmt(s.distance_std)},{_fmt(s.distance_avg)},{_fmt(s.rate_avg)}\n")
    written.append(p)

    p = out / "table2.csv"
    with open(p, "w") as fh:
        fh.write("planner,mean_plan_latency_ms\n")
        for s in stats:
            val = "n/a" if s.mean_plan_latency_ms is None else _fmt(s.mean_plan_latency_ms)
            fh.write(f"{s.planner},{val}\n")
    written.append(p)

    p = out / "rate_curve.csv"
    with open(p, "w") as fh:
        fh.write("planner,seed,tick,distance_m,explored_area_m2\n")
        for r in runs:
            for t, d, a in zip(r.tick_series, r.distance_series, r.area_series):
                fh.write(f"{r.planner},{r.seed},{t},{_fmt(d)},{_fmt(a)}\n")
    written.append(p)

    for r in runs:
        img = r.grid.cells.copy()
        for x, y in r.trajectory:
            ix, iy = r.grid.cell_of(x, y)
            img[iy, ix] = TRAJECTORY_GRAY
        p = out / f"trajectory_{r.planner}_{r.seed}.pgm"
        write_pgm(img, p)
        written.append(p)

    report = {
        "map": str(map_path),
        "config": cfg.as_dict(),
        "runs": [
            {
                "planner": r.planner,
                "seed": r.seed,
                "ticks": r.ticks,
                "mode": r.mode,
                "final_position": [round(v, 9) for v in r.final_position],
                "distance_m": round(r.distance_m, 9),
                "explored_area_m2": round(r.explored_area_m2, 9),
                "exploration_rate": round(r.exploration_rate, 9),
            }
            for r in runs
        ],
        "aggregate": [
            {
                "planner": s.planner,
                "runs": s.runs,
                "distance": {"max": round(s.distance_max, 9), "min": round(s.distance_min, 9),
                             "std": round(s.distance_std, 9), "avg": round(s.distance_avg, 9)},
                "exploration_rate_avg": round(s.rate_avg, 9),
            }
            for s in stats
        ],
        # wall-clock measurements: excluded from determinism guarantees
        "timing": {
            "plan_latencies_ms": {f"{r.planner}/{r.seed}": [round(v, 4) for v in r.plan_latencies_ms]
                                  for r in runs},
        },
    }
    p = out / "run.json"
    p.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written
