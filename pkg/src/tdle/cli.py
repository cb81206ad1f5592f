"""Command-line entry point: explore / bench / selftest subcommands."""

from __future__ import annotations

import argparse
import math
import os
import sys
from itertools import permutations
from pathlib import Path

import numpy as np

from .baselines import PLANNER_TAGS
from .bench import aggregate, emit_report, resolve_map, run_experiment
from .config import ScenarioConfig, apply_overrides, load_config

USAGE_ERROR = 2
RUN_ERROR = 1


def _parse_seeds(text: str) -> list[int]:
    text = text.strip()
    if not text:
        raise ValueError("empty seed list")
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _default_seed() -> int:
    return int(os.environ.get("TDLE_SEED", "0"))


def _build_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    overrides = dict(kv.split("=", 1) for kv in (args.set or []))
    apply_overrides(cfg, {k.strip(): v.strip() for k, v in overrides.items()})
    if args.ticks_max is not None:
        cfg.tick_budget = args.ticks_max
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", required=True, help="map file path or bundled name (museum, library)")
    p.add_argument("--out", default="out", help="output directory for report files")
    p.add_argument("--config", help="INI-style config file (key = value lines)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a single config key (repeatable; wins over --config)")
    p.add_argument("--ticks-max", type=int, help="override the tick budget")


def cmd_explore(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    seed = args.seed if args.seed is not None else _default_seed()
    runs = run_experiment(resolve_map(args.map), args.planner, [seed], cfg)
    stats = [aggregate(runs)]
    emit_report(stats, runs, args.out, cfg, resolve_map(args.map))
    r = runs[0]
    print(f"planner={r.planner} seed={r.seed} mode={r.mode} ticks={r.ticks} "
          f"distance={r.distance_m:.2f}m area={r.explored_area_m2:.2f}m2 "
          f"rate={r.exploration_rate:.3f}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    seeds = _parse_seeds(args.seeds)
    planners = [p.strip() for p in args.planners.split(",") if p.strip()]
    for p in planners:
        if p not in PLANNER_TAGS:
            print(f"error: unknown planner {p!r}; valid tags: {', '.join(PLANNER_TAGS)}",
                  file=sys.stderr)
            return USAGE_ERROR
    all_runs, stats = [], []
    for planner in planners:
        runs = run_experiment(resolve_map(args.map), planner, seeds, cfg)
        all_runs.extend(runs)
        stats.append(aggregate(runs))
    emit_report(stats, all_runs, args.out, cfg, resolve_map(args.map))
    for s in stats:
        print(f"{s.planner}: avg distance {s.distance_avg:.2f}m, "
              f"avg rate {s.rate_avg:.3f} m2/m over {s.runs} runs")
    return 0


def cmd_selftest(_args: argparse.Namespace) -> int:
    from .ordering import AsaConfig, dtw_distance, held_karp_order, route_score
    from .regions import SelectedRegions, Subregion
    from .revenue import motion_consistency, z_normalize
    from .world import Rect

    checks: list[tuple[str, bool]] = []

    def naive_dtw(a, b):
        def rec(i, j):
            d = math.dist(a[i], b[j])
            if i == 0 and j == 0:
                return d
            opts = []
            if i > 0 and j > 0:
                opts.append(rec(i - 1, j - 1))
            if i > 0:
                opts.append(rec(i - 1, j))
            if j > 0:
                opts.append(rec(i, j - 1))
            return d + min(opts)
        return rec(len(a) - 1, len(b) - 1)

    rng = np.random.default_rng(0)
    ok = True
    for _ in range(100):
        a = [tuple(p) for p in rng.uniform(0, 10, size=(rng.integers(1, 6), 2))]
        b = [tuple(p) for p in rng.uniform(0, 10, size=(rng.integers(1, 6), 2))]
        if not math.isclose(dtw_distance(a, b), naive_dtw(a, b), rel_tol=1e-9, abs_tol=1e-9):
            ok = False
            break
    checks.append(("dtw matches naive recursion (100 random pairs)", ok))
    checks.append(("dtw of identical sequences is 0",
                   dtw_distance([(0, 0), (1, 1)], [(0, 0), (1, 1)]) == 0.0))

    def regions_from(centers):
        subs = []
        for i, (x, y) in enumerate(centers):
            subs.append(Subregion((i, 0), Rect(x - 0.5, y - 0.5, x + 0.5, y + 0.5)))
        return SelectedRegions(subs, 25)

    ok = True
    cfg = AsaConfig(lambda_s=0.0)
    for trial in range(20):
        centers = [(0.0, 0.0)] + [tuple(p) for p in rng.uniform(0, 10, size=(4, 2))]
        sel = regions_from(centers)
        hk = held_karp_order(sel, (0.0, 0.0), cfg.lambda_d, cfg.lambda_l)
        best = max(
            (route_score(_perm_route(sel, order), None, (0.0, 0.0), cfg).total
             for order in permutations(range(1, 5))),
            default=None)
        if not math.isclose(route_score(hk, None, (0.0, 0.0), cfg).total, best, rel_tol=1e-9):
            ok = False
            break
    checks.append(("held-karp matches brute force (20 random 5-point instances)", ok))

    checks.append(("motion consistency at pi/2 is exactly 1",
                   motion_consistency(math.pi / 2) == 1.0))
    checks.append(("motion consistency endpoints e^-2 / e^2",
                   math.isclose(motion_consistency(0.0), math.exp(-2), rel_tol=1e-12)
                   and math.isclose(motion_consistency(math.pi), math.exp(2), rel_tol=1e-12)))
    zs = z_normalize([1.0, 2.0, 3.0, 10.0])
    checks.append(("z-scores have mean 0 and population std 1",
                   abs(float(np.mean(zs))) < 1e-12 and abs(float(np.std(zs)) - 1) < 1e-12))
    checks.append(("z-score zero-variance rule", z_normalize([5, 5, 5]) == [0.0, 0.0, 0.0]))

    failed = [name for name, passed in checks if not passed]
    for name, passed in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}")
    return 0 if not failed else RUN_ERROR


def _perm_route(sel, order):
    from .ordering import Route
    regs = [sel.regions[0]] + [sel.regions[i] for i in order]
    return Route([r.center for r in regs], [r.index for r in regs])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdle",
                                     description="2D grid-world exploration benchmark stack")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explore", help="run one exploration and write a report")
    _add_common(p)
    p.add_argument("--planner", choices=PLANNER_TAGS, default="tdle")
    p.add_argument("--seed", type=int, help="run seed (default: $TDLE_SEED or 0)")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("bench", help="run the seed matrix across planners")
    _add_common(p)
    p.add_argument("--planners", default="tdle,greedy",
                   help="comma-separated planner tags (tdle, greedy, tsp)")
    p.add_argument("--seeds", required=True, help="comma list or lo..hi range, e.g. 1..10")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run built-in oracle checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUN_ERROR


if __name__ == "__main__":
    sys.exit(main())
