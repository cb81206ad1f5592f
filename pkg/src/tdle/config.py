"""Flat scenario configuration: every module parameter under one key-value
namespace, loadable from an INI-style text file and overridable per key."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .frontier import FrontierConfig
from .navigate import NavConfig
from .ordering import AsaConfig
from .regions import RegionConfig
from .revenue import RevenueWeights


@dataclass
class ScenarioConfig:
    # world / sensing
    sensor_range_m: float = 10.0
    beam_count: int = 360
    start_x_m: float = 1.5
    start_y_m: float = 1.5
    sense_interval_m: float = 0.2
    metrics_every: int = 10
    # frontier detection
    n_nd_min: int = 500
    n_nd_per_m2: float = 4.0
    n_nd_max: int = 20000
    rrt_step_m: float = 1.0
    epsilon_m: float = 0.5
    min_unknown_cells: int = 10
    dedup_radius_m: float = 1.0
    n_fp: int = 30
    samples_per_call: int = 600
    local_tree_cap: int = 100
    # subregions
    n_sr: int = 25
    tau_unknown: float = 0.8
    samples_per_axis: int = 5
    # route arrangement
    t0: float = 100.0
    t_stop: float = 0.01
    n_ite: int = 2000
    eta0: float = 0.97
    mu: float = 0.008
    lambda_s: float = 0.2
    lambda_d: float = 0.5
    lambda_l: float = 1.0
    # revenue
    lambda_c: float = 1.0
    lambda_i: float = 1.0
    lambda_m: float = 0.5
    # navigation / execution
    robot_radius_m: float = 0.2
    speed_mps: float = 0.5
    dt_s: float = 0.1
    arrival_tol_m: float = 0.3
    stall_ticks: int = 50
    tick_budget: int = 120000
    goal_snap_m: float = 1.0

    def frontier(self) -> FrontierConfig:
        return FrontierConfig(
            n_nd_min=self.n_nd_min, n_nd_per_m2=self.n_nd_per_m2, n_nd_max=self.n_nd_max,
            rrt_step_m=self.rrt_step_m, epsilon_m=self.epsilon_m,
            min_unknown_cells=self.min_unknown_cells, dedup_radius_m=self.dedup_radius_m,
            n_fp=self.n_fp, samples_per_call=self.samples_per_call,
            local_tree_cap=self.local_tree_cap)

    def regions(self) -> RegionConfig:
        return RegionConfig(n_sr=self.n_sr, tau_unknown=self.tau_unknown,
                            samples_per_axis=self.samples_per_axis)

    def asa(self) -> AsaConfig:
        return AsaConfig(t0=self.t0, t_stop=self.t_stop, n_ite=self.n_ite, eta0=self.eta0,
                         mu=self.mu, lambda_s=self.lambda_s, lambda_d=self.lambda_d,
                         lambda_l=self.lambda_l)

    def revenue(self) -> RevenueWeights:
        return RevenueWeights(lambda_c=self.lambda_c, lambda_i=self.lambda_i,
                              lambda_m=self.lambda_m)

    def nav(self) -> NavConfig:
        return NavConfig(robot_radius_m=self.robot_radius_m, speed_mps=self.speed_mps,
                         dt_s=self.dt_s, arrival_tol_m=self.arrival_tol_m,
                         stall_ticks=self.stall_ticks, tick_budget=self.tick_budget,
                         goal_snap_m=self.goal_snap_m)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _coerce(key: str, raw: str) -> Any:
    ftype = _FIELD_TYPES[key]
    if ftype in ("int", int):
        return int(raw)
    return float(raw)


def apply_overrides(cfg: ScenarioConfig, overrides: dict[str, str]) -> ScenarioConfig:
    for key, raw in overrides.items():
        if key not in _FIELD_TYPES:
            raise KeyError(f"unknown config key {key!r}; valid keys: "
                           + ", ".join(sorted(_FIELD_TYPES)))
        setattr(cfg, key, _coerce(key, raw))
    return cfg


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse ``key = value`` lines ('#' starts a comment); unknown keys are
    rejected."""
    cfg = base or ScenarioConfig()
    overrides: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        overrides[key] = value
    return apply_overrides(cfg, overrides)
