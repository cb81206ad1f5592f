"""Deterministic 2D grid-world exploration stack: hierarchical subregion
planner, greedy/TSP baselines, and a seeded benchmark harness."""

__version__ = "0.1.0"
