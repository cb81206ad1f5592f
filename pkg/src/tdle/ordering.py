"""Subregion visit-order arrangement.

The route over selected subregion centers is scored by
``total = lambda_s * similarity - lambda_d * end_distance - lambda_l * length``
where similarity is the negated DTW distance to the previous cycle's committed
route. A simulated-annealing loop with an adaptive cooling rate
``eta = exp(mu * (n_i / n_ite - 1))`` searches permutations that keep the
robot's subregion first. A Held-Karp dynamic program provides the exact
optimum (similarity weight zero) as an oracle and benchmark reference.

The annealing loop and DTW recurrence are numba-compiled; at 2000 iterations
over <= 25 centers a pure-Python loop would blow the per-plan time budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .regions import SelectedRegions


@dataclass
class Route:
    points: list[tuple[float, float]]  # subregion centers, points[0] = robot's subregion
    region_ids: list[tuple[int, int]]

    def points_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


@dataclass
class AsaConfig:
    t0: float = 100.0
    t_stop: float = 0.01
    n_ite: int = 2000
    eta0: float = 0.97
    # mu small enough that T decays from t0 to t_stop across roughly the whole
    # iteration budget (sum of per-iteration log decrements ~ mu * n_ite / 2)
    mu: float = 0.008
    lambda_s: float = 0.2
    lambda_d: float = 0.5
    lambda_l: float = 1.0

    def __post_init__(self) -> None:
        if not self.t0 > self.t_stop > 0:
            raise ValueError("need t0 > t_stop > 0")
        if self.n_ite < 0:
            raise ValueError("n_ite must be non-negative")
        if not 0.0 < self.eta0 < 1.0:
            raise ValueError("eta0 must lie in (0, 1)")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if min(self.lambda_s, self.lambda_d, self.lambda_l) < 0:
            raise ValueError("score weights must be non-negative")


@dataclass
class RouteScore:
    similarity_term: float
    end_distance_term: float
    length_term: float
    total: float


@njit(cache=True)
def _dtw_kernel(a: np.ndarray, b: np.ndarray) -> float:
    n, m = a.shape[0], b.shape[0]
    acc = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                acc[i, j] = d
            elif i == 0:
                acc[i, j] = acc[i, j - 1] + d
            elif j == 0:
                acc[i, j] = acc[i - 1, j] + d
            else:
                best = acc[i - 1, j - 1]
                if acc[i - 1, j] < best:
                    best = acc[i - 1, j]
                if acc[i, j - 1] < best:
                    best = acc[i, j - 1]
                acc[i, j] = d + best
    return acc[n - 1, m - 1]


@njit(cache=True)
def _score_kernel(order, centers, prev, has_prev, p_ini,
                  lam_s, lam_d, lam_l) -> float:
    n = order.shape[0]
    length = 0.0
    for j in range(1, n):
        a = centers[order[j]]
        b = centers[order[j - 1]]
        length += math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2)
    last = centers[order[n - 1]]
    end = math.sqrt((last[0] - p_ini[0]) ** 2 + (last[1] - p_ini[1]) ** 2)
    sim = 0.0
    if has_prev:
        route = centers[order]
        sim = -_dtw_kernel(route, prev)
    return lam_s * sim - lam_d * end - lam_l * length


@njit(cache=True)
def _anneal_kernel(centers, prev, has_prev, p_ini, t0, t_stop, n_ite, mu,
                   lam_s, lam_d, lam_l, seed):
    np.random.seed(seed)
    n = centers.shape[0]
    order = np.empty(n, dtype=np.int64)
    order[0] = 0
    order[1:] = np.random.permutation(n - 1) + 1

    cur = _score_kernel(order, centers, prev, has_prev, p_ini, lam_s, lam_d, lam_l)
    best_order = order.copy()
    best = cur
    trace = np.empty(max(n_ite, 1))
    executed = 0
    temp = t0
    for ni in range(1, n_ite + 1):
        if temp <= t_stop:
            break
        i = np.random.randint(1, n)
        j = np.random.randint(1, n)
        while j == i:
            j = np.random.randint(1, n)
        cand = order.copy()
        cand[i], cand[j] = cand[j], cand[i]
        cand_score = _score_kernel(cand, centers, prev, has_prev, p_ini,
                                   lam_s, lam_d, lam_l)
        delta = cand_score - cur
        if delta >= 0.0 or np.random.random() < math.exp(delta / temp):
            order = cand
            cur = cand_score
            if cur > best:
                best = cur
                best_order = order.copy()
        eta = math.exp(mu * (ni / n_ite - 1.0))
        temp *= eta
        trace[ni - 1] = best
        executed = ni
    return best_order, trace[:executed], executed


def dtw_distance(a: Sequence[tuple[float, float]] | np.ndarray,
                 b: Sequence[tuple[float, float]] | np.ndarray) -> float:
    """Dynamic-time-warping distance between two 2D point sequences: terminal
    value of the accumulated cost matrix under Euclidean point distances."""
    arr_a = np.asarray(a, dtype=np.float64)
    arr_b = np.asarray(b, dtype=np.float64)
    if arr_a.size == 0 or arr_b.size == 0:
        raise ValueError("DTW requires non-empty sequences")
    return float(_dtw_kernel(arr_a.reshape(-1, 2), arr_b.reshape(-1, 2)))


def route_score(r: Route, r_prev: Optional[Route], p_ini: tuple[float, float],
                cfg: AsaConfig) -> RouteScore:
    pts = r.points_array()
    length = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum()) if len(pts) > 1 else 0.0
    end = float(math.hypot(pts[-1, 0] - p_ini[0], pts[-1, 1] - p_ini[1]))
    sim = -dtw_distance(pts, r_prev.points_array()) if r_prev is not None else 0.0
    total = cfg.lambda_s * sim - cfg.lambda_d * end - cfg.lambda_l * length
    return RouteScore(sim, end, length, total)


def _route_from_order(sr: SelectedRegions, order: Sequence[int]) -> Route:
    regs = [sr.regions[i] for i in order]
    return Route([r.center for r in regs], [r.index for r in regs])


def arrange(sr: SelectedRegions, r_prev: Optional[Route], p_ini: tuple[float, float],
            cfg: AsaConfig, rng: np.random.Generator) -> Route:
    """Anneal over permutations that fix the robot's subregion first and
    return the best-scoring route observed."""
    n = len(sr.regions)
    if n == 0:
        raise ValueError("no subregions to arrange")
    if n <= 2:
        return _route_from_order(sr, range(n))
    centers = sr.centers().astype(np.float64)
    if r_prev is not None and len(r_prev.points) > 0:
        prev = r_prev.points_array()
        has_prev = True
    else:
        prev = np.zeros((1, 2))
        has_prev = False
    seed = int(rng.integers(0, 2**31 - 1))
    order, _trace, _executed = _anneal_kernel(
        centers, prev, has_prev, np.asarray(p_ini, dtype=np.float64),
        cfg.t0, cfg.t_stop, cfg.n_ite, cfg.mu,
        cfg.lambda_s, cfg.lambda_d, cfg.lambda_l, seed)
    return _route_from_order(sr, order)


def anneal_trace(sr: SelectedRegions, r_prev: Optional[Route], p_ini: tuple[float, float],
                 cfg: AsaConfig, rng: np.random.Generator) -> np.ndarray:
    """Best-so-far score after each executed iteration (for diagnostics/tests)."""
    n = len(sr.regions)
    if n <= 2:
        return np.empty(0)
    centers = sr.centers().astype(np.float64)
    if r_prev is not None and len(r_prev.points) > 0:
        prev, has_prev = r_prev.points_array(), True
    else:
        prev, has_prev = np.zeros((1, 2)), False
    seed = int(rng.integers(0, 2**31 - 1))
    _order, trace, executed = _anneal_kernel(
        centers, prev, has_prev, np.asarray(p_ini, dtype=np.float64),
        cfg.t0, cfg.t_stop, cfg.n_ite, cfg.mu,
        cfg.lambda_s, cfg.lambda_d, cfg.lambda_l, seed)
    return trace[:executed]


def held_karp_order(sr: SelectedRegions, p_ini: tuple[float, float],
                    lambda_d: float, lambda_l: float) -> Route:
    """Exact maximizer of the route score with similarity weight zero, over all
    permutations fixing the robot's subregion first (subset dynamic program)."""
    n = len(sr.regions)
    if n > 15:
        raise ValueError("held_karp_order supports at most 15 regions")
    if n <= 2:
        return _route_from_order(sr, range(n))
    centers = sr.centers()
    dist = np.sqrt(((centers[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
    end_cost = lambda_d * np.hypot(centers[:, 0] - p_ini[0], centers[:, 1] - p_ini[1])

    m = n - 1  # cities 1..n-1, relabelled 0..m-1
    size = 1 << m
    dp = np.full((size, m), np.inf)
    parent = np.full((size, m), -1, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = lambda_l * dist[0, j + 1]
    for mask in range(size):
        for j in range(m):
            if not mask & (1 << j) or not np.isfinite(dp[mask, j]):
                continue
            base = dp[mask, j]
            for k in range(m):
                if mask & (1 << k):
                    continue
                nmask = mask | (1 << k)
                cost = base + lambda_l * dist[j + 1, k + 1]
                if cost < dp[nmask, k]:
                    dp[nmask, k] = cost
                    parent[nmask, k] = j
    full = size - 1
    totals = dp[full] + end_cost[1:]
    j = int(np.argmin(totals))
    order_rev = []
    mask = full
    while j >= 0:
        order_rev.append(j + 1)
        pj = int(parent[mask, j])
        mask ^= 1 << j
        j = pj
    order = [0] + order_rev[::-1]
    return _route_from_order(sr, order)
