"""Particle swarm optimizer and the UAV separation repair built on it.

The optimizer is standard global-best PSO with a stochastic inertia weight:
velocities update as mu*v + c1*r1*(pbest - x) + c2*r2*(gbest - x) with mu
redrawn per particle per iteration and r1, r2 uniform per dimension, then
positions move by the updated velocity and are clamped to bounds. Infeasible
regions are expressed as +inf cost; NaN costs are treated as bugs and raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .fields import PotentialField


class InfeasibleAdjustmentError(RuntimeError):
    """No feasible solution found; carries the least-infeasible candidate."""

    def __init__(self, message: str, candidate: np.ndarray, min_separation: float):
        super().__init__(message)
        self.candidate = candidate
        self.min_separation = min_separation


@dataclass
class PsoParams:
    n_particles: int = 30
    n_iters: int = 100
    c1: float = 1.5
    c2: float = 1.5
    inertia_range: Tuple[float, float] = (0.0, 1.0)
    bounds: Optional[np.ndarray] = None  # (dims, 2) [lo, hi]; required by optimize
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 1 or self.n_iters < 0:
            raise ValueError("need n_particles >= 1 and n_iters >= 0")
        lo, hi = self.inertia_range
        if not (0.0 <= lo <= hi):
            raise ValueError("inertia_range must be ordered and non-negative")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_cost: float
    cost_history: np.ndarray  # (n_iters + 1,), best-so-far after init and each iteration


def _resolve_bounds(bounds, dims: int) -> np.ndarray:
    b = np.asarray(bounds, dtype=np.float64)
    if b.shape == (2,):
        b = np.tile(b, (dims, 1))
    if b.shape != (dims, 2) or not np.all(np.isfinite(b)) or np.any(b[:, 0] > b[:, 1]):
        raise ValueError(f"bounds must be finite (dims, 2) with lo <= hi, got {bounds!r}")
    return b


def optimize(cost_fn: Callable[[np.ndarray], float], dims: int, params: PsoParams,
             init: Optional[np.ndarray] = None) -> PsoResult:
    """Minimize cost_fn over a box with global-best PSO.

    Parameters
    ----------
    cost_fn : callable (dims,) -> float
        May return +inf for infeasible points; NaN raises.
    dims : int
        Dimension of the search space.
    params : PsoParams
        params.bounds is required (finite box).
    init : ndarray (k, dims), optional
        Seed positions for the first k particles (clamped to bounds);
        the rest initialize uniformly inside the bounds.

    Returns
    -------
    PsoResult
        cost_history is the best cost so far, evaluated after initialization
        and after each iteration; it is non-increasing by construction.
    """
    if params.bounds is None:
        raise ValueError("optimize requires params.bounds")
    bounds = _resolve_bounds(params.bounds, dims)
    rng = np.random.default_rng(params.seed)

    x = rng.uniform(bounds[:, 0], bounds[:, 1], size=(params.n_particles, dims))
    if init is not None:
        seeds = np.atleast_2d(np.asarray(init, dtype=np.float64))
        k = min(len(seeds), params.n_particles)
        x[:k] = np.clip(seeds[:k], bounds[:, 0], bounds[:, 1])
    v = np.zeros_like(x)

    def evaluate(positions):
        costs = np.array([float(cost_fn(p)) for p in positions])
        if np.any(np.isnan(costs)):
            raise ValueError("cost_fn returned NaN")
        return costs

    costs = evaluate(x)
    pbest = x.copy()
    pbest_cost = costs.copy()
    g = int(np.argmin(pbest_cost))
    gbest = pbest[g].copy()
    gbest_cost = float(pbest_cost[g])
    history = [gbest_cost]

    lo_w, hi_w = params.inertia_range
    for _ in range(params.n_iters):
        mu = rng.uniform(lo_w, hi_w, size=(params.n_particles, 1))
        r1 = rng.uniform(size=x.shape)
        r2 = rng.uniform(size=x.shape)
        v = mu * v + params.c1 * r1 * (pbest - x) + params.c2 * r2 * (gbest - x)
        x = np.clip(x + v, bounds[:, 0], bounds[:, 1])
        costs = evaluate(x)
        better = costs < pbest_cost
        pbest[better] = x[better]
        pbest_cost[better] = costs[better]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest = pbest[g].copy()
            gbest_cost = float(pbest_cost[g])
        history.append(gbest_cost)

    return PsoResult(best_position=gbest, best_cost=gbest_cost,
                     cost_history=np.asarray(history))


def _min_pairwise(positions: np.ndarray) -> float:
    diff = positions[:, None, :] - positions[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    iu = np.triu_indices(len(positions), k=1)
    return float(d[iu].min())


def _push_apart(positions: np.ndarray, d_bar: float, rounds: int = 60) -> np.ndarray:
    """Deterministic pairwise repulsion repair; best-effort feasible seed."""
    p = positions.copy()
    n = len(p)
    target = 1.05 * d_bar
    for _ in range(rounds):
        worst = _min_pairwise(p)
        if worst >= d_bar:
            break
        for i in range(n):
            for j in range(i + 1, n):
                delta = p[j] - p[i]
                d = np.linalg.norm(delta)
                if d >= target:
                    continue
                if d < 1e-9:
                    # coincident points: split along a fixed per-pair direction
                    ang = 2.399963 * (i * n + j)  # golden-angle spread
                    u = np.array([np.cos(ang), np.sin(ang)])
                else:
                    u = delta / d
                shift = 0.5 * (target - d) * u
                p[i] -= shift
                p[j] += shift
    return p


def _polygon_seed(positions: np.ndarray, d_bar: float) -> np.ndarray:
    """Regular polygon around the centroid; always pairwise-feasible."""
    n = len(positions)
    if n == 2:
        radius = 0.525 * d_bar
    else:
        radius = 1.05 * d_bar / (2.0 * np.sin(np.pi / n))
    centroid = positions.mean(axis=0)
    ang = np.arange(n) * 2.0 * np.pi / n
    return centroid + radius * np.column_stack([np.cos(ang), np.sin(ang)])


def adjust_uav_positions(positions, fld: PotentialField, d_bar: float,
                         params: PsoParams) -> np.ndarray:
    """Minimally shift UAV positions until all pairwise distances reach d_bar.

    Already-feasible inputs return unchanged (zero shift short-circuits).
    Otherwise PSO minimizes f_thres + f_shift, where f_thres is the minimum
    pairwise distance when it clears d_bar and +inf otherwise, and f_shift is
    the largest single-UAV displacement. The field argument rides along for
    interface parity with the reward path; the separation constraint is
    geometric, measured between the adjusted positions themselves.

    Returns
    -------
    ndarray (N, 2)
        Adjusted positions with min pairwise distance >= d_bar.

    Raises
    ------
    InfeasibleAdjustmentError
        If no feasible configuration was found within the search budget.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[1] != 2 or len(pos) < 2:
        raise ValueError("positions must have shape (N, 2) with N >= 2")
    if not d_bar > 0.0:
        raise ValueError("d_bar must be positive")
    if _min_pairwise(pos) >= d_bar:
        return pos.copy()

    n = len(pos)
    dims = 2 * n
    x0 = pos.ravel()
    seeds = [x0, _push_apart(pos, d_bar).ravel(), _polygon_seed(pos, d_bar).ravel()]

    if params.bounds is not None:
        bounds = _resolve_bounds(params.bounds, dims)
    else:
        half = max(3.0 * d_bar, max(np.abs(s - x0).max() for s in seeds) + d_bar)
        bounds = np.column_stack([x0 - half, x0 + half])

    ss = np.random.SeedSequence(params.seed)
    init_seed, opt_seed = ss.spawn(2)
    init_rng = np.random.default_rng(init_seed)
    n_random = max(0, params.n_particles - len(seeds))
    perturbed = x0 + init_rng.uniform(-d_bar, d_bar, size=(n_random, dims))
    init = np.vstack([seeds, perturbed])[: params.n_particles]

    best_infeasible = {"sep": -np.inf, "x": x0}

    def cost(x):
        p = x.reshape(n, 2)
        sep = _min_pairwise(p)
        if sep < d_bar:
            if sep > best_infeasible["sep"]:
                best_infeasible["sep"] = sep
                best_infeasible["x"] = x.copy()
            return np.inf
        shift = float(np.linalg.norm(p - pos, axis=1).max())
        return sep + shift

    inner = PsoParams(n_particles=params.n_particles, n_iters=params.n_iters,
                      c1=params.c1, c2=params.c2, inertia_range=params.inertia_range,
                      bounds=bounds, seed=int(opt_seed.generate_state(1)[0]))
    result = optimize(cost, dims, inner, init=init)
    if not np.isfinite(result.best_cost):
        raise InfeasibleAdjustmentError(
            f"no arrangement with pairwise separation >= {d_bar} found "
            f"within the search bounds",
            candidate=best_infeasible["x"].reshape(n, 2),
            min_separation=best_infeasible["sep"])
    out = result.best_position.reshape(n, 2)
    assert _min_pairwise(out) >= d_bar
    return out
