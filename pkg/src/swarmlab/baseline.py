"""Contour-following meta-heuristic planner, the training-free comparison.

Each control step runs one joint PSO over per-UAV heading changes. A
candidate heading is scored by extending the UAV's recent path several steps
along that heading and evaluating the active-contour cost of the extension:
bending against the weighted squared field gradient. The gradient term is
weighted far above bending because the two are scale-mismatched at scenario
speeds (gradients of order v/r^3 against curvatures of order turn/step);
with the weight, candidates that ride the steep annulus around an obstacle
beat candidates that cut through its flat core, which is what makes the
planner orbit obstacles at a safe distance and is exactly the detouring,
contour-hugging flight the learned policy is compared against. Separation
enters twice: scored path endpoints are repaired exactly like the training
reward, and joint candidates whose real next positions breach the separation
threshold are discarded as infeasible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .env import MAX_TURN, EpisodeState, ScenarioConfig
from .fields import PotentialField, grad_phi_timed, phi_total
from .pso import (InfeasibleAdjustmentError, PsoParams, adjust_uav_positions,
                  optimize)
from .reward import build_field
from .trajectory import resample_uniform


@dataclass
class BaselineParams:
    """Search budget and cost shaping for the contour planner."""

    n_particles: int = 30
    n_iters: int = 50
    field_weight: float = 5e7
    horizon: int = 6       # control steps each candidate heading is held for
    seed: int = 0

    def __post_init__(self):
        if self.n_particles < 1 or self.n_iters < 0:
            raise ValueError("need n_particles >= 1 and n_iters >= 0")
        if self.field_weight <= 0.0:
            raise ValueError("field_weight must be positive")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")


@dataclass
class ContourPlan:
    """One planning call's outcome."""

    levels: np.ndarray       # (N,) field intensity at each planned waypoint
    waypoints: np.ndarray    # (N, 2) planned next position per UAV
    plan_seconds: float      # wall time of the planning call


def _min_pairwise(points: np.ndarray) -> float:
    d = np.linalg.norm(points[:, None] - points[None, :], axis=-1)
    iu = np.triu_indices(len(points), k=1)
    return float(d[iu].min())


def plan_step(state: EpisodeState, fld: PotentialField, config: ScenarioConfig,
              params: Optional[BaselineParams] = None,
              ) -> Tuple[np.ndarray, ContourPlan]:
    """Plan one joint action for every UAV by heading-delta PSO.

    Returns the per-UAV heading changes in [-pi/4, pi/4] and the ContourPlan
    record (planned waypoints, their field levels, wall time). Deterministic
    given (params.seed, state.step).
    """
    t0 = time.perf_counter()
    if params is None:
        params = BaselineParams()
    n = state.n_uavs
    step_len = config.uav_speed * config.dt
    ds = step_len / 2.0

    # scored endpoints: repaired when the separation constraint is active
    endpoints = state.uav_pos.copy()
    if n >= 2 and _min_pairwise(state.uav_pos) < config.separation_threshold:
        repair_seed = int(np.random.SeedSequence(
            entropy=params.seed, spawn_key=(5, state.step)).generate_state(1)[0])
        try:
            endpoints = adjust_uav_positions(
                state.uav_pos, fld, config.separation_threshold,
                PsoParams(seed=repair_seed))
        except InfeasibleAdjustmentError:
            endpoints = state.uav_pos.copy()

    # Last two resampled points of each recent path. The rest of the path
    # contributes the same cost to every candidate, so it is dropped from
    # scoring; only the junction and the extension discriminate.
    tails = np.empty((n, 2, 2))
    for i in range(n):
        pts = state.recent_path(i, config.history_window).copy()
        pts[-1] = endpoints[i]
        if len(pts) >= 2:
            tails[i] = resample_uniform(pts, ds).waypoints[-2:]
        else:
            u = np.array([np.cos(state.uav_heading[i]), np.sin(state.uav_heading[i])])
            tails[i] = np.vstack([endpoints[i] - ds * u, endpoints[i]])

    k = 2 * params.horizon             # extension substeps of length ds
    arcs = ds * np.arange(1, k + 1)
    # interior waypoint j of a candidate is reached dt/2 per substep ahead
    interior_times = np.tile(np.arange(k) * (config.dt / 2.0), n)

    def cost(delta: np.ndarray) -> float:
        heading = state.uav_heading + np.clip(delta, -MAX_TURN, MAX_TURN)
        direction = np.column_stack([np.cos(heading), np.sin(heading)])
        if n >= 2:
            nxt_real = state.uav_pos + step_len * direction
            if _min_pairwise(nxt_real) < config.separation_threshold:
                return np.inf
        ext = endpoints[:, None, :] + arcs[None, :, None] * direction[:, None, :]
        cand = np.concatenate([tails, ext], axis=1)        # (n, 2 + k, 2)
        d2 = (cand[:, :-2] - 2.0 * cand[:, 1:-1] + cand[:, 2:]) / ds**2
        bend = np.einsum("nij,nij->", d2, d2)
        interior = cand[:, 1:-1].reshape(-1, 2)
        g = grad_phi_timed(interior, interior_times, fld)
        pull = np.einsum("ij,ij->", g, g)
        return float(0.5 * (bend - params.field_weight * pull) * ds)

    search_seed = int(np.random.SeedSequence(
        entropy=params.seed, spawn_key=(6, state.step)).generate_state(1)[0])
    result = optimize(
        cost, dims=n,
        params=PsoParams(n_particles=params.n_particles, n_iters=params.n_iters,
                         bounds=(-MAX_TURN, MAX_TURN), seed=search_seed),
        init=np.zeros((1, n)))
    actions = result.best_position

    heading = state.uav_heading + actions
    waypoints = state.uav_pos + step_len * np.column_stack(
        [np.cos(heading), np.sin(heading)])
    levels = phi_total(waypoints, fld)
    elapsed = time.perf_counter() - t0
    return actions, ContourPlan(levels=np.atleast_1d(levels),
                                waypoints=waypoints, plan_seconds=elapsed)


class ContourPlanner:
    """Closed-loop wrapper: builds the field per step and logs plan times."""

    def __init__(self, config: ScenarioConfig,
                 params: Optional[BaselineParams] = None):
        self.config = config
        self.params = params if params is not None else BaselineParams()
        self.plans: List[ContourPlan] = []

    def __call__(self, state: EpisodeState) -> np.ndarray:
        fld = build_field(state, self.config)
        actions, plan = plan_step(state, fld, self.config, self.params)
        self.plans.append(plan)
        return actions
