"""Reward assembly: contour cost of the recent path, formation keeping, and
a collision gate, with the PSO separation repair applied during training.

The per-UAV reward is -f(S, Phi) + r_form * r_collide: the negated contour
cost of the UAV's recent trajectory over the current field, plus the cosine
between its velocity and its pre-planned velocity, zeroed on any step where
the UAV sits inside the collision distance of anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .env import EpisodeState, ScenarioConfig
from .fields import ObstacleSpec, PotentialField, SwarmFieldSpec
from .pso import InfeasibleAdjustmentError, PsoParams, adjust_uav_positions
from .trajectory import contour_cost, resample_uniform

# Contour term is zero until the path has this many control steps behind it;
# two points cannot bend and one segment has no interior.
WARMUP_STEPS = 2


@dataclass
class RewardBreakdown:
    contour: float         # -f(S, Phi)
    formation: float       # cosine(velocity, planned velocity)
    collision_free: float  # 1.0 clear, 0.0 inside collision distance

    @property
    def total(self) -> float:
        return self.contour + self.formation * self.collision_free


def build_field(state: EpisodeState, config: ScenarioConfig) -> PotentialField:
    """The field all UAVs share this step: swarm center plus every obstacle."""
    obstacles = tuple(
        ObstacleSpec(position=state.obstacle_pos[j],
                     velocity=state.obstacle_vel[j],
                     influence_radius=config.obstacle_influence_radius,
                     safe_distance=config.safe_distance)
        for j in range(state.n_obstacles)
    )
    swarm = SwarmFieldSpec(center=state.center_pos, speed=config.uav_speed,
                           influence_radius=config.swarm_influence_radius)
    return PotentialField(swarm=swarm, obstacles=obstacles)


def formation_reward(velocity, planned_velocity) -> float:
    """Cosine of the angle between actual and pre-planned velocity."""
    v = np.asarray(velocity, dtype=np.float64)
    w = np.asarray(planned_velocity, dtype=np.float64)
    nv, nw = np.linalg.norm(v), np.linalg.norm(w)
    if nv <= 0.0 or nw <= 0.0:
        raise ValueError("formation reward needs non-zero velocities")
    return float(np.clip(np.dot(v, w) / (nv * nw), -1.0, 1.0))


def collision_indicator(state: EpisodeState, i: int, d_col: float) -> float:
    """1.0 while UAV i keeps d_col to every obstacle and every other UAV."""
    if state.n_obstacles:
        d = np.linalg.norm(state.obstacle_pos - state.uav_pos[i], axis=1)
        if d.min() < d_col:
            return 0.0
    if state.n_uavs > 1:
        d = np.linalg.norm(state.uav_pos - state.uav_pos[i], axis=1)
        d[i] = np.inf
        if d.min() < d_col:
            return 0.0
    return 1.0


def compute_reward(state: EpisodeState, uav_index: int, config: ScenarioConfig,
                   fld: Optional[PotentialField] = None,
                   endpoint: Optional[np.ndarray] = None) -> RewardBreakdown:
    """Reward for one UAV at the current step.

    fld defaults to build_field(state, config); endpoint, when given,
    replaces the last point of the scored trajectory (the separation repair
    shifts scored endpoints, never the flown state).
    """
    if fld is None:
        fld = build_field(state, config)

    if state.step < WARMUP_STEPS:
        contour = 0.0
    else:
        pts = state.recent_path(uav_index, config.history_window).copy()
        if endpoint is not None:
            pts[-1] = endpoint
        ds = config.uav_speed * config.dt / 2.0
        traj = resample_uniform(pts, ds)
        if len(traj) < 3:
            contour = 0.0
        else:
            contour = -contour_cost(traj, fld)

    velocity = config.uav_speed * state.uav_velocity(uav_index)
    planned = config.uav_speed * _plan_direction(state, uav_index)
    form = formation_reward(velocity, planned)
    gate = collision_indicator(state, uav_index, config.collision_distance)
    return RewardBreakdown(contour=contour, formation=form, collision_free=gate)


def _plan_direction(state: EpisodeState, i: int) -> np.ndarray:
    d = state.uav_target[i] - state.uav_spawn[i]
    n = np.linalg.norm(d)
    if n < 1e-12:
        raise ValueError("UAV spawn coincides with its target")
    return d / n


class RewardComputer:
    """Per-step reward pass for every UAV, usable as the env's reward hook.

    During training, whenever the minimum pairwise UAV distance drops below
    the separation threshold, the PSO repair adjusts a copy of the current
    positions and the adjusted points replace the scored trajectory
    endpoints. Evaluation skips the repair. The repair PSO is seeded from
    (seed, episode step) so a rerun reproduces it bit for bit.
    """

    def __init__(self, config: ScenarioConfig, training: bool = True,
                 pso_params: Optional[PsoParams] = None, seed: int = 0):
        self.config = config
        self.training = training
        self.pso_params = pso_params if pso_params is not None else PsoParams()
        self.seed = seed
        self.last_breakdowns: List[RewardBreakdown] = []

    def _adjusted_endpoints(self, state: EpisodeState,
                            fld: PotentialField) -> Optional[np.ndarray]:
        cfg = self.config
        if not self.training or state.n_uavs < 2:
            return None
        d = np.linalg.norm(state.uav_pos[:, None] - state.uav_pos[None, :], axis=-1)
        iu = np.triu_indices(state.n_uavs, k=1)
        if d[iu].min() >= cfg.separation_threshold:
            return None
        call_seed = int(np.random.SeedSequence(
            entropy=self.seed, spawn_key=(4, state.step)).generate_state(1)[0])
        params = PsoParams(n_particles=self.pso_params.n_particles,
                           n_iters=self.pso_params.n_iters,
                           c1=self.pso_params.c1, c2=self.pso_params.c2,
                           inertia_range=self.pso_params.inertia_range,
                           bounds=None, seed=call_seed)
        try:
            return adjust_uav_positions(state.uav_pos, fld,
                                        cfg.separation_threshold, params)
        except InfeasibleAdjustmentError:
            return None  # keep raw endpoints; the gate already penalizes

    def __call__(self, state: EpisodeState) -> np.ndarray:
        fld = build_field(state, self.config)
        adjusted = self._adjusted_endpoints(state, fld)
        self.last_breakdowns = []
        rewards = np.zeros(state.n_uavs)
        for i in range(state.n_uavs):
            endpoint = adjusted[i] if adjusted is not None else None
            br = compute_reward(state, i, self.config, fld=fld, endpoint=endpoint)
            self.last_breakdowns.append(br)
            rewards[i] = br.total
        return rewards
