"""Multi-UAV navigation environment with moving obstacles.

UAVs fly at constant speed and steer by bounded heading changes. Obstacles
spawn on the right half of the arena and fly straight at a UAV chosen at
spawn time. A virtual swarm center leads the formation at the mean initial
velocity. Episodes end on collision, on every UAV reaching its target, or on
a step cap. Observations are egocentric and partial: each UAV sees itself,
the swarm center, and the nearest obstacles inside a forward sensing cone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

MAX_TURN = np.pi / 4.0  # rad, per-step heading change limit

SPAWN_ATTEMPTS = 100

TRAJECTORY_COLUMNS = ("episode", "step", "entity_type", "entity_id", "x", "y", "vx", "vy")


@dataclass
class ScenarioConfig:
    """Everything that defines a scenario; all distances m, speeds m/s."""

    n_uavs: int = 2
    n_obstacles: int = 1
    arena_width: float = 800.0        # x extent
    arena_length: float = 800.0       # y extent
    uav_speed: float = 10.0
    obstacle_speed_range: Tuple[float, float] = (5.0, 10.0)
    dt: float = 1.0                   # s, control interval
    collision_distance: float = 20.0  # below this any pair collides
    safe_distance: float = 40.0       # obstacle-field plateau radius
    obstacle_influence_radius: float = 150.0
    swarm_influence_radius: float = 150.0
    separation_threshold: float = 30.0   # pairwise UAV spacing the repair enforces
    sense_range: float = 200.0
    sense_aperture: float = 2.0 * np.pi / 3.0  # rad, forward cone width
    max_observed_obstacles: Optional[int] = None  # None -> n_obstacles
    max_steps: int = 120
    history_window: int = 8           # control steps of path kept for scoring
    lookahead_steps: int = 10         # virtual-center lead, in control steps
    seed: int = 0

    def __post_init__(self):
        if self.n_uavs < 1 or self.n_obstacles < 0:
            raise ValueError("need n_uavs >= 1 and n_obstacles >= 0")
        if self.uav_speed <= 0.0 or self.dt <= 0.0:
            raise ValueError("uav_speed and dt must be positive")
        lo, hi = self.obstacle_speed_range
        if not 0.0 <= lo <= hi:
            raise ValueError("obstacle_speed_range must be ordered and non-negative")
        if not (0.0 < self.collision_distance < self.safe_distance
                < self.obstacle_influence_radius):
            raise ValueError("need 0 < collision_distance < safe_distance "
                             "< obstacle_influence_radius")
        if not (0.0 < self.sense_aperture <= 2.0 * np.pi):
            raise ValueError("sense_aperture must be in (0, 2*pi]")
        if self.max_steps < 1 or self.history_window < 1:
            raise ValueError("max_steps and history_window must be >= 1")

    @property
    def n_observed_obstacles(self) -> int:
        if self.max_observed_obstacles is None:
            return self.n_obstacles
        return self.max_observed_obstacles

    @property
    def obs_dim(self) -> int:
        return (2 + self.n_observed_obstacles) * 4

    def to_file(self, path) -> None:
        d = asdict(self)
        d["obstacle_speed_range"] = list(d["obstacle_speed_range"])
        with open(path, "w") as f:
            json.dump(d, f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path) as f:
            d = json.load(f)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        if "obstacle_speed_range" in d:
            d["obstacle_speed_range"] = tuple(d["obstacle_speed_range"])
        return cls(**d)


@dataclass
class Observation:
    """Per-UAV observation: (2 + m) rows of [x, y, vx, vy].

    Row 0 is the UAV itself, row 1 the virtual center with the UAV's planned
    velocity, rows 2.. the nearest sensed obstacles. mask[j] says whether
    obstacle row j is real; masked rows are zero.
    """

    entries: np.ndarray  # (2 + m, 4)
    mask: np.ndarray     # (m,) bool

    def flat(self) -> np.ndarray:
        return self.entries.ravel()


@dataclass
class StepResult:
    observations: List[Observation]
    rewards: np.ndarray  # (n_uavs,)
    done: bool
    info: Dict


@dataclass
class EpisodeState:
    """Mutable world state; arrays are owned by the episode."""

    uav_pos: np.ndarray       # (N, 2)
    uav_heading: np.ndarray   # (N,)
    uav_spawn: np.ndarray     # (N, 2)
    uav_target: np.ndarray    # (N, 2)
    obstacle_pos: np.ndarray  # (M, 2)
    obstacle_vel: np.ndarray  # (M, 2)
    center_pos: np.ndarray    # (2,)
    center_vel: np.ndarray    # (2,)
    step: int = 0
    done: bool = False
    reason: Optional[str] = None          # collision | success | timeout
    collided: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    uav_path: List[np.ndarray] = field(default_factory=list)       # per step (N, 2)
    obstacle_path: List[np.ndarray] = field(default_factory=list)  # per step (M, 2)
    center_path: List[np.ndarray] = field(default_factory=list)    # per step (2,)

    @property
    def n_uavs(self) -> int:
        return len(self.uav_pos)

    @property
    def n_obstacles(self) -> int:
        return len(self.obstacle_pos)

    def uav_velocity(self, i: int) -> np.ndarray:
        th = self.uav_heading[i]
        return np.array([np.cos(th), np.sin(th)])  # unit; scale by speed outside

    def full_path(self, i: int) -> np.ndarray:
        """Every position UAV i has occupied, spawn included, shape (T+1, 2)."""
        return np.array([p[i] for p in self.uav_path])

    def recent_path(self, i: int, window: int) -> np.ndarray:
        """Last `window` control steps of UAV i's path (up to window+1 points)."""
        return self.full_path(i)[-(window + 1):]


def _wrap_angle(a):
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def plan_endpoints(config: ScenarioConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Spawn and target positions of every UAV's pre-planned straight path.

    UAVs launch in a column near the left arena edge and fly lanes parallel
    to the x axis toward mirrored targets near the right edge. Lanes default
    to five collision diameters apart: neighbours spawn well outside each
    other's separation envelope, so one craft's penalties are not driven by
    a neighbour it cannot observe. The spacing shrinks toward the
    separation floor only when the arena cannot fit the swarm at the wide
    default.

    Parameters
    ----------
    config : ScenarioConfig
        Scenario geometry; only the arena size, UAV count, and the
        separation and collision radii matter here.

    Returns
    -------
    spawns, targets : ndarray, shape (n_uavs, 2) each
        Per-UAV spawn and target positions. Row i of both arrays lies on
        UAV i's lane.
    """
    cfg = config
    n = cfg.n_uavs
    wide = max(1.2 * cfg.separation_threshold, 5.0 * cfg.collision_distance)
    floor = max(1.2 * cfg.separation_threshold, 2.0 * cfg.collision_distance)
    spacing = wide
    if n > 1:
        spacing = max(floor, min(wide, 0.8 * cfg.arena_length / (n - 1)))
    offsets = (np.arange(n) - (n - 1) / 2.0) * spacing
    if np.abs(offsets).max(initial=0.0) > 0.45 * cfg.arena_length:
        raise ValueError(f"{n} UAVs at spacing {spacing} m do not fit the arena")
    ys = cfg.arena_length / 2.0 + offsets
    spawns = np.column_stack([np.full(n, 0.1 * cfg.arena_width), ys])
    targets = np.column_stack([np.full(n, 0.9 * cfg.arena_width), ys])
    return spawns, targets


class SwarmEnv:
    """The environment; holds the scenario config and an optional reward hook.

    reward_fn, when given, is called with the post-step EpisodeState and must
    return one scalar per UAV; without it rewards are zero (useful for
    scripted rollouts and the planner baseline).
    """

    def __init__(self, config: ScenarioConfig, reward_fn=None):
        self.config = config
        self.reward_fn = reward_fn

    # -- episode setup -----------------------------------------------------

    def reset(self, seed: Optional[int] = None) -> Tuple[EpisodeState, List[Observation]]:
        cfg = self.config
        rng = np.random.default_rng(cfg.seed if seed is None else seed)

        n = cfg.n_uavs
        uav_pos, uav_target = plan_endpoints(cfg)
        uav_heading = np.zeros(n)

        obstacle_pos, obstacle_vel = self._spawn_obstacles(rng, uav_pos)

        centroid = uav_pos.mean(axis=0)
        mean_heading = np.array([1.0, 0.0])  # all UAVs start facing +x
        lead = 2.0 * cfg.uav_speed * cfg.dt * cfg.lookahead_steps
        center_pos = centroid + lead * mean_heading
        center_vel = cfg.uav_speed * mean_heading

        state = EpisodeState(
            uav_pos=uav_pos, uav_heading=uav_heading,
            uav_spawn=uav_pos.copy(), uav_target=uav_target,
            obstacle_pos=obstacle_pos, obstacle_vel=obstacle_vel,
            center_pos=center_pos, center_vel=center_vel,
            collided=np.zeros(n, dtype=bool),
        )
        state.uav_path.append(state.uav_pos.copy())
        state.obstacle_path.append(state.obstacle_pos.copy())
        state.center_path.append(state.center_pos.copy())
        return state, [self.observe(state, i) for i in range(n)]

    def _spawn_obstacles(self, rng, uav_pos):
        cfg = self.config
        m = cfg.n_obstacles
        if m == 0:
            return np.zeros((0, 2)), np.zeros((0, 2))
        for _ in range(SPAWN_ATTEMPTS):
            pos = np.column_stack([
                rng.uniform(0.55 * cfg.arena_width, 0.9 * cfg.arena_width, m),
                rng.uniform(0.1 * cfg.arena_length, 0.9 * cfg.arena_length, m),
            ])
            aim = rng.integers(0, len(uav_pos), m)
            speed = rng.uniform(cfg.obstacle_speed_range[0], cfg.obstacle_speed_range[1], m)
            to_uav = uav_pos[aim] - pos
            norm = np.linalg.norm(to_uav, axis=1, keepdims=True)
            if np.any(norm < 1e-9):
                continue
            vel = speed[:, None] * to_uav / norm
            d = np.linalg.norm(uav_pos[:, None, :] - pos[None, :, :], axis=-1)
            if d.min() >= cfg.collision_distance:
                return pos, vel
        raise RuntimeError(f"no feasible obstacle spawn in {SPAWN_ATTEMPTS} attempts")

    # -- dynamics ----------------------------------------------------------

    def step(self, state: EpisodeState, actions) -> StepResult:
        cfg = self.config
        if state.done:
            raise RuntimeError("step() called on a finished episode")
        a = np.asarray(actions, dtype=np.float64).reshape(-1)
        if a.shape != (state.n_uavs,):
            raise ValueError(f"expected {state.n_uavs} actions, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("actions must be finite")
        a = np.clip(a, -MAX_TURN, MAX_TURN)

        state.uav_heading = state.uav_heading + a
        step_vec = cfg.uav_speed * cfg.dt * np.column_stack(
            [np.cos(state.uav_heading), np.sin(state.uav_heading)])
        state.uav_pos = state.uav_pos + step_vec
        state.obstacle_pos = state.obstacle_pos + state.obstacle_vel * cfg.dt
        state.center_pos = state.center_pos + state.center_vel * cfg.dt
        state.step += 1

        state.uav_path.append(state.uav_pos.copy())
        state.obstacle_path.append(state.obstacle_pos.copy())
        state.center_path.append(state.center_pos.copy())

        min_d_u2o, min_d_u2u, collided = self._proximity(state)
        state.collided = collided

        if np.any(collided):
            state.done, state.reason = True, "collision"
        elif np.all(np.linalg.norm(state.uav_pos - state.uav_target, axis=1)
                    <= cfg.collision_distance):
            state.done, state.reason = True, "success"
        elif state.step >= cfg.max_steps:
            state.done, state.reason = True, "timeout"

        obs = [self.observe(state, i) for i in range(state.n_uavs)]
        if self.reward_fn is not None:
            rewards = np.asarray(self.reward_fn(state), dtype=np.float64)
        else:
            rewards = np.zeros(state.n_uavs)
        info = {
            "min_d_u2o": min_d_u2o,
            "min_d_u2u": min_d_u2u,
            "collisions": collided.copy(),
            "reason": state.reason,
        }
        return StepResult(observations=obs, rewards=rewards, done=state.done, info=info)

    def _proximity(self, state):
        cfg = self.config
        n = state.n_uavs
        collided = np.zeros(n, dtype=bool)
        min_d_u2o = np.inf
        if state.n_obstacles:
            d_uo = np.linalg.norm(
                state.uav_pos[:, None, :] - state.obstacle_pos[None, :, :], axis=-1)
            min_d_u2o = float(d_uo.min())
            collided |= (d_uo < cfg.collision_distance).any(axis=1)
        min_d_u2u = np.inf
        if n > 1:
            d_uu = np.linalg.norm(
                state.uav_pos[:, None, :] - state.uav_pos[None, :, :], axis=-1)
            np.fill_diagonal(d_uu, np.inf)
            min_d_u2u = float(d_uu.min())
            collided |= (d_uu < cfg.collision_distance).any(axis=1)
        return min_d_u2o, min_d_u2u, collided

    # -- observations ------------------------------------------------------

    def plan_velocity(self, state: EpisodeState, i: int) -> np.ndarray:
        """Velocity of UAV i's pre-planned path: straight spawn-to-target."""
        d = state.uav_target[i] - state.uav_spawn[i]
        n = np.linalg.norm(d)
        if n < 1e-12:
            return np.zeros(2)
        return self.config.uav_speed * d / n

    def observe(self, state: EpisodeState, i: int) -> Observation:
        cfg = self.config
        m = cfg.n_observed_obstacles
        entries = np.zeros((2 + m, 4))
        mask = np.zeros(m, dtype=bool)

        vel = cfg.uav_speed * state.uav_velocity(i)
        entries[0] = [state.uav_pos[i, 0], state.uav_pos[i, 1], vel[0], vel[1]]
        plan_v = self.plan_velocity(state, i)
        entries[1] = [state.center_pos[0], state.center_pos[1], plan_v[0], plan_v[1]]

        if state.n_obstacles and m:
            rel = state.obstacle_pos - state.uav_pos[i]
            dist = np.linalg.norm(rel, axis=1)
            bearing = _wrap_angle(np.arctan2(rel[:, 1], rel[:, 0]) - state.uav_heading[i])
            visible = (dist <= cfg.sense_range) & (np.abs(bearing) <= cfg.sense_aperture / 2.0)
            order = np.argsort(dist, kind="stable")
            row = 0
            for j in order:
                if not visible[j] or row >= m:
                    continue
                entries[2 + row] = [state.obstacle_pos[j, 0], state.obstacle_pos[j, 1],
                                    state.obstacle_vel[j, 0], state.obstacle_vel[j, 1]]
                mask[row] = True
                row += 1
        return Observation(entries=entries, mask=mask)
