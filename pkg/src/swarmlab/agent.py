"""Independent DDPG agents with hand-rolled gradients.

Each UAV owns an actor-critic pair, target copies, a replay ring buffer, and
its own RNG streams; nothing is shared between agents. Backprop is written
out explicitly (plain numpy), so the whole training loop has no autodiff
dependency and gradients can be checked against finite differences.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .env import MAX_TURN, Observation, ScenarioConfig, plan_endpoints

CHECKPOINT_MAGIC = "SWARMLAB-DDPG-1"


@dataclass
class AgentConfig:
    """DDPG hyperparameters; hidden sizes are part of the architecture."""

    hidden: int = 256
    gamma: float = 0.95
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    tau: float = 0.005
    batch_size: int = 128
    buffer_capacity: int = 100_000
    noise_scale: float = 0.2       # rad, per-step innovation of the noise
    noise_decay: float = 0.999     # per-episode multiplier
    noise_theta: float = 1.0       # mean-reversion rate of the exploration
                                   # noise: 1 is white noise, lower values
                                   # correlate it over ~1/theta steps so
                                   # exploration holds a turn long enough
                                   # to produce whole avoidance maneuvers
    actor_lr_decay: float = 1.0    # per-episode multiplier on the actor step;
                                   # annealing freezes the policy once learned
                                   # and stops late-training drift into the
                                   # turn-limit rail
    momentum: float = 0.9          # critic optimizer momentum
    actor_momentum: float = 0.0    # actor optimizer momentum; heavy-ball
                                   # integration amplifies critic noise into
                                   # policy drift, so the actor defaults to 0
    update_every: int = 1          # env steps between gradient updates
    warmup_steps: int = 5000       # stored transitions before updates begin
    final_init_scale: float = 3e-3  # uniform bound of the output layers' init

    def __post_init__(self):
        if self.batch_size < 1 or self.buffer_capacity < self.batch_size:
            raise ValueError("need batch_size >= 1 and buffer_capacity >= batch_size")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be >= 0")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if self.final_init_scale <= 0.0:
            raise ValueError("final_init_scale must be positive")
        if not (0.0 <= self.momentum < 1.0 and 0.0 <= self.actor_momentum < 1.0):
            raise ValueError("momentum values must be in [0, 1)")
        if not 0.0 < self.actor_lr_decay <= 1.0:
            raise ValueError("actor_lr_decay must be in (0, 1]")
        if not 0.0 < self.noise_theta <= 1.0:
            raise ValueError("noise_theta must be in (0, 1]")


def _init_linear(rng, out_dim: int, in_dim: int,
                 bound: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    if bound is None:
        bound = 1.0 / np.sqrt(in_dim)
    w = rng.uniform(-bound, bound, size=(out_dim, in_dim))
    b = rng.uniform(-bound, bound, size=out_dim)
    return w, b


class PolicyNet:
    """obs -> hidden ReLU -> tanh head scaled to the turn limit.

    The output layer initializes inside a tight uniform bound so the fresh
    policy steers near zero; the closed loop then starts on the pre-planned
    heading instead of drifting during early training.
    """

    def __init__(self, obs_dim: int, hidden: int, rng,
                 final_scale: Optional[float] = None):
        self.obs_dim = obs_dim
        self.hidden = hidden
        w1, b1 = _init_linear(rng, hidden, obs_dim)
        w2, b2 = _init_linear(rng, 1, hidden, bound=final_scale)
        self.params = {"w1": w1, "b1": b1, "w2": w2, "b2": b2}

    def forward(self, obs: np.ndarray):
        p = self.params
        z1 = obs @ p["w1"].T + p["b1"]
        h1 = np.maximum(z1, 0.0)
        z2 = h1 @ p["w2"].T + p["b2"]
        a = MAX_TURN * np.tanh(z2)
        return a, (obs, z1, h1, z2)

    def __call__(self, obs: np.ndarray) -> np.ndarray:
        return self.forward(obs)[0]

    def backward(self, cache, da: np.ndarray) -> Dict[str, np.ndarray]:
        """Gradients of sum(da * a) w.r.t. params; da carries any 1/B factor."""
        obs, z1, h1, z2 = cache
        p = self.params
        t = np.tanh(z2)
        dz2 = da * MAX_TURN * (1.0 - t * t)
        dh1 = dz2 @ p["w2"]
        dz1 = dh1 * (z1 > 0.0)
        return {
            "w2": dz2.T @ h1, "b2": dz2.sum(axis=0),
            "w1": dz1.T @ obs, "b1": dz1.sum(axis=0),
        }


class ValueNet:
    """Two-branch critic: ReLU on obs and action, concat, ReLU, linear head."""

    def __init__(self, obs_dim: int, hidden: int, rng,
                 final_scale: Optional[float] = None):
        self.obs_dim = obs_dim
        self.hidden = hidden
        wo, bo = _init_linear(rng, hidden, obs_dim)
        # The action is a scalar, so plain fan-in init would give the act
        # branch O(1) weights and a large dQ/da before any fitting; the actor
        # would climb that arbitrary slope. Start the branch at the same
        # scale a fan-in of `hidden` would give and let TD error grow it
        # where the data shows real action-dependence.
        wa, ba = _init_linear(rng, hidden, 1, bound=1.0 / np.sqrt(hidden))
        wm, bm = _init_linear(rng, hidden, 2 * hidden)
        wq, bq = _init_linear(rng, 1, hidden, bound=final_scale)
        self.params = {"wo": wo, "bo": bo, "wa": wa, "ba": ba,
                       "wm": wm, "bm": bm, "wq": wq, "bq": bq}

    def forward(self, obs: np.ndarray, act: np.ndarray):
        p = self.params
        zo = obs @ p["wo"].T + p["bo"]
        ho = np.maximum(zo, 0.0)
        za = act @ p["wa"].T + p["ba"]
        ha = np.maximum(za, 0.0)
        c = np.concatenate([ho, ha], axis=1)
        zm = c @ p["wm"].T + p["bm"]
        hm = np.maximum(zm, 0.0)
        q = hm @ p["wq"].T + p["bq"]
        return q, (obs, act, zo, ho, za, ha, c, zm, hm)

    def __call__(self, obs: np.ndarray, act: np.ndarray) -> np.ndarray:
        return self.forward(obs, act)[0]

    def backward(self, cache, dq: np.ndarray):
        """Param gradients of sum(dq * q) plus the gradient w.r.t. the action."""
        obs, act, zo, ho, za, ha, c, zm, hm = cache
        p = self.params
        h = self.hidden
        dhm = dq @ p["wq"]
        dzm = dhm * (zm > 0.0)
        dc = dzm @ p["wm"]
        dzo = dc[:, :h] * (zo > 0.0)
        dza = dc[:, h:] * (za > 0.0)
        grads = {
            "wq": dq.T @ hm, "bq": dq.sum(axis=0),
            "wm": dzm.T @ c, "bm": dzm.sum(axis=0),
            "wo": dzo.T @ obs, "bo": dzo.sum(axis=0),
            "wa": dza.T @ act, "ba": dza.sum(axis=0),
        }
        dact = dza @ p["wa"]
        return grads, dact


class SgdMomentum:
    """Heavy-ball SGD: v <- m*v + g, p <- p - lr*v."""

    def __init__(self, params: Dict[str, np.ndarray], momentum: float):
        self.momentum = momentum
        self.velocity = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray],
             lr: float) -> None:
        for k in params:
            v = self.velocity[k]
            v *= self.momentum
            v += grads[k]
            params[k] -= lr * v


class ReplayBuffer:
    """Fixed-capacity ring buffer of transitions."""

    def __init__(self, capacity: int, obs_dim: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.act = np.zeros((capacity, 1))
        self.rew = np.zeros((capacity, 1))
        self.next_obs = np.zeros((capacity, obs_dim))
        self.done = np.zeros((capacity, 1))
        self.size = 0
        self.cursor = 0

    def add(self, obs, act, rew, next_obs, done) -> None:
        i = self.cursor
        self.obs[i] = obs
        self.act[i] = act
        self.rew[i] = rew
        self.next_obs[i] = next_obs
        self.done[i] = float(done)
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng) -> Dict[str, np.ndarray]:
        if self.size < batch_size:
            raise ValueError(f"buffer holds {self.size} < batch {batch_size}")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return {"obs": self.obs[idx], "act": self.act[idx], "rew": self.rew[idx],
                "next_obs": self.next_obs[idx], "done": self.done[idx]}


class ObsFeaturizer:
    """Fixed re-encoding of an Observation for network input.

    The encoding is translation-invariant: every position enters only as an
    offset from the UAV's own position, scaled by the relevant sensing
    radius, and velocities are scaled to cruise-speed units. The arena has
    no walls and every interaction (field, separation, collision) depends
    on relative geometry only, so absolute coordinates would be noise the
    networks have to learn to ignore.

    The craft's own motion is encoded as one relative angle: the cosine and
    sine of the angle between its velocity and the unit bearing to a point
    ``pursuit_range`` meters further along its own pre-planned line. The
    bearing comes from the observed position and plan velocity plus the
    craft's spawn (a constant of its own plan). On the lane the bearing
    equals the plan direction, so this angle is exactly the heading error
    the swarming reward shapes; off the lane the bearing tilts toward the
    lane, so the same error, and with it the learned turn-toward-reference
    regulator, also closes cross-track distance. That matters because the
    swarming reward itself measures heading only: lateral displacement
    (from an avoidance detour, or from the regulator's own equilibrium
    sitting a fraction of a degree off) earns full reward while it
    accumulates unchecked, so a policy that tracks heading perfectly can
    still leave its lane for good. Folding the tilt into the one angle the
    reward trains bounds that displacement at about ``pursuit_range``
    times the regulator's angular offset. Heading error and lane error
    are deliberately indistinguishable in feature space: fed separately,
    temporal-difference fitting loads on the reward-bearing heading
    channel and nearly ignores the lane channel (measured at a fifth of
    the heading gain, leaving ~100 m standing offsets).

    Row 1 is zeroed: the plan reference lives inside the relative angle,
    and the swarm-center offset never predicts a field interaction (the
    center leads the swarm by twice the per-decision travel times the
    lookahead, outside its own influence radius for the whole flight)
    while being the one input correlated with pairwise UAV proximity, so
    separation penalties bleed into it and train the policy to steer off
    its planned track. Masked obstacle rows stay zero.

    Each sensed obstacle row is re-parameterized into the four scalars
    that decide an encounter: range over the sensing radius; the signed
    closest-approach miss distance (positive when the obstacle passes on
    the craft's left) over twice the collision distance, clipped to +-2;
    the closing speed over twice cruise speed; and the time to closest
    approach over the half-sense crossing time, clipped to [0, 2] with
    receding traffic saturated at 2. These four are an invertible
    repackaging of the row's offset and relative velocity (up to the
    encounter's absolute bearing, which steering does not need): nothing
    the craft did not already observe, but the collision condition "small
    |miss|, small time, closing" is now axis-aligned instead of buried in
    a quadratic of four raw coordinates, and the numbers do not change
    with the craft's own heading, so what is learned on the lane holds
    mid-maneuver. Raw offsets were measured to leave the learned obstacle
    response at noise level (a trained policy answered threat geometry
    with ~0.05 rad drifts of the wrong sign and no range dependence).
    The map is a fixed function of the scenario config and the UAV
    index, so the same (config, index) always produces the same features.
    """

    def __init__(self, config: ScenarioConfig, uav_index: int = 0,
                 pursuit_range: float = 100.0):
        if pursuit_range <= 0.0:
            raise ValueError("pursuit_range must be positive")
        self.config = config
        self.uav_index = uav_index
        self.pursuit_range = pursuit_range
        spawns, _ = plan_endpoints(config)
        self.anchor = spawns[uav_index]

    def __call__(self, obs: Observation) -> np.ndarray:
        cfg = self.config
        e = obs.entries
        out = np.zeros_like(e)
        x, y = e[0, 0], e[0, 1]
        plan_v = e[1, 2:]
        plan_speed = np.hypot(plan_v[0], plan_v[1])
        speed = np.hypot(e[0, 2], e[0, 3])
        if plan_speed > 0.0 and speed > 0.0:
            vx, vy = e[0, 2] / speed, e[0, 3] / speed
            u = plan_v / plan_speed
            along = (x - self.anchor[0]) * u[0] + (y - self.anchor[1]) * u[1]
            ahead = self.anchor + (along + self.pursuit_range) * u
            bearing = ahead - (x, y)
            bx, by = bearing / np.hypot(bearing[0], bearing[1])
            out[0, 2] = vx * bx + vy * by
            out[0, 3] = vy * bx - vx * by
        if speed > 0.0:
            hx, hy = e[0, 2] / speed, e[0, 3] / speed
        else:
            hx, hy = 1.0, 0.0
        tca_scale = cfg.sense_range / (2.0 * cfg.uav_speed)
        for j, real in enumerate(obs.mask):
            if not real:
                continue
            row = 2 + j
            r = e[row, :2] - (x, y)
            w = e[row, 2:] - e[0, 2:]
            ww = w @ w
            if ww > 1e-12:
                tca = -(r @ w) / ww
            else:
                tca = np.inf
            ahead = min(max(tca, 0.0), 10.0 * tca_scale)
            ca = r + ahead * w
            miss = hx * ca[1] - hy * ca[0]
            rng_ = np.hypot(r[0], r[1])
            closing = -(r @ w) / rng_ if rng_ > 0.0 else 0.0
            out[row, 0] = rng_ / cfg.sense_range
            out[row, 1] = np.clip(miss / (2.0 * cfg.collision_distance),
                                  -2.0, 2.0)
            out[row, 2] = closing / (2.0 * cfg.uav_speed)
            out[row, 3] = min(tca / tca_scale, 2.0) if tca > 0.0 else 2.0
        return out.ravel()


def td_targets(batch: Dict[str, np.ndarray], target_policy: PolicyNet,
               target_value: ValueNet, gamma: float) -> np.ndarray:
    """One-step bootstrapped targets: r + gamma * (1 - done) * Q'(o', pi'(o'))."""
    a_next = target_policy(batch["next_obs"])
    q_next = target_value(batch["next_obs"], a_next)
    return batch["rew"] + gamma * (1.0 - batch["done"]) * q_next


def soft_update(target_params: Dict[str, np.ndarray],
                online_params: Dict[str, np.ndarray], tau: float) -> None:
    """target <- (1 - tau) * target + tau * online, in place."""
    for k in target_params:
        target_params[k] *= (1.0 - tau)
        target_params[k] += tau * online_params[k]


def _copy_params(params: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    return {k: v.copy() for k, v in params.items()}


class DivergenceError(FloatingPointError):
    """A gradient update produced non-finite numbers."""


class DdpgAgent:
    """One UAV's actor, critic, targets, replay buffer, and RNG streams."""

    def __init__(self, obs_dim: int, config: AgentConfig, seed: int = 0,
                 featurizer: Optional[ObsFeaturizer] = None):
        self.obs_dim = obs_dim
        self.config = config
        self.seed = seed
        self.featurizer = featurizer
        ss = np.random.SeedSequence(seed)
        init_ss, noise_ss, sample_ss = ss.spawn(3)
        init_rng = np.random.default_rng(init_ss)
        fs = config.final_init_scale
        self.policy = PolicyNet(obs_dim, config.hidden, init_rng, final_scale=fs)
        self.value = ValueNet(obs_dim, config.hidden, init_rng, final_scale=fs)
        self.target_policy = PolicyNet(obs_dim, config.hidden, init_rng, final_scale=fs)
        self.target_policy.params = _copy_params(self.policy.params)
        self.target_value = ValueNet(obs_dim, config.hidden, init_rng, final_scale=fs)
        self.target_value.params = _copy_params(self.value.params)
        self.policy_opt = SgdMomentum(self.policy.params, config.actor_momentum)
        self.value_opt = SgdMomentum(self.value.params, config.momentum)
        self.buffer = ReplayBuffer(config.buffer_capacity, obs_dim)
        self.noise_rng = np.random.default_rng(noise_ss)
        self.sample_rng = np.random.default_rng(sample_ss)
        self.noise_scale = config.noise_scale
        self.noise_state = 0.0
        self.actor_lr = config.actor_lr

    # -- interaction --------------------------------------------------------

    def features(self, obs) -> np.ndarray:
        if isinstance(obs, Observation):
            vec = self.featurizer(obs) if self.featurizer else obs.flat()
        else:
            vec = np.asarray(obs, dtype=np.float64)
        if vec.shape != (self.obs_dim,):
            raise ValueError(f"expected obs of dim {self.obs_dim}, got {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("observation contains non-finite values")
        return vec

    def act(self, obs, noise_scale: Optional[float] = None) -> float:
        """Action for one observation; noise_scale=0 is deterministic.

        Exploration noise follows a mean-reverting random walk
        (n <- (1 - theta) n + sigma N) driven by one normal draw per noisy
        call; noise_theta=1 makes it plain white noise.
        """
        vec = self.features(obs)
        a = float(self.policy(vec[None, :])[0, 0])
        sigma = self.noise_scale if noise_scale is None else noise_scale
        if sigma > 0.0:
            self.noise_state = ((1.0 - self.config.noise_theta) * self.noise_state
                                + sigma * float(self.noise_rng.standard_normal()))
            a += self.noise_state
        return float(np.clip(a, -MAX_TURN, MAX_TURN))

    def record(self, obs, act, rew, next_obs, done) -> None:
        self.buffer.add(self.features(obs), act, rew, self.features(next_obs), done)

    def decay_noise(self) -> None:
        """Apply the per-episode schedules and restart the noise walk."""
        self.noise_scale *= self.config.noise_decay
        self.actor_lr *= self.config.actor_lr_decay
        self.noise_state = 0.0

    # -- learning ------------------------------------------------------------

    def update_value(self, batch: Dict[str, np.ndarray],
                     targets: np.ndarray) -> float:
        """One critic step on mean squared TD error; returns the pre-step loss."""
        q, cache = self.value.forward(batch["obs"], batch["act"])
        err = q - targets
        loss = float(np.mean(err * err))
        dq = 2.0 * err / len(err)
        grads, _ = self.value.backward(cache, dq)
        self.value_opt.step(self.value.params, grads, self.config.critic_lr)
        return loss

    def update_policy(self, batch: Dict[str, np.ndarray]) -> float:
        """One actor ascent step on mean Q(o, pi(o)); returns the pre-step value."""
        a, p_cache = self.policy.forward(batch["obs"])
        q, v_cache = self.value.forward(batch["obs"], a)
        objective = float(np.mean(q))
        dq = np.full_like(q, 1.0 / len(q))
        _, dact = self.value.backward(v_cache, dq)
        grads = self.policy.backward(p_cache, dact)
        # ascend: descend the negated gradient
        grads = {k: -g for k, g in grads.items()}
        self.policy_opt.step(self.policy.params, grads, self.actor_lr)
        return objective

    def train_step(self) -> Optional[Tuple[float, float]]:
        """One DDPG update once warmup data is banked; None before that.

        Updates start only after the buffer holds ``warmup_steps``
        transitions (and at least one batch). Until then the tightly
        initialized policy keeps feeding the buffer near-straight flights,
        so the critic's first fits see representative data instead of the
        transient of a freshly wandering actor.
        """
        cfg = self.config
        if self.buffer.size < max(cfg.batch_size, cfg.warmup_steps):
            return None
        batch = self.buffer.sample(cfg.batch_size, self.sample_rng)
        targets = td_targets(batch, self.target_policy, self.target_value, cfg.gamma)
        loss = self.update_value(batch, targets)
        objective = self.update_policy(batch)
        if not (np.isfinite(loss) and np.isfinite(objective)):
            raise DivergenceError(
                f"non-finite update: value loss {loss}, policy objective {objective}")
        soft_update(self.target_value.params, self.value.params, cfg.tau)
        soft_update(self.target_policy.params, self.policy.params, cfg.tau)
        return loss, objective


# -- persistence --------------------------------------------------------------


def _rng_state_json(rng) -> str:
    return json.dumps(rng.bit_generator.state)


def _rng_from_json(s: str):
    rng = np.random.default_rng()
    rng.bit_generator.state = json.loads(s)
    return rng


def save_checkpoint(path, agents: List[DdpgAgent],
                    scenario: Optional[ScenarioConfig] = None,
                    extra: Optional[dict] = None) -> None:
    """Write every parameter, optimizer slot, buffer, and RNG state to one file.

    The dump is a .npz archive with a magic header; loading rebuilds agents
    that continue bit-for-bit where these left off.
    """
    arrays = {}
    meta = {
        "magic": CHECKPOINT_MAGIC,
        "n_agents": len(agents),
        "obs_dim": agents[0].obs_dim if agents else 0,
        "agent_config": asdict(agents[0].config) if agents else {},
        "scenario": None,
        "agents": [],
        "extra": extra or {},
    }
    if scenario is not None:
        d = asdict(scenario)
        d["obstacle_speed_range"] = list(d["obstacle_speed_range"])
        meta["scenario"] = d
    for i, ag in enumerate(agents):
        meta["agents"].append({
            "seed": ag.seed,
            "noise_scale": ag.noise_scale,
            "noise_state": ag.noise_state,
            "actor_lr": ag.actor_lr,
            "noise_rng": _rng_state_json(ag.noise_rng),
            "sample_rng": _rng_state_json(ag.sample_rng),
            "buffer_size": ag.buffer.size,
            "buffer_cursor": ag.buffer.cursor,
        })
        for net, name in [(ag.policy, "policy"), (ag.value, "value"),
                          (ag.target_policy, "target_policy"),
                          (ag.target_value, "target_value")]:
            for k, v in net.params.items():
                arrays[f"agent{i}/{name}/{k}"] = v
        for opt, name in [(ag.policy_opt, "policy_opt"), (ag.value_opt, "value_opt")]:
            for k, v in opt.velocity.items():
                arrays[f"agent{i}/{name}/{k}"] = v
        n = ag.buffer.size
        for k in ("obs", "act", "rew", "next_obs", "done"):
            arrays[f"agent{i}/buffer/{k}"] = getattr(ag.buffer, k)[:n]
    arrays["meta"] = np.frombuffer(
        json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
    np.savez_compressed(path, **arrays)


def load_checkpoint(path) -> Tuple[List[DdpgAgent], Optional[ScenarioConfig], dict]:
    """Rebuild agents (and the scenario config, if saved) from a checkpoint."""
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("magic") != CHECKPOINT_MAGIC:
            raise ValueError(f"not a {CHECKPOINT_MAGIC} checkpoint: {path}")
        scenario = None
        if meta["scenario"] is not None:
            d = dict(meta["scenario"])
            d["obstacle_speed_range"] = tuple(d["obstacle_speed_range"])
            scenario = ScenarioConfig(**d)
        agent_config = AgentConfig(**meta["agent_config"])
        agents = []
        for i, am in enumerate(meta["agents"]):
            ag = DdpgAgent(meta["obs_dim"], agent_config, seed=am["seed"],
                           featurizer=(ObsFeaturizer(scenario, uav_index=i)
                                       if scenario else None))
            for net, name in [(ag.policy, "policy"), (ag.value, "value"),
                              (ag.target_policy, "target_policy"),
                              (ag.target_value, "target_value")]:
                for k in net.params:
                    net.params[k] = data[f"agent{i}/{name}/{k}"].copy()
            for opt, name in [(ag.policy_opt, "policy_opt"),
                              (ag.value_opt, "value_opt")]:
                for k in opt.velocity:
                    opt.velocity[k] = data[f"agent{i}/{name}/{k}"].copy()
            n = am["buffer_size"]
            for k in ("obs", "act", "rew", "next_obs", "done"):
                getattr(ag.buffer, k)[:n] = data[f"agent{i}/buffer/{k}"]
            ag.buffer.size = n
            ag.buffer.cursor = am["buffer_cursor"]
            ag.noise_scale = am["noise_scale"]
            ag.noise_state = am.get("noise_state", 0.0)
            ag.actor_lr = am.get("actor_lr", agent_config.actor_lr)
            ag.noise_rng = _rng_from_json(am["noise_rng"])
            ag.sample_rng = _rng_from_json(am["sample_rng"])
            agents.append(ag)
    return agents, scenario, meta["extra"]
