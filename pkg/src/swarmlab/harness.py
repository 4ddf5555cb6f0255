"""Run orchestration: training, evaluation, benchmarking, and CSV export.

This module turns the building blocks (env, reward, agents, baseline
planner) into reproducible runs. Every run is a pure function of the run
config and its seed: episode seeds come from named SeedSequence streams,
floats are written with round-trip formatting, and wall-clock measurements
live in separate timing files so the metric files stay bit-identical
across reruns of the same (config, seed).

Seed streams, all spawned from ``SeedSequence(entropy=run_seed)``:

==============  =====================================
spawn_key       purpose
==============  =====================================
(0, e)          training episode e
(1, i)          agent i network init and noise
(4, step)       reward-side separation repair
(5, step)       baseline separation repair
(6, step)       baseline contour search
(9, 10000 + k)  evaluation episode k
(9, 20000 + k)  benchmark episode k
(9, 30000)      field-export scene
(9, 40000 + k)  validation episode k (during training)
==============  =====================================
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .agent import (
    AgentConfig,
    DdpgAgent,
    ObsFeaturizer,
    load_checkpoint,
    save_checkpoint,
)
from .baseline import BaselineParams, ContourPlanner
from .env import TRAJECTORY_COLUMNS, EpisodeState, ScenarioConfig, SwarmEnv
from .fields import phi_total
from .reward import RewardComputer, build_field
from .scenarios import get_scenario
from .trajectory import energy, resample_uniform

METRICS_COLUMNS = ("episode", "swarming_return", "total_return", "success",
                   "min_d_u2o", "min_d_u2u", "energy_mean", "energy_max")
TIMING_COLUMNS = ("episode", "decision_ms")
VALIDATION_COLUMNS = ("episode", "success_rate")
QVALUE_COLUMNS = ("episode", "step", "uav", "q")
SUMMARY_COLUMNS = ("metric", "mean", "std")
BENCH_EPISODE_COLUMNS = ("runner", "episode", "seed", "success", "min_d_u2o",
                         "min_d_u2u", "energy_mean", "decision_seconds")
BENCH_SUMMARY_COLUMNS = ("runner", "reaction_mean_s", "reaction_std_s",
                         "energy_mean", "energy_std", "min_d_u2o", "min_d_u2u")
BASELINE_TIMING_COLUMNS = ("episode", "step", "plan_seconds")
FIELD_GRID_COLUMNS = ("x", "y", "phi")

SUMMARY_METRICS = ("reaction_seconds", "energy", "min_d_u2o", "min_d_u2u")


def stream_seed(run_seed: int, stream: int, index: int) -> int:
    """Integer seed for one draw of a named stream of a run.

    Parameters
    ----------
    run_seed : int
        The run's master seed.
    stream : int
        Stream id (see the module docstring for the registry).
    index : int
        Position within the stream.

    Returns
    -------
    int
        A 32-bit seed, stable across processes and platforms.
    """
    ss = np.random.SeedSequence(entropy=run_seed, spawn_key=(stream, index))
    return int(ss.generate_state(1)[0])


@dataclass
class RunConfig:
    """Everything needed to reproduce a run.

    ``scenario`` picks a named preset; ``scenario_file`` (a JSON dump of a
    ScenarioConfig) overrides it. Training episodes run with the step cap
    ``train_max_steps`` so the replay distribution stays close to the
    mission window; evaluation and benchmarking always use the scenario's
    own cap.

    Every ``val_interval`` training episodes (default: ``eval_interval``)
    the current policy is scored on ``val_episodes`` noise-free validation
    rollouts and the best-scoring checkpoint is kept; see ``train``.
    """

    scenario: str = "2U1O"
    scenario_file: Optional[str] = None
    mode: str = "train"
    episodes: int = 1000
    eval_interval: int = 100
    eval_episodes: int = 100
    bench_episodes: int = 50
    val_interval: Optional[int] = None
    val_episodes: int = 20
    train_max_steps: Optional[int] = 72
    seed: int = 0
    out_dir: str = "runs/run0"
    checkpoint_dir: Optional[str] = None
    checkpoint: Optional[str] = None
    agent: AgentConfig = field(default_factory=AgentConfig)
    baseline: BaselineParams = field(default_factory=BaselineParams)

    def __post_init__(self):
        if self.mode not in ("train", "eval", "bench", "export"):
            raise ValueError(f"unknown mode: {self.mode!r}")
        if self.episodes <= 0:
            raise ValueError("episodes must be positive")
        if self.eval_interval <= 0:
            raise ValueError("eval_interval must be positive")
        if self.eval_episodes <= 0 or self.bench_episodes <= 0:
            raise ValueError("episode counts must be positive")
        if self.val_interval is not None and self.val_interval <= 0:
            raise ValueError("val_interval must be positive or None")
        if self.val_episodes <= 0:
            raise ValueError("val_episodes must be positive")
        if self.train_max_steps is not None and self.train_max_steps <= 0:
            raise ValueError("train_max_steps must be positive or None")

    def scenario_config(self) -> ScenarioConfig:
        if self.scenario_file is not None:
            return ScenarioConfig.from_file(self.scenario_file)
        return get_scenario(self.scenario)

    def resolved_checkpoint_dir(self) -> Path:
        if self.checkpoint_dir is not None:
            return Path(self.checkpoint_dir)
        return Path(self.out_dir) / "checkpoints"


@dataclass
class MetricsRecord:
    """Per-episode log record.

    ``energy`` keeps the per-UAV values; the CSV row carries their mean and
    max. ``decision_ms`` is the mean wall-clock per single decision call
    and is written to the separate timing file.
    """

    episode: int
    swarming_return: float
    total_return: float
    success: bool
    min_d_u2o: float
    min_d_u2u: float
    energy: np.ndarray
    decision_ms: float

    @property
    def energy_mean(self) -> float:
        return float(np.mean(self.energy))

    @property
    def energy_max(self) -> float:
        return float(np.max(self.energy))

    def metrics_row(self) -> List[str]:
        return [str(self.episode), _fmt(self.swarming_return),
                _fmt(self.total_return), str(int(self.success)),
                _fmt(self.min_d_u2o), _fmt(self.min_d_u2u),
                _fmt(self.energy_mean), _fmt(self.energy_max)]


def _fmt(value) -> str:
    """Round-trip decimal text for a float (shortest repr)."""
    return repr(float(value))


def _write_csv(path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows(rows)


class _CsvLog:
    """Append-mode CSV writer that flushes after every row."""

    def __init__(self, path, columns: Sequence[str]):
        self.fh = open(path, "w", newline="")
        self.writer = csv.writer(self.fh)
        self.writer.writerow(columns)

    def write(self, row) -> None:
        self.writer.writerow(row)
        self.fh.flush()

    def close(self) -> None:
        self.fh.close()


@dataclass
class EpisodeStats:
    """Everything measured in one rollout."""

    seed: int
    reason: str
    steps: int
    success: bool
    swarming_return: float
    total_return: float
    min_d_u2o: float
    min_d_u2u: float
    energy: np.ndarray
    decision_seconds: float                  # mean per decision call
    trajectory_rows: List[list]
    qvalue_rows: List[list]


def _episode_energy(state: EpisodeState, cfg: ScenarioConfig) -> np.ndarray:
    ds = cfg.uav_speed * cfg.dt / 2.0
    out = np.zeros(cfg.n_uavs)
    for i in range(cfg.n_uavs):
        path = state.full_path(i)
        if len(path) < 3:
            continue
        out[i] = energy(resample_uniform(path, ds))
    return out


def _trajectory_rows(state: EpisodeState, episode: int) -> List[list]:
    rows = []
    n = len(state.uav_pos)
    for i in range(n):
        rows.append([str(episode), str(state.step), "target", str(i),
                     _fmt(state.uav_target[i, 0]), _fmt(state.uav_target[i, 1]),
                     _fmt(0.0), _fmt(0.0)])
    return rows


def _step_rows(state: EpisodeState, episode: int, cfg: ScenarioConfig) -> List[list]:
    rows = []
    step = str(state.step)
    ep = str(episode)
    for i in range(cfg.n_uavs):
        v = cfg.uav_speed * state.uav_velocity(i)
        rows.append([ep, step, "uav", str(i),
                     _fmt(state.uav_pos[i, 0]), _fmt(state.uav_pos[i, 1]),
                     _fmt(v[0]), _fmt(v[1])])
    for j in range(len(state.obstacle_pos)):
        rows.append([ep, step, "obstacle", str(j),
                     _fmt(state.obstacle_pos[j, 0]), _fmt(state.obstacle_pos[j, 1]),
                     _fmt(state.obstacle_vel[j, 0]), _fmt(state.obstacle_vel[j, 1])])
    rows.append([ep, step, "center", "0",
                 _fmt(state.center_pos[0]), _fmt(state.center_pos[1]),
                 _fmt(state.center_vel[0]), _fmt(state.center_vel[1])])
    return rows


def run_policy_episode(env: SwarmEnv, agents: List[DdpgAgent],
                       computer: Optional[RewardComputer], seed: int,
                       explore: bool, episode: int = 0,
                       collect: bool = False) -> EpisodeStats:
    """Roll one episode under the agents' policies.

    With ``explore`` the agents act with their current noise, store every
    transition, and run gradient updates at their configured cadence;
    without it actions are deterministic and nothing is stored. With
    ``collect`` per-step trajectory and Q-value rows are accumulated for
    export. Decision timing wraps only the act calls.
    """
    cfg = env.config
    state, obs = env.reset(seed=seed)
    n = cfg.n_uavs
    update_every = agents[0].config.update_every if agents else 1
    swarm_ret = 0.0
    total_ret = 0.0
    min_d_u2o = np.inf
    min_d_u2u = np.inf
    decide_seconds = 0.0
    decide_calls = 0
    traj_rows: List[list] = []
    q_rows: List[list] = []
    if collect:
        traj_rows.extend(_trajectory_rows(state, episode))
        traj_rows.extend(_step_rows(state, episode, cfg))
    steps = 0
    while not state.done:
        t0 = time.perf_counter()
        if explore:
            actions = [agents[i].act(obs[i]) for i in range(n)]
        else:
            actions = [agents[i].act(obs[i], noise_scale=0.0) for i in range(n)]
        decide_seconds += time.perf_counter() - t0
        decide_calls += n
        if collect:
            for i in range(n):
                feat = agents[i].features(obs[i])
                q = float(agents[i].value(feat[None, :],
                                          np.array([[actions[i]]]))[0, 0])
                q_rows.append([str(episode), str(state.step), str(i), _fmt(q)])
        result = env.step(state, actions)
        steps += 1
        if explore:
            # bootstrap through the step cap: only real terminals mark done
            store_done = state.done and state.reason != "timeout"
            for i in range(n):
                agents[i].record(obs[i], actions[i], result.rewards[i],
                                 result.observations[i], store_done)
            if steps % update_every == 0:
                for ag in agents:
                    ag.train_step()
        if computer is not None and computer.last_breakdowns:
            swarm_ret += float(np.mean([b.formation * b.collision_free
                                        for b in computer.last_breakdowns]))
            total_ret += float(np.mean([b.total
                                        for b in computer.last_breakdowns]))
        min_d_u2o = min(min_d_u2o, result.info["min_d_u2o"])
        min_d_u2u = min(min_d_u2u, result.info["min_d_u2u"])
        if collect:
            traj_rows.extend(_step_rows(state, episode, cfg))
        obs = result.observations
    return EpisodeStats(
        seed=seed, reason=state.reason or "", steps=steps,
        success=state.reason == "success",
        swarming_return=swarm_ret, total_return=total_ret,
        min_d_u2o=float(min_d_u2o), min_d_u2u=float(min_d_u2u),
        energy=_episode_energy(state, cfg),
        decision_seconds=decide_seconds / max(decide_calls, 1),
        trajectory_rows=traj_rows, qvalue_rows=q_rows)


def run_baseline_episode(env: SwarmEnv, planner: ContourPlanner, seed: int,
                         episode: int = 0,
                         collect: bool = False) -> EpisodeStats:
    """Roll one episode under the contour-following planner.

    Decision timing is the planner's own per-call plan time, which covers
    exactly the joint plan step and no environment work.
    """
    cfg = env.config
    state, _ = env.reset(seed=seed)
    min_d_u2o = np.inf
    min_d_u2u = np.inf
    traj_rows: List[list] = []
    if collect:
        traj_rows.extend(_trajectory_rows(state, episode))
        traj_rows.extend(_step_rows(state, episode, cfg))
    steps = 0
    n_before = len(planner.plans)
    while not state.done:
        actions = planner(state)
        result = env.step(state, actions)
        steps += 1
        min_d_u2o = min(min_d_u2o, result.info["min_d_u2o"])
        min_d_u2u = min(min_d_u2u, result.info["min_d_u2u"])
        if collect:
            traj_rows.extend(_step_rows(state, episode, cfg))
    plan_seconds = [p.plan_seconds for p in planner.plans[n_before:]]
    return EpisodeStats(
        seed=seed, reason=state.reason or "", steps=steps,
        success=state.reason == "success",
        swarming_return=0.0, total_return=0.0,
        min_d_u2o=float(min_d_u2o), min_d_u2u=float(min_d_u2u),
        energy=_episode_energy(state, cfg),
        decision_seconds=float(np.mean(plan_seconds)) if plan_seconds else 0.0,
        trajectory_rows=traj_rows, qvalue_rows=[])


def _package_version() -> str:
    try:
        from importlib.metadata import version
        return version("swarmlab")
    except Exception:
        return "0+unknown"


def write_manifest(config: RunConfig, cfg: ScenarioConfig, out_dir: Path,
                   mode: str) -> Path:
    """Dump the fully resolved config of a run as JSON."""
    manifest = {
        "package": "swarmlab",
        "version": _package_version(),
        "mode": mode,
        "seed": config.seed,
        "episodes": config.episodes,
        "eval_episodes": config.eval_episodes,
        "bench_episodes": config.bench_episodes,
        "eval_interval": config.eval_interval,
        "val_interval": config.val_interval,
        "val_episodes": config.val_episodes,
        "train_max_steps": config.train_max_steps,
        "scenario_name": config.scenario,
        "scenario_file": config.scenario_file,
        "checkpoint": config.checkpoint,
        "scenario": _jsonable(asdict(cfg)),
        "agent": _jsonable(asdict(config.agent)),
        "baseline": _jsonable(asdict(config.baseline)),
    }
    path = out_dir / "run_manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _jsonable(d: Dict) -> Dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, tuple):
            v = list(v)
        elif isinstance(v, np.ndarray):
            v = v.tolist()
        out[k] = v
    return out


def _fresh_agents(cfg: ScenarioConfig, aconf: AgentConfig,
                  run_seed: int) -> List[DdpgAgent]:
    return [DdpgAgent(cfg.obs_dim, aconf, seed=stream_seed(run_seed, 1, i),
                      featurizer=ObsFeaturizer(cfg, uav_index=i))
            for i in range(cfg.n_uavs)]


def _load_agents(path, cfg: ScenarioConfig) -> Tuple[List[DdpgAgent], dict]:
    agents, saved_scenario, extra = load_checkpoint(path)
    if agents and agents[0].obs_dim != cfg.obs_dim:
        raise ValueError(
            f"checkpoint was trained for obs_dim {agents[0].obs_dim} but the "
            f"scenario produces obs_dim {cfg.obs_dim}")
    if len(agents) != cfg.n_uavs:
        raise ValueError(
            f"checkpoint holds {len(agents)} agents but the scenario has "
            f"{cfg.n_uavs} UAVs")
    # rebind the featurizers to the run's scenario (radii may legitimately
    # match even if the saved config differs in step caps or seeds)
    for i, ag in enumerate(agents):
        ag.featurizer = ObsFeaturizer(cfg, uav_index=i)
    return agents, extra


@dataclass
class TrainResult:
    records: List[MetricsRecord]
    final_checkpoint: str
    best_checkpoint: str
    best_val_success: Optional[float]
    val_history: List[Tuple[int, float]]
    metrics_path: str
    manifest_path: str


def _validate(env: SwarmEnv, agents: List[DdpgAgent], run_seed: int,
              n_episodes: int) -> float:
    """Noise-free success rate on the validation seed stream.

    Validation is a pure observer: deterministic actions draw nothing from
    the agents' noise streams, nothing is recorded or trained, and the
    episodes run in their own environment, so a run with validation stays
    bit-identical to the same run without it.
    """
    wins = 0
    for k in range(n_episodes):
        stats = run_policy_episode(
            env, agents, None, stream_seed(run_seed, 9, 40_000 + k),
            explore=False)
        wins += int(stats.success)
    return wins / n_episodes


def train(config: RunConfig) -> TrainResult:
    """Train per-UAV agents and log one MetricsRecord per episode.

    Writes ``metrics.csv`` (deterministic given config and seed),
    ``timings.csv`` (wall-clock, informational), ``run_manifest.json``,
    and checkpoints at every ``eval_interval`` plus a final one. When
    ``config.checkpoint`` is set, training resumes from the stored episode
    index and continues bit-identically with the uninterrupted run.

    Every ``val_interval`` episodes (and once more after the last episode)
    the current policy is scored noise-free on the validation stream, the
    result is appended to ``validation.csv``, and the policy is saved to
    ``checkpoint_best.npz`` whenever it beats the best score so far. The
    swarming reward measures heading alignment, not cross-track position,
    so the terminal miss distance of the final policy wanders even after
    the return has converged; picking the checkpoint by validation success
    decouples the kept policy from where that wander happened to end.

    A divergence abort (non-finite update) flushes everything written so
    far and re-raises, so the newest checkpoint on disk stays usable.
    """
    cfg = config.scenario_config()
    out_dir = Path(config.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    ckpt_dir = config.resolved_checkpoint_dir()
    os.makedirs(ckpt_dir, exist_ok=True)
    manifest_path = write_manifest(config, cfg, out_dir, "train")

    train_cfg = cfg if config.train_max_steps is None else replace(
        cfg, max_steps=config.train_max_steps)
    computer = RewardComputer(train_cfg, training=True, seed=config.seed)
    env = SwarmEnv(train_cfg, reward_fn=computer)
    # validation rolls out on the scenario's own step cap, like evaluation
    val_env = SwarmEnv(cfg)
    val_interval = (config.eval_interval if config.val_interval is None
                    else config.val_interval)

    if config.checkpoint is not None:
        agents, extra = _load_agents(config.checkpoint, cfg)
        start = int(extra.get("episode", 0))
        best_val = float(extra.get("val_best", -1.0))
        best_episode = int(extra.get("val_best_episode", -1))
    else:
        agents = _fresh_agents(cfg, config.agent, config.seed)
        start = 0
        best_val = -1.0
        best_episode = -1
    if start >= config.episodes:
        raise ValueError(
            f"checkpoint is already at episode {start}, nothing to train "
            f"(episodes={config.episodes})")

    best_path = ckpt_dir / "checkpoint_best.npz"
    records: List[MetricsRecord] = []
    val_history: List[Tuple[int, float]] = []
    metrics_log = _CsvLog(out_dir / "metrics.csv", METRICS_COLUMNS)
    timing_log = _CsvLog(out_dir / "timings.csv", TIMING_COLUMNS)
    val_log = _CsvLog(out_dir / "validation.csv", VALIDATION_COLUMNS)
    try:
        for e in range(start, config.episodes):
            stats = run_policy_episode(
                env, agents, computer, stream_seed(config.seed, 0, e),
                explore=True, episode=e)
            for ag in agents:
                ag.decay_noise()
            rec = MetricsRecord(
                episode=e, swarming_return=stats.swarming_return,
                total_return=stats.total_return, success=stats.success,
                min_d_u2o=stats.min_d_u2o, min_d_u2u=stats.min_d_u2u,
                energy=stats.energy,
                decision_ms=stats.decision_seconds * 1e3)
            records.append(rec)
            metrics_log.write(rec.metrics_row())
            timing_log.write([str(e), _fmt(rec.decision_ms)])
            done_count = e + 1
            if done_count % val_interval == 0 or done_count == config.episodes:
                score = _validate(val_env, agents, config.seed,
                                  config.val_episodes)
                val_history.append((done_count, score))
                val_log.write([str(done_count), _fmt(score)])
                if score > best_val:
                    best_val = score
                    best_episode = done_count
                    save_checkpoint(best_path, agents, cfg,
                                    extra={"episode": done_count,
                                           "run_seed": config.seed,
                                           "val_success": score})
            if done_count % config.eval_interval == 0 and done_count < config.episodes:
                save_checkpoint(ckpt_dir / f"checkpoint_ep{done_count:05d}.npz",
                                agents, cfg,
                                extra={"episode": done_count,
                                       "run_seed": config.seed,
                                       "val_best": best_val,
                                       "val_best_episode": best_episode})
    finally:
        metrics_log.close()
        timing_log.close()
        val_log.close()
    final_path = ckpt_dir / "checkpoint_final.npz"
    save_checkpoint(final_path, agents, cfg,
                    extra={"episode": config.episodes,
                           "run_seed": config.seed,
                           "val_best": best_val,
                           "val_best_episode": best_episode})
    has_best = best_episode >= 0 and best_path.exists()
    return TrainResult(records=records, final_checkpoint=str(final_path),
                       best_checkpoint=str(best_path if has_best
                                           else final_path),
                       best_val_success=best_val if has_best else None,
                       val_history=val_history,
                       metrics_path=str(out_dir / "metrics.csv"),
                       manifest_path=str(manifest_path))


@dataclass
class EvalResult:
    records: List[MetricsRecord]
    success_rate: float
    summary: Dict[str, Tuple[float, float]]
    metrics_path: str


def evaluate(config: RunConfig,
             checkpoint: Optional[str] = None) -> EvalResult:
    """Noise-free rollouts of a trained checkpoint with full data export.

    Writes per-episode metrics, per-step trajectories and Q values, the
    timing file, and a summary of mean and std for reaction time, energy,
    and both minimum separations. Episode seeds come from the evaluation
    stream so results never overlap the training episodes.
    """
    cfg = config.scenario_config()
    out_dir = Path(config.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, cfg, out_dir, "eval")
    ckpt = checkpoint if checkpoint is not None else config.checkpoint
    if ckpt is None:
        raise ValueError("evaluate needs a checkpoint")
    agents, _ = _load_agents(ckpt, cfg)
    computer = RewardComputer(cfg, training=False, seed=config.seed)
    env = SwarmEnv(cfg, reward_fn=computer)

    records: List[MetricsRecord] = []
    traj_rows: List[list] = []
    q_rows: List[list] = []
    for k in range(config.eval_episodes):
        stats = run_policy_episode(
            env, agents, computer, stream_seed(config.seed, 9, 10_000 + k),
            explore=False, episode=k, collect=True)
        records.append(MetricsRecord(
            episode=k, swarming_return=stats.swarming_return,
            total_return=stats.total_return, success=stats.success,
            min_d_u2o=stats.min_d_u2o, min_d_u2u=stats.min_d_u2u,
            energy=stats.energy, decision_ms=stats.decision_seconds * 1e3))
        traj_rows.extend(stats.trajectory_rows)
        q_rows.extend(stats.qvalue_rows)

    _write_csv(out_dir / "eval_metrics.csv", METRICS_COLUMNS,
               (r.metrics_row() for r in records))
    _write_csv(out_dir / "eval_timings.csv", TIMING_COLUMNS,
               ([str(r.episode), _fmt(r.decision_ms)] for r in records))
    _write_csv(out_dir / "trajectories.csv", TRAJECTORY_COLUMNS, traj_rows)
    _write_csv(out_dir / "qvalues.csv", QVALUE_COLUMNS, q_rows)

    summary = _eval_summary(records)
    _write_csv(out_dir / "eval_summary.csv", SUMMARY_COLUMNS,
               ([name, _fmt(m), _fmt(s)] for name, (m, s) in summary.items()))
    success_rate = float(np.mean([r.success for r in records]))
    return EvalResult(records=records, success_rate=success_rate,
                      summary=summary,
                      metrics_path=str(out_dir / "eval_metrics.csv"))


def _eval_summary(records: List[MetricsRecord]) -> Dict[str, Tuple[float, float]]:
    cols = {
        "reaction_seconds": np.array([r.decision_ms * 1e-3 for r in records]),
        "energy": np.array([r.energy_mean for r in records]),
        "min_d_u2o": np.array([r.min_d_u2o for r in records]),
        "min_d_u2u": np.array([r.min_d_u2u for r in records]),
    }
    out = {}
    for name, v in cols.items():
        if np.all(np.isfinite(v)):
            out[name] = (float(np.mean(v)), float(np.std(v)))
        else:
            # infinite entries (e.g. min_d_u2o with no obstacles) have an
            # infinite mean and no meaningful spread
            out[name] = (float(np.mean(v)), float("nan"))
    return out


@dataclass
class BenchResult:
    policy_records: List[EpisodeStats]
    baseline_records: List[EpisodeStats]
    summary_rows: List[list]
    episodes_path: str
    summary_path: str


def bench(config: RunConfig, checkpoint: Optional[str] = None) -> BenchResult:
    """Matched-seed comparison of the trained policy and the planner.

    Both runners replay the same episode seeds. The summary table has one
    row per runner (reaction time mean and std, energy mean and std,
    minimum separations over all episodes) and an improvement row: each
    improvement cell is (baseline - policy) / baseline * 100.
    """
    cfg = config.scenario_config()
    out_dir = Path(config.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, cfg, out_dir, "bench")
    ckpt = checkpoint if checkpoint is not None else config.checkpoint
    if ckpt is None:
        raise ValueError("bench needs a checkpoint")
    agents, _ = _load_agents(ckpt, cfg)
    policy_env = SwarmEnv(cfg)
    baseline_env = SwarmEnv(cfg)

    episode_rows: List[list] = []
    plan_rows: List[list] = []
    policy_stats: List[EpisodeStats] = []
    baseline_stats: List[EpisodeStats] = []
    for k in range(config.bench_episodes):
        seed = stream_seed(config.seed, 9, 20_000 + k)
        ps = run_policy_episode(policy_env, agents, None, seed,
                                explore=False, episode=k)
        planner = ContourPlanner(cfg, replace(config.baseline, seed=seed))
        bs = run_baseline_episode(baseline_env, planner, seed, episode=k)
        policy_stats.append(ps)
        baseline_stats.append(bs)
        for name, st in (("policy", ps), ("baseline", bs)):
            episode_rows.append([name, str(k), str(seed), str(int(st.success)),
                                 _fmt(st.min_d_u2o), _fmt(st.min_d_u2u),
                                 _fmt(float(np.mean(st.energy))),
                                 _fmt(st.decision_seconds)])
        for step, plan in enumerate(planner.plans):
            plan_rows.append([str(k), str(step), _fmt(plan.plan_seconds)])

    _write_csv(out_dir / "bench_episodes.csv", BENCH_EPISODE_COLUMNS,
               episode_rows)
    _write_csv(out_dir / "baseline_timing.csv", BASELINE_TIMING_COLUMNS,
               plan_rows)

    def runner_row(name: str, stats: List[EpisodeStats]) -> list:
        react = np.array([s.decision_seconds for s in stats])
        en = np.array([float(np.mean(s.energy)) for s in stats])
        return [name, float(np.mean(react)), float(np.std(react)),
                float(np.mean(en)), float(np.std(en)),
                float(np.min([s.min_d_u2o for s in stats])),
                float(np.min([s.min_d_u2u for s in stats]))]

    pol = runner_row("policy", policy_stats)
    base = runner_row("baseline", baseline_stats)

    def improvement(b: float, p: float) -> float:
        return (b - p) / b * 100.0 if b != 0.0 else 0.0

    imp = ["improvement", improvement(base[1], pol[1]), "",
           improvement(base[3], pol[3]), "",
           improvement(base[5], pol[5]), improvement(base[6], pol[6])]
    summary_rows = []
    for row in (pol, base, imp):
        summary_rows.append([row[0]] + [_fmt(v) if v != "" else ""
                                        for v in row[1:]])
    _write_csv(out_dir / "bench_summary.csv", BENCH_SUMMARY_COLUMNS,
               summary_rows)
    return BenchResult(policy_records=policy_stats,
                       baseline_records=baseline_stats,
                       summary_rows=summary_rows,
                       episodes_path=str(out_dir / "bench_episodes.csv"),
                       summary_path=str(out_dir / "bench_summary.csv"))


def export_field(config: RunConfig, resolution: float = 5.0) -> str:
    """Sample the potential field of a freshly reset scene onto a grid.

    Writes ``field_grid.csv`` with one (x, y, phi) row per grid node,
    row-major over y then x, suitable for heatmaps and contour overlays.
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    cfg = config.scenario_config()
    out_dir = Path(config.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(config, cfg, out_dir, "export")
    env = SwarmEnv(cfg)
    state, _ = env.reset(seed=stream_seed(config.seed, 9, 30_000))
    fld = build_field(state, cfg)
    xs = np.arange(0.0, cfg.arena_width + resolution / 2.0, resolution)
    ys = np.arange(0.0, cfg.arena_length + resolution / 2.0, resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    phi = phi_total(pts, fld)
    rows = ([_fmt(p[0]), _fmt(p[1]), _fmt(v)] for p, v in zip(pts, phi))
    path = out_dir / "field_grid.csv"
    _write_csv(path, FIELD_GRID_COLUMNS, rows)
    return str(path)
