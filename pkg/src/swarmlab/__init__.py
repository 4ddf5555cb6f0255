"""2D UAV-swarm collision-avoidance laboratory.

Potential fields shaped by moving obstacles and the swarm's virtual
center, a contour-based trajectory cost, PSO constraint repair, a Markov
game environment, per-UAV DDPG agents trained with hand-rolled
backpropagation, a contour-following planner as the classical baseline,
and a reproducible run harness with CSV export.
"""

from .agent import (
    AgentConfig,
    DdpgAgent,
    DivergenceError,
    ObsFeaturizer,
    PolicyNet,
    ReplayBuffer,
    ValueNet,
    load_checkpoint,
    save_checkpoint,
    soft_update,
    td_targets,
)
from .baseline import BaselineParams, ContourPlan, ContourPlanner, plan_step
from .env import (
    MAX_TURN,
    TRAJECTORY_COLUMNS,
    EpisodeState,
    Observation,
    ScenarioConfig,
    StepResult,
    SwarmEnv,
)
from .fields import (
    ObstacleSpec,
    PotentialField,
    SwarmFieldSpec,
    grad_phi,
    grad_phi_timed,
    phi_obstacle,
    phi_swarm,
    phi_total,
)
from .harness import (
    BENCH_EPISODE_COLUMNS,
    BENCH_SUMMARY_COLUMNS,
    FIELD_GRID_COLUMNS,
    METRICS_COLUMNS,
    QVALUE_COLUMNS,
    SUMMARY_COLUMNS,
    TIMING_COLUMNS,
    BenchResult,
    EvalResult,
    MetricsRecord,
    RunConfig,
    TrainResult,
    bench,
    evaluate,
    export_field,
    stream_seed,
    train,
)
from .pso import (
    InfeasibleAdjustmentError,
    PsoParams,
    PsoResult,
    adjust_uav_positions,
    optimize,
)
from .reward import (
    RewardBreakdown,
    RewardComputer,
    build_field,
    collision_indicator,
    compute_reward,
    formation_reward,
)
from .scenarios import SCENARIOS, get_scenario
from .trajectory import Trajectory, contour_cost, energy, resample_uniform

try:
    from importlib.metadata import version as _version
    __version__ = _version("swarmlab")
except Exception:
    __version__ = "0+unknown"

__all__ = [
    "AgentConfig", "DdpgAgent", "DivergenceError", "ObsFeaturizer",
    "PolicyNet", "ReplayBuffer", "ValueNet", "load_checkpoint",
    "save_checkpoint", "soft_update", "td_targets",
    "BaselineParams", "ContourPlan", "ContourPlanner", "plan_step",
    "MAX_TURN", "TRAJECTORY_COLUMNS", "EpisodeState", "Observation",
    "ScenarioConfig", "StepResult", "SwarmEnv",
    "ObstacleSpec", "PotentialField", "SwarmFieldSpec", "grad_phi",
    "grad_phi_timed", "phi_obstacle", "phi_swarm", "phi_total",
    "BENCH_EPISODE_COLUMNS", "BENCH_SUMMARY_COLUMNS", "FIELD_GRID_COLUMNS",
    "METRICS_COLUMNS", "QVALUE_COLUMNS", "SUMMARY_COLUMNS", "TIMING_COLUMNS",
    "BenchResult", "EvalResult", "MetricsRecord", "RunConfig", "TrainResult",
    "bench", "evaluate", "export_field", "stream_seed", "train",
    "InfeasibleAdjustmentError", "PsoParams", "PsoResult",
    "adjust_uav_positions", "optimize",
    "RewardBreakdown", "RewardComputer", "build_field",
    "collision_indicator", "compute_reward", "formation_reward",
    "SCENARIOS", "get_scenario",
    "Trajectory", "contour_cost", "energy", "resample_uniform",
]
