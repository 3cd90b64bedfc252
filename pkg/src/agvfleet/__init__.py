"""Decentralized multi-AGV task allocation with potential-field reward shaping.

Subsystems:

* :mod:`agvfleet.world` — continuous particle world, coverage matching.
* :mod:`agvfleet.potential` — grid potential field (Jacobi + direct solve).
* :mod:`agvfleet.rewards` — shaping mechanisms (potential field + baselines).
* :mod:`agvfleet.nn` — dense/recurrent networks with exact gradients.
* :mod:`agvfleet.marl` — MADDPG / BiCNet learners, replay, training loop.
* :mod:`agvfleet.harness` — evaluation metrics, experiment runs, CLI.
"""

from .config import ExperimentConfig, load_config, save_config
from .env import TaskEnv
from .rewards import RewardKind
from .world import ScenarioConfig, WorldState

__all__ = [
    "ExperimentConfig",
    "load_config",
    "save_config",
    "TaskEnv",
    "RewardKind",
    "ScenarioConfig",
    "WorldState",
]

__version__ = "0.1.0"
