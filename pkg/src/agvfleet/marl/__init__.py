"""Multi-agent actor-critic training: learners, replay, exploration, loop."""

from .bicnet import BicnetLearner, bicnet_update
from .config import TrainConfig
from .explore import ExplorationSchedule
from .maddpg import MaddpgLearner, maddpg_actor_update, maddpg_critic_update
from .replay import ReplayBuffer, Transition, TransitionBatch
from .training import (
    EpisodeLog,
    TrainResult,
    TrainingDiverged,
    build_learner,
    train,
    write_training_log,
)

__all__ = [
    "BicnetLearner",
    "bicnet_update",
    "TrainConfig",
    "ExplorationSchedule",
    "MaddpgLearner",
    "maddpg_actor_update",
    "maddpg_critic_update",
    "ReplayBuffer",
    "Transition",
    "TransitionBatch",
    "EpisodeLog",
    "TrainResult",
    "TrainingDiverged",
    "build_learner",
    "train",
    "write_training_log",
]
