"""Experiment harness: evaluation metrics, artifact emission, comparison, CLI."""

from .compare import ComparisonTable, compare
from .evaluate import DimensionMismatch, EvalReport, evaluate, load_checkpoint, rollout_episode
from .experiment import ExperimentSpec, run_experiment, run_reward_sweep

__all__ = [
    "ComparisonTable",
    "compare",
    "DimensionMismatch",
    "EvalReport",
    "evaluate",
    "load_checkpoint",
    "rollout_episode",
    "ExperimentSpec",
    "run_experiment",
    "run_reward_sweep",
]
