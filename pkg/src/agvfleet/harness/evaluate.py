"""Greedy-policy evaluation: response rate, reward metric, timing, preferences."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..marl.bicnet import BicnetLearner
from ..marl.maddpg import MaddpgLearner
from ..rewards import shaped_metric_reward
from ..world import (
    STREAM_EVAL,
    ScenarioConfig,
    arrival_time,
    coverage_matching,
    observation_size,
    observe_all,
    spawn_world,
    step,
)

__all__ = [
    "EpisodeRecord",
    "EvalReport",
    "rollout_episode",
    "evaluate",
    "load_checkpoint",
    "DimensionMismatch",
]

SCHEMA_VERSION = 1


class DimensionMismatch(ValueError):
    """Checkpoint dimensions do not fit the requested scenario."""


@dataclass
class EpisodeRecord:
    """Everything metrics need from one evaluation episode."""

    matched_counts: list[int]
    final_matched: int
    final_assignment: dict[int, int]
    metric_reward_total: float
    collisions: int
    steps: int
    trajectory: list[tuple] = field(default_factory=list)


def rollout_episode(
    scenario: ScenarioConfig,
    policy,
    rng: np.random.Generator,
    record_trajectory: bool = False,
) -> EpisodeRecord:
    """Run one noise-free episode under ``policy(obs_stack) -> actions``.

    The per-step metric reward is the shaped global term minus the number of
    colliding pairs, independent of the training reward mechanism.
    """
    world = spawn_world(scenario, rng=rng)
    matched0, _ = coverage_matching(world, scenario.reach_radius)
    matched_counts = [matched0]
    total_metric = 0.0
    collisions = 0
    trajectory: list[tuple] = []
    outcome = None
    for _ in range(scenario.max_steps):
        actions = policy(observe_all(world))
        outcome = step(scenario, world, actions)
        world = outcome.world
        matched_counts.append(outcome.matched_count)
        total_metric += shaped_metric_reward(world, len(outcome.collisions))
        collisions += len(outcome.collisions)
        if record_trajectory:
            for i in range(world.n_agents):
                trajectory.append(
                    (
                        world.step,
                        i,
                        world.positions[i, 0],
                        world.positions[i, 1],
                        world.velocities[i, 0],
                        world.velocities[i, 1],
                        outcome.rewards[i],
                    )
                )
        if outcome.done:
            break
    assert outcome is not None
    return EpisodeRecord(
        matched_counts=matched_counts,
        final_matched=outcome.matched_count,
        final_assignment=dict(outcome.assignment),
        metric_reward_total=total_metric,
        collisions=collisions,
        steps=world.step,
        trajectory=trajectory,
    )


@dataclass
class EvalReport:
    """Aggregated evaluation metrics, serializable as versioned JSON."""

    label: str
    n_agents: int
    n_targets: int
    eval_episodes: int
    seed: int
    average_task_response_rate: float
    average_reward: float
    average_time: float | None
    completion_histogram: list[int]
    preference_matrix: list[list[int]]
    per_agent_concentration: list[float]
    mean_concentration: float
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "label": self.label,
            "n_agents": self.n_agents,
            "n_targets": self.n_targets,
            "eval_episodes": self.eval_episodes,
            "seed": self.seed,
            "average_task_response_rate": self.average_task_response_rate,
            "average_reward": self.average_reward,
            "average_time": self.average_time,
            "completion_histogram": self.completion_histogram,
            "preference_matrix": self.preference_matrix,
            "per_agent_concentration": self.per_agent_concentration,
            "mean_concentration": self.mean_concentration,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        data = json.loads(text)
        version = data.pop("schema_version", None)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        return cls(schema_version=version, **data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "EvalReport":
        return cls.from_json(Path(path).read_text())


def _concentrations(preference: np.ndarray) -> list[float]:
    out = []
    for row in preference:
        total = row.sum()
        out.append(float(row.max() / total) if total > 0 else float("nan"))
    return out


def evaluate(
    learner: MaddpgLearner | BicnetLearner,
    scenario: ScenarioConfig,
    eval_episodes: int = 300,
    seed: int = 0,
    label: str = "",
) -> EvalReport:
    """Run noise-free episodes and aggregate the scenario metrics.

    A task counts as completed when it is matched in the end-of-episode
    coverage matching; average_time is the mean first-full-matching step
    over episodes that achieve full coverage; average_reward is the mean
    over episodes of the per-episode summed metric reward.
    """
    _check_dimensions(learner, scenario)
    n = scenario.n_targets
    histogram = np.zeros(n + 1, dtype=np.int64)
    preference = np.zeros((scenario.n_agents, n), dtype=np.int64)
    total_matched = 0
    reward_totals = []
    arrivals = []
    policy = lambda obs: learner.select_actions(obs, 0.0)  # noqa: E731
    for episode in range(eval_episodes):
        rng = np.random.default_rng((seed, STREAM_EVAL, episode))
        record = rollout_episode(scenario, policy, rng)
        total_matched += record.final_matched
        histogram[record.final_matched] += 1
        for target_j, agent_i in record.final_assignment.items():
            preference[agent_i, target_j] += 1
        reward_totals.append(record.metric_reward_total)
        arrived = arrival_time(record.matched_counts, n)
        if arrived is not None:
            arrivals.append(arrived)
    per_agent = _concentrations(preference)
    finite = [c for c in per_agent if not np.isnan(c)]
    return EvalReport(
        label=label,
        n_agents=scenario.n_agents,
        n_targets=n,
        eval_episodes=eval_episodes,
        seed=seed,
        average_task_response_rate=total_matched / (eval_episodes * n),
        average_reward=float(np.mean(reward_totals)),
        average_time=float(np.mean(arrivals)) if arrivals else None,
        completion_histogram=histogram.tolist(),
        preference_matrix=preference.tolist(),
        per_agent_concentration=per_agent,
        mean_concentration=float(np.mean(finite)) if finite else float("nan"),
    )


def _check_dimensions(learner, scenario: ScenarioConfig) -> None:
    expected = observation_size(scenario.n_agents, scenario.n_targets)
    if learner.n_agents != scenario.n_agents or learner.obs_width != expected:
        raise DimensionMismatch(
            f"checkpoint is for n_agents={learner.n_agents}, obs_width="
            f"{learner.obs_width}; scenario needs n_agents={scenario.n_agents}, "
            f"obs_width={expected}"
        )


def load_checkpoint(directory: str | Path) -> MaddpgLearner | BicnetLearner:
    """Rebuild the learner recorded in a checkpoint directory's manifest."""
    manifest = json.loads((Path(directory) / "manifest.json").read_text())
    algorithm = manifest.get("algorithm")
    if algorithm == "maddpg":
        return MaddpgLearner.load(directory)
    if algorithm == "bicnet":
        return BicnetLearner.load(directory)
    raise ValueError(f"unknown algorithm {algorithm!r} in manifest")
