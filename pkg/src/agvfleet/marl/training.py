"""Training loop: roll episodes, fill the replay buffer, one update per step."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..env import TaskEnv
from ..potential import FieldConfig
from ..rewards import RewardKind
from ..world import (
    STREAM_NET_INIT,
    STREAM_NOISE,
    STREAM_REPLAY,
    ScenarioConfig,
    observation_size,
)
from .bicnet import BicnetLearner
from .config import TrainConfig
from .explore import ExplorationSchedule
from .maddpg import MaddpgLearner
from .replay import ReplayBuffer, Transition

__all__ = [
    "TrainingDiverged",
    "EpisodeLog",
    "TrainResult",
    "build_learner",
    "train",
    "write_training_log",
    "TRAIN_LOG_COLUMNS",
]

TRAIN_LOG_COLUMNS = (
    "episode",
    "mean_return_per_agent",
    "response_rate",
    "collisions",
    "sigma",
    "wall_ms",
)


class TrainingDiverged(RuntimeError):
    """A loss went non-finite; carries the diagnostic context."""

    def __init__(self, message: str, diagnostics: dict) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class EpisodeLog:
    episode: int
    mean_return_per_agent: float
    response_rate: float
    collisions: int
    sigma: float
    wall_ms: float

    def row(self) -> list:
        return [
            self.episode,
            repr(self.mean_return_per_agent),
            repr(self.response_rate),
            self.collisions,
            repr(self.sigma),
            f"{self.wall_ms:.3f}",
        ]


@dataclass
class TrainResult:
    learner: MaddpgLearner | BicnetLearner
    log: list[EpisodeLog]
    seed: int
    episodes: int


def build_learner(
    algorithm: str,
    scenario: ScenarioConfig,
    train_cfg: TrainConfig,
    rng: np.random.Generator,
) -> MaddpgLearner | BicnetLearner:
    obs_width = observation_size(scenario.n_agents, scenario.n_targets)
    if algorithm == "maddpg":
        return MaddpgLearner(scenario.n_agents, obs_width, 2, train_cfg, rng)
    if algorithm == "bicnet":
        return BicnetLearner(scenario.n_agents, obs_width, 2, train_cfg, rng)
    raise ValueError(f"unknown algorithm {algorithm!r} (expected 'maddpg' or 'bicnet')")


def train(
    scenario: ScenarioConfig,
    algorithm: str,
    reward_kind: RewardKind,
    episodes: int,
    seed: int,
    field_config: FieldConfig | None = None,
    train_cfg: TrainConfig | None = None,
    checkpoint_dir: str | Path | None = None,
    checkpoint_every: int = 0,
    on_episode: Callable[[EpisodeLog], None] | None = None,
) -> TrainResult:
    """Train one model; fully deterministic given (scenario, seed, budget).

    Episode worlds, network init, exploration noise, and replay sampling
    each draw from their own stream derived from ``seed``. After the warmup
    fill, every environment step triggers exactly one learner update. A
    non-finite loss aborts with a diagnostic dump (written next to the
    checkpoint when a directory is given).
    """
    train_cfg = train_cfg or TrainConfig()
    env = TaskEnv(scenario, reward_kind, field_config)
    learner = build_learner(
        algorithm, scenario, train_cfg, np.random.default_rng((seed, STREAM_NET_INIT, 0))
    )
    noise_rng = np.random.default_rng((seed, STREAM_NOISE, 0))
    replay_rng = np.random.default_rng((seed, STREAM_REPLAY, 0))
    buffer = ReplayBuffer(train_cfg.buffer_capacity)
    schedule = ExplorationSchedule(
        train_cfg.sigma_start, train_cfg.sigma_decay, train_cfg.sigma_min
    )

    log: list[EpisodeLog] = []
    for episode in range(episodes):
        t0 = time.perf_counter()
        obs = env.reset(episode, seed)
        sigma = schedule.sigma(episode)
        ep_return = np.zeros(scenario.n_agents)
        collisions = 0
        outcome = None
        for _ in range(scenario.max_steps):
            actions = learner.select_actions(obs, sigma, noise_rng)
            next_obs, outcome = env.step_env(actions)
            buffer.push(
                Transition(obs, actions, outcome.rewards.copy(), next_obs, outcome.terminal)
            )
            ep_return += outcome.rewards
            collisions += len(outcome.collisions)
            if len(buffer) >= max(train_cfg.warmup_transitions, train_cfg.batch_size):
                stats = learner.update(buffer.sample(train_cfg.batch_size, replay_rng))
                _check_finite(stats, episode, outcome, checkpoint_dir)
            obs = next_obs
            if outcome.done:
                break
        assert outcome is not None
        entry = EpisodeLog(
            episode=episode,
            mean_return_per_agent=float(ep_return.mean()),
            response_rate=outcome.matched_count / scenario.n_targets,
            collisions=collisions,
            sigma=sigma,
            wall_ms=(time.perf_counter() - t0) * 1e3,
        )
        log.append(entry)
        if on_episode is not None:
            on_episode(entry)
        if (
            checkpoint_dir is not None
            and checkpoint_every > 0
            and (episode + 1) % checkpoint_every == 0
        ):
            _save(learner, checkpoint_dir, scenario, reward_kind, seed, episode + 1)

    if checkpoint_dir is not None:
        _save(learner, checkpoint_dir, scenario, reward_kind, seed, episodes)
    return TrainResult(learner=learner, log=log, seed=seed, episodes=episodes)


def _check_finite(stats: dict, episode: int, outcome, checkpoint_dir) -> None:
    if all(math.isfinite(v) for v in stats.values()):
        return
    diagnostics = {
        "episode": episode,
        "step": int(outcome.world.step),
        "losses": {k: repr(v) for k, v in stats.items()},
        "agent_positions": outcome.world.positions.tolist(),
    }
    if checkpoint_dir is not None:
        path = Path(checkpoint_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "divergence_dump.json").write_text(json.dumps(diagnostics, indent=2))
    raise TrainingDiverged(
        f"non-finite loss at episode {episode}: {stats}", diagnostics
    )


def _save(learner, checkpoint_dir, scenario, reward_kind, seed, episodes_done) -> None:
    learner.save(
        checkpoint_dir,
        metadata={
            "reward_kind": reward_kind.value,
            "seed": seed,
            "episodes_trained": episodes_done,
            "scenario": {
                "n_agents": scenario.n_agents,
                "n_targets": scenario.n_targets,
            },
        },
    )


def write_training_log(log: list[EpisodeLog], path: str | Path) -> None:
    """CSV with one row per episode; wall_ms is timing-only (not reproducible)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAIN_LOG_COLUMNS)
        for entry in log:
            writer.writerow(entry.row())
