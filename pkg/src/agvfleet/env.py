"""Gym-style binding of the world dynamics to a reward mechanism."""

from __future__ import annotations

import numpy as np

from .potential import FieldConfig
from .rewards import RewardEngine, RewardKind
from .world import (
    STREAM_SPAWN,
    ScenarioConfig,
    StepOutcome,
    WorldState,
    observe_all,
    spawn_world,
    step,
)

__all__ = ["TaskEnv"]


class TaskEnv:
    """One scenario instance: spawn, step, and reward in lockstep.

    ``reset`` spawns a fresh world from (seed, episode) so distinct episodes
    get independent but reproducible layouts. ``step`` advances the physics,
    fills the outcome's rewards from the configured mechanism, and reports
    episode termination (full coverage or step limit).
    """

    def __init__(
        self,
        scenario: ScenarioConfig,
        reward_kind: RewardKind,
        field_config: FieldConfig | None = None,
    ) -> None:
        self.scenario = scenario
        self.rewards = RewardEngine(reward_kind, scenario, field_config)
        self.world: WorldState | None = None

    def reset(self, episode: int = 0, seed: int | None = None) -> np.ndarray:
        """Spawn episode ``episode``; returns stacked observations (n, obs)."""
        base = self.scenario.seed if seed is None else seed
        rng = np.random.default_rng((base, STREAM_SPAWN, episode))
        self.world = spawn_world(self.scenario, rng=rng)
        self.rewards.reset()
        return observe_all(self.world)

    def step_env(self, actions: np.ndarray) -> tuple[np.ndarray, StepOutcome]:
        """Advance one tick; returns (next observations, outcome with rewards filled)."""
        if self.world is None:
            raise RuntimeError("reset() must be called before stepping")
        outcome = step(self.scenario, self.world, actions)
        breakdowns = self.rewards.compute(outcome.world)
        outcome.rewards[:] = [b.total for b in breakdowns]
        self.world = outcome.world
        return observe_all(outcome.world), outcome
