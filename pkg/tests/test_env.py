"""TaskEnv binding: reward filling, episode independence, warm-start reset."""

import numpy as np
import pytest

from agvfleet.env import TaskEnv
from agvfleet.potential import FieldConfig
from agvfleet.rewards import RewardKind, compute_rewards
from agvfleet.world import ScenarioConfig


class TestTaskEnv:
    def test_reset_returns_stacked_observations(self):
        env = TaskEnv(ScenarioConfig(seed=3), RewardKind.GREEDY)
        obs = env.reset(episode=0)
        assert obs.shape == (3, 14)

    def test_distinct_episodes_distinct_worlds(self):
        env = TaskEnv(ScenarioConfig(seed=3), RewardKind.GREEDY)
        env.reset(episode=0)
        first = env.world.positions.copy()
        env.reset(episode=1)
        assert not np.array_equal(env.world.positions, first)
        env.reset(episode=0)
        assert np.array_equal(env.world.positions, first)

    def test_step_fills_rewards_from_mechanism(self):
        scenario = ScenarioConfig(seed=4)
        env = TaskEnv(scenario, RewardKind.MINIDIST)
        env.reset()
        actions = np.full((3, 2), 0.3)
        _, outcome = env.step_env(actions)
        expected = [b.total for b in compute_rewards(RewardKind.MINIDIST, outcome.world, scenario)]
        assert outcome.rewards.tolist() == pytest.approx(expected, abs=0)

    def test_step_before_reset_rejected(self):
        env = TaskEnv(ScenarioConfig(seed=1), RewardKind.GREEDY)
        with pytest.raises(RuntimeError):
            env.step_env(np.zeros((3, 2)))

    def test_reset_clears_field_cache(self):
        env = TaskEnv(
            ScenarioConfig(seed=2), RewardKind.IPF,
            FieldConfig(grid_cells=8, max_iters=100),
        )
        env.reset(episode=0)
        env.step_env(np.zeros((3, 2)))
        assert any(f is not None for f in env.rewards.fields)
        env.reset(episode=1)
        assert all(f is None for f in env.rewards.fields)

    def test_ipf_rewards_bounded_by_field_range(self):
        scenario = ScenarioConfig(seed=6)
        env = TaskEnv(scenario, RewardKind.IPF, FieldConfig(grid_cells=16))
        env.reset()
        rng = np.random.default_rng(0)
        for _ in range(10):
            _, outcome = env.step_env(rng.uniform(-1, 1, (3, 2)))
            # r_ipf in [-3, 5]; r_g <= 0; r_c <= 0, so total <= 5
            assert np.all(outcome.rewards <= 5.0)
