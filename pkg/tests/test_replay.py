"""Replay buffer: FIFO eviction, sampling contract, uniformity."""

import numpy as np
import pytest

from agvfleet.marl import ReplayBuffer, Transition


def make_transition(value, n=2, d_o=4):
    return Transition(
        obs=np.full((n, d_o), value, dtype=np.float64),
        actions=np.full((n, 2), value, dtype=np.float64),
        rewards=np.full(n, value, dtype=np.float64),
        next_obs=np.full((n, d_o), value + 0.5, dtype=np.float64),
        terminal=bool(value % 2),
    )


class TestReplayBuffer:
    def test_sampling_before_fill_rejected(self):
        buf = ReplayBuffer(capacity=10)
        buf.push(make_transition(1))
        with pytest.raises(ValueError):
            buf.sample(2, np.random.default_rng(0))

    def test_fifo_eviction(self):
        buf = ReplayBuffer(capacity=3)
        for v in range(5):
            buf.push(make_transition(v))
        assert len(buf) == 3
        rng = np.random.default_rng(0)
        seen = set()
        for _ in range(30):
            seen |= set(np.unique(buf.sample(3, rng).obs))
        assert seen == {2.0, 3.0, 4.0}  # 0 and 1 evicted

    def test_batch_shapes_and_dtype(self):
        buf = ReplayBuffer(capacity=8)
        for v in range(8):
            buf.push(make_transition(v, n=3, d_o=5))
        batch = buf.sample(6, np.random.default_rng(1))
        assert batch.obs.shape == (6, 3, 5)
        assert batch.actions.shape == (6, 3, 2)
        assert batch.rewards.shape == (6, 3)
        assert batch.next_obs.shape == (6, 3, 5)
        assert batch.terminal.shape == (6,)
        assert batch.obs.dtype == np.float64

    def test_sampling_deterministic_given_rng(self):
        buf = ReplayBuffer(capacity=16)
        for v in range(16):
            buf.push(make_transition(v))
        a = buf.sample(8, np.random.default_rng(42))
        b = buf.sample(8, np.random.default_rng(42))
        assert np.array_equal(a.obs, b.obs)

    def test_selection_frequency_uniform_within_three_sigma(self):
        slots = 50
        buf = ReplayBuffer(capacity=slots)
        for v in range(slots):
            buf.push(make_transition(v))
        rng = np.random.default_rng(7)
        draws = 200 * slots
        counts = np.zeros(slots)
        for _ in range(draws // slots):
            batch = buf.sample(slots, rng)
            values, freq = np.unique(batch.obs[:, 0, 0].astype(int), return_counts=True)
            counts[values] += freq
        p = 1.0 / slots
        sigma = np.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(counts - draws * p) <= 3 * sigma)
