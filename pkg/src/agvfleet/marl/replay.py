"""Experience replay: FIFO ring of joint transitions with uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Transition", "TransitionBatch", "ReplayBuffer"]


@dataclass(frozen=True)
class Transition:
    """One joint experience record.

    ``obs`` and ``next_obs`` have shape (n_agents, obs_width), ``actions``
    (n_agents, act_width), ``rewards`` (n_agents,). ``terminal`` marks true
    task completion; step-limit truncation stays False so bootstrapping is
    masked only at genuine terminals.
    """

    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    terminal: bool


@dataclass(frozen=True)
class TransitionBatch:
    """Stacked sample: leading dimension is the batch."""

    obs: np.ndarray        # (B, n, obs_width)
    actions: np.ndarray    # (B, n, act_width)
    rewards: np.ndarray    # (B, n)
    next_obs: np.ndarray   # (B, n, obs_width)
    terminal: np.ndarray   # (B,)

    @property
    def size(self) -> int:
        return self.obs.shape[0]


class ReplayBuffer:
    """Fixed-capacity FIFO store; storage is float32, samples come back float64."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._size = 0
        self._head = 0
        self._obs: np.ndarray | None = None
        self._actions: np.ndarray | None = None
        self._rewards: np.ndarray | None = None
        self._next_obs: np.ndarray | None = None
        self._terminal: np.ndarray | None = None

    def __len__(self) -> int:
        return self._size

    def _allocate(self, t: Transition) -> None:
        n, d_o = t.obs.shape
        d_a = t.actions.shape[1]
        self._obs = np.empty((self.capacity, n, d_o), dtype=np.float32)
        self._actions = np.empty((self.capacity, n, d_a), dtype=np.float32)
        self._rewards = np.empty((self.capacity, n), dtype=np.float32)
        self._next_obs = np.empty((self.capacity, n, d_o), dtype=np.float32)
        self._terminal = np.empty(self.capacity, dtype=bool)

    def push(self, t: Transition) -> None:
        if self._obs is None:
            self._allocate(t)
        k = self._head
        self._obs[k] = t.obs
        self._actions[k] = t.actions
        self._rewards[k] = t.rewards
        self._next_obs[k] = t.next_obs
        self._terminal[k] = t.terminal
        self._head = (k + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """Uniform sample with replacement; requires at least batch_size entries."""
        if self._size < batch_size:
            raise ValueError(f"buffer holds {self._size} < batch_size {batch_size}")
        idx = rng.integers(0, self._size, size=batch_size)
        return TransitionBatch(
            obs=self._obs[idx].astype(np.float64),
            actions=self._actions[idx].astype(np.float64),
            rewards=self._rewards[idx].astype(np.float64),
            next_obs=self._next_obs[idx].astype(np.float64),
            terminal=self._terminal[idx].copy(),
        )
