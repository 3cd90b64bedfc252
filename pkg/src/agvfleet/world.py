"""Continuous-space, discrete-time multi-AGV world.

Agents are homogeneous discs driven by 2-D acceleration commands inside a
square arena. Targets are static points. Task completion is defined by a
maximum-cardinality matching between agents and targets within a reach
radius, so each completed task is served by a distinct agent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ScenarioConfig",
    "AgentState",
    "TargetState",
    "WorldState",
    "StepOutcome",
    "PlacementError",
    "spawn_world",
    "observe",
    "observation_size",
    "step",
    "coverage_matching",
    "arrival_time",
]

# RNG stream tags: every generator in the project is seeded with a tuple
# (seed, stream, index) so distinct uses never share a stream.
STREAM_SPAWN = 0
STREAM_NET_INIT = 1
STREAM_NOISE = 2
STREAM_REPLAY = 3
STREAM_EVAL = 4


class PlacementError(RuntimeError):
    """Raised when rejection sampling cannot place all entities (world too crowded)."""


@dataclass(frozen=True)
class ScenarioConfig:
    """World, physics, and episode parameters for one scenario.

    The arena is the square [-world_half_extent, +world_half_extent]^2.
    Velocities update as v <- damping*v + accel_gain*a*dt and are clipped
    to max_speed; positions integrate as p <- p + dt*v.
    """

    n_agents: int = 3
    n_targets: int = 3
    world_half_extent: float = 1.0
    agent_radius: float = 0.05
    max_speed: float = 1.0
    dt: float = 0.1
    damping: float = 0.75
    accel_gain: float = 5.0
    reach_radius: float = 0.1
    max_steps: int = 100
    min_spawn_separation: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if self.n_targets != self.n_agents:
            raise ValueError("n_targets must equal n_agents (N-vs-N setup)")
        if not (0.0 < self.agent_radius < self.world_half_extent):
            raise ValueError("agent_radius must be in (0, world_half_extent)")
        if self.max_speed <= 0.0:
            raise ValueError("max_speed must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if not (0.0 <= self.damping < 1.0):
            raise ValueError("damping must be in [0, 1)")
        if self.reach_radius < self.agent_radius:
            raise ValueError("reach_radius must be >= agent_radius")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.min_spawn_separation < 0.0:
            raise ValueError("min_spawn_separation must be >= 0")


@dataclass(frozen=True)
class AgentState:
    """Read-only snapshot of one agent's kinematic state."""

    position: np.ndarray
    velocity: np.ndarray


@dataclass(frozen=True)
class TargetState:
    """Read-only snapshot of one task target."""

    position: np.ndarray
    index: int


@dataclass
class WorldState:
    """Positions and velocities of all agents plus target positions.

    Arrays are float64, shape (n, 2). ``rng`` is the generator used for the
    spawn; stepping the world is fully deterministic.
    """

    positions: np.ndarray
    velocities: np.ndarray
    target_positions: np.ndarray
    step: int = 0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def n_targets(self) -> int:
        return self.target_positions.shape[0]

    @property
    def agents(self) -> list[AgentState]:
        return [
            AgentState(self.positions[i].copy(), self.velocities[i].copy())
            for i in range(self.n_agents)
        ]

    @property
    def targets(self) -> list[TargetState]:
        return [
            TargetState(self.target_positions[j].copy(), j)
            for j in range(self.n_targets)
        ]

    def copy(self) -> "WorldState":
        return WorldState(
            self.positions.copy(),
            self.velocities.copy(),
            self.target_positions.copy(),
            self.step,
            self.rng,
        )


@dataclass
class StepOutcome:
    """Result of advancing the world by one step.

    ``rewards`` is zero-filled here; the reward module fills it in (see
    ``agvfleet.env.TaskEnv``). ``done`` is true at the step limit or once a
    full agent-target matching exists. ``terminal`` marks genuine task
    completion (used for bootstrap masking; the step-limit truncation is not
    terminal in that sense).
    """

    world: WorldState
    rewards: np.ndarray
    collisions: list[tuple[int, int]]
    done: bool
    terminal: bool
    covered: np.ndarray
    matched_count: int
    assignment: dict[int, int]


def spawn_world(
    config: ScenarioConfig,
    rng: np.random.Generator | None = None,
    max_attempts_per_entity: int = 1000,
) -> WorldState:
    """Place agents and targets uniformly in the arena with pairwise separation.

    Every pair of placed entities (agents and targets alike) is at least
    ``min_spawn_separation`` apart; each entity is rejection-sampled against
    the ones already placed. Velocities start at zero and the step counter
    at zero. Deterministic for a given generator (default: seeded from
    ``config.seed``).
    """
    if rng is None:
        rng = np.random.default_rng((config.seed, STREAM_SPAWN, 0))
    extent = config.world_half_extent
    total = config.n_agents + config.n_targets
    placed = np.empty((total, 2), dtype=np.float64)
    for k in range(total):
        for _ in range(max_attempts_per_entity):
            candidate = rng.uniform(-extent, extent, size=2)
            if k == 0:
                break
            gaps = np.linalg.norm(placed[:k] - candidate, axis=1)
            if np.all(gaps >= config.min_spawn_separation):
                break
        else:
            raise PlacementError(
                f"could not place entity {k} of {total} after "
                f"{max_attempts_per_entity} attempts; "
                f"min_spawn_separation={config.min_spawn_separation} is too "
                f"large for half_extent={extent}"
            )
        placed[k] = candidate
    return WorldState(
        positions=placed[: config.n_agents].copy(),
        velocities=np.zeros((config.n_agents, 2), dtype=np.float64),
        target_positions=placed[config.n_agents :].copy(),
        step=0,
        rng=rng,
    )


def observation_size(n_agents: int, n_targets: int) -> int:
    """Length of one agent's observation vector."""
    return 4 + 2 * n_targets + 2 * (n_agents - 1)


def observe(world: WorldState, i: int) -> np.ndarray:
    """Build agent i's observation vector.

    Layout: own velocity (2), own position (2), relative position of every
    target in index order (2 each), relative position of every other agent
    in index order skipping i (2 each). Relative entries are the other
    entity's position minus agent i's position.
    """
    if not 0 <= i < world.n_agents:
        raise IndexError(f"agent index {i} out of range (n={world.n_agents})")
    own = world.positions[i]
    rel_targets = world.target_positions - own
    others = np.delete(np.arange(world.n_agents), i)
    rel_agents = world.positions[others] - own
    return np.concatenate(
        [world.velocities[i], own, rel_targets.ravel(), rel_agents.ravel()]
    )


def observe_all(world: WorldState) -> np.ndarray:
    """Stack all agents' observations, shape (n_agents, obs_size)."""
    return np.stack([observe(world, i) for i in range(world.n_agents)])


def collision_pairs(
    positions: np.ndarray, agent_radius: float
) -> list[tuple[int, int]]:
    """Unordered agent pairs within collision distance 2*agent_radius (inclusive)."""
    n = positions.shape[0]
    pairs = []
    for i in range(n):
        deltas = positions[i + 1 :] - positions[i]
        dists = np.linalg.norm(deltas, axis=1)
        for off in np.nonzero(dists <= 2.0 * agent_radius)[0]:
            pairs.append((i, i + 1 + int(off)))
    return pairs


def step(
    config: ScenarioConfig, world: WorldState, actions: Sequence[np.ndarray] | np.ndarray
) -> StepOutcome:
    """Advance the world one tick under the given per-agent accelerations.

    Action components are clamped to [-1, 1]. The velocity update is
    v <- damping*v + accel_gain*a*dt, speed-clipped to max_speed; then
    p <- p + dt*v, clamped to the arena with the velocity zeroed on any
    clamped axis. Collisions are detected on the new positions and are
    penalized, not physically resolved.
    """
    acts = np.asarray(actions, dtype=np.float64)
    if acts.shape != (world.n_agents, 2):
        raise ValueError(f"expected actions of shape ({world.n_agents}, 2), got {acts.shape}")
    acts = np.clip(acts, -1.0, 1.0)

    vel = config.damping * world.velocities + config.accel_gain * acts * config.dt
    speed = np.linalg.norm(vel, axis=1)
    over = speed > config.max_speed
    if np.any(over):
        vel[over] *= (config.max_speed / speed[over])[:, None]

    pos = world.positions + config.dt * vel
    extent = config.world_half_extent
    clamped = (pos < -extent) | (pos > extent)
    pos = np.clip(pos, -extent, extent)
    vel = np.where(clamped, 0.0, vel)

    new_world = WorldState(pos, vel, world.target_positions.copy(), world.step + 1, world.rng)
    pairs = collision_pairs(pos, config.agent_radius)
    matched_count, assignment = coverage_matching(new_world, config.reach_radius)
    covered = np.zeros(world.n_targets, dtype=bool)
    covered[list(assignment.keys())] = True
    terminal = matched_count == world.n_targets
    done = terminal or new_world.step >= config.max_steps
    rewards = np.zeros(world.n_agents, dtype=np.float64)
    return StepOutcome(
        world=new_world,
        rewards=rewards,
        collisions=pairs,
        done=done,
        terminal=terminal,
        covered=covered,
        matched_count=matched_count,
        assignment=assignment,
    )


def coverage_matching(
    world: WorldState, reach_radius: float
) -> tuple[int, dict[int, int]]:
    """Maximum one-to-one matching of agents to targets within reach.

    Edges connect agent i to target j when ||p_i - t_j|| <= reach_radius.
    Augmenting paths are explored in ascending (target index, agent index)
    order, which fixes a deterministic matching among the maximum ones.
    Returns (matched_count, {target index: agent index}).
    """
    n_agents = world.n_agents
    n_targets = world.n_targets
    within = (
        np.linalg.norm(
            world.positions[:, None, :] - world.target_positions[None, :, :], axis=2
        )
        <= reach_radius
    )
    agent_of_target: dict[int, int] = {}
    target_of_agent = [-1] * n_agents

    def try_assign(j: int, banned: set[int]) -> bool:
        for i in range(n_agents):
            if within[i, j] and i not in banned:
                banned.add(i)
                if target_of_agent[i] == -1 or try_assign(target_of_agent[i], banned):
                    target_of_agent[i] = j
                    agent_of_target[j] = i
                    return True
        return False

    for j in range(n_targets):
        try_assign(j, set())
    return len(agent_of_target), agent_of_target


def arrival_time(matched_counts: Sequence[int], n_targets: int) -> int | None:
    """First step index at which every target is matched; None if never.

    ``matched_counts[k]`` is the matching size when the step counter reads k.
    """
    for k, count in enumerate(matched_counts):
        if count == n_targets:
            return k
    return None
