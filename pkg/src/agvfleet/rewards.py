"""Per-agent reward mechanisms: potential-field shaping plus two baselines.

Three mechanisms share the collision penalty and differ in the shaped term:

* ``IPF``      — sampled potential-field value + global nearest-agent term.
* ``MINIDIST`` — global term only: every agent receives
  -sum over targets of (distance to the nearest agent).
* ``GREEDY``   — individual term only: each agent receives
  -(distance to its own nearest target).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .potential import (
    FieldConfig,
    GridSpec,
    PotentialField,
    jacobi_solve_batch,
    rasterize,
    sample,
)
from .world import ScenarioConfig, WorldState

__all__ = [
    "RewardKind",
    "RewardBreakdown",
    "target_reward",
    "collision_penalty",
    "ipf_component",
    "compute_rewards",
    "RewardEngine",
    "shaped_metric_reward",
]


class RewardKind(enum.Enum):
    IPF = "ipf"
    MINIDIST = "minidist"
    GREEDY = "greedy"


@dataclass(frozen=True)
class RewardBreakdown:
    """Additive reward components for one agent at one step."""

    r_ipf: float
    r_g: float
    r_c: float

    @property
    def total(self) -> float:
        return self.r_ipf + self.r_g + self.r_c


def _pairwise_distances(world: WorldState) -> np.ndarray:
    """Agent-to-target distance matrix, shape (n_agents, n_targets)."""
    deltas = world.positions[:, None, :] - world.target_positions[None, :, :]
    return np.linalg.norm(deltas, axis=2)


def target_reward(world: WorldState) -> float:
    """Global term: -sum over targets of the distance to their nearest agent."""
    dists = _pairwise_distances(world)
    return float(-np.sum(dists.min(axis=0)))


def collision_penalty(world: WorldState, i: int, agent_radius: float) -> float:
    """-1 per other agent within collision distance 2*agent_radius (inclusive)."""
    deltas = np.delete(world.positions, i, axis=0) - world.positions[i]
    dists = np.linalg.norm(deltas, axis=1)
    return float(-np.count_nonzero(dists <= 2.0 * agent_radius))


def ipf_component(
    world: WorldState, i: int, potential: PotentialField, weight: float = 1.0
) -> float:
    """Weighted potential-field value at agent i's position (field must be solved)."""
    return weight * sample(potential, world.positions[i])


def compute_rewards(
    kind: RewardKind,
    world: WorldState,
    config: ScenarioConfig,
    fields: list[PotentialField] | None = None,
    ipf_weight: float = 1.0,
) -> list[RewardBreakdown]:
    """Per-agent reward breakdowns for the chosen mechanism.

    ``fields`` (one solved field per agent) is required exactly when
    ``kind`` is IPF. Totals decompose as r_ipf + r_g + r_c with
    non-applicable components zero.
    """
    n = world.n_agents
    if kind is RewardKind.IPF:
        if fields is None or len(fields) != n:
            raise ValueError("IPF rewards need one solved field per agent")
    elif fields is not None:
        raise ValueError(f"{kind.value} rewards take no potential fields")

    penalties = [collision_penalty(world, i, config.agent_radius) for i in range(n)]
    if kind is RewardKind.GREEDY:
        nearest = _pairwise_distances(world).min(axis=1)
        return [
            RewardBreakdown(0.0, float(-nearest[i]), penalties[i]) for i in range(n)
        ]
    shared = target_reward(world)
    if kind is RewardKind.MINIDIST:
        return [RewardBreakdown(0.0, shared, penalties[i]) for i in range(n)]
    return [
        RewardBreakdown(
            ipf_component(world, i, fields[i], ipf_weight), shared, penalties[i]
        )
        for i in range(n)
    ]


def shaped_metric_reward(world: WorldState, collision_events: int) -> float:
    """Per-step evaluation metric R = -(sum of nearest-agent distances) - collisions.

    This is the scenario-independent "average reward" metric; the constant
    subtracted is the number of colliding pairs in the step.
    """
    return target_reward(world) - float(collision_events)


class RewardEngine:
    """Stateful reward computer bound to one scenario and mechanism.

    For IPF it owns one field per agent and re-rasterizes + re-solves each
    step, warm-starting from the previous step's free-cell values so the
    per-step cost is a handful of sweeps. Call :meth:`reset` at episode
    boundaries to drop the warm-start cache.
    """

    def __init__(
        self,
        kind: RewardKind,
        scenario: ScenarioConfig,
        field_config: FieldConfig | None = None,
    ) -> None:
        self.kind = kind
        self.scenario = scenario
        self.field_config = field_config or FieldConfig()
        self.grid = GridSpec(self.field_config.grid_cells, scenario.world_half_extent)
        self._fields: list[PotentialField | None] = [None] * scenario.n_agents

    def reset(self) -> None:
        self._fields = [None] * self.scenario.n_agents

    @property
    def fields(self) -> list[PotentialField | None]:
        return list(self._fields)

    def compute(self, world: WorldState) -> list[RewardBreakdown]:
        if self.kind is not RewardKind.IPF:
            return compute_rewards(self.kind, world, self.scenario)
        cfg = self.field_config
        rasters = [
            rasterize(world, i, self.grid, warm_from=self._fields[i])
            for i in range(world.n_agents)
        ]
        # loose stopping rule: warm-started steps need only a few sweeps
        solved = jacobi_solve_batch(
            rasters, tol=cfg.tol, max_iters=cfg.max_iters, certify=False
        )
        self._fields = solved
        return compute_rewards(
            RewardKind.IPF, world, self.scenario, solved, cfg.ipf_weight
        )
