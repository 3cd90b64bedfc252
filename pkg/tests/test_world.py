"""Sim core: spawning, observation layout, kinematics, matching, arrival time."""

import itertools

import numpy as np
import pytest
from scipy import stats

from agvfleet.world import (
    PlacementError,
    ScenarioConfig,
    arrival_time,
    coverage_matching,
    observation_size,
    observe,
    spawn_world,
    step,
    WorldState,
)


def make_world(agent_pos, target_pos):
    agents = np.asarray(agent_pos, dtype=np.float64)
    targets = np.asarray(target_pos, dtype=np.float64)
    return WorldState(
        positions=agents,
        velocities=np.zeros_like(agents),
        target_positions=targets,
    )


class TestScenarioConfig:
    def test_defaults_valid(self):
        cfg = ScenarioConfig()
        assert cfg.n_agents == cfg.n_targets == 3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_agents": 0, "n_targets": 0},
            {"n_agents": 3, "n_targets": 4},
            {"agent_radius": 0.0},
            {"agent_radius": 2.0},
            {"max_speed": -1.0},
            {"dt": 0.0},
            {"damping": 1.0},
            {"reach_radius": 0.01},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            ScenarioConfig(**kwargs)


class TestSpawn:
    def test_deterministic_given_seed(self):
        cfg = ScenarioConfig(seed=7)
        a = spawn_world(cfg)
        b = spawn_world(cfg)
        assert np.array_equal(a.positions, b.positions)
        assert np.array_equal(a.target_positions, b.target_positions)
        assert np.array_equal(a.velocities, b.velocities)
        assert a.step == b.step == 0

    def test_postconditions(self):
        cfg = ScenarioConfig(seed=3)
        w = spawn_world(cfg)
        assert w.positions.shape == (3, 2) and w.target_positions.shape == (3, 2)
        everyone = np.vstack([w.positions, w.target_positions])
        assert np.all(np.abs(everyone) <= cfg.world_half_extent)
        for i, j in itertools.combinations(range(6), 2):
            assert np.linalg.norm(everyone[i] - everyone[j]) >= cfg.min_spawn_separation
        assert np.all(w.velocities == 0.0)

    def test_crowded_world_raises(self):
        cfg = ScenarioConfig(min_spawn_separation=3.0)
        with pytest.raises(PlacementError):
            spawn_world(cfg)

    def test_positions_uniform_kolmogorov_smirnov(self):
        # separation off isolates the raw sampler; rejection sampling would
        # otherwise skew the marginal near the walls
        cfg = ScenarioConfig(min_spawn_separation=0.0, seed=11)
        coords = []
        for episode in range(2000):
            w = spawn_world(cfg, rng=np.random.default_rng((11, 0, episode)))
            coords.append(np.vstack([w.positions, w.target_positions]))
        coords = np.concatenate(coords)
        for axis in range(2):
            result = stats.kstest(coords[:, axis], stats.uniform(-1.0, 2.0).cdf)
            assert result.pvalue > 0.01, f"axis {axis}: p={result.pvalue}"


class TestObserve:
    def test_relative_target_entry(self):
        w = make_world([[0.0, 0.0]], [[0.5, 0.0]])
        obs = observe(w, 0)
        assert obs.tolist() == [0.0, 0.0, 0.0, 0.0, 0.5, 0.0]

    def test_lengths(self):
        cfg3 = ScenarioConfig(n_agents=3, n_targets=3, seed=1)
        cfg6 = ScenarioConfig(n_agents=6, n_targets=6, seed=1)
        assert observe(spawn_world(cfg3), 0).shape == (14,)
        assert observe(spawn_world(cfg6), 5).shape == (26,)
        assert observation_size(3, 3) == 14
        assert observation_size(6, 6) == 26

    def test_layout_skips_self(self):
        w = make_world(
            [[0.0, 0.0], [0.2, 0.0], [0.0, 0.3]],
            [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]],
        )
        obs = observe(w, 1)
        own = w.positions[1]
        expected = np.concatenate(
            [
                [0.0, 0.0],
                own,
                (w.target_positions - own).ravel(),
                np.array([w.positions[0] - own, w.positions[2] - own]).ravel(),
            ]
        )
        assert np.array_equal(obs, expected)

    def test_index_out_of_range(self):
        w = make_world([[0.0, 0.0]], [[0.5, 0.0]])
        with pytest.raises(IndexError):
            observe(w, 1)


class TestStep:
    def test_zero_action_zero_velocity_is_fixed_point(self):
        cfg = ScenarioConfig(seed=5)
        w = spawn_world(cfg)
        out = step(cfg, w, np.zeros((3, 2)))
        assert np.array_equal(out.world.positions, w.positions)
        assert out.world.step == 1

    def test_hand_evaluated_update(self):
        cfg = ScenarioConfig(damping=0.75, accel_gain=5.0, dt=0.1)
        w = make_world([[0.0, 0.0], [0.5, 0.5], [-0.5, -0.5]],
                       [[0.9, 0.9], [0.8, -0.8], [-0.9, 0.9]])
        actions = np.zeros((3, 2))
        actions[0] = [1.0, 0.0]
        out = step(cfg, w, actions)
        # v = 0.75*0 + 5*1*0.1 = 0.5; p = 0 + 0.1*0.5 = 0.05
        assert np.allclose(out.world.velocities[0], [0.5, 0.0])
        assert np.allclose(out.world.positions[0], [0.05, 0.0])

    def test_speed_clipped(self):
        cfg = ScenarioConfig(damping=0.9, accel_gain=50.0, dt=0.5, max_speed=1.0)
        w = make_world([[0.0, 0.0], [0.5, 0.5], [-0.5, -0.5]],
                       [[0.9, 0.9], [0.8, -0.8], [-0.9, 0.9]])
        out = step(cfg, w, np.ones((3, 2)))
        speeds = np.linalg.norm(out.world.velocities, axis=1)
        assert np.all(speeds <= cfg.max_speed + 1e-12)

    def test_position_integration_exact_when_unclamped(self):
        cfg = ScenarioConfig(seed=9)
        w = spawn_world(cfg)
        rng = np.random.default_rng(1)
        for _ in range(20):
            before = w.positions.copy()
            out = step(cfg, w, rng.uniform(-1, 1, (3, 2)))
            inside = np.all(np.abs(out.world.positions) < cfg.world_half_extent, axis=1)
            expected = before + cfg.dt * out.world.velocities
            assert np.array_equal(out.world.positions[inside], expected[inside])
            w = out.world

    def test_boundary_clamp_zeroes_velocity(self):
        cfg = ScenarioConfig()
        w = make_world([[0.999, 0.0], [0.5, 0.5], [-0.5, -0.5]],
                       [[0.9, 0.9], [0.8, -0.8], [-0.9, 0.9]])
        actions = np.zeros((3, 2))
        actions[0] = [1.0, 0.0]
        out = None
        for _ in range(5):
            out = step(cfg, w, actions)
            w = out.world
        assert w.positions[0, 0] == cfg.world_half_extent
        assert w.velocities[0, 0] == 0.0

    def test_collision_pair_detected(self):
        cfg = ScenarioConfig()
        d = cfg.agent_radius
        w = make_world([[0.0, 0.0], [1.9 * d, 0.0], [0.8, 0.8]],
                       [[0.9, -0.9], [-0.8, -0.8], [-0.9, 0.9]])
        out = step(cfg, w, np.zeros((3, 2)))
        assert out.collisions == [(0, 1)]

    def test_action_length_mismatch(self):
        cfg = ScenarioConfig(seed=2)
        w = spawn_world(cfg)
        with pytest.raises(ValueError):
            step(cfg, w, np.zeros((2, 2)))

    def test_done_at_step_limit(self):
        cfg = ScenarioConfig(max_steps=3, seed=4)
        w = spawn_world(cfg)
        done = False
        for k in range(3):
            out = step(cfg, w, np.zeros((3, 2)))
            w, done = out.world, out.done
        assert done

    def test_trace_determinism(self):
        cfg = ScenarioConfig(seed=21)
        actions = np.random.default_rng(3).uniform(-1, 1, (30, 3, 2))
        traces = []
        for _ in range(2):
            w = spawn_world(cfg)
            snapshots = []
            for a in actions:
                out = step(cfg, w, a)
                w = out.world
                snapshots.append((w.positions.copy(), w.velocities.copy()))
            traces.append(snapshots)
        for (p1, v1), (p2, v2) in zip(*traces):
            assert np.array_equal(p1, p2) and np.array_equal(v1, v2)


def brute_force_max_matching(world, reach_radius):
    """Exhaustive oracle: best over all full agent-to-target permutations."""
    n = world.n_agents
    dist = np.linalg.norm(
        world.positions[:, None, :] - world.target_positions[None, :, :], axis=2
    )
    best = 0
    for perm in itertools.permutations(range(n)):
        best = max(best, sum(dist[i, perm[i]] <= reach_radius for i in range(n)))
    return best


class TestCoverageMatching:
    def test_perfect_matching(self):
        targets = [[0.0, 0.0], [0.5, 0.5], [-0.5, 0.5]]
        w = make_world(targets, targets)
        count, assignment = coverage_matching(w, 0.1)
        assert count == 3
        assert sorted(assignment) == [0, 1, 2]

    def test_two_agents_one_target(self):
        w = make_world(
            [[0.01, 0.0], [-0.01, 0.0], [0.9, 0.9]],
            [[0.0, 0.0], [0.5, -0.5], [-0.5, -0.5]],
        )
        count, assignment = coverage_matching(w, 0.1)
        assert count == 1
        assert assignment == {0: 0}

    def test_matches_brute_force_on_random_snapshots(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            n = int(rng.integers(2, 7))
            w = make_world(rng.uniform(-1, 1, (n, 2)), rng.uniform(-1, 1, (n, 2)))
            reach = float(rng.uniform(0.1, 0.8))
            count, assignment = coverage_matching(w, reach)
            assert count == brute_force_max_matching(w, reach)
            assert len(assignment) == count
            assert len(set(assignment.values())) == count  # one-to-one
            for j, i in assignment.items():
                assert np.linalg.norm(w.positions[i] - w.target_positions[j]) <= reach

    def test_adding_agent_in_reach_never_decreases(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            agents = rng.uniform(-1, 1, (n, 2))
            targets = rng.uniform(-1, 1, (n + 1, 2))
            reach = float(rng.uniform(0.1, 0.6))
            w_small = make_world(agents, targets[:-1])
            base, assignment = coverage_matching(w_small, reach)
            # extra agent parked on a previously uncovered extra target
            w_big = make_world(np.vstack([agents, targets[-1]]), targets)
            grown, _ = coverage_matching(w_big, reach)
            assert grown >= base


class TestArrivalTime:
    def test_first_full_match(self):
        counts = [0] * 37 + [3, 3]
        assert arrival_time(counts, 3) == 37

    def test_never(self):
        assert arrival_time([0, 1, 2, 2], 3) is None

    def test_first_semantics_with_break(self):
        counts = [0] * 20 + [3] + [1] * 4 + [3]
        assert arrival_time(counts, 3) == 20
