"""Per-agent deterministic actors with centralized critics.

Each agent owns an actor that sees only its own observation and a critic
that sees every agent's observation and action. Critic inputs are laid out
as all observations then all actions, in agent-index order; permuting that
order is a contract violation. Updates run critic-first, then each actor
ascends the critic's value of its own action, followed by Polyak target
tracking.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..nn import (
    MlpSpec,
    NetworkParams,
    adam_step,
    load_network,
    mlp_backward,
    mlp_forward,
    mlp_init,
    save_network,
    soft_update,
)
from .config import TrainConfig
from .replay import TransitionBatch

__all__ = ["MaddpgLearner", "maddpg_critic_update", "maddpg_actor_update"]


class MaddpgLearner:
    """Actor/critic parameter sets and update rules for one scenario size."""

    algorithm = "maddpg"

    def __init__(
        self,
        n_agents: int,
        obs_width: int,
        act_width: int = 2,
        train: TrainConfig | None = None,
        rng: np.random.Generator | None = None,
    ) -> None:
        self.n_agents = n_agents
        self.obs_width = obs_width
        self.act_width = act_width
        self.train_config = train or TrainConfig()
        rng = rng or np.random.default_rng(0)
        h = self.train_config.hidden_width
        self.actor_spec = MlpSpec((obs_width, h, h, act_width), "tanh")
        self.critic_spec = MlpSpec(
            (n_agents * (obs_width + act_width), h, h, 1), "identity"
        )
        self.actors = [mlp_init(self.actor_spec, rng) for _ in range(n_agents)]
        self.critics = [mlp_init(self.critic_spec, rng) for _ in range(n_agents)]
        self.actor_targets = [p.copy() for p in self.actors]
        self.critic_targets = [p.copy() for p in self.critics]

    # ------------------------------------------------------------------ acting

    def select_actions(
        self, obs: np.ndarray, sigma: float = 0.0, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        """Deterministic policy actions, optionally with clamped Gaussian noise.

        ``obs`` is the stacked joint observation (n_agents, obs_width);
        sigma=0 is the greedy policy.
        """
        acts = np.empty((self.n_agents, self.act_width))
        for i in range(self.n_agents):
            out, _ = mlp_forward(self.actor_spec, self.actors[i], obs[i : i + 1])
            acts[i] = out[0]
        if sigma > 0.0:
            if rng is None:
                raise ValueError("exploration noise needs a generator")
            acts += rng.normal(0.0, sigma, size=acts.shape)
        return np.clip(acts, -1.0, 1.0)

    # ----------------------------------------------------------------- critics

    def _joint_input(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """(B, n, d_o) + (B, n, d_a) -> (B, n*d_o + n*d_a), obs first."""
        batch = obs.shape[0]
        return np.concatenate(
            [obs.reshape(batch, -1), actions.reshape(batch, -1)], axis=1
        )

    def target_joint_actions(self, next_obs: np.ndarray) -> np.ndarray:
        """Target-actor actions for every agent on the next observations."""
        batch = next_obs.shape[0]
        acts = np.empty((batch, self.n_agents, self.act_width))
        for j in range(self.n_agents):
            acts[:, j], _ = mlp_forward(
                self.actor_spec, self.actor_targets[j], next_obs[:, j]
            )
        return acts

    def critic_loss_and_grad(
        self,
        batch: TransitionBatch,
        i: int,
        target_actions: np.ndarray | None = None,
    ) -> tuple[float, NetworkParams]:
        """Mean squared TD error of critic i and its exact parameter gradient.

        Target: y = r_i + gamma * (1 - terminal) * Q_i'(x', mu'(o')). Pure:
        computes but does not apply the update.
        """
        cfg = self.train_config
        if target_actions is None:
            target_actions = self.target_joint_actions(batch.next_obs)
        x_next = self._joint_input(batch.next_obs, target_actions)
        q_next, _ = mlp_forward(self.critic_spec, self.critic_targets[i], x_next)
        not_terminal = 1.0 - batch.terminal.astype(np.float64)
        y = batch.rewards[:, i] + cfg.gamma * not_terminal * q_next[:, 0]

        x = self._joint_input(batch.obs, batch.actions)
        q, cache = mlp_forward(self.critic_spec, self.critics[i], x)
        td = q[:, 0] - y
        loss = float(np.mean(td**2))
        d_q = (2.0 / batch.size) * td[:, None]
        _, grads = mlp_backward(cache, self.critics[i], d_q)
        return loss, grads

    def actor_objective_and_grad(
        self, batch: TransitionBatch, i: int
    ) -> tuple[float, NetworkParams]:
        """Mean critic value of agent i's on-policy action, and its gradient.

        Other agents' actions come from the batch; the gradient flows
        through the frozen critic into actor i only (ascent direction).
        """
        a_i, actor_cache = mlp_forward(self.actor_spec, self.actors[i], batch.obs[:, i])
        actions = batch.actions.copy()
        actions[:, i] = a_i
        x = self._joint_input(batch.obs, actions)
        q, critic_cache = mlp_forward(self.critic_spec, self.critics[i], x)
        objective = float(np.mean(q[:, 0]))
        d_q = np.full((batch.size, 1), 1.0 / batch.size)
        d_x, _ = mlp_backward(critic_cache, self.critics[i], d_q)
        offset = self.n_agents * self.obs_width + i * self.act_width
        d_a = d_x[:, offset : offset + self.act_width]
        _, actor_grads = mlp_backward(actor_cache, self.actors[i], d_a)
        return objective, actor_grads

    # ----------------------------------------------------------------- updates

    def critic_update(self, batch: TransitionBatch) -> float:
        """One Adam step on every agent's critic; returns the mean pre-step loss."""
        cfg = self.train_config
        target_actions = self.target_joint_actions(batch.next_obs)
        losses = []
        for i in range(self.n_agents):
            loss, grads = self.critic_loss_and_grad(batch, i, target_actions)
            adam_step(
                self.critics[i], grads, cfg.lr_critic,
                cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps,
            )
            losses.append(loss)
        return float(np.mean(losses))

    def actor_update(self, batch: TransitionBatch, i: int) -> float:
        """Ascend critic i through actor i, then soft-update agent i's targets."""
        cfg = self.train_config
        objective, grads = self.actor_objective_and_grad(batch, i)
        adam_step(
            self.actors[i], -grads.flat, cfg.lr_actor,
            cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps,
        )
        soft_update(self.actor_targets[i], self.actors[i], cfg.tau)
        soft_update(self.critic_targets[i], self.critics[i], cfg.tau)
        return objective

    def update(self, batch: TransitionBatch) -> dict[str, float]:
        """Full iteration: critics first, then every actor plus target tracking."""
        critic_loss = self.critic_update(batch)
        objectives = [self.actor_update(batch, i) for i in range(self.n_agents)]
        return {"critic_loss": critic_loss, "actor_objective": float(np.mean(objectives))}

    # ------------------------------------------------------------- persistence

    def save(self, directory: str | Path, metadata: dict | None = None) -> None:
        """Write one file per network plus a manifest."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {}
        for i in range(self.n_agents):
            for tag, spec, params in (
                (f"actor_{i}", self.actor_spec, self.actors[i]),
                (f"actor_target_{i}", self.actor_spec, self.actor_targets[i]),
                (f"critic_{i}", self.critic_spec, self.critics[i]),
                (f"critic_target_{i}", self.critic_spec, self.critic_targets[i]),
            ):
                name = f"{tag}.net"
                save_network(directory / name, spec, params)
                files[tag] = name
        manifest = {
            "format": "agvfleet-ckpt-v1",
            "algorithm": self.algorithm,
            "n_agents": self.n_agents,
            "obs_width": self.obs_width,
            "act_width": self.act_width,
            "hidden_width": self.train_config.hidden_width,
            "files": files,
        }
        manifest.update(metadata or {})
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))

    @classmethod
    def load(cls, directory: str | Path, train: TrainConfig | None = None) -> "MaddpgLearner":
        directory = Path(directory)
        manifest = json.loads((directory / "manifest.json").read_text())
        if manifest["algorithm"] != cls.algorithm:
            raise ValueError(f"checkpoint holds {manifest['algorithm']!r}, not {cls.algorithm!r}")
        if train is None:
            train = TrainConfig(hidden_width=manifest["hidden_width"])
        learner = cls(
            manifest["n_agents"], manifest["obs_width"], manifest["act_width"], train
        )
        for i in range(learner.n_agents):
            for tag, store in (
                (f"actor_{i}", learner.actors),
                (f"actor_target_{i}", learner.actor_targets),
                (f"critic_{i}", learner.critics),
                (f"critic_target_{i}", learner.critic_targets),
            ):
                _, params, _ = load_network(directory / manifest["files"][tag])
                if params.size != store[i].size:
                    raise ValueError(f"{tag}: parameter count mismatch")
                store[i] = params
        return learner


def maddpg_critic_update(learner: MaddpgLearner, batch: TransitionBatch) -> float:
    return learner.critic_update(batch)


def maddpg_actor_update(learner: MaddpgLearner, batch: TransitionBatch, i: int) -> float:
    return learner.actor_update(batch, i)
