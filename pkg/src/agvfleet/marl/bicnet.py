"""Shared bidirectional-recurrent actor and critic over the agent sequence.

One parameter set serves any number of agents. The critic emits one value
per agent; its loss sums squared TD errors across agents, and the actor
ascends the sum of per-agent values. Because both networks share the
recurrent channels, backprop automatically carries every cross term (each
agent's value contributes gradient to every agent's action). Bootstrap
targets use lagged target copies of both networks.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..nn import (
    BiRnnSpec,
    NetworkParams,
    adam_step,
    birnn_backward,
    birnn_forward,
    birnn_init,
    load_network,
    save_network,
    soft_update,
)
from .config import TrainConfig
from .replay import TransitionBatch

__all__ = ["BicnetLearner", "bicnet_update"]


class BicnetLearner:
    """Shared-parameter recurrent actor/critic with lagged targets."""

    algorithm = "bicnet"

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
        self.actor_spec = BiRnnSpec(
            obs_width, act_width, "tanh",
            encoder_width=h, hidden_width=h, decoder_width=h,
        )
        self.critic_spec = BiRnnSpec(
            obs_width + act_width, 1, "identity",
            encoder_width=h, hidden_width=h, decoder_width=h,
        )
        self.actor = birnn_init(self.actor_spec, rng)
        self.critic = birnn_init(self.critic_spec, rng)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()

    # ------------------------------------------------------------------ acting

    def select_actions(
        self, obs: np.ndarray, sigma: float = 0.0, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        """Joint actions from the shared recurrent policy; sigma=0 is greedy."""
        out, _ = birnn_forward(self.actor_spec, self.actor, obs[None, :, :])
        acts = out[0]
        if sigma > 0.0:
            if rng is None:
                raise ValueError("exploration noise needs a generator")
            acts = acts + rng.normal(0.0, sigma, size=acts.shape)
        return np.clip(acts, -1.0, 1.0)

    # --------------------------------------------------------------- gradients

    def critic_loss_and_grad(self, batch: TransitionBatch) -> tuple[float, NetworkParams]:
        """Sum over agents of squared TD errors (batch mean) and its gradient."""
        cfg = self.train_config
        a_next, _ = birnn_forward(self.actor_spec, self.actor_target, batch.next_obs)
        x_next = np.concatenate([batch.next_obs, a_next], axis=2)
        q_next, _ = birnn_forward(self.critic_spec, self.critic_target, x_next)
        not_terminal = 1.0 - batch.terminal.astype(np.float64)
        y = batch.rewards + cfg.gamma * not_terminal[:, None] * q_next[:, :, 0]

        x = np.concatenate([batch.obs, batch.actions], axis=2)
        q, cache = birnn_forward(self.critic_spec, self.critic, x)
        td = q[:, :, 0] - y
        loss = float(np.mean(np.sum(td**2, axis=1)))
        d_q = (2.0 / batch.size) * td[:, :, None]
        _, grads = birnn_backward(cache, self.critic, d_q)
        return loss, grads

    def actor_objective_and_grad(self, batch: TransitionBatch) -> tuple[float, NetworkParams]:
        """Batch mean of the summed per-agent critic values, and its gradient.

        The critic input gradient is sliced at each agent's action block and
        pushed back through the shared actor, realizing the full double sum
        of value-to-action couplings.
        """
        a, actor_cache = birnn_forward(self.actor_spec, self.actor, batch.obs)
        x = np.concatenate([batch.obs, a], axis=2)
        q, critic_cache = birnn_forward(self.critic_spec, self.critic, x)
        objective = float(np.mean(np.sum(q[:, :, 0], axis=1)))
        d_q = np.full_like(q, 1.0 / batch.size)
        d_x, _ = birnn_backward(critic_cache, self.critic, d_q)
        d_a = d_x[:, :, self.obs_width :]
        _, actor_grads = birnn_backward(actor_cache, self.actor, d_a)
        return objective, actor_grads

    # ----------------------------------------------------------------- updates

    def update(self, batch: TransitionBatch) -> dict[str, float]:
        """Critic step, actor step (ascent), then soft updates of both targets."""
        cfg = self.train_config
        critic_loss, critic_grads = self.critic_loss_and_grad(batch)
        adam_step(
            self.critic, critic_grads, cfg.lr_critic,
            cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps,
        )
        objective, actor_grads = self.actor_objective_and_grad(batch)
        adam_step(
            self.actor, -actor_grads.flat, cfg.lr_actor,
            cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps,
        )
        soft_update(self.actor_target, self.actor, cfg.tau)
        soft_update(self.critic_target, self.critic, cfg.tau)
        return {"critic_loss": critic_loss, "actor_objective": objective}

    # ------------------------------------------------------------- persistence

    def save(self, directory: str | Path, metadata: dict | None = None) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {}
        for tag, spec, params in (
            ("actor", self.actor_spec, self.actor),
            ("actor_target", self.actor_spec, self.actor_target),
            ("critic", self.critic_spec, self.critic),
            ("critic_target", self.critic_spec, self.critic_target),
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
    def load(cls, directory: str | Path, train: TrainConfig | None = None) -> "BicnetLearner":
        directory = Path(directory)
        manifest = json.loads((directory / "manifest.json").read_text())
        if manifest["algorithm"] != cls.algorithm:
            raise ValueError(f"checkpoint holds {manifest['algorithm']!r}, not {cls.algorithm!r}")
        if train is None:
            train = TrainConfig(hidden_width=manifest["hidden_width"])
        learner = cls(
            manifest["n_agents"], manifest["obs_width"], manifest["act_width"], train
        )
        for tag in ("actor", "actor_target", "critic", "critic_target"):
            _, params, _ = load_network(directory / manifest["files"][tag])
            if params.size != getattr(learner, tag).size:
                raise ValueError(f"{tag}: parameter count mismatch")
            setattr(learner, tag, params)
        return learner


def bicnet_update(learner: BicnetLearner, batch: TransitionBatch) -> tuple[float, float]:
    stats = learner.update(batch)
    return stats["critic_loss"], stats["actor_objective"]
