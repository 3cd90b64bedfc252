"""Training hyperparameters shared by both learners."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["TrainConfig"]


@dataclass(frozen=True)
class TrainConfig:
    """Conventional DDPG-family defaults; everything overridable per experiment."""

    hidden_width: int = 64
    lr_actor: float = 1e-4
    lr_critic: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    tau: float = 0.01
    gamma: float = 0.95
    buffer_capacity: int = 1_000_000
    batch_size: int = 256
    warmup_transitions: int = 2_000
    sigma_start: float = 0.3
    sigma_decay: float = 0.9995
    sigma_min: float = 0.02

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0, 1]")
        if self.batch_size < 1 or self.buffer_capacity < self.batch_size:
            raise ValueError("need buffer_capacity >= batch_size >= 1")
        if self.sigma_min > self.sigma_start:
            raise ValueError("sigma_min must not exceed sigma_start")
