"""Gaussian action-noise schedule with per-episode decay."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["ExplorationSchedule"]


@dataclass(frozen=True)
class ExplorationSchedule:
    """Noise stddev sigma_start * decay^episode, floored at sigma_min."""

    sigma_start: float = 0.3
    decay: float = 0.9995
    sigma_min: float = 0.02

    def __post_init__(self) -> None:
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must be in (0, 1]")
        if self.sigma_min < 0.0 or self.sigma_start < self.sigma_min:
            raise ValueError("need sigma_start >= sigma_min >= 0")

    def sigma(self, episode: int) -> float:
        return max(self.sigma_min, self.sigma_start * self.decay**episode)
