"""Flat key-value experiment files covering world, field, and training knobs.

Format: one ``key = value`` pair per line, ``#`` comments, blank lines
ignored. Every scenario field plus the field-solver and training
hyperparameters is addressable; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .marl.config import TrainConfig
from .potential import FieldConfig
from .world import ScenarioConfig

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "save_config", "parse_config_text"]


class ConfigError(ValueError):
    """Malformed experiment file: bad syntax, unknown key, or bad value."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs besides algorithm/reward/seed choices."""

    scenario: ScenarioConfig = ScenarioConfig()
    field: FieldConfig = FieldConfig()
    train: TrainConfig = TrainConfig()
    episodes: int = 30_000
    eval_episodes: int = 300

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.eval_episodes < 1:
            raise ValueError("eval_episodes must be >= 1")

    def desk_variant(self) -> "ExperimentConfig":
        """Reduced budget (1/10 of the episodes) for quick machines and CI."""
        return dataclasses.replace(self, episodes=max(1, self.episodes // 10))


_SECTIONS = {
    "scenario": ScenarioConfig,
    "field": FieldConfig,
    "train": TrainConfig,
}
_TOP_LEVEL_KEYS = ("episodes", "eval_episodes")


def _known_keys() -> dict[str, tuple[str, type]]:
    keys: dict[str, tuple[str, type]] = {}
    for section, cls in _SECTIONS.items():
        for f in dataclasses.fields(cls):
            keys[f.name] = (section, f.type)
    for name in _TOP_LEVEL_KEYS:
        keys[name] = ("", int)
    return keys


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    known = _known_keys()
    values: dict[str, dict] = {section: {} for section in _SECTIONS}
    top: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        section, _ = known[key]
        try:
            value = _coerce(key, raw_value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
        if section:
            values[section][key] = value
        else:
            top[key] = value
    try:
        return ExperimentConfig(
            scenario=ScenarioConfig(**values["scenario"]),
            field=FieldConfig(**values["field"]),
            train=TrainConfig(**values["train"]),
            **top,
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


_INT_KEYS = {
    "n_agents", "n_targets", "max_steps", "seed", "grid_cells", "max_iters",
    "hidden_width", "buffer_capacity", "batch_size", "warmup_transitions",
    "episodes", "eval_episodes",
}


def _coerce(key: str, raw: str) -> int | float:
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), source=str(path))


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    """Write every field explicitly so saved files are self-contained."""
    lines = []
    for section_name, section in (
        ("world & physics", config.scenario),
        ("potential field", config.field),
        ("training", config.train),
    ):
        lines.append(f"# {section_name}")
        for f in dataclasses.fields(section):
            lines.append(f"{f.name} = {getattr(section, f.name)}")
        lines.append("")
    lines.append("# experiment")
    lines.append(f"episodes = {config.episodes}")
    lines.append(f"eval_episodes = {config.eval_episodes}")
    Path(path).write_text("\n".join(lines) + "\n")
