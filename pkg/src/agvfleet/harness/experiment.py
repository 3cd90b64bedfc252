"""End-to-end experiment runs: train, evaluate, and write all artifacts."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..config import ExperimentConfig, save_config
from ..marl.training import train, write_training_log
from ..rewards import RewardKind
from .artifacts import (
    write_completion_histogram_csv,
    write_convergence_csv,
    write_preference_matrix_csv,
)
from .compare import ComparisonTable, compare
from .evaluate import EvalReport, evaluate

__all__ = ["ExperimentSpec", "run_experiment", "run_reward_sweep", "DONE_MARKER"]

DONE_MARKER = "DONE"


@dataclass(frozen=True)
class ExperimentSpec:
    """One trained model: scenario + algorithm + reward, over one or more seeds."""

    config: ExperimentConfig
    algorithm: str = "maddpg"
    reward_kind: RewardKind = RewardKind.IPF
    seeds: tuple[int, ...] = (0,)
    out_dir: Path = Path("runs/experiment")
    episodes: int | None = None       # None: take the config's budget
    eval_episodes: int | None = None
    checkpoint_every: int = 0

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.algorithm not in ("maddpg", "bicnet"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @property
    def label(self) -> str:
        return f"{self.algorithm}-{self.reward_kind.value}"

    @property
    def n_episodes(self) -> int:
        return self.episodes if self.episodes is not None else self.config.episodes

    @property
    def n_eval_episodes(self) -> int:
        return (
            self.eval_episodes
            if self.eval_episodes is not None
            else self.config.eval_episodes
        )


def run_experiment(spec: ExperimentSpec) -> list[EvalReport]:
    """Train and evaluate per seed; artifacts land under out_dir/seed_<n>/.

    Each seed directory receives the training log, checkpoint, eval report,
    and figure-data CSVs, then a DONE marker; the experiment root receives
    the resolved config, a cross-seed summary, and its own DONE marker.
    A missing marker flags a partial run.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_config(spec.config, out / "config.cfg")
    reports = []
    for seed in spec.seeds:
        seed_dir = out / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        result = train(
            scenario=spec.config.scenario,
            algorithm=spec.algorithm,
            reward_kind=spec.reward_kind,
            episodes=spec.n_episodes,
            seed=seed,
            field_config=spec.config.field,
            train_cfg=spec.config.train,
            checkpoint_dir=seed_dir / "checkpoint",
            checkpoint_every=spec.checkpoint_every,
        )
        write_training_log(result.log, seed_dir / "train_log.csv")
        report = evaluate(
            result.learner,
            spec.config.scenario,
            eval_episodes=spec.n_eval_episodes,
            seed=seed,
            label=f"{spec.label}-seed{seed}",
        )
        report.save(seed_dir / "eval_report.json")
        figures = seed_dir / "figures"
        figures.mkdir(exist_ok=True)
        write_convergence_csv(result.log, figures / "convergence.csv")
        write_completion_histogram_csv(report, figures / "completion_histogram.csv")
        write_preference_matrix_csv(report, figures / "preference_matrix.csv")
        (seed_dir / DONE_MARKER).write_text("ok\n")
        reports.append(report)
    _write_summary(spec, reports, out / "summary.json")
    (out / DONE_MARKER).write_text("ok\n")
    return reports


def _write_summary(spec: ExperimentSpec, reports: list[EvalReport], path: Path) -> None:
    rates = [r.average_task_response_rate for r in reports]
    concentrations = [r.mean_concentration for r in reports]
    finite = [c for c in concentrations if not np.isnan(c)]
    summary = {
        "label": spec.label,
        "algorithm": spec.algorithm,
        "reward_kind": spec.reward_kind.value,
        "episodes": spec.n_episodes,
        "eval_episodes": spec.n_eval_episodes,
        "seeds": list(spec.seeds),
        "response_rate_per_seed": rates,
        "response_rate_mean": float(np.mean(rates)),
        "response_rate_std": float(np.std(rates)),
        "average_reward_per_seed": [r.average_reward for r in reports],
        "mean_concentration_per_seed": concentrations,
        "mean_concentration": float(np.mean(finite)) if finite else None,
    }
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def mean_report(reports: list[EvalReport], label: str) -> EvalReport:
    """Average seed-level reports of one model into a single summary report."""
    times = [r.average_time for r in reports if r.average_time is not None]
    histogram = np.sum([r.completion_histogram for r in reports], axis=0)
    preference = np.sum([r.preference_matrix for r in reports], axis=0)
    concentrations = [c for r in reports for c in [r.mean_concentration] if not np.isnan(c)]
    return EvalReport(
        label=label,
        n_agents=reports[0].n_agents,
        n_targets=reports[0].n_targets,
        eval_episodes=sum(r.eval_episodes for r in reports),
        seed=reports[0].seed,
        average_task_response_rate=float(
            np.mean([r.average_task_response_rate for r in reports])
        ),
        average_reward=float(np.mean([r.average_reward for r in reports])),
        average_time=float(np.mean(times)) if times else None,
        completion_histogram=histogram.tolist(),
        preference_matrix=preference.tolist(),
        per_agent_concentration=[],
        mean_concentration=float(np.mean(concentrations)) if concentrations else float("nan"),
    )


def run_reward_sweep(
    base: ExperimentSpec, reward_kinds: list[RewardKind]
) -> tuple[ComparisonTable, list[EvalReport]]:
    """Run the same scenario/algorithm under several reward mechanisms.

    Emits one experiment directory per mechanism plus a comparison table
    (CSV + text) at the sweep root.
    """
    summaries = []
    for kind in reward_kinds:
        spec = dataclasses.replace(
            base,
            reward_kind=kind,
            out_dir=Path(base.out_dir) / kind.value,
        )
        reports = run_experiment(spec)
        summaries.append(mean_report(reports, spec.label))
    table = compare(summaries)
    table.save_csv(Path(base.out_dir) / "comparison.csv")
    (Path(base.out_dir) / "comparison.txt").write_text(table.render_text() + "\n")
    return table, summaries
