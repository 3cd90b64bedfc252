"""Side-by-side model comparison with pairwise response-rate deltas."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .evaluate import EvalReport

__all__ = ["ComparisonTable", "compare"]


@dataclass
class ComparisonTable:
    """Per-model metrics plus response-rate deltas in percentage points."""

    labels: list[str]
    response_rates: list[float]   # percent
    average_rewards: list[float]
    average_times: list[float | None]
    deltas: dict[tuple[str, str], float]

    def ordering(self) -> list[str]:
        ranked = sorted(zip(self.response_rates, self.labels), reverse=True)
        return [label for _, label in ranked]

    def max_delta(self) -> float:
        return max(self.deltas.values()) if self.deltas else 0.0

    def render_text(self) -> str:
        width = max(len(label) for label in self.labels) + 2
        lines = [
            f"{'model':<{width}}{'response rate':>15}{'avg reward':>14}{'avg time':>10}"
        ]
        for label, rate, reward, steps in sorted(
            zip(self.labels, self.response_rates, self.average_rewards, self.average_times),
            key=lambda row: -row[1],
        ):
            time_text = f"{steps:.1f}" if steps is not None else "n/a"
            lines.append(f"{label:<{width}}{rate:>14.2f}%{reward:>14.2f}{time_text:>10}")
        lines.append("")
        lines.append("pairwise response-rate deltas (points):")
        for (a, b), delta in sorted(self.deltas.items(), key=lambda kv: -kv[1]):
            lines.append(f"  {a} - {b}: {delta:+.2f}")
        return "\n".join(lines)

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("label", "response_rate_pct", "average_reward", "average_time"))
            for label, rate, reward, steps in zip(
                self.labels, self.response_rates, self.average_rewards, self.average_times
            ):
                writer.writerow([label, repr(rate), repr(reward),
                                 repr(steps) if steps is not None else ""])


def compare(reports: list[EvalReport]) -> ComparisonTable:
    """Tabulate >= 2 reports over the same scenario shape.

    Deltas are response-rate differences in percentage points for every
    ordered pair with a positive difference.
    """
    if len(reports) < 2:
        raise ValueError("compare needs at least two reports")
    shape = (reports[0].n_agents, reports[0].n_targets)
    for report in reports[1:]:
        if (report.n_agents, report.n_targets) != shape:
            raise ValueError(
                f"mismatched scenarios: {shape} vs {(report.n_agents, report.n_targets)}"
            )
    labels = [r.label or f"model_{k}" for k, r in enumerate(reports)]
    if len(set(labels)) != len(labels):
        raise ValueError("reports must carry distinct labels")
    rates = [100.0 * r.average_task_response_rate for r in reports]
    deltas = {}
    for a, rate_a in zip(labels, rates):
        for b, rate_b in zip(labels, rates):
            if a != b and rate_a > rate_b:
                deltas[(a, b)] = rate_a - rate_b
    return ComparisonTable(
        labels=labels,
        response_rates=rates,
        average_rewards=[r.average_reward for r in reports],
        average_times=[r.average_time for r in reports],
        deltas=deltas,
    )
