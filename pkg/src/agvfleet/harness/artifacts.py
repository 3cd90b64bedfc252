"""CSV emitters for traces, field snapshots, and plot data.

All emitted files have fixed headers and column order so downstream plotting
can rely on a stable schema.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..marl.training import EpisodeLog
from ..potential import GridSpec, jacobi_solve, rasterize
from ..world import WorldState
from .evaluate import EvalReport

__all__ = [
    "export_trace_csv",
    "emit_field_snapshot",
    "write_convergence_csv",
    "write_completion_histogram_csv",
    "write_preference_matrix_csv",
]

TRACE_COLUMNS = ("step", "agent", "x", "y", "vx", "vy", "reward")


def _r(value) -> str:
    """Full-precision decimal text for a float (plain Python repr)."""
    return repr(float(value))


def export_trace_csv(rows: list[tuple], path: str | Path) -> None:
    """Episode trace: one row per (step, agent, x, y, vx, vy, reward)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in rows:
            step, agent, x, y, vx, vy, reward = row
            writer.writerow([int(step), int(agent), _r(x), _r(y), _r(vx), _r(vy), _r(reward)])


def _write_matrix(matrix: np.ndarray, path: Path, fmt) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([fmt(v) for v in row])


def emit_field_snapshot(
    world: WorldState,
    agent_index: int,
    grid: GridSpec,
    out_dir: str | Path,
    tol: float = 1e-6,
    max_iters: int = 100_000,
    prefix: str = "field",
) -> tuple[Path, Path]:
    """Solve one agent's field and dump value + mask matrices as CSV.

    Returns (values_path, mask_path). Rows are x cells, columns y cells.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    solved = jacobi_solve(rasterize(world, agent_index, grid), tol=tol, max_iters=max_iters)
    values_path = out_dir / f"{prefix}_values.csv"
    mask_path = out_dir / f"{prefix}_mask.csv"
    _write_matrix(solved.values, values_path, _r)
    _write_matrix(solved.mask, mask_path, int)
    return values_path, mask_path


def read_matrix_csv(path: str | Path, dtype=np.float64) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh)]
    return np.asarray(rows, dtype=dtype)


def write_convergence_csv(log: list[EpisodeLog], path: str | Path) -> None:
    """Training-curve data: per-episode task response rate and return."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("episode", "response_rate", "mean_return_per_agent"))
        for entry in log:
            writer.writerow(
                [entry.episode, _r(entry.response_rate), _r(entry.mean_return_per_agent)]
            )


def write_completion_histogram_csv(report: EvalReport, path: str | Path) -> None:
    """Per-round completion counts: episodes finishing k of n tasks."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("tasks_completed", "episodes"))
        for k, count in enumerate(report.completion_histogram):
            writer.writerow([k, count])


def write_preference_matrix_csv(report: EvalReport, path: str | Path) -> None:
    """Agent-target arrival counts from end-of-episode matchings."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("agent", "target", "arrivals"))
        for i, row in enumerate(report.preference_matrix):
            for j, count in enumerate(row):
                writer.writerow([i, j, count])
