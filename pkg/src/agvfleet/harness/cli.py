"""Command-line front end: train, eval, compare, field-dump."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..config import load_config
from ..potential import GridSpec
from ..rewards import RewardKind
from ..world import STREAM_EVAL, STREAM_SPAWN, spawn_world
from .artifacts import emit_field_snapshot, export_trace_csv
from .compare import compare
from .evaluate import EvalReport, evaluate, load_checkpoint, rollout_episode
from .experiment import ExperimentSpec, run_experiment

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agvfleet",
        description="Multi-AGV task-allocation experiments: training, evaluation, comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train_p = sub.add_parser("train", help="train a model and evaluate it")
    train_p.add_argument("--config", required=True, help="experiment config file")
    train_p.add_argument("--algo", choices=("maddpg", "bicnet"), default="maddpg")
    train_p.add_argument("--reward", choices=("ipf", "minidist", "greedy"), default="ipf")
    train_p.add_argument("--seed", default="0", help="seed or comma-separated seed list")
    train_p.add_argument("--episodes", type=int, default=None, help="override the config budget")
    train_p.add_argument("--out", default="runs/experiment", help="output directory")
    train_p.add_argument("--desk", action="store_true", help="reduced budget (1/10 episodes)")

    eval_p = sub.add_parser("eval", help="evaluate a saved checkpoint")
    eval_p.add_argument("--config", required=True)
    eval_p.add_argument("--checkpoint", required=True, help="checkpoint directory")
    eval_p.add_argument("--seed", type=int, default=0)
    eval_p.add_argument("--episodes", type=int, default=None, help="evaluation episodes")
    eval_p.add_argument("--out", default=None, help="where to write the report JSON")
    eval_p.add_argument("--label", default="")
    eval_p.add_argument("--trace", default=None, help="export the first episode's trace CSV here")

    cmp_p = sub.add_parser("compare", help="tabulate saved eval reports")
    cmp_p.add_argument("reports", nargs="+", help="eval report JSON files")
    cmp_p.add_argument("--out", default=None, help="optional CSV output path")

    dump_p = sub.add_parser("field-dump", help="dump one agent's solved field as CSV")
    dump_p.add_argument("--config", required=True)
    dump_p.add_argument("--seed", type=int, default=None, help="world seed (default: config)")
    dump_p.add_argument("--agent", type=int, default=0)
    dump_p.add_argument("--out", default="field_dump")
    return parser


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad --seed value {text!r}: {exc}") from exc


def _cmd_train(args) -> int:
    config = load_config(args.config)
    if args.desk:
        config = config.desk_variant()
    spec = ExperimentSpec(
        config=config,
        algorithm=args.algo,
        reward_kind=RewardKind(args.reward),
        seeds=_parse_seeds(args.seed),
        out_dir=Path(args.out),
        episodes=args.episodes,
    )
    reports = run_experiment(spec)
    for report in reports:
        print(
            f"{report.label}: response rate "
            f"{100 * report.average_task_response_rate:.2f}% over "
            f"{report.eval_episodes} eval episodes"
        )
    print(f"artifacts in {spec.out_dir}")
    return 0


def _cmd_eval(args) -> int:
    config = load_config(args.config)
    learner = load_checkpoint(args.checkpoint)
    episodes = args.episodes if args.episodes is not None else config.eval_episodes
    report = evaluate(
        learner,
        config.scenario,
        eval_episodes=episodes,
        seed=args.seed,
        label=args.label or f"{learner.algorithm}-eval",
    )
    if args.trace:
        record = rollout_episode(
            config.scenario,
            lambda obs: learner.select_actions(obs, 0.0),
            np.random.default_rng((args.seed, STREAM_EVAL, 0)),
            record_trajectory=True,
        )
        export_trace_csv(record.trajectory, args.trace)
        print(f"trace written to {args.trace}")
    if args.out:
        report.save(args.out)
        print(f"report written to {args.out}")
    else:
        print(report.to_json())
    return 0


def _cmd_compare(args) -> int:
    reports = [EvalReport.load(path) for path in args.reports]
    table = compare(reports)
    print(table.render_text())
    print()
    print("ordering (best first):", " > ".join(table.ordering()))
    if args.out:
        table.save_csv(args.out)
        print(f"table written to {args.out}")
    return 0


def _cmd_field_dump(args) -> int:
    config = load_config(args.config)
    scenario = config.scenario
    seed = args.seed if args.seed is not None else scenario.seed
    world = spawn_world(scenario, rng=np.random.default_rng((seed, STREAM_SPAWN, 0)))
    grid = GridSpec(config.field.grid_cells, scenario.world_half_extent)
    values_path, mask_path = emit_field_snapshot(world, args.agent, grid, args.out)
    print(f"wrote {values_path} and {mask_path}")
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "eval": _cmd_eval,
    "compare": _cmd_compare,
    "field-dump": _cmd_field_dump,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # surface a diagnostic, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
