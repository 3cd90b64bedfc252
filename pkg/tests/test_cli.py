"""CLI subcommands end to end on a tiny scenario."""

import json

import pytest

from agvfleet.config import ExperimentConfig, save_config
from agvfleet.harness.cli import main
from agvfleet.marl import TrainConfig
from agvfleet.world import ScenarioConfig


@pytest.fixture
def tiny_config_path(tmp_path):
    cfg = ExperimentConfig(
        scenario=ScenarioConfig(max_steps=6, seed=0),
        train=TrainConfig(
            hidden_width=8, batch_size=8, buffer_capacity=128, warmup_transitions=16,
        ),
        episodes=3,
        eval_episodes=4,
    )
    path = tmp_path / "tiny.cfg"
    save_config(cfg, path)
    return path


class TestTrainCommand:
    def test_train_writes_artifacts(self, tiny_config_path, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(
            [
                "train", "--config", str(tiny_config_path),
                "--algo", "maddpg", "--reward", "greedy",
                "--seed", "0", "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "seed_0" / "eval_report.json").exists()
        assert "response rate" in capsys.readouterr().out

    def test_desk_flag_cuts_budget(self, tiny_config_path, tmp_path):
        import csv

        out = tmp_path / "desk"
        # 3 episodes // 10 -> floor of 1 episode
        code = main(
            [
                "train", "--config", str(tiny_config_path),
                "--reward", "minidist", "--out", str(out), "--desk",
            ]
        )
        assert code == 0
        with open(out / "seed_0" / "train_log.csv", newline="") as fh:
            assert len(list(csv.reader(fh))) == 2  # header + 1 episode

    def test_multiple_seeds(self, tiny_config_path, tmp_path):
        out = tmp_path / "multi"
        code = main(
            [
                "train", "--config", str(tiny_config_path),
                "--reward", "greedy", "--seed", "0,1", "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "seed_0").is_dir() and (out / "seed_1").is_dir()


class TestEvalCommand:
    def test_eval_checkpoint(self, tiny_config_path, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(
            [
                "train", "--config", str(tiny_config_path),
                "--reward", "greedy", "--out", str(out),
            ]
        ) == 0
        capsys.readouterr()
        report_path = tmp_path / "report.json"
        code = main(
            [
                "eval", "--config", str(tiny_config_path),
                "--checkpoint", str(out / "seed_0" / "checkpoint"),
                "--episodes", "3", "--out", str(report_path), "--label", "reloaded",
            ]
        )
        assert code == 0
        data = json.loads(report_path.read_text())
        assert data["schema_version"] == 1
        assert data["label"] == "reloaded"


class TestCompareCommand:
    def test_compare_two_reports(self, tiny_config_path, tmp_path, capsys):
        paths = []
        for k, reward in enumerate(("greedy", "minidist")):
            out = tmp_path / f"run{k}"
            main(
                [
                    "train", "--config", str(tiny_config_path),
                    "--reward", reward, "--out", str(out),
                ]
            )
            paths.append(str(out / "seed_0" / "eval_report.json"))
        capsys.readouterr()
        table_path = tmp_path / "table.csv"
        code = main(["compare", *paths, "--out", str(table_path)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "ordering (best first):" in printed
        assert table_path.exists()


class TestFieldDumpCommand:
    def test_field_dump(self, tiny_config_path, tmp_path, capsys):
        out = tmp_path / "field"
        code = main(
            [
                "field-dump", "--config", str(tiny_config_path),
                "--agent", "1", "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "field_values.csv").exists()
        assert (out / "field_mask.csv").exists()


class TestErrors:
    def test_missing_config_nonzero_exit(self, tmp_path, capsys):
        code = main(["train", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_config_nonzero_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("not_a_key = 4\n")
        code = main(["train", "--config", str(path)])
        assert code == 2
        assert "unknown key" in capsys.readouterr().err

    def test_mismatched_checkpoint_dimensions(self, tiny_config_path, tmp_path, capsys):
        out = tmp_path / "run"
        main(["train", "--config", str(tiny_config_path), "--reward", "greedy",
              "--out", str(out)])
        capsys.readouterr()
        big = ExperimentConfig(scenario=ScenarioConfig(n_agents=6, n_targets=6))
        big_path = tmp_path / "big.cfg"
        save_config(big, big_path)
        code = main(
            [
                "eval", "--config", str(big_path),
                "--checkpoint", str(out / "seed_0" / "checkpoint"),
                "--episodes", "2",
            ]
        )
        assert code == 2
        assert "checkpoint is for" in capsys.readouterr().err
