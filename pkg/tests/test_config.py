"""Experiment config files: parsing, validation, fixtures, round trips."""

from importlib import resources

import pytest

from agvfleet.config import ConfigError, ExperimentConfig, load_config, parse_config_text, save_config


class TestParsing:
    def test_minimal_file_uses_defaults(self):
        cfg = parse_config_text("n_agents = 6\nn_targets = 6\n")
        assert cfg.scenario.n_agents == 6
        assert cfg.scenario.dt == 0.1
        assert cfg.train.batch_size == 256
        assert cfg.episodes == 30_000

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config_text("# header\n\nseed = 42  # inline\n")
        assert cfg.scenario.seed == 42

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("n_agnets = 3\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError, match="bad value"):
            parse_config_text("n_agents = three\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("just some words\n")

    def test_invariant_violation_reported(self):
        with pytest.raises(ConfigError):
            parse_config_text("n_agents = 3\nn_targets = 4\n")

    def test_every_section_reachable(self):
        text = "grid_cells = 16\nipf_weight = 0.5\nlr_actor = 0.01\neval_episodes = 10\n"
        cfg = parse_config_text(text)
        assert cfg.field.grid_cells == 16
        assert cfg.field.ipf_weight == 0.5
        assert cfg.train.lr_actor == 0.01
        assert cfg.eval_episodes == 10


class TestRoundTrip:
    def test_save_load_identity(self, tmp_path):
        cfg = ExperimentConfig(episodes=123, eval_episodes=7)
        path = tmp_path / "exp.cfg"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_desk_variant_divides_budget(self):
        cfg = ExperimentConfig(episodes=30_000)
        assert cfg.desk_variant().episodes == 3_000
        assert cfg.desk_variant().scenario == cfg.scenario


class TestShippedFixtures:
    @pytest.mark.parametrize(
        "name,n,episodes",
        [
            ("3v3.cfg", 3, 30_000),
            ("3v3_desk.cfg", 3, 3_000),
            ("6v6_maddpg.cfg", 6, 50_000),
            ("6v6_maddpg_desk.cfg", 6, 5_000),
            ("6v6_bicnet.cfg", 6, 90_000),
            ("6v6_bicnet_desk.cfg", 6, 9_000),
        ],
    )
    def test_fixture_parses_with_published_budget(self, name, n, episodes):
        text = resources.files("agvfleet.configs").joinpath(name).read_text()
        cfg = parse_config_text(text, source=name)
        assert cfg.scenario.n_agents == n
        assert cfg.episodes == episodes
        assert cfg.eval_episodes == 300
