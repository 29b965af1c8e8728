"""Configuration parsing, merging, and validation."""

import pytest

from lexeff.config import (AnalysisConfig, ConfigError, build_config,
                           parse_beta_grid, read_config_file)


class TestBetaGrid:
    def test_range_spec(self):
        grid = parse_beta_grid("0:1:0.25")
        assert grid == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_list_spec(self):
        assert parse_beta_grid("0,0.5,2") == (0.0, 0.5, 2.0)

    def test_bad_spec(self):
        with pytest.raises(ConfigError):
            parse_beta_grid("0:1")


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# comment line\n"
            "gamma=7.5\n"
            "beta_grid=0:1:0.5\n"
            "smoothing=false\n"
            "separator=-\n"
            "seed=99\n",
            encoding="utf-8")
        config = build_config(read_config_file(path))
        assert config.gamma == 7.5
        assert config.beta_grid == (0.0, 0.5, 1.0)
        assert config.smoothing is False
        assert config.separator == "-"
        assert config.seed == 99

    def test_unknown_key_named(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("gama=7.5\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="gama"):
            read_config_file(path)

    def test_space_separator_token(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("separator=space\n", encoding="utf-8")
        assert build_config(read_config_file(path)).separator == " "

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("gamma=7.5\nseed=1\n", encoding="utf-8")
        config = build_config(read_config_file(path), {"gamma": 2.0})
        assert config.gamma == 2.0
        assert config.seed == 1


class TestValidation:
    def test_defaults_valid(self):
        config = AnalysisConfig()
        assert config.validate() is config
        assert len(config.beta_grid) == 1001

    @pytest.mark.parametrize("overrides", [
        {"gamma": -1.0},
        {"k": 0},
        {"replicates": 0},
        {"threads": 0},
        {"separator": "ab"},
        {"head_position": "middle"},
        {"length_mode": "syllables"},
        {"mode": "guess"},
        {"search_mode": "magic"},
        {"beta_grid": (1.0, 0.5)},
        {"seed": 2**70},
    ])
    def test_out_of_range_rejected(self, overrides):
        with pytest.raises(ConfigError):
            build_config({}, overrides)
