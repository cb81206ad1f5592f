"""Scenario configuration: defaults, overrides and file loading."""

import pytest

from tdle.config import ScenarioConfig, apply_overrides, load_config


class TestDefaults:
    def test_key_values(self):
        cfg = ScenarioConfig()
        assert cfg.sensor_range_m == 10.0
        assert cfg.beam_count == 360
        assert cfg.epsilon_m == 0.5
        assert cfg.min_unknown_cells == 10
        assert cfg.n_fp == 30
        assert cfg.n_sr == 25
        assert cfg.tau_unknown == 0.8
        assert cfg.t0 == 100.0
        assert cfg.t_stop == 0.01
        assert cfg.n_ite == 2000
        assert (cfg.lambda_s, cfg.lambda_d, cfg.lambda_l) == (0.2, 0.5, 1.0)
        assert (cfg.lambda_c, cfg.lambda_i, cfg.lambda_m) == (1.0, 1.0, 0.5)
        assert cfg.robot_radius_m == 0.2
        assert cfg.speed_mps == 0.5
        assert cfg.tick_budget == 120000

    def test_subconfigs_carry_values(self):
        cfg = ScenarioConfig(n_fp=12, n_sr=9, mu=0.5, lambda_m=2.0, speed_mps=1.5)
        assert cfg.frontier().n_fp == 12
        assert cfg.regions().n_sr == 9
        assert cfg.asa().mu == 0.5
        assert cfg.revenue().lambda_m == 2.0
        assert cfg.nav().speed_mps == 1.5

    def test_as_dict_round_trips(self):
        cfg = ScenarioConfig()
        d = cfg.as_dict()
        assert d["n_ite"] == 2000
        assert ScenarioConfig(**d) == cfg


class TestOverrides:
    def test_coerces_types(self):
        cfg = apply_overrides(ScenarioConfig(), {"n_ite": "500", "t0": "50.5"})
        assert cfg.n_ite == 500 and isinstance(cfg.n_ite, int)
        assert cfg.t0 == 50.5

    def test_unknown_key_lists_valid_keys(self):
        with pytest.raises(KeyError, match="n_ite"):
            apply_overrides(ScenarioConfig(), {"bogus": "1"})


class TestLoadConfig:
    def test_parses_file(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("# comment\nn_ite = 100\nspeed_mps = 1.0  # inline\n\n")
        cfg = load_config(path)
        assert cfg.n_ite == 100
        assert cfg.speed_mps == 1.0

    def test_bad_line_reports_lineno(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("n_ite 100\n")
        with pytest.raises(ValueError, match=r":1:"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("warp_speed = 9\n")
        with pytest.raises(KeyError):
            load_config(path)
