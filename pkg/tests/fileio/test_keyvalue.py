import pytest

from c2f_motion.io.keyvalue import (
    build_config, dump_config, load_config, merge_overrides, parse_key_values, write_config,
)
from c2f_motion.types import ConfigError, ReconConfig, RegistrationConfig, SimulationConfig


class TestParseKeyValues:
    """Flat key = value text into a nested dict"""

    def test_nested_keys_and_comments(self):
        text = "# header\nseed = 3  # trailing\n\nschedule.steps = 50\nregistration.lam = none\n"
        assert parse_key_values(text) == {
            "seed": "3",
            "schedule": {"steps": "50"},
            "registration": {"lam": None},
        }

    @pytest.mark.parametrize("text", [
        "seed 3",
        " = 3",
        "seed = 1\nseed = 2",
        "schedule = 3\nschedule.steps = 2",
        "schedule..steps = 2",
    ])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_key_values(text)

    def test_value_may_contain_equals(self):
        assert parse_key_values("a = b=c") == {"a": "b=c"}


class TestBuildConfig:
    def test_strings_validated(self):
        cfg = build_config(ReconConfig, parse_key_values("schedule.steps = 50\nguidance.scaling = normalized"))
        assert cfg.schedule.steps == 50
        assert cfg.guidance.scaling == "normalized"

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            build_config(ReconConfig, {"schedule": {"stepz": "50"}})

    def test_invalid_value(self):
        with pytest.raises(ConfigError) as info:
            build_config(SimulationConfig, {"acceleration": "0.5"})
        assert "acceleration" in info.value.reason


class TestDumpConfig:
    def test_round_trip(self):
        cfg = ReconConfig(seed=7, motion_updates=(90, 40, 3),
                          registration=RegistrationConfig(lam=0.05),
                          guidance={"gamma": 2.5, "frozen_denoiser": True})
        assert build_config(ReconConfig, parse_key_values(dump_config(cfg))) == cfg

    def test_defaults_round_trip(self):
        cfg = SimulationConfig()
        assert build_config(SimulationConfig, parse_key_values(dump_config(cfg))) == cfg

    @pytest.mark.parametrize(("model", "key", "value"), [
        (SimulationConfig, "motion", "nonrigid"),
        (SimulationConfig, "motion", "rigid"),
        (SimulationConfig, "motion", "static"),
        (SimulationConfig, "acs_mode", "disjoint"),
        (SimulationConfig, "acs_mode", "shared"),
        (ReconConfig, "guidance.scaling", "constant"),
        (ReconConfig, "guidance.scaling", "normalized"),
        (ReconConfig, "schedule.shaping", "shell"),
        (ReconConfig, "schedule.shaping", "isotropic"),
        (ReconConfig, "estimate", "sample"),
        (ReconConfig, "estimate", "mean"),
    ])
    def test_every_choice_round_trips(self, model, key, value):
        cfg = build_config(model, merge_overrides({}, [f"{key}={value}"]))
        text = dump_config(cfg)
        assert build_config(model, parse_key_values(text)) == cfg
        section, _, name = key.rpartition(".")
        assert getattr(getattr(cfg, section) if section else cfg, name) == value

    def test_comments_first(self):
        text = dump_config(RegistrationConfig(), comments={"command": "register"})
        lines = text.splitlines()
        assert lines[0] == "# command: register"
        assert "lam = none" in lines
        assert "grid_spacing = 16" in lines


class TestOverrides:
    def test_override_replaces_value(self):
        tree = {"schedule": {"steps": "50"}, "seed": "1"}
        merged = merge_overrides(tree, ["schedule.steps=20", "n_motion_updates = 0"])
        assert merged == {"schedule": {"steps": "20"}, "seed": "1", "n_motion_updates": "0"}
        assert tree["schedule"]["steps"] == "50"

    def test_malformed_override(self):
        with pytest.raises(ConfigError):
            merge_overrides({}, ["steps"])

    def test_load_with_overrides(self, tmp_path):
        path = tmp_path / "recon.conf"
        write_config(path, ReconConfig(seed=2), comments={"origin": "test"})
        cfg = load_config(path, ReconConfig, ["seed=5", "guidance.gamma=3"])
        assert cfg.seed == 5
        assert cfg.guidance.gamma == 3.0
        assert cfg.schedule == ReconConfig().schedule
