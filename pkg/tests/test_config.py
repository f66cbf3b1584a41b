"""
Test suite for core/config.py

Tests configuration loading, resolution, and run configuration assembly.
"""

import os
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml

from core.config import (
    ConfigManager,
    RunConfig,
    build_run_config,
    find_config_home,
    get_config_value,
    load_global_config,
    reset_config,
    resolve_path,
)
from core.exceptions import ConfigurationError


@pytest.fixture
def config_home(tmp_path):
    """Config home containing config/sgfrwt.yaml with a few overrides."""
    (tmp_path / "config").mkdir()
    data = {"bank": {"J": 6}, "fast": {"order": 24}, "graph": {"sparsify": "knn"}}
    with open(tmp_path / "config" / "sgfrwt.yaml", "w") as f:
        yaml.dump(data, f)
    return str(tmp_path)


def write_kv(tmp_path, text):
    path = Path(tmp_path) / "run.cfg"
    path.write_text(text)
    return str(path)


class TestConfigManager:
    """Test the ConfigManager class."""

    def test_init_default(self):
        """Test ConfigManager initialization with defaults."""
        manager = ConfigManager()
        assert manager._config_home is None
        assert manager._global_config is None

    def test_init_with_override(self, config_home):
        """Test ConfigManager initialization with config_home override."""
        manager = ConfigManager(config_home=config_home)
        assert manager.find_config_home() == config_home

    def test_reset(self, config_home):
        """Test resetting the configuration manager."""
        manager = ConfigManager(config_home=config_home)
        manager.load_global_config()
        manager.reset()
        assert manager._global_config is None
        assert manager._config_home is None


class TestFindConfigHome:
    """Test configuration home directory resolution."""

    def test_constructor_override_priority(self, config_home):
        """Constructor override beats SGFRWT_HOME."""
        manager = ConfigManager(config_home=config_home)
        with patch.dict(os.environ, {"SGFRWT_HOME": "/some/other/path"}):
            assert manager.find_config_home() == config_home

    def test_env_var_priority(self, config_home):
        """SGFRWT_HOME is used when set."""
        manager = ConfigManager()
        with patch.dict(os.environ, {"SGFRWT_HOME": config_home}):
            assert manager.find_config_home() == config_home

    def test_env_var_tilde_expanded(self):
        manager = ConfigManager()
        with patch.dict(os.environ, {"SGFRWT_HOME": "~/sgfrwt-test"}):
            assert manager.find_config_home() == os.path.expanduser("~/sgfrwt-test")

    def test_xdg_config_home(self, tmp_path):
        """XDG_CONFIG_HOME/sgfrwt is used when SGFRWT_HOME is unset."""
        manager = ConfigManager()
        env = {k: v for k, v in os.environ.items() if k != "SGFRWT_HOME"}
        env["XDG_CONFIG_HOME"] = str(tmp_path)
        with patch.dict(os.environ, env, clear=True):
            assert manager.find_config_home() == os.path.join(str(tmp_path), "sgfrwt")

    def test_caching_config_home(self, config_home):
        """Config home is cached after the first lookup."""
        manager = ConfigManager()
        with patch.dict(os.environ, {"SGFRWT_HOME": config_home}):
            first = manager.find_config_home()
        with patch.dict(os.environ, {"SGFRWT_HOME": "/elsewhere"}):
            second = manager.find_config_home()
        assert first == second == config_home


class TestResolvePath:
    """Test path resolution relative to config home."""

    def test_absolute_path_unchanged(self, config_home):
        manager = ConfigManager(config_home=config_home)
        assert manager.resolve_path("/absolute/path/to/file") == "/absolute/path/to/file"

    def test_relative_path_resolved(self, config_home):
        manager = ConfigManager(config_home=config_home)
        assert manager.resolve_path("config/sgfrwt.yaml") == os.path.join(config_home, "config/sgfrwt.yaml")


class TestLoadGlobalConfig:
    """Test loading the shipped defaults merged with the user file."""

    def test_defaults_without_user_file(self, tmp_path):
        manager = ConfigManager(config_home=str(tmp_path))
        config = manager.load_global_config()
        assert config["bank"]["J"] == 4
        assert config["fast"]["extension"] == "even"
        assert config["cg"]["tol"] == 1e-10

    def test_user_file_merged_over_defaults(self, config_home):
        """User values replace defaults; sibling keys survive."""
        config = ConfigManager(config_home=config_home).load_global_config()
        assert config["bank"]["J"] == 6
        assert config["bank"]["K"] == 20.0
        assert config["fast"]["order"] == 24
        assert config["fast"]["propagator"] == "dense"

    def test_caching_global_config(self, config_home):
        manager = ConfigManager(config_home=config_home)
        assert manager.load_global_config() is manager.load_global_config()

    def test_invalid_yaml_raises(self, tmp_path):
        (tmp_path / "config").mkdir()
        (tmp_path / "config" / "sgfrwt.yaml").write_text("bank: [unclosed\n")
        with pytest.raises(ConfigurationError, match="Invalid YAML"):
            ConfigManager(config_home=str(tmp_path)).load_global_config()

    def test_non_mapping_raises(self, tmp_path):
        (tmp_path / "config").mkdir()
        (tmp_path / "config" / "sgfrwt.yaml").write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError, match="mapping"):
            ConfigManager(config_home=str(tmp_path)).load_global_config()


class TestGetConfigValue:
    """Test dot-notation lookups."""

    def test_nested_value(self, config_home):
        assert ConfigManager(config_home=config_home).get_config_value("graph.sparsify") == "knn"

    def test_missing_value_default(self, config_home):
        manager = ConfigManager(config_home=config_home)
        assert manager.get_config_value("fast.nope", 7) == 7
        assert manager.get_config_value("bank.J.deeper", "x") == "x"

    def test_module_level_wrappers(self, user_config, temp_dir):
        """Module functions use the default manager (SGFRWT_HOME from conftest)."""
        user_config({"cg": {"max_iter": 17}})
        assert find_config_home() == temp_dir
        assert resolve_path("x.yaml") == os.path.join(temp_dir, "x.yaml")
        assert load_global_config()["cg"]["max_iter"] == 17
        assert get_config_value("cg.max_iter") == 17
        reset_config()
        assert get_config_value("cg.method") == "cg"


class TestBuildRunConfig:
    """Test RunConfig assembly from defaults, YAML, key=value files and flags."""

    def test_defaults(self, tmp_path):
        cfg = build_run_config("transform", manager=ConfigManager(config_home=str(tmp_path)))
        assert cfg == RunConfig(command="transform")

    def test_yaml_values(self, config_home):
        cfg = build_run_config("transform", manager=ConfigManager(config_home=config_home))
        assert (cfg.J, cfg.M, cfg.sparsify) == (6, 24, "knn")

    def test_key_value_file_and_aliases(self, config_home, tmp_path):
        path = write_kv(tmp_path, "theta=0.25, 0.5\norder=12\nmethod=cr\nK=30\nk=2\n")
        cfg = build_run_config("reconstruct", config_file=path, manager=ConfigManager(config_home=config_home))
        assert cfg.thetas == (0.25, 0.5)
        assert cfg.M == 12
        assert cfg.cg_method == "cr"
        assert cfg.K == 30.0
        assert cfg.k == 2.0

    def test_flags_override_file(self, config_home, tmp_path):
        path = write_kv(tmp_path, "J=3\n")
        cfg = build_run_config(
            "transform", {"J": 2, "tol": None}, config_file=path, manager=ConfigManager(config_home=config_home)
        )
        assert cfg.J == 2
        assert cfg.tol == 1e-10

    def test_unknown_file_key(self, tmp_path):
        path = write_kv(tmp_path, "colour=blue\n")
        with pytest.raises(ConfigurationError, match="unknown key 'colour'"):
            build_run_config("transform", config_file=path, manager=ConfigManager(config_home=str(tmp_path)))

    def test_unknown_flag(self, tmp_path):
        with pytest.raises(ConfigurationError):
            build_run_config("transform", {"colour": "blue"}, manager=ConfigManager(config_home=str(tmp_path)))

    def test_bad_value(self, tmp_path):
        path = write_kv(tmp_path, "J=four\n")
        with pytest.raises(ConfigurationError, match="Bad value for J"):
            build_run_config("transform", config_file=path, manager=ConfigManager(config_home=str(tmp_path)))

    def test_numeric_items(self):
        items = RunConfig(thetas=(0.5,), J=3).numeric_items()
        assert items["thetas"] == [0.5]
        assert items["J"] == 3
        assert "command" not in items
