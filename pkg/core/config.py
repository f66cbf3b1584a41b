# Configuration management for sgfrwt
import copy
import os
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

import yaml

from .exceptions import ConfigurationError
from .helpers import parse_bool, parse_float_list, read_key_value_file

CONFIG_FILE = "config/sgfrwt.yaml"
DEFAULTS_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config", "sgfrwt.yaml")


def _deep_merge(base, override):
    """Merge ``override`` into a copy of ``base``, recursing into dicts."""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class ConfigManager:
    """
    Configuration manager for sgfrwt.

    Holds the shipped defaults merged with an optional user file. Instances
    are independent, so tests can point one at a temporary config home.
    """

    def __init__(self, config_home=None):
        """
        Initialize configuration manager.

        Args:
                config_home: Override config home directory (useful for testing)
        """
        self._config_home = config_home
        self._global_config = None

    def find_config_home(self):
        """
        Find the sgfrwt configuration directory.
        Priority order:
        1. Constructor override (if provided)
        2. SGFRWT_HOME environment variable
        3. XDG_CONFIG_HOME/sgfrwt if XDG_CONFIG_HOME is set
        4. ~/.config/sgfrwt (if it exists and has config)
        5. Current working directory (if config/sgfrwt.yaml exists locally)
        6. ~/.config/sgfrwt (final fallback)
        """
        if self._config_home is not None:
            return self._config_home

        env_home = os.environ.get("SGFRWT_HOME")
        if env_home:
            self._config_home = os.path.expanduser(env_home)
            return self._config_home

        xdg_config_home = os.environ.get("XDG_CONFIG_HOME")
        if xdg_config_home:
            self._config_home = os.path.expanduser(os.path.join(xdg_config_home, "sgfrwt"))
            return self._config_home

        user_config = os.path.expanduser("~/.config/sgfrwt")
        if os.path.exists(os.path.join(user_config, CONFIG_FILE)):
            self._config_home = user_config
            return self._config_home

        cwd = os.getcwd()
        if os.path.exists(os.path.join(cwd, CONFIG_FILE)):
            self._config_home = cwd
            return self._config_home

        self._config_home = user_config
        return self._config_home

    def resolve_path(self, path):
        """Resolve a path relative to config home if it's not absolute."""
        if os.path.isabs(path):
            return path
        return os.path.join(self.find_config_home(), path)

    def load_global_config(self):
        """Load shipped defaults merged with the user's config/sgfrwt.yaml."""
        if self._global_config is None:
            with open(DEFAULTS_FILE, "r") as f:
                defaults = yaml.safe_load(f) or {}
            user_file = self.resolve_path(CONFIG_FILE)
            user = {}
            if os.path.exists(user_file):
                try:
                    with open(user_file, "r") as f:
                        user = yaml.safe_load(f) or {}
                except yaml.YAMLError as e:
                    raise ConfigurationError(f"Invalid YAML in {user_file}: {e}")
                if not isinstance(user, dict):
                    raise ConfigurationError(f"{user_file} must contain a mapping")
            self._global_config = _deep_merge(defaults, user)
        return self._global_config

    def get_config_value(self, path, default=None):
        """Get a configuration value using dot notation (e.g., 'fast.order')."""
        config = self.load_global_config()
        value = config
        for key in path.split("."):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def reset(self):
        """Reset cached configuration (useful for testing or reload)."""
        self._global_config = None
        self._config_home = None


_default_config_manager = ConfigManager()


def find_config_home():
    """Find the sgfrwt configuration directory."""
    return _default_config_manager.find_config_home()


def resolve_path(path):
    """Resolve a path relative to config home if it's not absolute."""
    return _default_config_manager.resolve_path(path)


def load_global_config():
    """Load merged global configuration."""
    return _default_config_manager.load_global_config()


def get_config_value(path, default=None):
    """Get a configuration value using dot notation (e.g., 'cg.tol')."""
    return _default_config_manager.get_config_value(path, default)


def reset_config():
    """Reset the default configuration manager (useful for testing)."""
    _default_config_manager.reset()


# ============================================================================
# Run configuration
# ============================================================================


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one CLI command."""

    command: str = ""
    input: Optional[str] = None
    output: Optional[str] = None
    thetas: Tuple[float, ...] = (1.0,)
    J: int = 4
    K: float = 20.0
    M: int = 40
    alpha: int = 2
    beta: int = 2
    x1: float = 1.0
    x2: float = 2.0
    scales: Tuple[float, ...] = ()
    sigma: float = 0.1
    sparsify: str = "dense"
    epsilon: float = 1e-8
    knn: int = 10
    theta_w: float = 1.0
    k: float = 1.0
    tol: float = 1e-10
    max_iter: int = 200
    seed: int = 0
    backend: str = "exact"
    extension: str = "even"
    period_factor: float = 3.0
    propagator: str = "dense"
    r_max_mode: str = "exact"
    cg_method: str = "cg"
    mode: str = "magnitude"
    threads: int = 1

    def numeric_items(self):
        """Numeric settings echoed into output file headers."""
        return {
            "thetas": list(self.thetas),
            "J": self.J,
            "K": self.K,
            "M": self.M,
            "alpha": self.alpha,
            "beta": self.beta,
            "x1": self.x1,
            "x2": self.x2,
            "scales": list(self.scales),
            "sigma": self.sigma,
            "theta_w": self.theta_w,
            "k": self.k,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "backend": self.backend,
            "extension": self.extension,
            "period_factor": self.period_factor,
            "r_max_mode": self.r_max_mode,
        }


# RunConfig field -> dot path in the YAML defaults
CONFIG_PATHS = {
    "J": "bank.J",
    "K": "bank.K",
    "M": "fast.order",
    "alpha": "kernel.alpha",
    "beta": "kernel.beta",
    "x1": "kernel.x1",
    "x2": "kernel.x2",
    "sigma": "graph.sigma",
    "sparsify": "graph.sparsify",
    "epsilon": "graph.epsilon",
    "knn": "graph.knn",
    "theta_w": "graph.theta_w",
    "k": "graph.k",
    "tol": "cg.tol",
    "max_iter": "cg.max_iter",
    "cg_method": "cg.method",
    "seed": "seed",
    "threads": "threads",
    "extension": "fast.extension",
    "period_factor": "fast.period_factor",
    "propagator": "fast.propagator",
    "r_max_mode": "spectral.r_max_mode",
    "mode": "augment.mode",
}

# key=value spellings accepted in --config files besides the field names
KEY_ALIASES = {"order": "M", "m": "M", "j": "J", "theta": "thetas", "method": "cg_method"}


def coerce_setting(name, value):
    """Convert a raw value to the type of RunConfig field ``name``."""
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    try:
        if name in ("thetas", "scales"):
            if isinstance(value, (list, tuple)):
                return tuple(float(v) for v in value)
            return tuple(parse_float_list(str(value)))
        if kind in (int, "int"):
            return int(float(value))
        if kind in (float, "float"):
            return float(value)
        if kind in (bool, "bool"):
            return parse_bool(value)
        return None if value is None else str(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Bad value for {name}: {value!r}")


def build_run_config(command, overrides=None, config_file=None, manager=None):
    """
    Assemble a RunConfig from defaults, user YAML, a key=value file and flags.

    Args:
        command: Subcommand name
        overrides: Dict of CLI flag values; ``None`` entries are ignored
        config_file: Optional key=value override file
        manager: ConfigManager to read YAML values from (default instance)

    Returns:
        RunConfig

    Raises:
        ConfigurationError: Unknown key or unparsable value
    """
    manager = manager or _default_config_manager
    names = {f.name for f in fields(RunConfig)} - {"command"}
    values = {}
    for name, path in CONFIG_PATHS.items():
        raw = manager.get_config_value(path)
        if raw is not None:
            values[name] = coerce_setting(name, raw)

    if config_file:
        for key, raw in read_key_value_file(config_file).items():
            key = KEY_ALIASES.get(key, key)
            if key not in names:
                raise ConfigurationError(f"{config_file}: unknown key '{key}'")
            values[key] = coerce_setting(key, raw)

    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in names:
            raise ConfigurationError(f"Unknown option '{key}'")
        values[key] = coerce_setting(key, raw)

    return replace(RunConfig(), command=command, **values)
