"""
Helper utilities for sgfrwt to reduce code duplication.

Parsing of the key=value text format shared by the bank config, the
``--config`` override file, run reports and the provenance headers written
at the top of every output file.
"""

import logging
import os
from typing import Dict, Iterable, List, Optional, Tuple

import click

from .exceptions import ConfigurationError


def parse_key_value_lines(lines: Iterable[str], source: str = "<input>") -> Dict[str, str]:
    """
    Parse ``key=value`` lines into a dict of raw strings.

    Blank lines and lines starting with ``#`` are skipped. Keys are stripped
    and dashes become underscores; case is kept (``K`` and ``k`` differ). A
    repeated key keeps the last value.

    Args:
        lines: Iterable of text lines
        source: Name used in error messages

    Returns:
        Dict mapping keys to unparsed value strings

    Raises:
        ConfigurationError: If a non-comment line has no ``=``
    """
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigurationError(f"{source}:{lineno}: empty key")
        values[key] = value.strip()
    return values


def read_key_value_file(path: str) -> Dict[str, str]:
    """Read a key=value file from disk."""
    if not os.path.exists(path):
        raise ConfigurationError(f"Config file not found: {path}")
    with open(path, "r") as f:
        return parse_key_value_lines(f, source=path)


def parse_float_list(text: str) -> List[float]:
    """Parse ``"0.2,0.4, 0.6"`` into a list of floats."""
    text = text.strip().strip("[]")
    if not text:
        return []
    return [float(item) for item in text.split(",") if item.strip()]


def parse_int_list(text: str) -> List[int]:
    """Parse ``"64,128"`` into a list of ints."""
    return [int(float(item)) for item in parse_float_list(text)]


def parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"Not a boolean: {text!r}")


def format_value(value) -> str:
    """Format a config value for a provenance header or report line."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def theta_tag(theta: float) -> str:
    """
    Fractional order as it appears in output file names.

    Two decimals when that spelling reads back as the same float, else repr,
    so distinct orders never share a name.
    """
    short = f"{theta:.2f}"
    return short if float(short) == theta else repr(float(theta))


def provenance_lines(items: Dict[str, object]) -> List[str]:
    """
    Render ``# key=value`` header lines, keys in sorted order.

    Sorted keys keep output files byte-identical across runs with the same
    configuration.
    """
    return [f"# {key}={format_value(items[key])}" for key in sorted(items)]


def split_provenance(lines: List[str]) -> Tuple[Dict[str, str], List[str]]:
    """
    Separate leading ``# key=value`` lines from the rest of a file.

    Returns:
        (header dict, remaining lines)
    """
    header = {}
    body_start = 0
    for idx, line in enumerate(lines):
        stripped = line.strip()
        if not stripped.startswith("#"):
            body_start = idx
            break
        content = stripped[1:].strip()
        if "=" in content:
            key, value = content.split("=", 1)
            header[key.strip()] = value.strip()
        body_start = idx + 1
    return header, lines[body_start:]


def configure_logging(level: Optional[str] = None):
    """
    Install a rich log handler on the root logger.

    Args:
        level: Level name; falls back to config ``logging.level``
    """
    from rich.logging import RichHandler

    from .config import get_config_value

    if level is None:
        level = get_config_value("logging.level", "WARNING")
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(show_path=False, rich_tracebacks=False))
    root.setLevel(str(level).upper())


def echo_warning(message: str):
    """Print a warning line to stderr."""
    click.echo(f"Warning: {message}", err=True)
