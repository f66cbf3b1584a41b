import logging

import pytest
from rich.logging import RichHandler

from core import helpers
from core.exceptions import ConfigurationError


def test_parse_key_value_lines():
    lines = ["# comment", "", "alpha = 2", "period-factor=3.5", "K=20", "k=1"]
    values = helpers.parse_key_value_lines(lines)
    assert values == {"alpha": "2", "period_factor": "3.5", "K": "20", "k": "1"}


def test_parse_key_value_last_wins():
    assert helpers.parse_key_value_lines(["J=4", "J=5"]) == {"J": "5"}


def test_parse_key_value_value_keeps_equals():
    assert helpers.parse_key_value_lines(["note=a=b"]) == {"note": "a=b"}


def test_parse_key_value_missing_equals():
    with pytest.raises(ConfigurationError, match="cfg.txt:2"):
        helpers.parse_key_value_lines(["J=4", "oops"], source="cfg.txt")


def test_parse_key_value_empty_key():
    with pytest.raises(ConfigurationError):
        helpers.parse_key_value_lines(["=4"])


def test_read_key_value_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("theta=0.5,1.0\n")
    assert helpers.read_key_value_file(str(path)) == {"theta": "0.5,1.0"}


def test_read_key_value_file_missing(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        helpers.read_key_value_file(str(tmp_path / "missing.cfg"))


def test_parse_float_list():
    assert helpers.parse_float_list("0.2,0.4, 0.6") == [0.2, 0.4, 0.6]
    assert helpers.parse_float_list("[1, 2]") == [1.0, 2.0]
    assert helpers.parse_float_list("  ") == []


def test_parse_int_list():
    assert helpers.parse_int_list("64,128") == [64, 128]


@pytest.mark.parametrize("text, expected", [("true", True), ("Yes", True), ("0", False), ("off", False)])
def test_parse_bool(text, expected):
    assert helpers.parse_bool(text) is expected


def test_parse_bool_invalid():
    with pytest.raises(ConfigurationError):
        helpers.parse_bool("maybe")


def test_format_value():
    assert helpers.format_value(True) == "true"
    assert helpers.format_value(0.1) == "0.1"
    assert helpers.format_value([0.5, 1.0]) == "0.5,1.0"
    assert helpers.format_value("dense") == "dense"


def test_provenance_lines_sorted():
    assert helpers.provenance_lines({"theta": 0.5, "J": 4}) == ["# J=4", "# theta=0.5"]


def test_split_provenance():
    header, body = helpers.split_provenance(["# J=4", "# a note", "value", "1.0"])
    assert header == {"J": "4"}
    assert body == ["value", "1.0"]


def test_split_provenance_all_comments():
    header, body = helpers.split_provenance(["# J=4"])
    assert header == {"J": "4"}
    assert body == []


def test_configure_logging_installs_one_handler():
    helpers.configure_logging("DEBUG")
    helpers.configure_logging("INFO")
    root = logging.getLogger()
    assert sum(isinstance(h, RichHandler) for h in root.handlers) == 1
    assert root.level == logging.INFO


def test_configure_logging_from_config(user_config):
    user_config({"logging": {"level": "error"}})
    helpers.configure_logging()
    assert logging.getLogger().level == logging.ERROR


def test_echo_warning(capsys):
    helpers.echo_warning("careful")
    assert "Warning: careful" in capsys.readouterr().err


@pytest.mark.parametrize(
    "theta, expected",
    [(0.5, "0.50"), (1.0, "1.00"), (0.25, "0.25"), (0.501, "0.501"), (0.505, "0.505"), (1 / 3, repr(1 / 3))],
)
def test_theta_tag(theta, expected):
    assert helpers.theta_tag(theta) == expected


def test_theta_tag_distinct_for_close_orders():
    thetas = [0.5, 0.501, 0.5001, 0.504, 0.4999]
    assert len({helpers.theta_tag(theta) for theta in thetas}) == len(thetas)
