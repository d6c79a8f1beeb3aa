import json
import logging
from fractions import Fraction as F

from src.utils.logging_config import StructuredLogger


def test_file_handler_writes_json_events(tmp_path):
    log_file = tmp_path / "logs" / "events.log"
    logger = StructuredLogger("rescue_games.test_json", log_file=str(log_file))
    logger.log_event("tree_solved", vertices=5, value=F(14, 177), hider={"A": F(5, 59)})
    for handler in logger.logger.handlers:
        handler.flush()

    record = json.loads(log_file.read_text(encoding="utf-8").splitlines()[-1])
    assert record["event_type"] == "tree_solved"
    assert record["level"] == "INFO"
    assert record["metadata"] == {"vertices": 5, "value": "14/177", "hider": {"A": "5/59"}}


def test_empty_log_file_disables_file_handler():
    logger = StructuredLogger("rescue_games.test_console_only", log_file="")
    assert not any(isinstance(h, logging.FileHandler) for h in logger.logger.handlers)


def test_handlers_are_not_duplicated(tmp_path):
    first = StructuredLogger("rescue_games.test_once", log_file=str(tmp_path / "a.log"))
    second = StructuredLogger("rescue_games.test_once", log_file=str(tmp_path / "b.log"))
    assert first.logger is second.logger
    assert len(second.logger.handlers) == 2
    assert not (tmp_path / "b.log").exists()


def test_debug_events_are_filtered(tmp_path):
    log_file = tmp_path / "debug.log"
    logger = StructuredLogger("rescue_games.test_levels", log_file=str(log_file))
    logger.log_event("matrix_built", level="DEBUG", rows=8)
    logger.error("boom", cause="test")
    for handler in logger.logger.handlers:
        handler.flush()

    events = [json.loads(line)["event_type"] for line in log_file.read_text().splitlines()]
    assert events == ["error_occurred"]


def test_importing_creates_no_logger():
    from src.utils import logging_config

    assert not hasattr(logging_config, "logger")
