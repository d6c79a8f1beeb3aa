"""
Structured logging configuration for the rescue-games solver
Provides consistent JSON-formatted logging across all modules
"""

import json
import logging
import os
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any

DEFAULT_LOG_FILE = "logs/rescue_games.log"


def _jsonable(value: Any) -> Any:
    """Render rationals as "num/den" strings; everything else is left to json."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


class StructuredLogger:
    """
    Structured logger with JSON formatting

    Event Taxonomy:
    - instance_validated: Instance or tree checked against its invariants
    - indexability_checked: z-index recovered or rejected with a witness
    - closed_form_solved: Closed-form solution of an indexable game
    - best_response_computed: Index or brute-force response to a hider mix
    - tree_normalized: Degree-3 normalization inserted auxiliary vertices
    - tree_solved: Recursive tree solution computed
    - expanding_searches_enumerated: Linear extensions enumerated
    - matrix_built: Oracle payoff matrix constructed
    - matrix_solved: Oracle matrix game solved with certificate
    - verification_completed: Closed form compared against the oracle
    - cli_command_started / cli_command_failed: CLI dispatch
    - error_occurred: Error event
    """

    def __init__(self, name: str, log_file: str | None = None):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(logging.INFO)

        # Avoid duplicate handlers
        if self.logger.handlers:
            return

        log_file = log_file if log_file is not None else os.getenv(
            "RESCUE_GAMES_LOG_FILE", DEFAULT_LOG_FILE
        )
        if log_file:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(self._json_formatter())
            self.logger.addHandler(file_handler)

        # Console stays quiet by default; stdout belongs to CLI reports
        console_handler = logging.StreamHandler()
        console_handler.setLevel(os.getenv("RESCUE_GAMES_LOG_LEVEL", "WARNING").upper())
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        self.logger.addHandler(console_handler)
        self.logger.propagate = False

    def _json_formatter(self):
        """Create JSON formatter"""

        class JsonFormatter(logging.Formatter):
            def format(self, record):
                log_data = {
                    "timestamp": datetime.now(timezone.utc).isoformat(),
                    "level": record.levelname,
                    "logger": record.name,
                    "message": record.getMessage(),
                }

                # Add extra fields if present
                if hasattr(record, "event_type"):
                    log_data["event_type"] = record.event_type
                if hasattr(record, "metadata"):
                    log_data["metadata"] = _jsonable(record.metadata)

                return json.dumps(log_data, default=str)

        return JsonFormatter()

    def log_event(
        self, event_type: str, message: str | None = None, level: str = "INFO", **metadata
    ):
        """
        Log structured event

        Args:
            event_type: Event taxonomy type
            message: Optional message
            level: Log level (DEBUG, INFO, WARNING, ERROR)
            **metadata: Additional key-value pairs
        """
        log_message = message or event_type

        extra = {"event_type": event_type, "metadata": metadata}

        if level == "DEBUG":
            self.logger.debug(log_message, extra=extra)
        elif level == "INFO":
            self.logger.info(log_message, extra=extra)
        elif level == "WARNING":
            self.logger.warning(log_message, extra=extra)
        elif level == "ERROR":
            self.logger.error(log_message, extra=extra)

    def info(self, message: str, **kwargs):
        """Log info message"""
        self.log_event("info", message, "INFO", **kwargs)

    def warning(self, message: str, **kwargs):
        """Log warning message"""
        self.log_event("warning", message, "WARNING", **kwargs)

    def error(self, message: str, **kwargs):
        """Log error message"""
        self.log_event("error_occurred", message, "ERROR", **kwargs)
