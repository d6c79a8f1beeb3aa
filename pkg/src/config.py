"""Enumeration caps and other environment-driven settings."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import InvalidArgumentError

ENUM_CAP_ENV = "RESCUE_GAMES_ENUM_CAP"
INDEX_CAP_ENV = "RESCUE_GAMES_INDEX_CAP"
BRUTE_FORCE_CAP_ENV = "RESCUE_GAMES_BRUTE_FORCE_CAP"

DEFAULT_SEARCH_CAP = 100_000
DEFAULT_MATRIX_CAP = 1_000_000
DEFAULT_INDEX_CAP = 12
DEFAULT_BRUTE_FORCE_CAP = 9


def _read_cap(name: str) -> int | None:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidArgumentError(f"{name} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise InvalidArgumentError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class EnumerationCaps:
    """Limits on every exhaustive enumeration the package performs."""

    expanding_searches: int = DEFAULT_SEARCH_CAP
    matrix_entries: int = DEFAULT_MATRIX_CAP
    indexability_n: int = DEFAULT_INDEX_CAP
    brute_force_n: int = DEFAULT_BRUTE_FORCE_CAP

    @classmethod
    def from_env(cls) -> EnumerationCaps:
        enum_cap = _read_cap(ENUM_CAP_ENV)
        index_cap = _read_cap(INDEX_CAP_ENV)
        brute_cap = _read_cap(BRUTE_FORCE_CAP_ENV)
        return cls(
            expanding_searches=enum_cap or DEFAULT_SEARCH_CAP,
            matrix_entries=enum_cap or DEFAULT_MATRIX_CAP,
            indexability_n=index_cap or DEFAULT_INDEX_CAP,
            brute_force_n=brute_cap or DEFAULT_BRUTE_FORCE_CAP,
        )


def get_caps() -> EnumerationCaps:
    """Read caps from the environment at call time."""
    return EnumerationCaps.from_env()
