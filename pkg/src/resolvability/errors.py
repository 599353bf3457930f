"""Exception hierarchy and per-call resource limits."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Optional


class ResolvabilityError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ResolvabilityError):
    """Malformed or semantically invalid input (CLI exit code 2)."""


class ParseError(InputError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


class ResourceLimitError(ResolvabilityError):
    """A configured bound was hit (CLI exit code 3).

    ``partial`` carries whatever the interrupted search had established.
    """

    def __init__(self, message: str, partial: Optional[dict] = None):
        super().__init__(message)
        self.partial = partial or {}


class OracleMismatch(ResolvabilityError):
    """An internal cross-check failed; indicates a bug, never a user error."""


@dataclass(frozen=True)
class Limits:
    max_product_states: int = 2_000_000
    max_subset_search: int = 18
    max_colors: int = 20
    deadline_seconds: Optional[float] = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "max_product_states": self.max_product_states,
            "max_subset_search": self.max_subset_search,
            "max_colors": self.max_colors,
            "deadline_seconds": self.deadline_seconds,
        }


DEFAULT_LIMITS = Limits()


@dataclass
class Budget:
    """Mutable counter created fresh for each top-level call."""

    limits: Limits = DEFAULT_LIMITS
    cancel: Any = None  # anything with an ``is_set()`` method
    used: int = 0
    _deadline: Optional[float] = field(default=None, init=False)

    def __post_init__(self) -> None:
        if self.limits.deadline_seconds is not None:
            self._deadline = time.monotonic() + self.limits.deadline_seconds

    def charge(self, n: int = 1, what: str = "product states") -> None:
        self.used += n
        if self.used > self.limits.max_product_states:
            raise ResourceLimitError(
                f"{what}: exceeded bound of {self.limits.max_product_states}"
            )
        if self.used % 4096 < n:
            self.check()

    def check(self) -> None:
        if self.cancel is not None and self.cancel.is_set():
            raise ResourceLimitError("cancelled")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ResourceLimitError("deadline exceeded")


def budget_for(limits: Optional[Limits] = None, cancel: Any = None) -> Budget:
    return Budget(limits or DEFAULT_LIMITS, cancel)
