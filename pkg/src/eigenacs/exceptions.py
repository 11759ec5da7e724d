"""Exceptions raised by eigenacs."""
from __future__ import annotations

from collections.abc import Iterable


class EigenAcsError(Exception):
    """Base class for all eigenacs errors."""


class ConfigurationError(EigenAcsError):
    """Invalid problem, basis or run configuration."""

    def __init__(self, message: str, field: str | None = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class UnsupportedOrderError(EigenAcsError):
    """Derivative multi-index of total order above the supported maximum."""


class CatalogError(EigenAcsError):
    """Unknown catalog problem name."""

    def __init__(self, name: str, valid: Iterable[str]) -> None:
        self.name = name
        self.valid = tuple(valid)
        super().__init__(f"Unknown problem '{name}'. Valid catalog keys: {', '.join(self.valid)}")


class NumericalFailureError(EigenAcsError):
    """Non-finite design matrix or least-squares solution."""


class DegenerateDirectionError(EigenAcsError):
    """The eigenfunction lies in the null space of the eigenvalue carrier."""


class OracleError(EigenAcsError):
    """An oracle cannot produce the requested reference values."""
