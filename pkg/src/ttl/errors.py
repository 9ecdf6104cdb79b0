"""Shared exception hierarchy.

Exit-code mapping in the CLI and HTTP status mapping in the service key off
these base classes: DataError covers validation/data problems, TransportError
covers provider/network failures.
"""

from __future__ import annotations


class TTLError(Exception):
    """Base class for all errors raised by this package."""


class DataError(TTLError):
    """Invalid input data or violated contract (CLI exit code 1)."""


class TransportError(TTLError):
    """Provider or network failure (CLI exit code 3)."""
