"""
Exception hierarchy for the simulator.

Library code raises these; the CLI and the HTTP surface translate them into
exit codes and status codes.
"""

from typing import Any, Dict, Optional


class UavSimError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(UavSimError, ValueError):
    """Invalid configuration document or field value."""


class DomainError(UavSimError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class AssignmentError(UavSimError, ValueError):
    """Malformed cost matrix or impossible cluster layout."""


class EpisodeFinishedError(UavSimError, RuntimeError):
    """step() called on an episode that already reported done."""


class NonFiniteLossError(UavSimError, RuntimeError):
    """PPO loss or gradient became NaN/inf; the update was aborted."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class MissingCheckpointError(UavSimError, FileNotFoundError):
    """An optimized-trajectory scheme was requested without a trained policy."""


class ExportError(UavSimError, OSError):
    """Output directory cannot be created or written."""
