"""Exception hierarchy shared by all lab modules.

Every error carries a short machine-readable ``code`` so the CLI can map
failures onto its exit-code contract (1 = bad input / model violation,
2 = a computed contract was breached).
"""

from __future__ import annotations


class LabError(Exception):
    """Base class for all lab failures."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class ValidationError(LabError):
    """Input or model-invariant violation (CLI exit code 1)."""


class FormatError(ValidationError):
    """Malformed text input for one of the serialization formats."""


class ContractViolation(LabError):
    """A quantitative contract failed at runtime (CLI exit code 2)."""


class QuadratureError(LabError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class PrecisionError(LabError):
    """A certified remainder bound could not be met within the term budget."""
