"""
XXZ Quench — Exception hierarchy.

Every numerical contract of the simulator that can be violated at runtime has
its own exception type, so callers (the runner, the CLI, the tests) can tell
round-off trouble from misuse.
"""

from __future__ import annotations


class NonHermitianOperatorError(ValueError):
    """Raised when a bond operator handed to the gate builder is not Hermitian."""
    pass


class NonUnitaryGateError(ValueError):
    """Raised when a two-site gate fails the unitarity check before application."""
    pass


class CanonicalizationError(Exception):
    """Raised when a bond weight vector underflows to all-zero during canonicalization."""
    pass


class InvalidDensityMatrixError(ValueError):
    """Raised when a reduced density matrix is not Hermitian, unit-trace and PSD."""
    pass


class SiteIndexError(IndexError):
    """Raised when a site or bond index lies outside the chain."""
    pass


class SystemSizeError(ValueError):
    """Raised when a dense exact-diagonalization request exceeds the memory guard."""
    pass


class SnapshotFormatError(ValueError):
    """Raised when a state snapshot file has a bad header or is truncated."""
    pass


class ConfigError(ValueError):
    """Raised when a quench configuration document is malformed or out of range."""
    pass


class EvolutionAbortedError(Exception):
    """Raised when an evolution violates its norm or density-matrix health checks."""

    def __init__(self, message: str, step: int = -1, time: float = float("nan")) -> None:
        super().__init__(message)
        self.step = step
        self.time = time

    def __reduce__(self) -> tuple[type, tuple[str, int, float]]:
        return (type(self), (str(self), self.step, self.time))
