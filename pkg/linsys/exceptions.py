# Copyright © 2025 The linsys developers

"""
Exceptions raised by linsys.

Invalid scalar arguments (an ``alpha`` of 0.7, a negative seed) raise a plain
:class:`ValueError`. The classes here separate the remaining failure modes so
that callers, and the command line exit codes, can tell them apart.
"""

__all__ = [
    "LinsysError",
    "ModelSpecError",
    "NumericalError",
    "LPSolverError",
    "ReplicationError",
]


class LinsysError(Exception):
    """Base class for every linsys-specific error."""


class ModelSpecError(LinsysError, ValueError):
    """A triple, moment model or data table is malformed or inconsistent."""


class NumericalError(LinsysError, RuntimeError):
    """A numerical kernel failed (SVD non-convergence, non-finite values)."""


class LPSolverError(NumericalError):
    """The LP solver failed for a reason other than infeasibility."""


class ReplicationError(LinsysError, RuntimeError):
    """A Monte Carlo replication failed; the message names the grid value,
    replication and seed, and ``__cause__`` holds the original error."""
