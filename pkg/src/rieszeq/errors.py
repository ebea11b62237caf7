"""Exception hierarchy shared by all modules.

Each class carries the CLI exit code it maps to, so the command line tool
can translate failures uniformly.
"""

from __future__ import annotations


class RieszEqError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInputError(RieszEqError):
    """Arguments violate a documented precondition."""

    exit_code = 2


class SeparationViolationError(InvalidInputError):
    """The IFS images touch or overlap; strict separation is required."""

    exit_code = 2


class PointOffAttractorError(InvalidInputError):
    """A query point is not within tolerance of the attractor."""

    exit_code = 2


class ResourceBudgetError(RieszEqError):
    """A requested computation exceeds the configured cell or matrix budget."""

    exit_code = 3


class SolverUnconvergedError(RieszEqError):
    """Raised by the harness when a solve ends unconverged."""

    exit_code = 4


class InternalConsistencyError(RieszEqError):
    """A numerically-impossible state was reached (e.g. indefinite form)."""

    exit_code = 1
