"""Exception types shared by every module of the package."""

from __future__ import annotations


class PencilLabError(Exception):
    """Base class; the CLI maps subclasses of this to exit codes."""


class InvalidInput(PencilLabError, ValueError):
    """Malformed user data (JSON, Gram matrices, field parameters)."""


class DivisionByZero(PencilLabError, ZeroDivisionError):
    pass


class FieldMismatch(PencilLabError, TypeError):
    pass


class ShapeError(PencilLabError, ValueError):
    pass


class NotAnEigenvalue(PencilLabError, ValueError):
    pass


class NeedNondegenerateQ1(PencilLabError, ValueError):
    pass


class NeedsExtension(PencilLabError, ValueError):
    pass


class BadReductionVector(PencilLabError, ValueError):
    pass


class NotGeneric(PencilLabError, ValueError):
    pass


class NotRegular(PencilLabError, ValueError):
    pass


class ReducibleCurve(PencilLabError, ValueError):
    pass


class DegenerateSpan(PencilLabError, ValueError):
    pass


class ConeOnX(PencilLabError, ValueError):
    pass


class NoBasePoint(PencilLabError, ValueError):
    pass


class ActionNotClosed(PencilLabError, ValueError):
    pass


class NotReducibleHere(PencilLabError, ValueError):
    pass


class FixtureDegenerate(PencilLabError, RuntimeError):
    """A pairing that must be nonzero vanished; indicates a bug, not bad input."""


class SizeGuard(PencilLabError):
    """Input exceeds the desk-scale envelope and --force was not given."""
