"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GermforgeError(Exception):
    """Base class; ``code`` is the CLI exit status it maps to."""

    code = 5


class ContractViolation(GermforgeError, ValueError):
    """Caller broke an operation's precondition (mismatched bounds etc.)."""


class EmptySupportError(ContractViolation):
    pass


class TruncationTooLow(GermforgeError):
    code = 4


class Inconclusive(GermforgeError):
    """The decision needs a higher jet than the input carries."""

    code = 4

    def __init__(self, message: str, max_jet: int | None = None):
        super().__init__(message)
        self.max_jet = max_jet


class InternalConsistencyError(GermforgeError):
    """Two independent computations disagree."""

    code = 5


class NotTangentialFamily(GermforgeError):
    """The map germ fails one of the tangential-family axioms."""

    code = 3
    axiom = "tangential"


class NotImmersedFiber(NotTangentialFamily):
    axiom = "NotImmersedFiber"


class SingularSupport(NotTangentialFamily):
    axiom = "SingularSupport"


class TangencyViolated(NotTangentialFamily):
    axiom = "TangencyViolated"

    def __init__(self, order: int, message: str | None = None):
        super().__init__(message or f"family curves not tangent to the support at xi-order {order}")
        self.order = order


class CoefficientFieldTooSmall(GermforgeError):
    pass


class NoFiniteSpec(GermforgeError):
    """Non-simple class: no miniversal deformation in the catalog."""

    code = 2  # the request names a class the command cannot serve


class UnknownClass(GermforgeError, KeyError):
    code = 2

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown class"


class ParseError(GermforgeError):
    code = 2

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
        self.reason = message
