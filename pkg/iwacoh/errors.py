"""Exceptions raised by iwacoh.

Every message names the identity that failed and a small witness
(degree, group elements or matrix entries).
"""


class IwacohError(Exception):
    pass


class ConfigError(IwacohError):
    pass


class OrderMismatch(IwacohError):
    """A matrix does not respect the orders of the cyclic coordinates."""


class NotASubgroup(IwacohError):
    pass


class CapExceeded(IwacohError):
    pass


class NoLambdaAction(IwacohError):
    pass


class NonEquivariantPairing(IwacohError):
    pass


class IncompatiblePairings(IwacohError):
    pass


class NotAChainMap(IwacohError):
    pass


class NotAHomotopy(IwacohError):
    pass


class NotExact(IwacohError):
    pass


class MalformedTriangle(IwacohError):
    pass


class NotNested(IwacohError):
    pass


class NotNormal(IwacohError):
    pass


class LevelOutOfRange(IwacohError):
    pass


class NotStabilized(IwacohError):
    """No stable window was found; ``report`` holds the levels computed so far."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class TraceNotQuasiIso(IwacohError):
    pass


class MalformedDatum(IwacohError):
    pass


class ParseError(IwacohError):
    """Malformed workspace text, located by line and column."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = "line %d, column %d: %s" % (line, column or 0, message)
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(IwacohError):
    """Bad input; ``field`` is the dotted workspace path when one is known."""

    def __init__(self, message, field=None):
        if field:
            message = "%s: %s" % (field, message)
        super().__init__(message)
        self.field = field


class CheckFailed(IwacohError):
    """A verified identity did not hold on a generated case."""
