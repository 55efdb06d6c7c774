from __future__ import annotations

from typing import override


class PathlocError(Exception):
    """Root of every error raised by the library."""


class GraphError(PathlocError):
    pass


class InvalidQuiver(GraphError):
    def __init__(self, msg: str, *, identifier: str) -> None:
        super().__init__(msg)
        self.identifier = identifier


class IncompatiblePartition(GraphError):
    def __init__(self, msg: str, *, source: str, target: str) -> None:
        super().__init__(msg)
        self.source = source
        self.target = target


class NotATree(GraphError):
    def __init__(self, msg: str, *, witness: tuple[str, ...]) -> None:
        super().__init__(msg)
        self.witness = witness


class NotLowerSet(GraphError):
    def __init__(self, msg: str, *, missing: tuple[str, ...]) -> None:
        super().__init__(msg)
        self.missing = missing


class NotHereditary(GraphError):
    pass


class ShapeViolation(GraphError):
    def __init__(self, msg: str, *, violations: tuple[tuple[str, int, str], ...]) -> None:
        super().__init__(msg)
        # (component, clause, reason)
        self.violations = violations


class NotFreeLoopComponent(GraphError):
    pass


class SinkVertex(GraphError):
    pass


class NotCrossing(GraphError):
    pass


class ScalarError(PathlocError):
    pass


class DivisionByZero(ScalarError, ZeroDivisionError):
    pass


class IncomparableHomes(ScalarError):
    pass


class NotASubfield(ScalarError):
    pass


class MembershipError(ScalarError):
    pass


class SeriesError(PathlocError):
    pass


class NonSquare(SeriesError):
    pass


class NotInvertible(SeriesError):
    pass


class BadAugmentation(SeriesError):
    pass


class AnchorMismatch(SeriesError):
    pass


class ZeroConstantTerm(SeriesError):
    pass


class MismatchedCorner(SeriesError):
    pass


class ReductionFuelExhausted(PathlocError):
    pass


class NotApplicable(PathlocError):
    pass


class ParseError(PathlocError, SyntaxError):
    """A syntax error in a graph file or an element literal."""

    def __init__(self, msg: str, *, line: int = 1, column: int = 0) -> None:
        super().__init__(msg)
        self.msg = msg
        self.line = line
        self.column = column

    @override
    def __str__(self) -> str:
        if self.column:
            return f"{self.msg} (line {self.line}, column {self.column})"
        return f"{self.msg} (line {self.line})"
