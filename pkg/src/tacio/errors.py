"""Exception types and diagnostics shared across the engine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class TacioError(Exception):
    """Base class for all engine errors."""


class DuplicateId(TacioError):
    pass


class InvalidField(TacioError):
    pass


class MissingReference(TacioError):
    """A copying act was given without a reference carrier."""


class SecondProducer(TacioError):
    """A carrier would become the output of two atomic acts."""


class DanglingTarget(TacioError):
    pass


class UnknownId(TacioError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NotACopyAct(TacioError):
    pass


class NotAMember(TacioError):
    pass


class NotARoot(TacioError):
    pass


class InvalidGraph(TacioError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "invalid graph"
        super().__init__(f"graph has {len(self.diagnostics)} integrity violation(s); first: {first}")


class UnknownPrefix(TacioError):
    pass


class UnknownCompetencyId(TacioError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class ParseError(TacioError):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        msg = f"line {line}, column {column}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class Code(str, Enum):
    SYNTAX = "SYNTAX"
    UNKNOWN_KIND = "UNKNOWN_KIND"
    MISSING_FIELD = "MISSING_FIELD"
    INVALID_FIELD = "INVALID_FIELD"
    DANGLING_REF = "DANGLING_REF"
    DUPLICATE_ID = "DUPLICATE_ID"
    SECOND_PRODUCER = "SECOND_PRODUCER"
    CYCLE = "CYCLE"
    COMPOSITE_SPAN = "COMPOSITE_SPAN"
    UNDECLARED_PREFIX = "UNDECLARED_PREFIX"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class Diagnostic:
    """One problem found while loading or validating.

    ``line`` is 0 when the problem has no source position (for example when
    a graph was built through the API rather than loaded from text).
    """

    line: int
    code: Code
    message: str
    subject: str = ""

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        return f"{where}{self.code.value}: {self.message}"
