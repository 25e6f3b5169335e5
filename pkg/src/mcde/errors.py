"""Exception hierarchy shared across the engine."""
from __future__ import annotations


class McdeError(Exception):
    pass


class UnknownLabel(McdeError, KeyError):
    def __str__(self):
        return f"unknown differential label {self.args[0]!r}"


class UnknownAtom(McdeError, KeyError):
    def __str__(self):
        return f"unknown atom {self.args[0]!r}"


class NonPositiveOrder(McdeError, ValueError):
    pass


class SeedNotVanishing(McdeError, ValueError):
    pass


class SeedVanishes(McdeError, ValueError):
    pass


class NoConditions(McdeError, ValueError):
    pass


class SlotCapExceeded(McdeError, ValueError):
    pass


class InvalidBounds(McdeError, ValueError):
    pass


class DSLError(McdeError):
    """Error located in DSL text; line and column are 1-based."""

    kind = "error"

    def __init__(self, message: str, line: int = 1, column: int = 1,
                 snippet: str = "", origin: str = "<inline>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.snippet = snippet
        self.origin = origin

    def __str__(self):
        head = f"{self.origin}:{self.line}:{self.column}: {self.kind}: {self.message}"
        if not self.snippet:
            return head
        caret = " " * (self.column - 1) + "^"
        return f"{head}\n  {self.snippet}\n  {caret}"


class ParseError(DSLError):
    kind = "syntax error"


class SemanticError(DSLError):
    kind = "semantic error"
