"""Exception hierarchy shared by every module."""

from __future__ import annotations


class GrammarToolError(Exception):
    """Base class for all errors raised by this package."""


# graph construction / graph operations
class GraphError(GrammarToolError, ValueError):
    pass


class DuplicateNode(GraphError):
    pass


class DanglingEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class EmptyOperand(GraphError):
    pass


class UnknownNode(GraphError):
    pass


class TooLarge(GraphError):
    pass


class ParseError(GrammarToolError, ValueError):
    """Malformed control expression or grammar file.

    ``line`` and ``column`` are 1-based; ``line`` is 0 for single-line input.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}" if line else f"column {column}"
        super().__init__(f"{message} ({where})")


class ValidationError(GrammarToolError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid grammar: {lines}")


class BudgetError(GrammarToolError, RuntimeError):
    """A configured enumeration budget was exceeded."""


class StaleHandle(GrammarToolError, LookupError):
    pass


class NotApplicable(GrammarToolError, ValueError):
    pass


class DeadEnd(GrammarToolError, RuntimeError):
    pass


class NoTerminalProduction(GrammarToolError, ValueError):
    def __init__(self, components):
        self.components = list(components)
        super().__init__(
            "no explicit occurrence with a terminal-labelled daughter in component(s): "
            + ", ".join(self.components)
        )
