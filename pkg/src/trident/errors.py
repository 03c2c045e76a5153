"""Exception types shared across the toolchain.

Frontend errors carry source positions so the CLI can print
``file:line:col: severity: message`` diagnostics.
"""

from __future__ import annotations


class TridentError(Exception):
    """Base class for all toolchain errors."""


class PositionedError(TridentError):
    """An error anchored to a source location (1-based line/col)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def diagnostic(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: error: {self.message}"


class LexError(PositionedError):
    """Character outside the token alphabet, or a malformed token."""

    def __init__(self, line: int, col: int, char: str):
        super().__init__(f"unexpected character {char!r}", line, col)
        self.char = char


class ParseError(PositionedError):
    """Grammar violation. Parsing aborts at the first error."""

    def __init__(self, message: str, line: int, col: int,
                 expected: tuple[str, ...] = (), found: str = ""):
        super().__init__(message, line, col)
        self.expected = expected
        self.found = found


class DslTypeError(PositionedError):
    """Type or name-resolution failure reported by semantic analysis."""


class SemaError(PositionedError):
    """Non-type semantic defect (e.g. a provably non-terminating fixedPoint)."""


class GraphError(TridentError):
    """Base class for graph loading and query errors."""


class GraphIoError(GraphError):
    pass


class FormatError(GraphError):
    """Malformed line in an edge-list file."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class RangeError(GraphError):
    """lo > hi passed to the random weight assigner."""


class ArgError(GraphError):
    """Invalid partitioning argument (e.g. zero ranks)."""


class EmptyGraphError(GraphError):
    """Aggregate weight query on a graph with no edges."""


class ExecError(TridentError):
    """Runtime failure inside the interpreter or simulator."""


class NonConvergenceError(ExecError):
    """A fixedPoint exceeded its iteration cap."""

    def __init__(self, flag: str, cap: int):
        super().__init__(
            f"fixedPoint '{flag}' did not converge within {cap} iterations")
        self.flag = flag
        self.cap = cap


class PartitionError(ExecError):
    """Invalid rank count or rank order handed to the simulator."""


class SizeError(TridentError):
    """Brute-force oracle invoked beyond its size bound."""


class EmitError(TridentError):
    """Construct with no translation for the requested backend."""
