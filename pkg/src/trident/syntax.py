"""AST node and DSL type definitions.

Structural fields are set by the parser; fields whose names start with
``sem_`` are annotations filled in by semantic analysis and are ignored
by structural equality (``to_sexpr``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def merge(self, other: "Span") -> "Span":
        lo = min((self.line, self.col), (other.line, other.col))
        hi = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return Span(lo[0], lo[1], hi[0], hi[1])

    def contains(self, other: "Span") -> bool:
        return ((self.line, self.col) <= (other.line, other.col)
                and (other.end_line, other.end_col) <= (self.end_line, self.end_col))


# ---------------------------------------------------------------------------
# DSL types


class DslType:
    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))


class GraphType(DslType):
    def __str__(self):
        return "Graph"


class NodeType(DslType):
    def __str__(self):
        return "node"


class EdgeType(DslType):
    def __str__(self):
        return "edge"


class PrimType(DslType):
    NAMES = ("int", "bool", "long", "float", "double")

    def __init__(self, name: str):
        assert name in self.NAMES, name
        self.name = name

    def __str__(self):
        return self.name

    @property
    def is_numeric(self) -> bool:
        return self.name != "bool"

    @property
    def is_float(self) -> bool:
        return self.name in ("float", "double")


class PropNodeType(DslType):
    def __init__(self, elem: PrimType):
        self.elem = elem

    def __str__(self):
        return f"propNode<{self.elem}>"


class PropEdgeType(DslType):
    def __init__(self, elem: PrimType):
        self.elem = elem

    def __str__(self):
        return f"propEdge<{self.elem}>"


class SetNType(DslType):
    def __str__(self):
        return "SetN"


class SetEType(DslType):
    def __str__(self):
        return "SetE"


class ListType(DslType):
    def __str__(self):
        return "List"


INT = PrimType("int")
BOOL = PrimType("bool")
LONG = PrimType("long")
FLOAT = PrimType("float")
DOUBLE = PrimType("double")

INT_MAX = 2147483647


# ---------------------------------------------------------------------------
# AST nodes


@dataclass
class Node:
    span: Span


# --- expressions ---


@dataclass
class Expr(Node):
    # Filled by sema: the expression's DSL type.
    sem_type: Optional[DslType] = field(default=None, compare=False, repr=False)


@dataclass
class Identifier(Expr):
    name: str = ""
    # one of "scalar", "param", "iterator", "property-node", "property-edge";
    # implicit property access on an iterator records the iterator name.
    sem_kind: Optional[str] = field(default=None, compare=False, repr=False)
    sem_implicit_iter: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class Literal(Expr):
    kind: str = "int"        # "int" | "float" | "bool"
    value: object = 0
    text: str = ""           # surface spelling (keeps INT_MAX / 0.85 as written)


@dataclass
class MemberAccess(Expr):
    obj: Expr = None
    prop: str = ""


@dataclass
class CallArg(Node):
    name: Optional[str] = None   # named initializer (attach calls)
    value: Expr = None


@dataclass
class ProcCall(Expr):
    receiver: Optional[Expr] = None
    method: str = ""
    args: list[CallArg] = field(default_factory=list)


@dataclass
class BinaryExpr(Expr):
    op: str = ""
    left: Expr = None
    right: Expr = None


@dataclass
class UnaryExpr(Expr):
    op: str = ""
    operand: Expr = None


# --- statements ---


@dataclass
class Stmt(Node):
    pass


@dataclass
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class DeclStmt(Stmt):
    dsl_type: DslType = None
    name: str = ""
    init: Optional[Expr] = None
    # "local" or "forall-local" (inside a forall body); params are separate.
    sem_storage: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class AssignStmt(Stmt):
    lvalue: Expr = None
    expr: Expr = None
    # True when this assignment also drives a fixedPoint convergence flag.
    sem_fused_flag: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class ReductionAssign(Stmt):
    lvalue: Expr = None
    op: str = "+="          # += *= ++ &&= ||=
    expr: Optional[Expr] = None   # None for ++
    # "scalar-reduction" | "property-reduction" | "local" (forall-local target)
    sem_target_class: Optional[str] = field(default=None, compare=False, repr=False)
    sem_fused_flag: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class MinMaxAssign(Stmt):
    targets: list[Expr] = field(default_factory=list)
    op: str = "Min"         # Min | Max
    first: Expr = None      # must be structurally the first target
    candidate: Expr = None
    companions: list[Expr] = field(default_factory=list)
    sem_target_class: Optional[str] = field(default=None, compare=False, repr=False)
    sem_fused_flag: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass
class ForallStmt(Stmt):
    iterator: str = ""
    range_call: Expr = None
    filter: Optional[Expr] = None
    body: Block = None
    is_parallel: bool = True       # written with forall (True) or for (False)
    sem_parallel: Optional[bool] = field(default=None, compare=False, repr=False)
    sem_outermost: bool = field(default=False, compare=False, repr=False)


@dataclass
class FixedPointStmt(Stmt):
    flag: str = ""
    convergence: Expr = None
    body: Block = None
    # names of properties/scalars the convergence depends on (driver set)
    sem_driver_props: list[str] = field(default_factory=list, compare=False, repr=False)
    sem_driver_scalars: list[str] = field(default_factory=list, compare=False, repr=False)


@dataclass
class IterateInBfsStmt(Stmt):
    iterator: str = ""
    range_call: Expr = None
    root: Expr = None
    body: Block = None
    reverse_body: Optional[Block] = None


@dataclass
class IfStmt(Stmt):
    cond: Expr = None
    then_branch: Stmt = None
    else_branch: Optional[Stmt] = None


@dataclass
class ReturnStmt(Stmt):
    expr: Optional[Expr] = None


@dataclass
class ExprStmt(Stmt):
    expr: Expr = None


@dataclass
class FormalParam(Node):
    dsl_type: DslType = None
    name: str = ""


@dataclass
class Function(Node):
    name: str = ""
    params: list[FormalParam] = field(default_factory=list)
    body: Block = None


@dataclass
class Program(Node):
    functions: list[Function] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Structural dump (spans and sem_* annotations excluded)


def to_sexpr(node) -> str:
    if node is None:
        return "nil"
    if isinstance(node, DslType):
        return str(node)
    if isinstance(node, list):
        return "(" + " ".join(to_sexpr(x) for x in node) + ")"
    if isinstance(node, bool):
        return "true" if node else "false"
    if isinstance(node, (int, float, str)):
        return repr(node)
    assert isinstance(node, Node), node
    parts = [type(node).__name__]
    for f in fields(node):
        if f.name == "span" or f.name.startswith("sem_"):
            continue
        parts.append(to_sexpr(getattr(node, f.name)))
    return "(" + " ".join(parts) + ")"


def structurally_equal(a, b) -> bool:
    return to_sexpr(a) == to_sexpr(b)


def walk(node):
    """Yield every Node in the subtree, preorder."""
    if isinstance(node, Node):
        yield node
        for f in fields(node):
            if f.name == "span" or f.name.startswith("sem_"):
                continue
            yield from walk(getattr(node, f.name))
    elif isinstance(node, list):
        for x in node:
            yield from walk(x)
