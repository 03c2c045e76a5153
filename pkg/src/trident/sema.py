"""Name resolution, type checking, and the static analyses that drive
code generation: parallelism marking, fixed-point driver linkage (flag
fusion), reduction target classification, and host/device transfer
planning.

The first type error raises DslTypeError; warnings are collected on the
TypedProgram.  Identifiers are annotated in place (``sem_*`` fields) so
the interpreter, simulator, and emitters never re-resolve names.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DslTypeError, SemaError
from .syntax import (BOOL, DOUBLE, INT, AssignStmt, BinaryExpr, Block,
                     DeclStmt, DslType, EdgeType, Expr, ExprStmt,
                     FixedPointStmt, ForallStmt, Function, GraphType,
                     Identifier, IfStmt, IterateInBfsStmt, ListType, Literal,
                     MemberAccess, MinMaxAssign, PrimType, ProcCall,
                     Program, PropEdgeType, PropNodeType, ReductionAssign,
                     ReturnStmt, SetEType, SetNType, Stmt, UnaryExpr, to_sexpr)
from .syntax import NodeType as NodeType_

# Graph interface: method -> (arg kinds, result kind).  Range methods are
# only legal as forall / BFS iteration ranges.
_GRAPH_METHODS = {
    "nodes": ((), "range-node"),
    "neighbors": (("node",), "range-node"),
    "nodesTo": (("node",), "range-node"),
    "nodesFrom": (("node",), "range-node"),
    "attachNodeProperty": (None, "void"),
    "attachEdgeProperty": (None, "void"),
    "num_nodes": ((), "int"),
    "num_edges": ((), "int"),
    "count_outNbrs": (("node",), "int"),
    "get_edge": (("node", "node"), "edge"),
    "minWt": ((), "int"),
    "maxWt": ((), "int"),
}

_NUMERIC_RANK = {"int": 0, "long": 1, "float": 2, "double": 3}

H2D_ONCE = "host-to-device-once"
D2H_AT_END = "device-to-host-at-end"
ROUND_TRIP = "round-trip-per-iteration"
DEVICE_ONLY = "device-only"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str
    line: int
    col: int

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.severity}: {self.message}"


@dataclass
class Symbol:
    name: str
    dsl_type: DslType
    span: object
    storage: str   # parameter | local | forall-local | property | iterator | flag


@dataclass(frozen=True)
class TransferEntry:
    direction: str      # one of the four direction constants
    origin: str         # graph | property | scalar | flag | param


@dataclass
class TransferPlan:
    """Per-function symbol -> transfer direction for the CUDA emitter."""

    functions: dict[str, dict[str, TransferEntry]] = field(default_factory=dict)

    def entry(self, fn: str, name: str) -> TransferEntry | None:
        return self.functions.get(fn, {}).get(name)


@dataclass
class FunctionInfo:
    name: str
    graph_param: str | None = None
    params: list[tuple[str, DslType]] = field(default_factory=list)
    node_props: dict[str, PrimType] = field(default_factory=dict)
    edge_props: dict[str, PrimType] = field(default_factory=dict)
    # function-top-level scalars and fixedPoint flags, in appearance order
    dump_scalars: dict[str, PrimType] = field(default_factory=dict)
    fixedpoints: list[FixedPointStmt] = field(default_factory=list)
    has_parallel: bool = False


@dataclass
class TypedProgram:
    root: Program
    functions: dict[str, FunctionInfo] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)
    transfer_plan: TransferPlan | None = None

    def function(self, name: str | None = None) -> Function:
        if name is None:
            return self.root.functions[0]
        for fn in self.root.functions:
            if fn.name == name:
                return fn
        raise KeyError(name)

    def info(self, name: str | None = None) -> FunctionInfo:
        if name is None:
            name = self.root.functions[0].name
        return self.functions[name]


def _err(span, message: str) -> DslTypeError:
    return DslTypeError(message, span.line, span.col)


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.parent = parent
        self.symbols: dict[str, Symbol] = {}

    def declare(self, sym: Symbol) -> None:
        if sym.name in self.symbols:
            raise _err(sym.span, f"'{sym.name}' is already declared in this scope")
        self.symbols[sym.name] = sym

    def lookup(self, name: str) -> Symbol | None:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.symbols:
                return scope.symbols[name]
            scope = scope.parent
        return None


class _Checker:
    def __init__(self, tp: TypedProgram):
        self.tp = tp
        self.info: FunctionInfo | None = None
        self.scope: _Scope | None = None
        self.parallel_depth = 0     # > 0 inside a parallel forall or BFS body
        self.forall_depth = 0       # > 0 inside any forall/for body
        self.iterators: list[tuple[str, str]] = []   # (name, "node"|"edge")
        self.attached: set[str] = set()
        self.in_bfs = 0

    # -- scope helpers ------------------------------------------------------

    def push(self) -> None:
        self.scope = _Scope(self.scope)

    def pop(self) -> None:
        self.scope = self.scope.parent

    def declare(self, name: str, dsl_type: DslType, span, storage: str) -> Symbol:
        sym = Symbol(name, dsl_type, span, storage)
        if storage == "property" and self._lookup_prop(name) is not None:
            raise _err(span, f"property '{name}' is already declared")
        if storage != "property" and self._lookup_prop(name) is not None:
            raise _err(span, f"'{name}' collides with a property name")
        if storage == "property" and self.scope.lookup(name) is not None:
            raise _err(span, f"property '{name}' collides with a variable")
        self.scope.declare(sym)
        return sym

    def _lookup_prop(self, name: str) -> PrimType | None:
        if name in self.info.node_props:
            return self.info.node_props[name]
        if name in self.info.edge_props:
            return self.info.edge_props[name]
        return None

    # -- program ------------------------------------------------------------

    def check_program(self) -> None:
        for fn in self.tp.root.functions:
            self.check_function(fn)

    def check_function(self, fn: Function) -> None:
        self.info = FunctionInfo(name=fn.name)
        self.tp.functions[fn.name] = self.info
        self.scope = _Scope()
        self.parallel_depth = 0
        self.forall_depth = 0
        self.iterators = []
        self.attached = set()
        for p in fn.params:
            if isinstance(p.dsl_type, GraphType):
                if self.info.graph_param is not None:
                    raise _err(p.span, "at most one Graph parameter is supported")
                self.info.graph_param = p.name
            if isinstance(p.dsl_type, (PropNodeType, PropEdgeType)):
                raise _err(p.span, "property parameters are not supported; "
                                   "declare and attach them in the body")
            self.declare(p.name, p.dsl_type, p.span, "parameter")
            self.info.params.append((p.name, p.dsl_type))
        self.check_block(fn.body, new_scope=False, top_level=True)

    # -- statements -----------------------------------------------------------

    def check_block(self, block: Block, new_scope: bool = True,
                    top_level: bool = False) -> None:
        if new_scope:
            self.push()
        for stmt in block.stmts:
            self.check_stmt(stmt, top_level=top_level)
        if new_scope:
            self.pop()

    def check_stmt(self, stmt: Stmt, top_level: bool = False) -> None:
        if isinstance(stmt, DeclStmt):
            self.check_decl(stmt, top_level)
        elif isinstance(stmt, AssignStmt):
            self.check_assign(stmt)
        elif isinstance(stmt, ReductionAssign):
            self.check_reduction(stmt)
        elif isinstance(stmt, MinMaxAssign):
            self.check_minmax(stmt)
        elif isinstance(stmt, ForallStmt):
            self.check_forall(stmt)
        elif isinstance(stmt, FixedPointStmt):
            self.check_fixedpoint(stmt, top_level)
        elif isinstance(stmt, IterateInBfsStmt):
            self.check_bfs(stmt)
        elif isinstance(stmt, IfStmt):
            cond_t = self.type_expr(stmt.cond)
            self._require_bool(stmt.cond, cond_t, "if condition")
            self.check_block(stmt.then_branch)
            if stmt.else_branch is not None:
                self.check_block(stmt.else_branch)
        elif isinstance(stmt, ReturnStmt):
            if stmt.expr is not None:
                self.type_expr(stmt.expr)
        elif isinstance(stmt, ExprStmt):
            t = self.type_expr(stmt.expr)
            if not isinstance(stmt.expr, ProcCall):
                self.warn(stmt.span, "expression statement has no effect")
        elif isinstance(stmt, Block):
            self.check_block(stmt)
        else:
            raise AssertionError(f"unknown statement {stmt!r}")

    def check_decl(self, stmt: DeclStmt, top_level: bool) -> None:
        t = stmt.dsl_type
        if isinstance(t, GraphType):
            raise _err(stmt.span, "Graph variables can only be parameters")
        if isinstance(t, (PropNodeType, PropEdgeType)):
            if stmt.init is not None:
                raise _err(stmt.span, "properties are initialized via attach, "
                                      "not at declaration")
            storage = "property"
            self.declare(stmt.name, t, stmt.span, storage)
            if isinstance(t, PropNodeType):
                self.info.node_props[stmt.name] = t.elem
            else:
                self.info.edge_props[stmt.name] = t.elem
            stmt.sem_storage = storage
            return
        storage = "forall-local" if self.parallel_depth > 0 else "local"
        if stmt.init is not None:
            init_t = self.type_expr(stmt.init)
            self._require_assignable(stmt.init, t, init_t)
        self.declare(stmt.name, t, stmt.span, storage)
        stmt.sem_storage = storage
        if top_level and isinstance(t, PrimType):
            self.info.dump_scalars[stmt.name] = t

    def check_assign(self, stmt: AssignStmt) -> None:
        target_t = self.type_lvalue(stmt.lvalue)
        expr_t = self.type_expr(stmt.expr)
        self._require_assignable(stmt.expr, target_t, expr_t)
        self._warn_racy_write(stmt.lvalue)

    def check_reduction(self, stmt: ReductionAssign) -> None:
        target_t = self.type_lvalue(stmt.lvalue)
        if stmt.op in ("+=", "*="):
            if not (isinstance(target_t, PrimType) and target_t.is_numeric):
                raise _err(stmt.span, f"'{stmt.op}' needs a numeric target")
            expr_t = self.type_expr(stmt.expr)
            self._require_assignable(stmt.expr, target_t, expr_t)
        elif stmt.op == "++":
            if not (isinstance(target_t, PrimType)
                    and target_t.name in ("int", "long")):
                raise _err(stmt.span, "'++' needs an integer target")
        else:  # &&= ||=
            if not isinstance(stmt.lvalue, Identifier):
                raise _err(stmt.span,
                           f"'{stmt.op}' applies to boolean scalars only")
            if not (isinstance(target_t, PrimType) and target_t.name == "bool"):
                raise _err(stmt.span, f"'{stmt.op}' needs a boolean target")
            expr_t = self.type_expr(stmt.expr)
            self._require_bool(stmt.expr, expr_t, f"'{stmt.op}' operand")
        stmt.sem_target_class = self._classify_target(stmt.lvalue)

    def check_minmax(self, stmt: MinMaxAssign) -> None:
        if len(stmt.companions) != len(stmt.targets) - 1:
            raise _err(stmt.span,
                       f"{stmt.op} assignment has {len(stmt.targets)} targets "
                       f"but {len(stmt.companions)} companion values")
        target_types = [self.type_lvalue(t) for t in stmt.targets]
        if to_sexpr(stmt.first) != to_sexpr(stmt.targets[0]):
            raise _err(stmt.first.span,
                       f"first {stmt.op} argument must repeat the first target")
        self.type_expr(stmt.first)
        t0 = target_types[0]
        if not (isinstance(t0, PrimType) and t0.is_numeric):
            raise _err(stmt.targets[0].span,
                       f"{stmt.op} target must be numeric")
        cand_t = self.type_expr(stmt.candidate)
        self._require_assignable(stmt.candidate, t0, cand_t)
        for comp, tt in zip(stmt.companions, target_types[1:]):
            ct = self.type_expr(comp)
            self._require_assignable(comp, tt, ct)
        stmt.sem_target_class = self._classify_target(stmt.targets[0])
        for tgt in stmt.targets:
            self._warn_racy_write(tgt, minmax=True)

    def check_forall(self, stmt: ForallStmt) -> None:
        elem = self.check_range(stmt.range_call)
        stmt.sem_parallel = stmt.is_parallel and self.parallel_depth == 0
        stmt.sem_outermost = bool(stmt.sem_parallel)
        self.push()
        self.declare(stmt.iterator, NodeTypeOrEdge(elem), stmt.span, "iterator")
        self.iterators.append((stmt.iterator, elem))
        if stmt.filter is not None:
            ft = self.type_expr(stmt.filter, implicit_iter=stmt.iterator,
                                implicit_kind=elem)
            self._require_bool(stmt.filter, ft, "filter expression")
        if stmt.sem_parallel:
            self.parallel_depth += 1
        self.forall_depth += 1
        self.check_block(stmt.body, new_scope=False)
        self.forall_depth -= 1
        if stmt.sem_parallel:
            self.parallel_depth -= 1
        self.iterators.pop()
        self.pop()

    def check_fixedpoint(self, stmt: FixedPointStmt, top_level: bool) -> None:
        refs = [n for n in _walk_exprs(stmt.convergence)
                if isinstance(n, Identifier)]
        if not refs:
            raise _err(stmt.convergence.span,
                       "convergence expression must reference a variable")
        self.push()
        existing = self.scope.lookup(stmt.flag)
        if existing is None and self._lookup_prop(stmt.flag) is None:
            self.declare(stmt.flag, BOOL, stmt.span, "flag")
            if top_level:
                self.info.dump_scalars.setdefault(stmt.flag, BOOL)
        else:
            flag_t = existing.dsl_type if existing else None
            if not (isinstance(flag_t, PrimType) and flag_t.name == "bool"):
                raise _err(stmt.span,
                           f"fixedPoint flag '{stmt.flag}' must be a bool scalar")
        conv_t = self.type_expr(stmt.convergence, aggregate=True)
        self._require_bool(stmt.convergence, conv_t, "convergence expression")
        self.check_block(stmt.body, new_scope=False)
        self.pop()
        self.info.fixedpoints.append(stmt)

    def check_bfs(self, stmt: IterateInBfsStmt) -> None:
        rng = stmt.range_call
        if not (isinstance(rng, ProcCall) and rng.method == "nodes"):
            raise _err(rng.span, "iterateInBFS iterates g.nodes() only")
        self.check_range(rng)
        root_t = self.type_expr(stmt.root)
        if not isinstance(root_t, NodeType_):
            raise _err(stmt.root.span, "BFS root must be a node")
        self.push()
        self.declare(stmt.iterator, NodeType_(), stmt.span, "iterator")
        self.iterators.append((stmt.iterator, "node"))
        self.parallel_depth += 1
        self.in_bfs += 1
        self.check_block(stmt.body, new_scope=False)
        if stmt.reverse_body is not None:
            self.check_block(stmt.reverse_body, new_scope=False)
        self.in_bfs -= 1
        self.parallel_depth -= 1
        self.iterators.pop()
        self.pop()

    def check_range(self, rng: Expr) -> str:
        """Validate an iteration range; returns element kind node|edge."""
        if isinstance(rng, Identifier):
            sym = self.scope.lookup(rng.name)
            if sym is None:
                raise _err(rng.span, f"undeclared identifier '{rng.name}'")
            rng.sem_kind = "scalar"
            if isinstance(sym.dsl_type, SetNType):
                rng.sem_type = sym.dsl_type
                return "node"
            if isinstance(sym.dsl_type, SetEType):
                rng.sem_type = sym.dsl_type
                return "edge"
            if isinstance(sym.dsl_type, ListType):
                raise _err(rng.span, "List iteration is not supported "
                                     "(element type is unknown)")
            raise _err(rng.span, f"'{rng.name}' is not iterable")
        if isinstance(rng, ProcCall):
            recv_t = self.type_expr(rng.receiver)
            if not isinstance(recv_t, GraphType):
                raise _err(rng.span, "iteration ranges are Graph methods or sets")
            sig = _GRAPH_METHODS.get(rng.method)
            if sig is None or sig[1] != "range-node":
                raise _err(rng.span, f"'{rng.method}' is not an iteration range")
            self._check_method_args(rng, sig[0])
            return "node"
        raise _err(rng.span, "invalid iteration range")

    # -- expressions ------------------------------------------------------------

    def type_lvalue(self, lv: Expr) -> DslType:
        if isinstance(lv, Identifier):
            sym = self.scope.lookup(lv.name)
            if sym is None:
                raise _err(lv.span, f"undeclared identifier '{lv.name}'")
            if sym.storage == "iterator":
                raise _err(lv.span, f"cannot assign to iterator '{lv.name}'")
            if sym.storage == "property":
                raise _err(lv.span, f"property '{lv.name}' must be written "
                                    "through a node or edge")
            lv.sem_kind = "scalar"
            lv.sem_type = sym.dsl_type
            return sym.dsl_type
        if isinstance(lv, MemberAccess):
            return self.type_member(lv)
        raise _err(lv.span, "expected an assignable location")

    def type_expr(self, e: Expr, implicit_iter: str | None = None,
                  implicit_kind: str = "node", aggregate: bool = False) -> DslType:
        t = self._type_expr(e, implicit_iter, implicit_kind, aggregate)
        e.sem_type = t
        return t

    def _type_expr(self, e, implicit_iter, implicit_kind, aggregate) -> DslType:
        if isinstance(e, Literal):
            return {"int": INT, "float": DOUBLE, "bool": BOOL}[e.kind]
        if isinstance(e, Identifier):
            sym = self.scope.lookup(e.name)
            if sym is not None and sym.storage != "property":
                e.sem_kind = "iterator" if sym.storage == "iterator" else "scalar"
                return sym.dsl_type
            prop_t = self._lookup_prop(e.name)
            if prop_t is not None:
                if implicit_iter is None and not aggregate:
                    raise _err(e.span, f"property '{e.name}' must be accessed "
                                       "through a node or edge")
                self._require_attached(e, e.name)
                if aggregate and implicit_iter is None:
                    if prop_t.name != "bool":
                        raise _err(e.span, "only boolean node properties can "
                                           "drive a convergence expression")
                    e.sem_kind = "property-aggregate"
                    return BOOL
                e.sem_kind = "property-implicit"
                e.sem_implicit_iter = implicit_iter
                return prop_t
            raise _err(e.span, f"undeclared identifier '{e.name}'")
        if isinstance(e, MemberAccess):
            return self.type_member(e)
        if isinstance(e, ProcCall):
            return self.type_call(e)
        if isinstance(e, UnaryExpr):
            ot = self.type_expr(e.operand, implicit_iter, implicit_kind, aggregate)
            if e.op == "!":
                self._require_bool(e.operand, ot, "'!' operand")
                return BOOL
            if not (isinstance(ot, PrimType) and ot.is_numeric):
                raise _err(e.span, "unary '-' needs a numeric operand")
            return ot
        if isinstance(e, BinaryExpr):
            lt = self.type_expr(e.left, implicit_iter, implicit_kind, aggregate)
            rt = self.type_expr(e.right, implicit_iter, implicit_kind, aggregate)
            return self.type_binary(e, lt, rt)
        raise AssertionError(f"untypable expression {e!r}")

    def type_binary(self, e: BinaryExpr, lt: DslType, rt: DslType) -> DslType:
        op = e.op
        if op in ("&&", "||"):
            self._require_bool(e.left, lt, f"'{op}' operand")
            self._require_bool(e.right, rt, f"'{op}' operand")
            return BOOL
        if op in ("==", "!="):
            if isinstance(lt, PrimType) and isinstance(rt, PrimType):
                if (lt.name == "bool") != (rt.name == "bool"):
                    raise _err(e.span, "cannot compare bool with a number")
                return BOOL
            if type(lt) is type(rt) and isinstance(lt, (NodeType_, EdgeType)):
                return BOOL
            raise _err(e.span, f"'{op}' operands are incomparable")
        if op in ("<", ">", "<=", ">="):
            if (isinstance(lt, PrimType) and lt.is_numeric
                    and isinstance(rt, PrimType) and rt.is_numeric):
                return BOOL
            if isinstance(lt, NodeType_) and isinstance(rt, NodeType_):
                return BOOL  # node ids are ordered
            raise _err(e.span, f"'{op}' needs numeric (or node) operands")
        # arithmetic
        if not (isinstance(lt, PrimType) and lt.is_numeric
                and isinstance(rt, PrimType) and rt.is_numeric):
            raise _err(e.span, f"'{op}' needs numeric operands")
        return _promote(lt, rt)

    def type_member(self, e: MemberAccess) -> DslType:
        obj_t = self.type_expr(e.obj)
        if isinstance(obj_t, NodeType_):
            prop_t = self.info.node_props.get(e.prop)
            if prop_t is None:
                raise _err(e.span, f"unknown node property '{e.prop}'")
            self._require_attached(e, e.prop)
            return prop_t
        if isinstance(obj_t, EdgeType):
            if e.prop == "weight":
                return INT
            prop_t = self.info.edge_props.get(e.prop)
            if prop_t is None:
                raise _err(e.span, f"unknown edge property '{e.prop}'")
            self._require_attached(e, e.prop)
            return prop_t
        raise _err(e.span, "property access needs a node or edge value")

    def type_call(self, e: ProcCall) -> DslType:
        if e.receiver is None:
            raise _err(e.span, f"unknown function '{e.method}'")
        recv_t = self.type_expr(e.receiver)
        if not isinstance(recv_t, GraphType):
            raise _err(e.span, "method calls are supported on Graph values only")
        sig = _GRAPH_METHODS.get(e.method)
        if sig is None:
            raise _err(e.span, f"Graph has no method '{e.method}'")
        arg_kinds, result = sig
        if result == "range-node":
            raise _err(e.span,
                       f"'{e.method}' can only be used as an iteration range")
        if e.method in ("attachNodeProperty", "attachEdgeProperty"):
            self._check_attach(e)
            return PrimType("bool")  # void; never read
        self._check_method_args(e, arg_kinds)
        return {"int": INT, "edge": EdgeType()}[result]

    def _check_method_args(self, e: ProcCall, arg_kinds) -> None:
        if len(e.args) != len(arg_kinds):
            raise _err(e.span, f"'{e.method}' takes {len(arg_kinds)} argument(s)")
        for a, kind in zip(e.args, arg_kinds):
            if a.name is not None:
                raise _err(a.span, f"'{e.method}' takes positional arguments")
            at = self.type_expr(a.value)
            if kind == "node" and not isinstance(at, NodeType_):
                raise _err(a.span, f"'{e.method}' expects a node argument")

    def _check_attach(self, e: ProcCall) -> None:
        node_kind = e.method == "attachNodeProperty"
        registry = self.info.node_props if node_kind else self.info.edge_props
        if not e.args:
            raise _err(e.span, f"'{e.method}' needs at least one initializer")
        for a in e.args:
            if a.name is None:
                raise _err(a.span, "attach arguments are named initializers "
                                   "(property = constant)")
            if a.name not in registry:
                kind = "node" if node_kind else "edge"
                raise _err(a.span, f"'{a.name}' is not a declared {kind} property")
            if not _is_const_expr(a.value):
                raise _err(a.value.span,
                           "attach initializers must be constant expressions")
            vt = self.type_expr(a.value)
            self._require_assignable(a.value, registry[a.name], vt)
            self.attached.add(a.name)

    # -- helpers --------------------------------------------------------------

    def _require_attached(self, e: Expr, prop: str) -> None:
        if prop not in self.attached:
            raise _err(e.span, f"property '{prop}' used before it is attached")

    def _require_bool(self, e: Expr, t: DslType, what: str) -> None:
        if not (isinstance(t, PrimType) and t.name == "bool"):
            raise _err(e.span, f"{what} must be boolean, got {t}")

    def _require_assignable(self, e: Expr, target: DslType, value: DslType) -> None:
        if isinstance(target, PrimType) and isinstance(value, PrimType):
            if target.name == "bool" or value.name == "bool":
                if target.name == value.name:
                    return
                raise _err(e.span, f"cannot assign {value} to {target}")
            if _NUMERIC_RANK[value.name] <= _NUMERIC_RANK[target.name]:
                return
            # Narrowing int literals are fine; real narrowing is an error.
            raise _err(e.span, f"cannot narrow {value} to {target}")
        if type(target) is type(value):
            return
        raise _err(e.span, f"cannot assign {value} to {target}")

    def _classify_target(self, lv: Expr) -> str:
        if isinstance(lv, MemberAccess):
            return "property-reduction" if self.parallel_depth > 0 else "local"
        sym = self.scope.lookup(lv.name)
        if self.parallel_depth > 0 and sym is not None and \
                sym.storage in ("local", "parameter", "flag"):
            return "scalar-reduction"
        return "local"

    def _warn_racy_write(self, lv: Expr, minmax: bool = False) -> None:
        if minmax or self.parallel_depth == 0:
            return
        if not isinstance(lv, MemberAccess):
            return
        obj = lv.obj
        iter_names = {name for name, _ in self.iterators}
        if isinstance(obj, Identifier) and obj.name in iter_names:
            return
        self.warn(lv.span, f"write to '{fmt_target(lv)}' inside a parallel "
                           "loop is not protected by a reduction or Min/Max")

    def warn(self, span, message: str) -> None:
        self.tp.warnings.append(
            Diagnostic("warning", message, span.line, span.col))


def fmt_target(lv: Expr) -> str:
    if isinstance(lv, Identifier):
        return lv.name
    if isinstance(lv, MemberAccess):
        return f"{fmt_target(lv.obj)}.{lv.prop}"
    return "<expr>"


def NodeTypeOrEdge(kind: str) -> DslType:
    return NodeType_() if kind == "node" else EdgeType()


def _promote(a: PrimType, b: PrimType) -> PrimType:
    name = max((a.name, b.name), key=lambda n: _NUMERIC_RANK[n])
    return PrimType(name)


def _is_const_expr(e: Expr) -> bool:
    if isinstance(e, Literal):
        return True
    if isinstance(e, UnaryExpr) and e.op == "-":
        return _is_const_expr(e.operand)
    return False


def _walk_exprs(e):
    yield e
    if isinstance(e, BinaryExpr):
        yield from _walk_exprs(e.left)
        yield from _walk_exprs(e.right)
    elif isinstance(e, UnaryExpr):
        yield from _walk_exprs(e.operand)
    elif isinstance(e, MemberAccess):
        yield from _walk_exprs(e.obj)
    elif isinstance(e, ProcCall):
        if e.receiver is not None:
            yield from _walk_exprs(e.receiver)
        for a in e.args:
            yield from _walk_exprs(a.value)


def _walk_stmts(block: Block):
    for s in block.stmts:
        yield s
        if isinstance(s, ForallStmt):
            yield from _walk_stmts(s.body)
        elif isinstance(s, FixedPointStmt):
            yield from _walk_stmts(s.body)
        elif isinstance(s, IterateInBfsStmt):
            yield from _walk_stmts(s.body)
            if s.reverse_body is not None:
                yield from _walk_stmts(s.reverse_body)
        elif isinstance(s, IfStmt):
            yield from _walk_stmts(s.then_branch)
            if s.else_branch is not None:
                yield from _walk_stmts(s.else_branch)
        elif isinstance(s, Block):
            yield from _walk_stmts(s)


# ---------------------------------------------------------------------------
# Public passes


def typecheck(root: Program) -> TypedProgram:
    tp = TypedProgram(root=root)
    _Checker(tp).check_program()
    return tp


def analyze_fixedpoint(tp: TypedProgram) -> TypedProgram:
    """Link each fixedPoint to the properties/scalars its convergence reads
    and mark every body write to those as flag-fused."""
    for fn in tp.root.functions:
        info = tp.functions[fn.name]
        for fp in info.fixedpoints:
            props: list[str] = []
            scalars: list[str] = []
            for e in _walk_exprs(fp.convergence):
                if isinstance(e, Identifier):
                    if e.sem_kind == "property-aggregate":
                        if e.name not in props:
                            props.append(e.name)
                    elif e.sem_kind == "scalar" and e.name != fp.flag:
                        if e.name not in scalars:
                            scalars.append(e.name)
                elif isinstance(e, MemberAccess):
                    if e.prop not in props and e.prop in info.node_props:
                        props.append(e.prop)
            # Close the property set over direct per-vertex copies:
            # "a.p = b.q" with p in the set pulls q in.
            changed = True
            while changed:
                changed = False
                for s in _walk_stmts(fp.body):
                    if (isinstance(s, AssignStmt)
                            and isinstance(s.lvalue, MemberAccess)
                            and s.lvalue.prop in props
                            and isinstance(s.expr, MemberAccess)
                            and s.expr.prop in info.node_props
                            and s.expr.prop not in props):
                        props.append(s.expr.prop)
                        changed = True
            fp.sem_driver_props = props
            fp.sem_driver_scalars = scalars

            wrote_driver = False
            for s in _walk_stmts(fp.body):
                targets: list[Expr] = []
                if isinstance(s, AssignStmt):
                    targets = [s.lvalue]
                elif isinstance(s, ReductionAssign):
                    targets = [s.lvalue]
                elif isinstance(s, MinMaxAssign):
                    targets = list(s.targets)
                hit = False
                for t in targets:
                    if isinstance(t, MemberAccess) and t.prop in props:
                        hit = True
                    if isinstance(t, Identifier) and t.name in scalars:
                        hit = True
                if hit:
                    wrote_driver = True
                    if isinstance(s, (AssignStmt, ReductionAssign, MinMaxAssign)):
                        s.sem_fused_flag = fp.flag
            if not wrote_driver:
                raise SemaError(
                    f"fixedPoint '{fp.flag}' can never terminate: its body "
                    "writes none of the variables its convergence reads",
                    fp.span.line, fp.span.col)
    return tp


def analyze_transfers(tp: TypedProgram) -> TransferPlan:
    """Host/device transfer plan per the rudimentary AST analysis."""
    plan = TransferPlan()
    for fn in tp.root.functions:
        info = tp.functions[fn.name]
        entries: dict[str, TransferEntry] = {}
        kernels = [s for s in _walk_stmts(fn.body)
                   if (isinstance(s, ForallStmt) and s.sem_parallel)
                   or isinstance(s, IterateInBfsStmt)]
        info.has_parallel = bool(kernels)
        if not kernels:
            plan.functions[fn.name] = entries
            continue
        if info.graph_param is not None:
            entries[info.graph_param] = TransferEntry(H2D_ONCE, "graph")

        driver_props: set[str] = set()
        conv_scalars: set[str] = set()
        for fp in info.fixedpoints:
            driver_props.update(fp.sem_driver_props)
            conv_scalars.update(fp.sem_driver_scalars)
            entries[fp.flag] = TransferEntry(ROUND_TRIP, "flag")

        for prop in list(info.node_props) + list(info.edge_props):
            if prop in driver_props:
                entries[prop] = TransferEntry(DEVICE_ONLY, "property")
            else:
                entries[prop] = TransferEntry(D2H_AT_END, "property")

        # Scalars written inside kernels: reduction targets.
        reduced: list[str] = []
        for s in _walk_stmts(fn.body):
            if isinstance(s, (ReductionAssign, MinMaxAssign)) and \
                    getattr(s, "sem_target_class", None) == "scalar-reduction":
                lv = s.lvalue if isinstance(s, ReductionAssign) else s.targets[0]
                if isinstance(lv, Identifier) and lv.name not in reduced:
                    reduced.append(lv.name)
        for name in reduced:
            if name in entries:
                continue
            if name in conv_scalars:
                entries[name] = TransferEntry(ROUND_TRIP, "scalar")
            else:
                entries[name] = TransferEntry(D2H_AT_END, "scalar")

        # Parameters and outer scalars read inside kernels become kernel
        # arguments; forall-locals stay on the device.
        outer_reads: list[str] = []
        local_decls: list[str] = []
        for k in kernels:
            blocks = [k.body] if isinstance(k, ForallStmt) else \
                [b for b in (k.body, k.reverse_body) if b is not None]
            for b in blocks:
                for s in _walk_stmts(b):
                    if isinstance(s, DeclStmt) and s.sem_storage == "forall-local":
                        if s.name not in local_decls:
                            local_decls.append(s.name)
            for b in blocks:
                for s in _walk_stmts(b):
                    for e in _iter_stmt_exprs(s):
                        for x in _walk_exprs(e):
                            if isinstance(x, Identifier) and x.sem_kind == "scalar":
                                outer_reads.append(x.name)
            if isinstance(k, ForallStmt) and k.filter is not None:
                for x in _walk_exprs(k.filter):
                    if isinstance(x, Identifier) and x.sem_kind == "scalar":
                        outer_reads.append(x.name)
            if isinstance(k, IterateInBfsStmt):
                for x in _walk_exprs(k.root):
                    if isinstance(x, Identifier) and x.sem_kind == "scalar":
                        outer_reads.append(x.name)
        for name in local_decls:
            entries.setdefault(name, TransferEntry(DEVICE_ONLY, "scalar"))
        for name in outer_reads:
            if name in local_decls or name in info.node_props \
                    or name in info.edge_props:
                continue
            entries.setdefault(name, TransferEntry(H2D_ONCE, "param"))
        plan.functions[fn.name] = entries
    tp.transfer_plan = plan
    return plan


def _iter_stmt_exprs(s: Stmt):
    if isinstance(s, DeclStmt) and s.init is not None:
        yield s.init
    elif isinstance(s, AssignStmt):
        yield s.lvalue
        yield s.expr
    elif isinstance(s, ReductionAssign):
        yield s.lvalue
        if s.expr is not None:
            yield s.expr
    elif isinstance(s, MinMaxAssign):
        yield from s.targets
        yield s.candidate
        yield from s.companions
    elif isinstance(s, ForallStmt):
        yield s.range_call
        if s.filter is not None:
            yield s.filter
    elif isinstance(s, FixedPointStmt):
        yield s.convergence
    elif isinstance(s, IterateInBfsStmt):
        yield s.root
    elif isinstance(s, IfStmt):
        yield s.cond
    elif isinstance(s, ReturnStmt):
        if s.expr is not None:
            yield s.expr
    elif isinstance(s, ExprStmt):
        yield s.expr


def analyze(root: Program) -> TypedProgram:
    """Run all passes: typecheck, fixed-point linkage, transfer analysis."""
    tp = typecheck(root)
    analyze_fixedpoint(tp)
    analyze_transfers(tp)
    return tp
