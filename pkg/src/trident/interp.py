"""Deterministic sequential reference executor.

Semantics fixed here are the ground truth for every backend: vertices
iterate in ascending id (neighbors in CSR order), filters are guards,
Min/Max multi-assignments compare-then-assign as one step, reductions
fold left in iteration order, fixedPoint re-runs its body until the
convergence expression holds (a bare boolean property in a convergence
expression means the OR over all vertices), and iterateInBFS walks
levels ascending with neighbor calls redefined over the BFS DAG.

Integer arithmetic is unbounded Python arithmetic; a Min candidate
computed past INT_MAX can therefore never win against an INT_MAX
sentinel, which subsumes the relaxation guard emitted backends get from
the corpus ``modified`` filter.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import ExecError, NonConvergenceError
from .graph import CsrGraph
from .sema import FunctionInfo, TypedProgram
from .syntax import (AssignStmt, BinaryExpr, Block, DeclStmt, DslType,
                     EdgeType, Expr, ExprStmt, FixedPointStmt, ForallStmt,
                     Function, GraphType, Identifier, IfStmt,
                     IterateInBfsStmt, ListType, Literal, MemberAccess,
                     MinMaxAssign, NodeType, PrimType, ProcCall, PropEdgeType,
                     PropNodeType, ReductionAssign, ReturnStmt, SetEType,
                     SetNType, Stmt, UnaryExpr)


def default_iteration_cap(n: int) -> int:
    return 2 * n + 16


@dataclass
class PropertyEnv:
    """Final value store: one array per attached property plus scalars."""

    node_props: dict[str, list] = field(default_factory=dict)
    edge_props: dict[str, list] = field(default_factory=dict)
    scalars: dict[str, object] = field(default_factory=dict)


@dataclass
class RunResult:
    env: PropertyEnv
    fixedpoint_iterations: dict[str, int] = field(default_factory=dict)
    wall_seconds: float = 0.0
    return_value: object = None


class _ReturnSignal(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class BfsState:
    level: list[int]
    levels: list[list[int]]   # vertices per level, ascending ids


def _int_div(a: int, b: int) -> int:
    if b == 0:
        raise ExecError("integer division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def coerce(t: DslType, value):
    if isinstance(t, PrimType):
        if t.is_float:
            return float(value)
        if t.name == "bool":
            return bool(value)
        return int(value)
    return value


def default_value(t: DslType):
    if isinstance(t, PrimType):
        return 0.0 if t.is_float else (False if t.name == "bool" else 0)
    return 0


def check_args(info: FunctionInfo, g: CsrGraph, args: dict) -> dict[str, object]:
    """Validate and coerce CLI/caller arguments against the formals."""
    bound: dict[str, object] = {}
    for name, t in info.params:
        if isinstance(t, GraphType):
            bound[name] = g
            continue
        if name not in args:
            raise ExecError(f"missing argument '{name}'")
        v = args[name]
        if isinstance(t, PrimType):
            bound[name] = coerce(t, v)
        elif isinstance(t, NodeType):
            vid = int(v)
            if not (0 <= vid < g.n):
                raise ExecError(f"node argument '{name}'={vid} out of range")
            bound[name] = vid
        elif isinstance(t, SetNType):
            ids = [int(x) for x in v]
            for vid in ids:
                if not (0 <= vid < g.n):
                    raise ExecError(f"set argument '{name}' id {vid} out of range")
            bound[name] = ids
        elif isinstance(t, SetEType):
            ids = [int(x) for x in v]
            for e in ids:
                if not (0 <= e < g.m):
                    raise ExecError(f"edge set argument '{name}' id {e} out of range")
            bound[name] = ids
        elif isinstance(t, EdgeType):
            e = int(v)
            if not (0 <= e < g.m):
                raise ExecError(f"edge argument '{name}'={e} out of range")
            bound[name] = e
        elif isinstance(t, ListType):
            bound[name] = list(v)
        else:
            raise ExecError(f"unsupported argument type for '{name}'")
    return bound


class Executor:
    """Tree-walking executor.  The BSP simulator subclasses this and
    overrides the property/scalar access hooks."""

    def __init__(self, tp: TypedProgram, g: CsrGraph, fn: Function,
                 max_iters: Optional[int] = None,
                 on_fixedpoint_iteration: Optional[Callable] = None):
        self.tp = tp
        self.g = g
        self.fn = fn
        self.info = tp.functions[fn.name]
        self.cap = max_iters if max_iters is not None else default_iteration_cap(g.n)
        self.hook = on_fixedpoint_iteration
        self.scopes: list[dict] = []
        self.node_props: dict[str, list] = {}
        self.edge_props: dict[str, list] = {}
        self.prop_elem: dict[str, PrimType] = {}
        self.flag_values: dict[str, object] = {}
        self.fixedpoint_iterations: dict[str, int] = {}
        self.bfs: Optional[BfsState] = None

    # -- scope ------------------------------------------------------------

    def push_scope(self) -> None:
        self.scopes.append({})

    def pop_scope(self) -> None:
        self.scopes.pop()

    def set_var(self, name: str, value) -> None:
        for scope in reversed(self.scopes):
            if name in scope:
                scope[name] = value
                return
        self.scopes[-1][name] = value

    def declare_var(self, name: str, value) -> None:
        self.scopes[-1][name] = value

    def get_var(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise ExecError(f"unbound variable '{name}'")

    # -- property hooks (overridden by the BSP simulator) -------------------

    def attach_node_prop(self, name: str, elem: PrimType, init) -> None:
        self.node_props[name] = [init] * self.g.n
        self.prop_elem[name] = elem

    def attach_edge_prop(self, name: str, elem: PrimType, init) -> None:
        self.edge_props[name] = [init] * self.g.m
        self.prop_elem[name] = elem

    def read_node_prop(self, name: str, v: int):
        return self.node_props[name][v]

    def write_node_prop(self, name: str, v: int, value) -> None:
        self.node_props[name][v] = value

    def reduce_node_prop(self, name: str, v: int, op: str, value) -> None:
        cur = self.read_node_prop(name, v)
        self.write_node_prop(name, v, _apply_reduction(op, cur, value))

    def minmax_node_prop(self, stmt: MinMaxAssign, v: int, cand,
                         companions: list) -> bool:
        name = stmt.targets[0].prop
        cur = self.read_node_prop(name, v)
        if _wins(stmt.op, cand, cur):
            self.write_node_prop(name, v, cand)
            self._apply_companions(stmt, companions)
            return True
        return False

    def _apply_companions(self, stmt: MinMaxAssign, companions: list) -> None:
        for tgt, val in zip(stmt.targets[1:], companions):
            self.assign_lvalue(tgt, val)

    def read_edge_prop(self, name: str, e: int):
        return self.edge_props[name][e]

    def write_edge_prop(self, name: str, e: int, value) -> None:
        self.edge_props[name][e] = value

    def node_range(self) -> range:
        return range(self.g.n)

    def or_over_nodes(self, name: str) -> bool:
        return any(self.node_props[name])

    def scalar_reduce(self, lv: Identifier, op: str, value) -> None:
        cur = self.get_var(lv.name)
        self.set_var(lv.name, _apply_reduction(op, cur, value))

    def scalar_minmax(self, stmt: MinMaxAssign, cand, companions: list) -> bool:
        cur = self.get_var(stmt.targets[0].name)
        if _wins(stmt.op, cand, cur):
            self.set_var(stmt.targets[0].name, cand)
            self._apply_companions(stmt, companions)
            return True
        return False

    # -- entry ---------------------------------------------------------------

    def execute(self, args: dict[str, object]) -> RunResult:
        start = time.perf_counter()
        self.scopes = [{}]
        for name, t in self.info.params:
            if isinstance(t, GraphType):
                self.declare_var(name, self.g)
            else:
                self.declare_var(name, args[name])
        ret = None
        try:
            self.exec_block(self.fn.body, new_scope=False)
        except _ReturnSignal as sig:
            ret = sig.value
        env = self.final_env()
        return RunResult(env=env,
                         fixedpoint_iterations=dict(self.fixedpoint_iterations),
                         wall_seconds=time.perf_counter() - start,
                         return_value=ret)

    def final_env(self) -> PropertyEnv:
        scalars: dict[str, object] = {}
        top = self.scopes[0]
        for name in self.info.dump_scalars:
            if name in top:
                scalars[name] = top[name]
            elif name in self.flag_values:
                scalars[name] = self.flag_values[name]
        return PropertyEnv(node_props={k: list(v) for k, v in self.node_props.items()},
                           edge_props={k: list(v) for k, v in self.edge_props.items()},
                           scalars=scalars)

    # -- statements ------------------------------------------------------------

    def exec_block(self, block: Block, new_scope: bool = True) -> None:
        if new_scope:
            self.push_scope()
        for stmt in block.stmts:
            self.exec_stmt(stmt)
        if new_scope:
            self.pop_scope()

    def exec_stmt(self, stmt: Stmt) -> None:
        if isinstance(stmt, DeclStmt):
            if isinstance(stmt.dsl_type, (PropNodeType, PropEdgeType)):
                return  # storage appears at attach time
            value = (self.eval(stmt.init) if stmt.init is not None
                     else default_value(stmt.dsl_type))
            if isinstance(stmt.dsl_type, PrimType):
                value = coerce(stmt.dsl_type, value)
            self.declare_var(stmt.name, value)
        elif isinstance(stmt, AssignStmt):
            self.assign_lvalue(stmt.lvalue, self.eval(stmt.expr))
        elif isinstance(stmt, ReductionAssign):
            self.exec_reduction(stmt)
        elif isinstance(stmt, MinMaxAssign):
            self.exec_minmax(stmt)
        elif isinstance(stmt, ForallStmt):
            self.exec_forall(stmt)
        elif isinstance(stmt, FixedPointStmt):
            self.exec_fixedpoint(stmt)
        elif isinstance(stmt, IterateInBfsStmt):
            self.exec_bfs(stmt)
        elif isinstance(stmt, IfStmt):
            if self.eval(stmt.cond):
                self.exec_block(stmt.then_branch)
            elif stmt.else_branch is not None:
                self.exec_block(stmt.else_branch)
        elif isinstance(stmt, ReturnStmt):
            raise _ReturnSignal(self.eval(stmt.expr) if stmt.expr else None)
        elif isinstance(stmt, ExprStmt):
            self.exec_expr_stmt(stmt)
        elif isinstance(stmt, Block):
            self.exec_block(stmt)
        else:
            raise AssertionError(f"unexecutable statement {stmt!r}")

    def exec_expr_stmt(self, stmt: ExprStmt) -> None:
        e = stmt.expr
        if isinstance(e, ProcCall) and e.method in ("attachNodeProperty",
                                                    "attachEdgeProperty"):
            node_kind = e.method == "attachNodeProperty"
            registry = (self.info.node_props if node_kind
                        else self.info.edge_props)
            for a in e.args:
                elem = registry[a.name]
                init = coerce(elem, self.eval(a.value))
                if node_kind:
                    self.attach_node_prop(a.name, elem, init)
                else:
                    self.attach_edge_prop(a.name, elem, init)
            return
        self.eval(e)

    def assign_lvalue(self, lv: Expr, value) -> None:
        if isinstance(lv, Identifier):
            t = lv.sem_type
            if isinstance(t, PrimType):
                value = coerce(t, value)
            self.set_var(lv.name, value)
            return
        assert isinstance(lv, MemberAccess)
        obj_t = lv.obj.sem_type
        obj = self.eval(lv.obj)
        if isinstance(obj_t, EdgeType):
            value = coerce(self.prop_elem[lv.prop], value)
            self.write_edge_prop(lv.prop, obj, value)
        else:
            value = coerce(self.prop_elem[lv.prop], value)
            self.write_node_prop(lv.prop, obj, value)

    def exec_reduction(self, stmt: ReductionAssign) -> None:
        value = self.eval(stmt.expr) if stmt.expr is not None else 1
        lv = stmt.lvalue
        if isinstance(lv, Identifier):
            self.scalar_reduce(lv, stmt.op, value)
            return
        assert isinstance(lv, MemberAccess)
        obj = self.eval(lv.obj)
        if isinstance(lv.obj.sem_type, EdgeType):
            cur = self.read_edge_prop(lv.prop, obj)
            self.write_edge_prop(lv.prop, obj, _apply_reduction(stmt.op, cur, value))
        else:
            self.reduce_node_prop(lv.prop, obj, stmt.op, value)

    def exec_minmax(self, stmt: MinMaxAssign) -> None:
        cand = self.eval(stmt.candidate)
        t0 = stmt.targets[0]
        companions = [self.eval(c) for c in stmt.companions]
        if isinstance(t0, Identifier):
            cand = coerce(t0.sem_type, cand)
            self.scalar_minmax(stmt, cand, companions)
        else:
            cand = coerce(self.prop_elem[t0.prop], cand)
            v = self.eval(t0.obj)
            self.minmax_node_prop(stmt, v, cand, companions)

    def exec_forall(self, stmt: ForallStmt) -> None:
        for item in self.range_values(stmt.range_call):
            self.push_scope()
            self.declare_var(stmt.iterator, item)
            if stmt.filter is not None and not self.eval(stmt.filter):
                self.pop_scope()
                continue
            self.exec_block(stmt.body, new_scope=False)
            self.pop_scope()

    def range_values(self, rng: Expr):
        if isinstance(rng, Identifier):
            return list(self.get_var(rng.name))  # SetN / SetE argument
        assert isinstance(rng, ProcCall)
        method = rng.method
        if method == "nodes":
            return self.node_range()
        v = self.eval(rng.args[0].value)
        if method == "neighbors" or method == "nodesFrom":
            if self.bfs is not None:
                return self.bfs_children(v)
            return self.g.neighbors(v)
        if method == "nodesTo":
            if self.bfs is not None:
                return self.bfs_parents(v)
            return self.g.in_neighbors(v)
        raise AssertionError(method)

    def exec_fixedpoint(self, stmt: FixedPointStmt) -> None:
        self.push_scope()
        self.declare_var(stmt.flag, False)
        iters = 0
        while True:
            self.exec_block(stmt.body, new_scope=False)
            iters += 1
            finished = bool(self.eval_convergence(stmt))
            self.set_var(stmt.flag, finished)
            self.flag_values[stmt.flag] = finished
            if self.hook is not None:
                self.hook(stmt.flag, iters, self)
            if finished:
                break
            if iters >= self.cap:
                raise NonConvergenceError(stmt.flag, self.cap)
        self.fixedpoint_iterations[stmt.flag] = iters
        self.pop_scope()

    def eval_convergence(self, stmt: FixedPointStmt):
        return self.eval(stmt.convergence)

    def exec_bfs(self, stmt: IterateInBfsStmt) -> None:
        root = self.eval(stmt.root)
        state = self.compute_bfs_levels(root)
        outer_bfs = self.bfs
        self.bfs = state
        try:
            for level_nodes in state.levels:
                self.bfs_level_body(stmt, stmt.body, level_nodes)
            if stmt.reverse_body is not None:
                for level_nodes in reversed(state.levels):
                    self.bfs_level_body(stmt, stmt.reverse_body, level_nodes)
        finally:
            self.bfs = outer_bfs

    def bfs_level_body(self, stmt: IterateInBfsStmt, body: Block,
                       level_nodes: list[int]) -> None:
        for v in level_nodes:
            self.push_scope()
            self.declare_var(stmt.iterator, v)
            self.exec_block(body, new_scope=False)
            self.pop_scope()

    def compute_bfs_levels(self, root: int) -> BfsState:
        level = [-1] * self.g.n
        level[root] = 0
        q = deque([root])
        levels: list[list[int]] = [[root]]
        while q:
            u = q.popleft()
            for w in self.g.neighbors(u):
                if level[w] == -1:
                    level[w] = level[u] + 1
                    if level[w] == len(levels):
                        levels.append([])
                    levels[level[w]].append(w)
                    q.append(w)
        for nodes in levels:
            nodes.sort()
        return BfsState(level=level, levels=levels)

    def bfs_children(self, v: int) -> list[int]:
        lv = self.bfs.level[v]
        return [w for w in self.g.neighbors(v) if self.bfs.level[w] == lv + 1]

    def bfs_parents(self, v: int) -> list[int]:
        lv = self.bfs.level[v]
        return [u for u in self.g.in_neighbors(v) if self.bfs.level[u] == lv - 1]

    # -- expressions --------------------------------------------------------------

    def eval(self, e: Expr):
        if isinstance(e, Literal):
            return e.value
        if isinstance(e, Identifier):
            if e.sem_kind == "property-implicit":
                v = self.get_var(e.sem_implicit_iter)
                return self.read_node_prop(e.name, v)
            if e.sem_kind == "property-aggregate":
                return self.or_over_nodes(e.name)
            return self.get_var(e.name)
        if isinstance(e, MemberAccess):
            obj = self.eval(e.obj)
            if isinstance(e.obj.sem_type, EdgeType):
                if e.prop == "weight":
                    return self.g.weights[obj]
                return self.read_edge_prop(e.prop, obj)
            return self.read_node_prop(e.prop, obj)
        if isinstance(e, ProcCall):
            return self.eval_call(e)
        if isinstance(e, UnaryExpr):
            v = self.eval(e.operand)
            return (not v) if e.op == "!" else (-v)
        if isinstance(e, BinaryExpr):
            return self.eval_binary(e)
        raise AssertionError(f"unevaluable expression {e!r}")

    def eval_binary(self, e: BinaryExpr):
        op = e.op
        if op == "&&":
            return bool(self.eval(e.left)) and bool(self.eval(e.right))
        if op == "||":
            return bool(self.eval(e.left)) or bool(self.eval(e.right))
        a = self.eval(e.left)
        b = self.eval(e.right)
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if op == "<":
            return a < b
        if op == ">":
            return a > b
        if op == "<=":
            return a <= b
        if op == ">=":
            return a >= b
        int_op = isinstance(a, int) and isinstance(b, int) \
            and not isinstance(a, bool) and not isinstance(b, bool)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return _int_div(a, b) if int_op else a / b
        if op == "%":
            if int_op:
                if b == 0:
                    raise ExecError("integer modulo by zero")
                return a - _int_div(a, b) * b
            raise ExecError("'%' needs integer operands")
        raise AssertionError(op)

    def eval_call(self, e: ProcCall):
        m = e.method
        if m == "num_nodes":
            return self.g.n
        if m == "num_edges":
            return self.g.m
        if m == "count_outNbrs":
            return self.g.degree(self.eval(e.args[0].value))
        if m == "get_edge":
            u = self.eval(e.args[0].value)
            v = self.eval(e.args[1].value)
            idx = self.g.find_edge(u, v)
            if idx is None:
                raise ExecError(f"get_edge: no edge {u}->{v}")
            return idx
        if m == "minWt":
            from .graph import min_wt
            return min_wt(self.g)
        if m == "maxWt":
            from .graph import max_wt
            return max_wt(self.g)
        raise AssertionError(f"uninterpretable call {m}")


def _apply_reduction(op: str, cur, value):
    if op == "+=":
        return cur + value
    if op == "*=":
        return cur * value
    if op == "++":
        return cur + 1
    if op == "&&=":
        return bool(cur) and bool(value)
    if op == "||=":
        return bool(cur) or bool(value)
    raise AssertionError(op)


def _wins(op: str, cand, cur) -> bool:
    return cand < cur if op == "Min" else cand > cur


def run(tp: TypedProgram, g: CsrGraph, args: dict,
        function: str | None = None, max_iters: int | None = None,
        on_fixedpoint_iteration=None) -> RunResult:
    """Interpret a typed program against a graph.  ``args`` maps every
    non-Graph formal parameter to a value."""
    fn = tp.function(function)
    info = tp.functions[fn.name]
    bound = check_args(info, g, args)
    ex = Executor(tp, g, fn, max_iters=max_iters,
                  on_fixedpoint_iteration=on_fixedpoint_iteration)
    return ex.execute(bound)
