"""In-process bulk-synchronous simulator for the distributed translation.

Vertices are block-partitioned across ranks.  One superstep covers one
fixedPoint iteration, one top-level vertex loop, or one BFS level: each
rank executes the compute phase over its local vertices against a
snapshot of remote state taken at the superstep boundary, remote
property writes are buffered and aggregated per (vertex, property) with
the combine operator implied by the construct, and owners apply the
aggregated messages at the exchange.  Scalar state is replicated:
plain scalar writes replay from the first rank (they are replicated
statements), while reduction operands from every rank combine at the
barrier.  Results are therefore independent of rank execution order up
to floating-point reassociation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ExecError, NonConvergenceError, PartitionError
from .graph import CsrGraph, block_partition
from .interp import (Executor, PropertyEnv, RunResult, check_args, coerce,
                     default_iteration_cap, _apply_reduction, _wins)
from .sema import TypedProgram
from .syntax import (AssignStmt, Block, DeclStmt, Expr, ExprStmt,
                     FixedPointStmt, ForallStmt, Identifier, IfStmt,
                     IterateInBfsStmt, MemberAccess, MinMaxAssign, PrimType,
                     ProcCall, ReductionAssign, ReturnStmt, Stmt)

_COMBINE_FOR_REDUCTION = {"+=": "sum", "++": "sum", "||=": "or"}


@dataclass(frozen=True)
class Msg:
    """One buffered remote update."""

    vertex: int
    prop: str
    op: str                      # min | max | sum | or | overwrite
    value: object
    companions: tuple = ()       # ((prop, value), ...) applied when min/max wins


def aggregate_messages(msgs: list[Msg]) -> list[Msg]:
    """Collapse a rank's send buffer to one message per (vertex, property).

    min/max keep the winning candidate together with its companions; sum
    and or fold; overwrite keeps the last write.
    """
    slots: dict[tuple[int, str], Msg] = {}
    for m in msgs:
        key = (m.vertex, m.prop)
        cur = slots.get(key)
        if cur is None:
            slots[key] = m
            continue
        if m.op != cur.op:
            raise ExecError(f"conflicting combine ops for {key}: {cur.op}/{m.op}")
        if m.op == "min":
            if m.value < cur.value:
                slots[key] = m
        elif m.op == "max":
            if m.value > cur.value:
                slots[key] = m
        elif m.op == "sum":
            slots[key] = Msg(m.vertex, m.prop, "sum", cur.value + m.value)
        elif m.op == "or":
            slots[key] = Msg(m.vertex, m.prop, "or", bool(cur.value) or bool(m.value))
        else:  # overwrite: last writer wins within the rank
            slots[key] = m
    return list(slots.values())


@dataclass
class Superstep:
    index: int
    label: str
    local_updates: dict[int, int]
    msgs_out: dict[int, int]
    exchanged: int
    finished: bool
    delivered: list[tuple[int, str, object]] = field(default_factory=list)


@dataclass
class SimResult:
    result: RunResult
    supersteps: list[Superstep]


def trace(sim: SimResult) -> list[Superstep]:
    return sim.supersteps


def format_trace_tsv(sim: SimResult) -> str:
    lines = ["superstep\trank\tlocal_updates\tmsgs_out\tfinished"]
    for step in sim.supersteps:
        for rank in sorted(step.local_updates):
            lines.append(f"{step.index}\t{rank}\t{step.local_updates[rank]}"
                         f"\t{step.msgs_out[rank]}"
                         f"\t{'true' if step.finished else 'false'}")
    return "\n".join(lines) + "\n"


class _RankExec(Executor):
    """Executes one rank's share of a compute phase.

    Property access routes by ownership (own vertices hit the master
    arrays, remote reads hit the phase snapshot, remote writes buffer
    messages); scalar writes shadow the replicated driver state and log
    events for the barrier merge.
    """

    def __init__(self, driver: "BspDriver", rank: int):
        super().__init__(driver.tp, driver.g, driver.fn, max_iters=driver.cap)
        self.driver = driver
        self.rank = rank
        self.part = driver.parts[rank]
        self.node_props = driver.node_props          # master arrays
        self.edge_props = driver.edge_props
        self.prop_elem = driver.prop_elem
        self.shadow: dict[str, object] = {}
        self.events: list[tuple] = []                # ("plain"|name...) log
        self.buffer: list[Msg] = []
        self.local_updates = 0
        self.scopes = [{}]

    # -- scalar routing ------------------------------------------------------

    def _local_lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope
        return None

    def get_var(self, name: str):
        scope = self._local_lookup(name)
        if scope is not None:
            return scope[name]
        if name in self.shadow:
            return self.shadow[name]
        return self.driver.get_var(name)

    def set_var(self, name: str, value) -> None:
        scope = self._local_lookup(name)
        if scope is not None:
            scope[name] = value
            return
        self.shadow[name] = value
        self.events.append(("plain", name, value))

    def scalar_reduce(self, lv: Identifier, op: str, value) -> None:
        name = lv.name
        scope = self._local_lookup(name)
        if scope is not None:
            scope[name] = _apply_reduction(op, scope[name], value)
            return
        self.shadow[name] = _apply_reduction(op, self.get_var(name), value)
        self.events.append(("red", name, op, value))

    def scalar_minmax(self, stmt: MinMaxAssign, cand, companions: list) -> bool:
        name = stmt.targets[0].name
        scope = self._local_lookup(name)
        if scope is not None:
            if _wins(stmt.op, cand, scope[name]):
                scope[name] = cand
                self._apply_companions(stmt, companions)
                return True
            return False
        if stmt.companions:
            raise ExecError("scalar Min/Max with companion targets is not "
                            "supported across ranks")
        op = "min" if stmt.op == "Min" else "max"
        if _wins(stmt.op, cand, self.get_var(name)):
            self.shadow[name] = cand
        self.events.append(("red", name, op, cand))
        return True

    # -- property routing ------------------------------------------------------

    def read_node_prop(self, name: str, v: int):
        if self.part.owns(v):
            return self.node_props[name][v]
        return self.driver.snapshot[name][v]

    def write_node_prop(self, name: str, v: int, value) -> None:
        if self.part.owns(v):
            if self.node_props[name][v] != value:
                self.local_updates += 1
            self.node_props[name][v] = value
        else:
            self.buffer.append(Msg(v, name, "overwrite", value))

    def reduce_node_prop(self, name: str, v: int, op: str, value) -> None:
        if self.part.owns(v):
            cur = self.node_props[name][v]
            new = _apply_reduction(op, cur, value)
            if new != cur:
                self.local_updates += 1
            self.node_props[name][v] = new
            return
        combine = _COMBINE_FOR_REDUCTION.get(op)
        if combine is None:
            raise ExecError(f"reduction '{op}' has no remote combine operator")
        self.buffer.append(Msg(v, name, combine,
                               1 if op == "++" else value))

    def minmax_node_prop(self, stmt: MinMaxAssign, v: int, cand,
                         companions: list) -> bool:
        name = stmt.targets[0].prop
        if self.part.owns(v):
            cur = self.node_props[name][v]
            if _wins(stmt.op, cand, cur):
                self.node_props[name][v] = cand
                self.local_updates += 1
                self._apply_companions(stmt, companions)
                return True
            return False
        comp = []
        for tgt, val in zip(stmt.targets[1:], companions):
            if not isinstance(tgt, MemberAccess):
                raise ExecError("Min/Max companions on remote vertices must "
                                "be properties")
            comp.append((tgt.prop, val))
        self.buffer.append(Msg(v, name, "min" if stmt.op == "Min" else "max",
                               cand, tuple(comp)))
        return True

    def write_edge_prop(self, name: str, e: int, value) -> None:
        u = self._edge_src(e)
        if not self.part.owns(u):
            raise ExecError("remote edge property writes are not supported")
        self.edge_props[name][e] = value

    def _edge_src(self, e: int) -> int:
        from bisect import bisect_right
        return bisect_right(self.g.offsets, e) - 1

    # -- iteration ----------------------------------------------------------------

    def node_range(self):
        return self.part.real_range()

    def exec_fixedpoint(self, stmt: FixedPointStmt) -> None:
        raise ExecError("nested fixedPoint inside a compute phase is not "
                        "supported by the simulator")

    def exec_bfs(self, stmt: IterateInBfsStmt) -> None:
        raise ExecError("iterateInBFS inside a compute phase is not "
                        "supported by the simulator")

    def exec_expr_stmt(self, stmt: ExprStmt) -> None:
        e = stmt.expr
        if isinstance(e, ProcCall) and e.method.startswith("attach"):
            raise ExecError("property attach inside a compute phase is not "
                            "supported by the simulator")
        super().exec_expr_stmt(stmt)


class BspDriver(Executor):
    """Master executor: runs replicated statements directly and expands
    parallel constructs into supersteps."""

    def __init__(self, tp: TypedProgram, g: CsrGraph, fn, nranks: int,
                 rank_order: Optional[list[int]] = None,
                 max_iters: Optional[int] = None,
                 local_fixpoint: bool = False,
                 record_messages: bool = False):
        super().__init__(tp, g, fn, max_iters=max_iters)
        if nranks < 1:
            raise PartitionError(f"nranks must be >= 1, got {nranks}")
        self.nranks = nranks
        self.parts = block_partition(g, nranks)
        if rank_order is None:
            rank_order = list(range(nranks))
        if sorted(rank_order) != list(range(nranks)):
            raise PartitionError(f"rank_order must permute 0..{nranks - 1}")
        self.rank_order = list(rank_order)
        self.local_fixpoint = local_fixpoint
        self.record_messages = record_messages
        self.snapshot: dict[str, list] = {}
        self.supersteps: list[Superstep] = []

    # -- phase machinery -----------------------------------------------------

    def _take_snapshot(self) -> None:
        self.snapshot = {name: list(arr) for name, arr in self.node_props.items()}

    def _run_phase(self, label: str, body_fn, repeat_local: bool = False,
                   finished: bool = False) -> None:
        """One superstep: per-rank compute, aggregate, exchange, merge."""
        self._take_snapshot()
        ranks: dict[int, _RankExec] = {}
        for r in self.rank_order:
            rank = _RankExec(self, r)
            ranks[r] = rank
            if repeat_local:
                passes = 0
                while True:
                    before = rank.local_updates
                    body_fn(rank)
                    passes += 1
                    if rank.local_updates == before:
                        break
                    if passes > self.cap:
                        raise NonConvergenceError("local fixpoint", self.cap)
            else:
                body_fn(rank)
        # Exchange: aggregate per sending rank, deliver at owners.
        delivered: list[tuple[int, str, object]] = []
        msgs_out: dict[int, int] = {}
        exchanged = 0
        for r in self.rank_order:
            agg = aggregate_messages(ranks[r].buffer)
            msgs_out[r] = len(agg)
            exchanged += len(agg)
            for m in agg:
                self._deliver(m)
                if self.record_messages:
                    delivered.append((m.vertex, m.prop, m.value))
        # Scalar merge: replicated plain writes replay once, reductions from
        # every rank combine.
        first = self.rank_order[0]
        for ev in ranks[first].events:
            self._apply_event(ev)
        for r in self.rank_order[1:]:
            for ev in ranks[r].events:
                if ev[0] == "red":
                    self._apply_event(ev)
        self.supersteps.append(Superstep(
            index=len(self.supersteps), label=label,
            local_updates={r: ranks[r].local_updates for r in range(self.nranks)},
            msgs_out=msgs_out, exchanged=exchanged,
            finished=finished, delivered=delivered))

    def _apply_event(self, ev: tuple) -> None:
        if ev[0] == "plain":
            _, name, value = ev
            self.set_var(name, value)
        else:
            _, name, op, operand = ev
            cur = self.get_var(name)
            if op in ("min", "max"):
                if _wins("Min" if op == "min" else "Max", operand, cur):
                    self.set_var(name, operand)
            else:
                self.set_var(name, _apply_reduction(op, cur, operand))

    def _deliver(self, m: Msg) -> None:
        arr = self.node_props[m.prop]
        cur = arr[m.vertex]
        if m.op == "min":
            if m.value < cur:
                arr[m.vertex] = m.value
                for prop, val in m.companions:
                    self.node_props[prop][m.vertex] = val
        elif m.op == "max":
            if m.value > cur:
                arr[m.vertex] = m.value
                for prop, val in m.companions:
                    self.node_props[prop][m.vertex] = val
        elif m.op == "sum":
            arr[m.vertex] = cur + m.value
        elif m.op == "or":
            arr[m.vertex] = bool(cur) or bool(m.value)
        else:
            arr[m.vertex] = m.value

    # -- construct orchestration -------------------------------------------------

    def exec_forall(self, stmt: ForallStmt) -> None:
        if isinstance(stmt.range_call, Identifier):
            # Set iteration is replicated sequential control flow.
            super().exec_forall(stmt)
            return
        label = f"forall@{stmt.span.line}"

        def phase(rank: _RankExec) -> None:
            for item in self.range_values(stmt.range_call):
                if not rank.part.owns(item):
                    continue
                rank.push_scope()
                rank.declare_var(stmt.iterator, item)
                if stmt.filter is not None and not rank.eval(stmt.filter):
                    rank.pop_scope()
                    continue
                rank.exec_block(stmt.body, new_scope=False)
                rank.pop_scope()

        self._run_phase(label, phase)

    def exec_fixedpoint(self, stmt: FixedPointStmt) -> None:
        self.push_scope()
        self.declare_var(stmt.flag, False)
        iters = 0

        def phase(rank: _RankExec) -> None:
            for s in stmt.body.stmts:
                rank.exec_stmt(s)

        while True:
            iters += 1
            self._run_phase(f"fixedPoint:{stmt.flag}#{iters}", phase,
                            repeat_local=self.local_fixpoint)
            # The finished flag is the cross-rank combine of the convergence
            # expression evaluated over the post-exchange state.
            finished = bool(self.eval(stmt.convergence))
            self.set_var(stmt.flag, finished)
            self.flag_values[stmt.flag] = finished
            self.supersteps[-1].finished = finished
            if finished:
                break
            if iters >= self.cap:
                raise NonConvergenceError(stmt.flag, self.cap)
        self.fixedpoint_iterations[stmt.flag] = iters
        self.pop_scope()

    def exec_bfs(self, stmt: IterateInBfsStmt) -> None:
        root = self.eval(stmt.root)
        state = self.compute_bfs_levels(root)
        outer = self.bfs
        self.bfs = state
        try:
            for depth, level_nodes in enumerate(state.levels):
                self._bfs_level_phase(stmt, stmt.body, level_nodes,
                                      f"bfs@{stmt.span.line}:level{depth}")
            if stmt.reverse_body is not None:
                last = len(state.levels) - 1
                for depth in range(last, -1, -1):
                    self._bfs_level_phase(stmt, stmt.reverse_body,
                                          state.levels[depth],
                                          f"bfs@{stmt.span.line}:rev{depth}")
        finally:
            self.bfs = outer

    def _bfs_level_phase(self, stmt: IterateInBfsStmt, body: Block,
                         level_nodes: list[int], label: str) -> None:
        def phase(rank: _RankExec) -> None:
            rank.bfs = self.bfs
            for v in level_nodes:
                if not rank.part.owns(v):
                    continue
                rank.push_scope()
                rank.declare_var(stmt.iterator, v)
                rank.exec_block(body, new_scope=False)
                rank.pop_scope()

        self._run_phase(label, phase)


def simulate(tp: TypedProgram, g: CsrGraph, nranks: int, args: dict,
             function: str | None = None, max_iters: int | None = None,
             rank_order: list[int] | None = None,
             local_fixpoint: bool = False,
             record_messages: bool = False) -> SimResult:
    """Execute a typed program under block-partitioned BSP semantics."""
    fn = tp.function(function)
    info = tp.functions[fn.name]
    bound = check_args(info, g, args)
    driver = BspDriver(tp, g, fn, nranks, rank_order=rank_order,
                       max_iters=max_iters, local_fixpoint=local_fixpoint,
                       record_messages=record_messages)
    result = driver.execute(bound)
    return SimResult(result=result, supersteps=driver.supersteps)
