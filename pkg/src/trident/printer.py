"""Canonical DSL text from an AST.

``parse(tokenize(pretty_print(x)))`` is structurally equal to x for any
well-formed AST; corpus sources are stored in this canonical form.
"""

from __future__ import annotations

from .syntax import (AssignStmt, BinaryExpr, Block, DeclStmt, Expr, ExprStmt,
                     FixedPointStmt, ForallStmt, Function, Identifier, IfStmt,
                     IterateInBfsStmt, Literal, MemberAccess, MinMaxAssign,
                     ProcCall, Program, ReductionAssign, ReturnStmt, Stmt,
                     UnaryExpr)

_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, ">": 3, "<=": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}
_UNARY_PREC = 6


def fmt_expr(e: Expr, parent_prec: int = 0, angle: bool = False) -> str:
    if isinstance(e, Literal):
        return e.text if e.text else _literal_text(e)
    if isinstance(e, Identifier):
        return e.name
    if isinstance(e, MemberAccess):
        return f"{fmt_expr(e.obj, _UNARY_PREC + 1)}.{e.prop}"
    if isinstance(e, ProcCall):
        args = ", ".join(
            (f"{a.name} = {fmt_expr(a.value)}" if a.name else fmt_expr(a.value))
            for a in e.args)
        recv = f"{fmt_expr(e.receiver, _UNARY_PREC + 1)}." if e.receiver else ""
        return f"{recv}{e.method}({args})"
    if isinstance(e, UnaryExpr):
        inner = fmt_expr(e.operand, _UNARY_PREC, angle)
        return f"{e.op}{inner}"
    if isinstance(e, BinaryExpr):
        prec = _PREC[e.op]
        text = (f"{fmt_expr(e.left, prec, angle)} {e.op} "
                f"{fmt_expr(e.right, prec + 1, angle)}")
        # Bare < / > cannot appear unparenthesized inside a Min/Max list.
        if prec < parent_prec or (angle and e.op in ("<", ">")):
            return f"({text})"
        return text
    raise AssertionError(f"unprintable expression {e!r}")


def _literal_text(e: Literal) -> str:
    if e.kind == "bool":
        return "True" if e.value else "False"
    return repr(e.value)


def _range_text(stmt: ForallStmt) -> str:
    text = fmt_expr(stmt.range_call)
    if stmt.filter is not None:
        text += f".filter({fmt_expr(stmt.filter)})"
    return text


class _Printer:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.depth = 0

    def emit(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def block(self, b: Block) -> None:
        self.depth += 1
        for s in b.stmts:
            self.stmt(s)
        self.depth -= 1

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, DeclStmt):
            init = f" = {fmt_expr(s.init)}" if s.init is not None else ""
            self.emit(f"{s.dsl_type} {s.name}{init};")
        elif isinstance(s, AssignStmt):
            self.emit(f"{fmt_expr(s.lvalue)} = {fmt_expr(s.expr)};")
        elif isinstance(s, ReductionAssign):
            if s.op == "++":
                self.emit(f"{fmt_expr(s.lvalue)}++;")
            else:
                self.emit(f"{fmt_expr(s.lvalue)} {s.op} {fmt_expr(s.expr)};")
        elif isinstance(s, MinMaxAssign):
            targets = ", ".join(fmt_expr(t) for t in s.targets)
            parts = [f"{s.op}({fmt_expr(s.first)}, {fmt_expr(s.candidate)})"]
            parts += [fmt_expr(c, angle=True) for c in s.companions]
            self.emit(f"<{targets}> = <{', '.join(parts)}>;")
        elif isinstance(s, ForallStmt):
            kw = "forall" if s.is_parallel else "for"
            self.emit(f"{kw} ({s.iterator} in {_range_text(s)}) {{")
            self.block(s.body)
            self.emit("}")
        elif isinstance(s, FixedPointStmt):
            self.emit(f"fixedPoint until ({s.flag}: {fmt_expr(s.convergence)}) {{")
            self.block(s.body)
            self.emit("}")
        elif isinstance(s, IterateInBfsStmt):
            self.emit(f"iterateInBFS ({s.iterator} in {fmt_expr(s.range_call)}"
                      f" from {fmt_expr(s.root)}) {{")
            self.block(s.body)
            if s.reverse_body is not None:
                self.emit("} iterateInReverse {")
                self.block(s.reverse_body)
            self.emit("}")
        elif isinstance(s, IfStmt):
            self.emit(f"if ({fmt_expr(s.cond)}) {{")
            self.block(s.then_branch)
            if s.else_branch is not None:
                self.emit("} else {")
                self.block(s.else_branch)
            self.emit("}")
        elif isinstance(s, ReturnStmt):
            self.emit(f"return {fmt_expr(s.expr)};" if s.expr else "return;")
        elif isinstance(s, ExprStmt):
            self.emit(f"{fmt_expr(s.expr)};")
        elif isinstance(s, Block):
            self.emit("{")
            self.block(s)
            self.emit("}")
        else:
            raise AssertionError(f"unprintable statement {s!r}")

    def function(self, fn: Function) -> None:
        params = ", ".join(f"{p.dsl_type} {p.name}" for p in fn.params)
        self.emit(f"function {fn.name}({params}) {{")
        self.block(fn.body)
        self.emit("}")


def pretty_print(root: Program) -> str:
    if not root.functions:
        return ""
    printer = _Printer()
    for k, fn in enumerate(root.functions):
        if k:
            printer.emit("")
        printer.function(fn)
    return "\n".join(printer.lines) + "\n"
