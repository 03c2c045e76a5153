"""Recursive-descent parser with precedence climbing for expressions.

There is no error recovery: the first grammar violation raises
ParseError and aborts.  Operator precedence, loosest to tightest:
``||`` < ``&&`` < comparisons < ``+ -`` < ``* / %`` < unary < member
access / calls.

A ``<`` at statement position always begins a Min/Max multi-assignment;
inside its angle brackets the bare ``<`` and ``>`` comparison operators
are unavailable at the top level (parenthesize to compare).
"""

from __future__ import annotations

from .errors import ParseError
from .lexer import TokKind, Token, tokenize
from .syntax import (INT_MAX, AssignStmt, BinaryExpr, Block, CallArg,
                     DeclStmt, DslType, EdgeType, Expr, ExprStmt,
                     FixedPointStmt, ForallStmt, FormalParam, Function,
                     GraphType, Identifier, IfStmt, IterateInBfsStmt,
                     ListType, Literal, MemberAccess, MinMaxAssign, NodeType,
                     PrimType, ProcCall, Program, PropEdgeType, PropNodeType,
                     ReductionAssign, ReturnStmt, SetEType, SetNType, Span,
                     Stmt, UnaryExpr)

_TYPE_KEYWORDS = {"Graph", "node", "edge", "propNode", "propEdge", "SetN",
                  "SetE", "List", "int", "bool", "long", "float", "double"}

_BINARY_PREC = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3, "<": 3, ">": 3, "<=": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5, "%": 5,
}

_REDUCTION_OPS = ("+=", "*=", "&&=", "||=")


def _tok_span(tok: Token) -> Span:
    return Span(tok.line, tok.col, tok.line, tok.end_col)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        k = self.pos + ahead
        return self.toks[k] if k < len(self.toks) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def error(self, expected: tuple[str, ...]) -> ParseError:
        if self.at_end():
            last = self.toks[-1] if self.toks else None
            line = last.line if last else 1
            col = last.end_col if last else 1
            found = "end of input"
        else:
            t = self.peek()
            line, col, found = t.line, t.col, t.text
        wanted = " or ".join(expected)
        return ParseError(f"expected {wanted}, found {found}", line, col,
                          expected=expected, found=found)

    def take(self) -> Token:
        if self.at_end():
            raise self.error(("a token",))
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def check(self, text: str) -> bool:
        t = self.peek()
        return t is not None and t.text == text

    def check_kind(self, kind: TokKind) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind

    def accept(self, text: str) -> Token | None:
        if self.check(text):
            return self.take()
        return None

    def expect(self, text: str) -> Token:
        if self.check(text):
            return self.take()
        raise self.error((f"'{text}'",))

    def expect_ident(self) -> Token:
        if self.check_kind(TokKind.IDENT):
            return self.take()
        raise self.error(("identifier",))

    # -- program structure --------------------------------------------------

    def parse_program(self) -> Program:
        functions = []
        while not self.at_end():
            functions.append(self.parse_function())
        if functions:
            span = functions[0].span.merge(functions[-1].span)
        else:
            span = Span(1, 1, 1, 1)
        return Program(span=span, functions=functions)

    def parse_function(self) -> Function:
        start = self.expect("function")
        name = self.expect_ident()
        self.expect("(")
        params: list[FormalParam] = []
        if not self.check(")"):
            params.append(self.parse_param())
            while self.accept(","):
                params.append(self.parse_param())
        self.expect(")")
        body = self.parse_block()
        return Function(span=_tok_span(start).merge(body.span),
                        name=name.text, params=params, body=body)

    def parse_param(self) -> FormalParam:
        t = self.peek()
        dsl_type, tspan = self.parse_type()
        name = self.expect_ident()
        return FormalParam(span=tspan.merge(_tok_span(name)),
                           dsl_type=dsl_type, name=name.text)

    def parse_type(self) -> tuple[DslType, Span]:
        t = self.peek()
        if t is None or t.text not in _TYPE_KEYWORDS:
            raise self.error(("a type",))
        tok = self.take()
        span = _tok_span(tok)
        simple = {
            "Graph": GraphType, "node": NodeType, "edge": EdgeType,
            "SetN": SetNType, "SetE": SetEType, "List": ListType,
        }
        if tok.text in simple:
            return simple[tok.text](), span
        if tok.text in PrimType.NAMES:
            return PrimType(tok.text), span
        # propNode<prim> / propEdge<prim>
        self.expect("<")
        elem = self.peek()
        if elem is None or elem.text not in PrimType.NAMES:
            raise self.error(("a primitive type",))
        self.take()
        close = self.expect(">")
        ctor = PropNodeType if tok.text == "propNode" else PropEdgeType
        return ctor(PrimType(elem.text)), span.merge(_tok_span(close))

    def parse_block(self) -> Block:
        start = self.expect("{")
        stmts: list[Stmt] = []
        while not self.check("}"):
            if self.at_end():
                raise self.error(("'}'",))
            stmts.append(self.parse_statement())
        end = self.expect("}")
        return Block(span=_tok_span(start).merge(_tok_span(end)), stmts=stmts)

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> Stmt:
        t = self.peek()
        if t is None:
            raise self.error(("a statement",))
        if t.text in _TYPE_KEYWORDS:
            return self.parse_decl()
        if t.text in ("forall", "for"):
            return self.parse_forall()
        if t.text == "fixedPoint":
            return self.parse_fixedpoint()
        if t.text == "iterateInBFS":
            return self.parse_bfs()
        if t.text == "if":
            return self.parse_if()
        if t.text == "return":
            return self.parse_return()
        if t.text == "{":
            return self.parse_block()
        if t.text == "<":
            return self.parse_minmax()
        return self.parse_assign_or_expr()

    def parse_decl(self) -> DeclStmt:
        start = self.peek()
        dsl_type, tspan = self.parse_type()
        name = self.expect_ident()
        init = None
        if self.accept("="):
            init = self.parse_expr()
        semi = self.expect(";")
        return DeclStmt(span=tspan.merge(_tok_span(semi)), dsl_type=dsl_type,
                        name=name.text, init=init)

    def parse_forall(self) -> ForallStmt:
        kw = self.take()  # forall | for
        self.expect("(")
        it = self.expect_ident()
        self.expect("in")
        range_call = self.parse_expr()
        self.expect(")")
        body = self.parse_block()
        # Pull a trailing .filter(expr) off the range expression.
        fexpr = None
        if (isinstance(range_call, ProcCall) and range_call.method == "filter"
                and range_call.receiver is not None):
            if len(range_call.args) != 1 or range_call.args[0].name is not None:
                raise ParseError("filter takes exactly one positional argument",
                                 range_call.span.line, range_call.span.col)
            fexpr = range_call.args[0].value
            range_call = range_call.receiver
        if (isinstance(range_call, ProcCall) and range_call.method == "filter"):
            raise ParseError("at most one filter clause is allowed",
                             range_call.span.line, range_call.span.col)
        return ForallStmt(span=_tok_span(kw).merge(body.span),
                          iterator=it.text, range_call=range_call,
                          filter=fexpr, body=body,
                          is_parallel=(kw.text == "forall"))

    def parse_fixedpoint(self) -> FixedPointStmt:
        kw = self.expect("fixedPoint")
        self.expect("until")
        self.expect("(")
        flag = self.expect_ident()
        self.expect(":")
        conv = self.parse_expr()
        self.expect(")")
        body = self.parse_block()
        return FixedPointStmt(span=_tok_span(kw).merge(body.span),
                              flag=flag.text, convergence=conv, body=body)

    def parse_bfs(self) -> IterateInBfsStmt:
        kw = self.expect("iterateInBFS")
        self.expect("(")
        it = self.expect_ident()
        self.expect("in")
        range_call = self.parse_expr()
        self.expect("from")
        root = self.parse_expr()
        self.expect(")")
        body = self.parse_block()
        reverse_body = None
        if self.accept("iterateInReverse"):
            reverse_body = self.parse_block()
        end_span = reverse_body.span if reverse_body else body.span
        return IterateInBfsStmt(span=_tok_span(kw).merge(end_span),
                                iterator=it.text, range_call=range_call,
                                root=root, body=body,
                                reverse_body=reverse_body)

    def parse_if(self) -> IfStmt:
        kw = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then_branch = self._branch_block()
        else_branch = None
        if self.accept("else"):
            else_branch = self._branch_block()
        end_span = (else_branch or then_branch).span
        return IfStmt(span=_tok_span(kw).merge(end_span), cond=cond,
                      then_branch=then_branch, else_branch=else_branch)

    def _branch_block(self) -> Block:
        """Branches normalize to blocks so printing round-trips."""
        stmt = self.parse_statement()
        if isinstance(stmt, Block):
            return stmt
        return Block(span=stmt.span, stmts=[stmt])

    def parse_return(self) -> ReturnStmt:
        kw = self.expect("return")
        expr = None
        if not self.check(";"):
            expr = self.parse_expr()
        semi = self.expect(";")
        return ReturnStmt(span=_tok_span(kw).merge(_tok_span(semi)), expr=expr)

    def parse_minmax(self) -> MinMaxAssign:
        start = self.expect("<")
        targets = [self.parse_lvalue()]
        while self.accept(","):
            targets.append(self.parse_lvalue())
        self.expect(">")
        self.expect("=")
        self.expect("<")
        op_tok = self.peek()
        if op_tok is None or op_tok.text not in ("Min", "Max"):
            raise self.error(("'Min'", "'Max'"))
        self.take()
        self.expect("(")
        first = self.parse_expr()
        self.expect(",")
        candidate = self.parse_expr()
        self.expect(")")
        companions: list[Expr] = []
        while self.accept(","):
            companions.append(self.parse_expr(no_angle=True))
        self.expect(">")
        semi = self.expect(";")
        return MinMaxAssign(span=_tok_span(start).merge(_tok_span(semi)),
                            targets=targets, op=op_tok.text, first=first,
                            candidate=candidate, companions=companions)

    def parse_lvalue(self) -> Expr:
        expr = self.parse_postfix(no_angle=True)
        if not isinstance(expr, (Identifier, MemberAccess)):
            raise ParseError("expected an assignable location",
                             expr.span.line, expr.span.col)
        return expr

    def parse_assign_or_expr(self) -> Stmt:
        expr = self.parse_expr()
        t = self.peek()
        if t is not None and t.text == "=":
            self.take()
            if not isinstance(expr, (Identifier, MemberAccess)):
                raise ParseError("expected an assignable location",
                                 expr.span.line, expr.span.col)
            rhs = self.parse_expr()
            semi = self.expect(";")
            return AssignStmt(span=expr.span.merge(_tok_span(semi)),
                              lvalue=expr, expr=rhs)
        if t is not None and t.text in _REDUCTION_OPS:
            self.take()
            if not isinstance(expr, (Identifier, MemberAccess)):
                raise ParseError("expected an assignable location",
                                 expr.span.line, expr.span.col)
            rhs = self.parse_expr()
            semi = self.expect(";")
            return ReductionAssign(span=expr.span.merge(_tok_span(semi)),
                                   lvalue=expr, op=t.text, expr=rhs)
        if t is not None and t.text == "++":
            self.take()
            if not isinstance(expr, (Identifier, MemberAccess)):
                raise ParseError("expected an assignable location",
                                 expr.span.line, expr.span.col)
            semi = self.expect(";")
            return ReductionAssign(span=expr.span.merge(_tok_span(semi)),
                                   lvalue=expr, op="++", expr=None)
        semi = self.expect(";")
        return ExprStmt(span=expr.span.merge(_tok_span(semi)), expr=expr)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self, min_prec: int = 1, no_angle: bool = False) -> Expr:
        left = self.parse_unary(no_angle)
        while True:
            t = self.peek()
            if t is None or t.kind != TokKind.OP:
                break
            op = t.text
            if op not in _BINARY_PREC:
                break
            if no_angle and op in ("<", ">"):
                break
            prec = _BINARY_PREC[op]
            if prec < min_prec:
                break
            self.take()
            right = self.parse_expr(prec + 1, no_angle)
            left = BinaryExpr(span=left.span.merge(right.span), op=op,
                              left=left, right=right)
        return left

    def parse_unary(self, no_angle: bool = False) -> Expr:
        t = self.peek()
        if t is not None and t.text in ("!", "-") and t.kind == TokKind.OP:
            self.take()
            operand = self.parse_unary(no_angle)
            return UnaryExpr(span=_tok_span(t).merge(operand.span),
                             op=t.text, operand=operand)
        return self.parse_postfix(no_angle)

    def parse_postfix(self, no_angle: bool = False) -> Expr:
        expr = self.parse_primary()
        while self.check("."):
            self.take()
            name = self.peek()
            if name is None or name.kind not in (TokKind.IDENT, TokKind.KEYWORD):
                raise self.error(("a member name",))
            self.take()
            if self.check("("):
                args, close = self.parse_call_args()
                expr = ProcCall(span=expr.span.merge(_tok_span(close)),
                                receiver=expr, method=name.text, args=args)
            else:
                expr = MemberAccess(span=expr.span.merge(_tok_span(name)),
                                    obj=expr, prop=name.text)
        return expr

    def parse_call_args(self) -> tuple[list[CallArg], Token]:
        self.expect("(")
        args: list[CallArg] = []
        if not self.check(")"):
            args.append(self.parse_call_arg())
            while self.accept(","):
                args.append(self.parse_call_arg())
        close = self.expect(")")
        return args, close

    def parse_call_arg(self) -> CallArg:
        t = self.peek()
        nxt = self.peek(1)
        if (t is not None and t.kind == TokKind.IDENT
                and nxt is not None and nxt.text == "="):
            name = self.take()
            self.take()  # '='
            value = self.parse_expr()
            return CallArg(span=_tok_span(name).merge(value.span),
                           name=name.text, value=value)
        value = self.parse_expr()
        return CallArg(span=value.span, name=None, value=value)

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t is None:
            raise self.error(("an expression",))
        if t.text == "(":
            self.take()
            inner = self.parse_expr()  # parens reset angle mode
            close = self.expect(")")
            inner.span = _tok_span(t).merge(_tok_span(close))
            return inner
        if t.kind == TokKind.INT:
            self.take()
            return Literal(span=_tok_span(t), kind="int", value=int(t.text),
                           text=t.text)
        if t.kind == TokKind.FLOAT:
            self.take()
            return Literal(span=_tok_span(t), kind="float",
                           value=float(t.text), text=t.text)
        if t.text in ("True", "False"):
            self.take()
            return Literal(span=_tok_span(t), kind="bool",
                           value=(t.text == "True"), text=t.text)
        if t.text == "INT_MAX":
            self.take()
            return Literal(span=_tok_span(t), kind="int", value=INT_MAX,
                           text="INT_MAX")
        if t.kind == TokKind.IDENT:
            self.take()
            return Identifier(span=_tok_span(t), name=t.text)
        raise self.error(("an expression",))


def parse(tokens: list[Token]) -> Program:
    parser = _Parser(tokens)
    return parser.parse_program()


def parse_source(source: str) -> Program:
    return parse(tokenize(source))
