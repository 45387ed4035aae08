"""Recursive-descent parser for the shader subset."""

from __future__ import annotations

from .diagnostics import SourceError
from .lexer import RESERVED, Token, tokenize
from .typesys import TYPE_KEYWORDS
from . import nodes as N

_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=")


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 0) -> Token:
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.cur
        return tok.kind == kind and (text is None or tok.text == text)

    def at_punct(self, text: str) -> bool:
        return self.at("punct", text)

    def accept_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.advance()
            return True
        return False

    def expect_punct(self, text: str) -> Token:
        if not self.at_punct(text):
            tok = self.cur
            raise SourceError(tok.line, tok.column, f"expected {text!r}, found {tok.text!r}")
        return self.advance()

    def error(self, message: str):
        tok = self.cur
        raise SourceError(tok.line, tok.column, message)


def _pos(tok: Token) -> N.Pos:
    return (tok.line, tok.column)


def parse(source: str) -> N.Program:
    ts = _Stream(tokenize(source))
    consts: list[N.GlobalConst] = []
    functions: list[N.FuncDef] = []
    while not ts.at("eof"):
        tok = ts.cur
        if tok.kind == "ident" and tok.text in RESERVED:
            raise SourceError(tok.line, tok.column, f"{tok.text!r} is not supported in this subset")
        if ts.at("keyword", "const"):
            consts.append(_parse_global_const(ts))
        elif tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
            functions.append(_parse_function(ts))
        else:
            ts.error(
                f"expected a function or const declaration, found {tok.text!r}"
                if tok.text
                else "expected a function or const declaration"
            )
    return N.Program(consts=consts, functions=functions)


def _parse_type_name(ts: _Stream) -> tuple[str, Token]:
    tok = ts.cur
    if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
        ts.advance()
        return tok.text, tok
    if tok.kind == "ident" and tok.text in RESERVED:
        raise SourceError(tok.line, tok.column, f"type {tok.text!r} is not supported in this subset")
    raise SourceError(tok.line, tok.column, f"expected a type name, found {tok.text!r}")


def _expect_ident(ts: _Stream, what: str) -> Token:
    tok = ts.cur
    if tok.kind != "ident":
        raise SourceError(tok.line, tok.column, f"expected {what}, found {tok.text!r}")
    return ts.advance()


def _parse_global_const(ts: _Stream) -> N.GlobalConst:
    start = ts.advance()  # const
    type_name, _ = _parse_type_name(ts)
    name = _expect_ident(ts, "constant name")
    ts.expect_punct("=")
    init = _parse_expr(ts)
    ts.expect_punct(";")
    return N.GlobalConst(pos=_pos(start), type_name=type_name, name=name.text, init=init)


def _parse_function(ts: _Stream) -> N.FuncDef:
    ret_tok = ts.cur
    ret_type, _ = _parse_type_name(ts)
    name = _expect_ident(ts, "function name")
    if ts.at_punct("=") or ts.at_punct(";") or ts.at_punct(","):
        raise SourceError(
            name.line, name.column, "global variables must be declared const"
        )
    ts.expect_punct("(")
    params: list[N.Param] = []
    if not ts.at_punct(")"):
        while True:
            qualifier = ""
            if ts.cur.kind == "keyword" and ts.cur.text in ("in", "out", "inout"):
                qualifier = ts.advance().text
            ptype, ptok = _parse_type_name(ts)
            if ptype == "void":
                if qualifier or not ts.at_punct(")"):
                    raise SourceError(ptok.line, ptok.column, "void is not a parameter type")
                break  # f(void)
            pname = _expect_ident(ts, "parameter name")
            params.append(
                N.Param(pos=_pos(ptok), qualifier=qualifier, type_name=ptype, name=pname.text)
            )
            if not ts.accept_punct(","):
                break
    ts.expect_punct(")")
    body = _parse_block(ts)
    return N.FuncDef(
        pos=_pos(ret_tok), return_type_name=ret_type, name=name.text, params=params, body=body
    )


def _parse_block(ts: _Stream) -> N.Block:
    start = ts.expect_punct("{")
    stmts: list[N.Stmt] = []
    while not ts.at_punct("}"):
        if ts.at("eof"):
            ts.error("unterminated block (missing '}')")
        stmts.append(_parse_stmt(ts))
    ts.expect_punct("}")
    return N.Block(pos=_pos(start), stmts=stmts)


def _parse_stmt(ts: _Stream) -> N.Stmt:
    tok = ts.cur
    if tok.kind == "ident" and tok.text in RESERVED:
        raise SourceError(tok.line, tok.column, f"{tok.text!r} is not supported in this subset")
    if ts.at_punct("{"):
        return _parse_block(ts)
    if ts.at("keyword", "if"):
        return _parse_if(ts)
    if ts.at("keyword", "for"):
        return _parse_for(ts)
    if ts.at("keyword", "return"):
        ts.advance()
        value = None if ts.at_punct(";") else _parse_expr(ts)
        ts.expect_punct(";")
        return N.ReturnStmt(pos=_pos(tok), value=value)
    if ts.at("keyword", "const"):
        raise SourceError(tok.line, tok.column, "local const declarations are not supported")
    if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
        return _parse_decl(ts)
    return _parse_simple_stmt(ts)


def _parse_decl(ts: _Stream) -> N.DeclStmt:
    tok = ts.cur
    type_name, _ = _parse_type_name(ts)
    declarators: list[N.Declarator] = []
    while True:
        name = _expect_ident(ts, "variable name")
        init = None
        if ts.accept_punct("="):
            init = _parse_expr(ts)
        declarators.append(N.Declarator(pos=_pos(name), name=name.text, init=init))
        if not ts.accept_punct(","):
            break
    ts.expect_punct(";")
    return N.DeclStmt(pos=_pos(tok), type_name=type_name, declarators=declarators)


def _parse_if(ts: _Stream) -> N.IfStmt:
    start = ts.advance()  # if
    ts.expect_punct("(")
    cond = _parse_expr(ts)
    ts.expect_punct(")")
    then_body = _as_block(_parse_stmt(ts))
    else_body = None
    if ts.at("keyword", "else"):
        ts.advance()
        else_body = _as_block(_parse_stmt(ts))
    return N.IfStmt(pos=_pos(start), cond=cond, then_body=then_body, else_body=else_body)


def _as_block(stmt: N.Stmt) -> N.Block:
    if isinstance(stmt, N.Block):
        return stmt
    return N.Block(pos=stmt.pos, stmts=[stmt])


def _parse_for(ts: _Stream) -> N.ForStmt:
    start = ts.advance()  # for
    ts.expect_punct("(")
    init_tok = ts.cur
    if not (init_tok.kind == "keyword" and init_tok.text in ("int", "float")):
        raise SourceError(
            init_tok.line,
            init_tok.column,
            "for-loop initializer must declare an int or float loop variable",
        )
    init = _parse_decl(ts)  # consumes the ';'
    cond = _parse_expr(ts)
    ts.expect_punct(";")
    step = _parse_simple_stmt(ts, terminated=False)
    ts.expect_punct(")")
    body = _as_block(_parse_stmt(ts))
    return N.ForStmt(pos=_pos(start), init=init, cond=cond, step=step, body=body)


def _parse_simple_stmt(ts: _Stream, terminated: bool = True) -> N.Stmt:
    """Assignment, increment/decrement, or expression statement."""
    tok = ts.cur
    if ts.at_punct("++") or ts.at_punct("--"):
        op = ts.advance().text
        target = _parse_unary(ts)
        stmt: N.Stmt = N.IncDecStmt(pos=_pos(tok), target=target, op=op)
    else:
        expr = _parse_expr(ts)
        if ts.cur.kind == "punct" and ts.cur.text in _ASSIGN_OPS:
            op = ts.advance().text
            value = _parse_expr(ts)
            stmt = N.AssignStmt(pos=_pos(tok), target=expr, op=op, value=value)
        elif ts.at_punct("++") or ts.at_punct("--"):
            op = ts.advance().text
            stmt = N.IncDecStmt(pos=_pos(tok), target=expr, op=op)
        else:
            stmt = N.ExprStmt(pos=_pos(tok), expr=expr)
    if terminated:
        ts.expect_punct(";")
    return stmt


# ---- expressions (precedence climbing) ----


def _parse_expr(ts: _Stream) -> N.Expr:
    return _parse_ternary(ts)


def _parse_ternary(ts: _Stream) -> N.Expr:
    cond = _parse_binary(ts, 0)
    if ts.accept_punct("?"):
        then = _parse_expr(ts)
        ts.expect_punct(":")
        other = _parse_expr(ts)
        return N.Ternary(pos=cond.pos, cond=cond, then=then, other=other)
    return cond


_LEVELS = (
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", ">", "<=", ">="),
    ("+", "-"),
    ("*", "/", "%"),
)


def _parse_binary(ts: _Stream, level: int) -> N.Expr:
    if level >= len(_LEVELS):
        return _parse_unary(ts)
    left = _parse_binary(ts, level + 1)
    while ts.cur.kind == "punct" and ts.cur.text in _LEVELS[level]:
        op = ts.advance().text
        right = _parse_binary(ts, level + 1)
        left = N.Binary(pos=left.pos, op=op, left=left, right=right)
    return left


def _parse_unary(ts: _Stream) -> N.Expr:
    tok = ts.cur
    if ts.at_punct("-") or ts.at_punct("+") or ts.at_punct("!"):
        ts.advance()
        operand = _parse_unary(ts)
        return N.Unary(pos=_pos(tok), op=tok.text, operand=operand)
    if ts.at_punct("++") or ts.at_punct("--"):
        raise SourceError(tok.line, tok.column, "increment/decrement is a statement, not an expression")
    return _parse_postfix(ts)


def _parse_postfix(ts: _Stream) -> N.Expr:
    expr = _parse_primary(ts)
    while True:
        if ts.at_punct("."):
            ts.advance()
            field_tok = _expect_ident(ts, "swizzle field")
            expr = N.Member(pos=_pos(field_tok), base=expr, fields=field_tok.text)
        elif ts.at_punct("["):
            ts.advance()
            index = _parse_expr(ts)
            ts.expect_punct("]")
            expr = N.IndexExpr(pos=expr.pos, base=expr, index=index)
        else:
            return expr


def _parse_primary(ts: _Stream) -> N.Expr:
    tok = ts.cur
    if tok.kind == "int":
        ts.advance()
        return N.IntLit(pos=_pos(tok), value=int(tok.text, 0))
    if tok.kind == "float":
        ts.advance()
        return N.FloatLit(pos=_pos(tok), value=float(tok.text))
    if tok.kind == "keyword" and tok.text in ("true", "false"):
        ts.advance()
        return N.BoolLit(pos=_pos(tok), value=tok.text == "true")
    if ts.at_punct("("):
        ts.advance()
        expr = _parse_expr(ts)
        ts.expect_punct(")")
        return expr
    if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
        ts.advance()
        ts.expect_punct("(")
        args = _parse_args(ts)
        return N.Call(pos=_pos(tok), name=tok.text, args=args)
    if tok.kind == "ident":
        if tok.text in RESERVED:
            raise SourceError(tok.line, tok.column, f"{tok.text!r} is not supported in this subset")
        ts.advance()
        if ts.at_punct("("):
            ts.advance()
            args = _parse_args(ts)
            return N.Call(pos=_pos(tok), name=tok.text, args=args)
        return N.Ident(pos=_pos(tok), name=tok.text)
    raise SourceError(tok.line, tok.column, f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input")


def _parse_args(ts: _Stream) -> list[N.Expr]:
    args: list[N.Expr] = []
    if not ts.at_punct(")"):
        while True:
            args.append(_parse_expr(ts))
            if not ts.accept_punct(","):
                break
    ts.expect_punct(")")
    return args
