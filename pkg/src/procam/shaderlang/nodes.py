"""AST for the shader subset.  The checker annotates expression nodes with
`.ty` (their Type) and call nodes with resolution info."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

Pos = tuple[int, int]  # line, column (1-based)


# ---- expressions ----


@dataclass
class Expr:
    pos: Pos


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class FloatLit(Expr):
    value: float


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class Ident(Expr):
    name: str


@dataclass
class Unary(Expr):
    op: str  # '-', '+', '!'
    operand: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]
    # set by the checker: "constructor" | "builtin" | "user"
    target: str = ""
    plan: Any = None  # builtin param types, or the user FuncDef


@dataclass
class Member(Expr):
    base: Expr
    fields: str  # swizzle text, e.g. "xyz"


@dataclass
class IndexExpr(Expr):
    base: Expr
    index: Expr


@dataclass
class Coerce(Expr):
    """Implicit conversion inserted by the checker (int -> float)."""

    operand: Expr


# ---- statements ----


@dataclass
class Stmt:
    pos: Pos


@dataclass
class Declarator:
    pos: Pos
    name: str
    init: Optional[Expr]


@dataclass
class DeclStmt(Stmt):
    type_name: str
    declarators: list[Declarator]


@dataclass
class AssignStmt(Stmt):
    target: Expr
    op: str  # '=', '+=', '-=', '*=', '/='
    value: Expr


@dataclass
class IncDecStmt(Stmt):
    target: Expr
    op: str  # '++' or '--'


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class IfStmt(Stmt):
    cond: Expr
    then_body: "Block"
    else_body: Optional["Block"]


@dataclass
class ForStmt(Stmt):
    init: DeclStmt
    cond: Expr
    step: Stmt
    body: "Block"


@dataclass
class ReturnStmt(Stmt):
    value: Optional[Expr]


@dataclass
class Block(Stmt):
    stmts: list[Stmt]


# ---- top level ----


@dataclass
class Param:
    pos: Pos
    qualifier: str  # 'in', 'out', 'inout' ('' defaults to in)
    type_name: str
    name: str


@dataclass
class FuncDef:
    pos: Pos
    return_type_name: str
    name: str
    params: list[Param]
    body: Block


@dataclass
class GlobalConst:
    pos: Pos
    type_name: str
    name: str
    init: Expr


@dataclass
class Program:
    consts: list[GlobalConst]
    functions: list[FuncDef]


@dataclass
class ShaderProgram:
    """A compiled shader: checked AST plus the resolved entry point."""

    ast: Program
    main: FuncDef
    source: str
