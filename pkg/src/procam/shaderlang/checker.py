"""Type checker for the shader subset.

Annotates every expression with its type (`.ty`), inserts implicit
int-to-float conversions as Coerce nodes, validates lvalues and swizzles,
enforces the statically-bounded for-loop shape, resolves calls, checks the
mainImage entry signature, and rejects recursion.  The public entry point
is `compile_shader`, which never raises anything but ShaderCompileError for
malformed input.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, ShaderCompileError, SourceError
from .lexer import KEYWORDS, RESERVED
from .builtins import BUILTIN_NAMES, resolve as resolve_builtin
from .parser import parse
from . import nodes as N
from . import typesys as T

UNIFORM_TYPES: dict[str, T.Type] = {
    "iResolution": T.VEC3,
    "iTime": T.FLOAT,
    "iTimeDelta": T.FLOAT,
    "iFrame": T.INT,
    "iMouse": T.VEC4,
    "iChannel0": T.SAMPLER2D,
    "iChannel1": T.SAMPLER2D,
    "iChannel2": T.SAMPLER2D,
    "iChannel3": T.SAMPLER2D,
}

_SWIZZLE_SETS = ("xyzw", "rgba")


def _err(pos: N.Pos, message: str) -> SourceError:
    return SourceError(pos[0], pos[1], message)


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.parent = parent
        self.vars: dict[str, tuple[T.Type, bool]] = {}  # name -> (type, writable)

    def declare(self, name: str, ty: T.Type, writable: bool, pos: N.Pos) -> None:
        if name in self.vars:
            raise _err(pos, f"redeclaration of {name!r}")
        self.vars[name] = (ty, writable)

    def lookup(self, name: str) -> tuple[T.Type, bool] | None:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return scope.vars[name]
            scope = scope.parent
        return None


class _Checker:
    def __init__(self, program: N.Program):
        self.program = program
        self.globals = _Scope()
        self.functions: dict[str, N.FuncDef] = {}
        self.const_names: set[str] = set()
        self.current_return: T.Type = T.VOID

    # ---- entry ----

    def run(self) -> N.FuncDef:
        for name, ty in UNIFORM_TYPES.items():
            self.globals.declare(name, ty, False, (0, 0))

        for const in self.program.consts:
            ty = self._named_type(const.type_name, const.pos)
            if ty in (T.VOID, T.SAMPLER2D):
                raise _err(const.pos, f"constants cannot have type {ty}")
            self._check_const_expr(const.init)
            init_ty = self.check_expr(const.init)
            const.init = self._coerce(const.init, init_ty, ty, const.pos)
            self.globals.declare(const.name, ty, False, const.pos)
            self.const_names.add(const.name)

        main = None
        for func in self.program.functions:
            if func.name in self.functions:
                raise _err(func.pos, f"redefinition of function {func.name!r}")
            if func.name in BUILTIN_NAMES:
                raise _err(func.pos, f"{func.name!r} is a built-in function")
            if func.name in KEYWORDS or func.name in RESERVED:
                raise _err(func.pos, f"{func.name!r} cannot be used as a function name")
            self.functions[func.name] = func
            if func.name == "mainImage":
                main = func

        if main is None:
            raise SourceError(1, 1, "missing entry point: void mainImage(out vec4, in vec2)")
        self._check_main_signature(main)
        self._check_recursion()

        for func in self.program.functions:
            self._check_function(func)
        return main

    # ---- declarations ----

    def _named_type(self, name: str, pos: N.Pos) -> T.Type:
        ty = T.by_name(name)
        if ty is None:
            raise _err(pos, f"unknown type {name!r}")
        return ty

    def _check_main_signature(self, main: N.FuncDef) -> None:
        ok = (
            main.return_type_name == "void"
            and len(main.params) == 2
            and main.params[0].qualifier == "out"
            and main.params[0].type_name == "vec4"
            and main.params[1].qualifier in ("", "in")
            and main.params[1].type_name == "vec2"
        )
        if not ok:
            raise _err(main.pos, "mainImage must be declared void mainImage(out vec4, in vec2)")

    def _check_recursion(self) -> None:
        calls: dict[str, set[str]] = {name: set() for name in self.functions}

        def scan(node, acc: set[str]):
            if isinstance(node, N.Call) and node.name in self.functions:
                acc.add(node.name)
            for value in vars(node).values():
                if isinstance(value, (N.Expr, N.Stmt, N.Declarator)):
                    scan(value, acc)
                elif isinstance(value, list):
                    for item in value:
                        if isinstance(item, (N.Expr, N.Stmt, N.Declarator)):
                            scan(item, acc)

        for name, func in self.functions.items():
            scan(func.body, calls[name])

        state: dict[str, int] = {}  # 0 visiting, 1 done

        def visit(name: str, func: N.FuncDef):
            if state.get(name) == 1:
                return
            if state.get(name) == 0:
                raise _err(func.pos, f"recursion involving {name!r} is not allowed")
            state[name] = 0
            for callee in calls[name]:
                visit(callee, self.functions[callee])
            state[name] = 1

        for name, func in self.functions.items():
            visit(name, func)

    def _check_function(self, func: N.FuncDef) -> None:
        ret = self._named_type(func.return_type_name, func.pos)
        scope = _Scope(self.globals)
        seen = set()
        for param in func.params:
            ty = self._named_type(param.type_name, param.pos)
            if ty is T.VOID:
                raise _err(param.pos, "void is not a parameter type")
            if param.qualifier in ("out", "inout") and ty is T.SAMPLER2D:
                raise _err(param.pos, "samplers cannot be out parameters")
            if param.name in seen:
                raise _err(param.pos, f"duplicate parameter {param.name!r}")
            seen.add(param.name)
            scope.declare(param.name, ty, True, param.pos)
        self.current_return = ret
        self._check_block(func.body, scope)

    # ---- statements ----

    def _check_block(self, block: N.Block, scope: _Scope) -> None:
        inner = _Scope(scope)
        for stmt in block.stmts:
            self._check_stmt(stmt, inner)

    def _check_stmt(self, stmt: N.Stmt, scope: _Scope) -> None:
        if isinstance(stmt, N.Block):
            self._check_block(stmt, scope)
        elif isinstance(stmt, N.DeclStmt):
            ty = self._named_type(stmt.type_name, stmt.pos)
            if ty is T.VOID:
                raise _err(stmt.pos, "variables cannot be void")
            if ty is T.SAMPLER2D:
                raise _err(stmt.pos, "samplers can only be the predeclared channels")
            for decl in stmt.declarators:
                if decl.init is not None:
                    init_ty = self.check_expr(decl.init, scope)
                    decl.init = self._coerce(decl.init, init_ty, ty, decl.pos)
                scope.declare(decl.name, ty, True, decl.pos)
        elif isinstance(stmt, N.AssignStmt):
            self._check_assign(stmt, scope)
        elif isinstance(stmt, N.IncDecStmt):
            ty = self._check_lvalue(stmt.target, scope)
            if ty not in (T.INT, T.FLOAT):
                raise _err(stmt.pos, f"{stmt.op} needs an int or float variable, not {ty}")
        elif isinstance(stmt, N.ExprStmt):
            self.check_expr(stmt.expr, scope)
        elif isinstance(stmt, N.IfStmt):
            cond_ty = self.check_expr(stmt.cond, scope)
            if cond_ty is not T.BOOL:
                raise _err(stmt.cond.pos, f"if condition must be bool, not {cond_ty}")
            self._check_block(stmt.then_body, scope)
            if stmt.else_body is not None:
                self._check_block(stmt.else_body, scope)
        elif isinstance(stmt, N.ForStmt):
            self._check_for(stmt, scope)
        elif isinstance(stmt, N.ReturnStmt):
            if stmt.value is None:
                if self.current_return is not T.VOID:
                    raise _err(stmt.pos, f"return value of type {self.current_return} expected")
            else:
                if self.current_return is T.VOID:
                    raise _err(stmt.pos, "void function cannot return a value")
                ty = self.check_expr(stmt.value, scope)
                stmt.value = self._coerce(stmt.value, ty, self.current_return, stmt.pos)
        else:  # pragma: no cover
            raise _err(stmt.pos, "unsupported statement")

    @staticmethod
    def _is_literal(expr: N.Expr) -> bool:
        if isinstance(expr, (N.IntLit, N.FloatLit)):
            return True
        return isinstance(expr, N.Unary) and expr.op in "+-" and isinstance(
            expr.operand, (N.IntLit, N.FloatLit)
        )

    def _check_for(self, stmt: N.ForStmt, scope: _Scope) -> None:
        init = stmt.init
        if len(init.declarators) != 1 or init.declarators[0].init is None:
            raise _err(init.pos, "for-loop must declare exactly one loop variable")
        if not self._is_literal(init.declarators[0].init):
            raise _err(init.pos, "for-loop bounds must be literals")
        var = init.declarators[0].name

        cond = stmt.cond
        if not (isinstance(cond, N.Binary) and cond.op in ("<", "<=", ">", ">=", "!=")):
            raise _err(cond.pos, "for-loop condition must compare the loop variable to a literal")
        sides = (cond.left, cond.right)
        if isinstance(cond.left, N.Ident) and cond.left.name == var:
            bound = cond.right
        elif isinstance(cond.right, N.Ident) and cond.right.name == var:
            bound = cond.left
        else:
            raise _err(cond.pos, "for-loop condition must test the loop variable")
        if not self._is_literal(bound):
            raise _err(bound.pos, "for-loop bounds must be literals")

        step = stmt.step
        if isinstance(step, N.IncDecStmt):
            if not (isinstance(step.target, N.Ident) and step.target.name == var):
                raise _err(step.pos, "for-loop step must update the loop variable")
        elif isinstance(step, N.AssignStmt):
            if not (
                isinstance(step.target, N.Ident)
                and step.target.name == var
                and step.op in ("+=", "-=")
                and self._is_literal(step.value)
            ):
                raise _err(step.pos, "for-loop step must be ++, --, += literal, or -= literal")
        else:
            raise _err(step.pos, "for-loop step must update the loop variable")

        inner = _Scope(scope)
        self._check_stmt(init, inner)
        cond_ty = self.check_expr(stmt.cond, inner)
        if cond_ty is not T.BOOL:
            raise _err(stmt.cond.pos, "for-loop condition must be bool")
        self._check_stmt(step, inner)
        self._check_block(stmt.body, inner)

    def _check_assign(self, stmt: N.AssignStmt, scope: _Scope) -> None:
        target_ty = self._check_lvalue(stmt.target, scope)
        value_ty = self.check_expr(stmt.value, scope)
        if stmt.op == "=":
            stmt.value = self._coerce(stmt.value, value_ty, target_ty, stmt.pos)
            return
        # compound: typed as target = target op value
        op = stmt.op[0]
        result = self._binary_type(op, target_ty, value_ty, stmt.pos, coerce_only=True)
        if result is not target_ty:
            raise _err(
                stmt.pos, f"{stmt.op} would change the variable's type ({target_ty} vs {result})"
            )

    # ---- lvalues ----

    def _check_lvalue(self, expr: N.Expr, scope: _Scope) -> T.Type:
        ty = self.check_expr(expr, scope)
        self._require_lvalue(expr, scope)
        return ty

    def _require_lvalue(self, expr: N.Expr, scope: _Scope) -> None:
        if isinstance(expr, N.Ident):
            entry = scope.lookup(expr.name)
            assert entry is not None
            if not entry[1]:
                raise _err(expr.pos, f"{expr.name!r} is read-only")
            return
        if isinstance(expr, N.Member):
            if len(set(expr.fields)) != len(expr.fields):
                raise _err(expr.pos, "swizzle assignment cannot repeat components")
            if not isinstance(expr.base, N.Ident):
                raise _err(expr.pos, "swizzle assignment must target a variable")
            self._require_lvalue(expr.base, scope)
            return
        if isinstance(expr, N.IndexExpr):
            if not isinstance(expr.base, (N.Ident, N.IndexExpr)):
                raise _err(expr.pos, "indexed assignment must target a variable")
            self._require_lvalue(expr.base, scope)
            return
        raise _err(expr.pos, "expression is not assignable")

    # ---- expressions ----

    def check_expr(self, expr: N.Expr, scope: _Scope | None = None) -> T.Type:
        scope = scope or self.globals
        ty = self._expr_type(expr, scope)
        expr.ty = ty
        return ty

    def _expr_type(self, expr: N.Expr, scope: _Scope) -> T.Type:
        if isinstance(expr, N.IntLit):
            return T.INT
        if isinstance(expr, N.FloatLit):
            return T.FLOAT
        if isinstance(expr, N.BoolLit):
            return T.BOOL
        if isinstance(expr, N.Ident):
            entry = scope.lookup(expr.name)
            if entry is None:
                raise _err(expr.pos, f"undeclared identifier {expr.name!r}")
            return entry[0]
        if isinstance(expr, N.Coerce):
            self.check_expr(expr.operand, scope)
            return T.FLOAT
        if isinstance(expr, N.Unary):
            ty = self.check_expr(expr.operand, scope)
            if expr.op == "!":
                if ty is not T.BOOL:
                    raise _err(expr.pos, f"! needs a bool, not {ty}")
                return T.BOOL
            if ty is T.BOOL or ty is T.SAMPLER2D or ty is T.VOID:
                raise _err(expr.pos, f"unary {expr.op} needs a numeric operand, not {ty}")
            return ty
        if isinstance(expr, N.Binary):
            lt = self.check_expr(expr.left, scope)
            rt = self.check_expr(expr.right, scope)
            return self._binary_node_type(expr, lt, rt)
        if isinstance(expr, N.Ternary):
            cond_ty = self.check_expr(expr.cond, scope)
            if cond_ty is not T.BOOL:
                raise _err(expr.cond.pos, f"?: condition must be bool, not {cond_ty}")
            then_ty = self.check_expr(expr.then, scope)
            other_ty = self.check_expr(expr.other, scope)
            if then_ty is other_ty:
                return then_ty
            if then_ty is T.FLOAT and other_ty is T.INT:
                expr.other = self._coerce(expr.other, other_ty, T.FLOAT, expr.pos)
                return T.FLOAT
            if then_ty is T.INT and other_ty is T.FLOAT:
                expr.then = self._coerce(expr.then, then_ty, T.FLOAT, expr.pos)
                return T.FLOAT
            raise _err(expr.pos, f"?: branches differ: {then_ty} vs {other_ty}")
        if isinstance(expr, N.Member):
            return self._swizzle_type(expr, scope)
        if isinstance(expr, N.IndexExpr):
            return self._index_type(expr, scope)
        if isinstance(expr, N.Call):
            return self._call_type(expr, scope)
        raise _err(expr.pos, "unsupported expression")  # pragma: no cover

    def _coerce(self, expr: N.Expr, have: T.Type, want: T.Type, pos: N.Pos) -> N.Expr:
        if have is want:
            return expr
        if have is T.INT and want is T.FLOAT:
            node = N.Coerce(pos=expr.pos, operand=expr)
            node.ty = T.FLOAT
            return node
        raise _err(pos, f"cannot convert {have} to {want}")

    def _binary_node_type(self, expr: N.Binary, lt: T.Type, rt: T.Type) -> T.Type:
        op = expr.op
        if op in ("&&", "||"):
            if lt is not T.BOOL or rt is not T.BOOL:
                raise _err(expr.pos, f"{op} needs bool operands")
            return T.BOOL
        if op in ("==", "!="):
            if lt is rt and lt not in (T.VOID, T.SAMPLER2D):
                return T.BOOL
            if {lt, rt} == {T.INT, T.FLOAT}:
                self._coerce_binary_operands(expr, lt, rt)
                return T.BOOL
            raise _err(expr.pos, f"cannot compare {lt} with {rt}")
        if op in ("<", ">", "<=", ">="):
            if lt in (T.INT, T.FLOAT) and rt in (T.INT, T.FLOAT):
                if lt is not rt:
                    self._coerce_binary_operands(expr, lt, rt)
                return T.BOOL
            raise _err(expr.pos, f"{op} compares scalars, not {lt} and {rt}")
        if op == "%":
            if lt is T.INT and rt is T.INT:
                return T.INT
            raise _err(expr.pos, "% is defined for int operands only (use mod())")
        result = self._binary_type(op, lt, rt, expr.pos)
        return result

    def _coerce_binary_operands(self, expr: N.Binary, lt: T.Type, rt: T.Type) -> None:
        if lt is T.INT and rt is T.FLOAT:
            expr.left = self._coerce(expr.left, lt, T.FLOAT, expr.pos)
        elif rt is T.INT and lt is T.FLOAT:
            expr.right = self._coerce(expr.right, rt, T.FLOAT, expr.pos)

    def _binary_type(
        self, op: str, lt: T.Type, rt: T.Type, pos: N.Pos, coerce_only: bool = False
    ) -> T.Type:
        """Arithmetic typing for + - * /; mutates nothing when coerce_only."""
        if op not in "+-*/":
            raise _err(pos, f"operator {op} is not supported here")
        if lt is T.INT and rt is T.INT:
            return T.INT
        # int mixes promote to float
        eff_l = T.FLOAT if lt is T.INT else lt
        eff_r = T.FLOAT if rt is T.INT else rt
        for ty in (eff_l, eff_r):
            if ty in (T.BOOL, T.VOID, T.SAMPLER2D):
                raise _err(pos, f"operator {op} cannot take {ty}")
        if op == "*":
            if T.is_mat(eff_l) and T.is_mat(eff_r):
                if eff_l is not eff_r:
                    raise _err(pos, f"cannot multiply {eff_l} by {eff_r}")
                return eff_l
            if T.is_mat(eff_l) and T.is_vec(eff_r):
                if T.mat_size(eff_l) != T.vec_size(eff_r):
                    raise _err(pos, f"cannot multiply {eff_l} by {eff_r}")
                return eff_r
            if T.is_vec(eff_l) and T.is_mat(eff_r):
                if T.vec_size(eff_l) != T.mat_size(eff_r):
                    raise _err(pos, f"cannot multiply {eff_l} by {eff_r}")
                return eff_l
        if eff_l is eff_r:
            return eff_l
        if eff_l is T.FLOAT:
            return eff_r
        if eff_r is T.FLOAT:
            return eff_l
        raise _err(pos, f"operator {op} cannot combine {lt} and {rt}")

    def _swizzle_type(self, expr: N.Member, scope: _Scope) -> T.Type:
        base_ty = self.check_expr(expr.base, scope)
        if not T.is_vec(base_ty):
            raise _err(expr.pos, f"swizzle needs a vector, not {base_ty}")
        fields = expr.fields
        if not 1 <= len(fields) <= 4:
            raise _err(expr.pos, f"swizzle {fields!r} has too many components")
        charset = next((s for s in _SWIZZLE_SETS if fields[0] in s), None)
        if charset is None or any(c not in charset for c in fields):
            raise _err(expr.pos, f"invalid swizzle {fields!r}")
        size = T.vec_size(base_ty)
        indices = [charset.index(c) for c in fields]
        if max(indices) >= size:
            raise _err(expr.pos, f"swizzle {fields!r} exceeds {base_ty}")
        expr.indices = indices
        return T.FLOAT if len(fields) == 1 else T.vec_type(len(fields))

    def _index_type(self, expr: N.IndexExpr, scope: _Scope) -> T.Type:
        base_ty = self.check_expr(expr.base, scope)
        index_ty = self.check_expr(expr.index, scope)
        if index_ty is not T.INT:
            raise _err(expr.index.pos, f"index must be int, not {index_ty}")
        if T.is_vec(base_ty):
            limit = T.vec_size(base_ty)
            result = T.FLOAT
        elif T.is_mat(base_ty):
            limit = T.mat_size(base_ty)
            result = T.vec_type(T.mat_size(base_ty))
        else:
            raise _err(expr.pos, f"cannot index {base_ty}")
        if isinstance(expr.index, N.IntLit) and not 0 <= expr.index.value < limit:
            raise _err(expr.index.pos, f"index {expr.index.value} out of range for {base_ty}")
        return result

    def _call_type(self, expr: N.Call, scope: _Scope) -> T.Type:
        argtypes = [self.check_expr(a, scope) for a in expr.args]

        ctor = T.by_name(expr.name)
        if ctor is not None:
            expr.target = "constructor"
            return self._constructor_type(expr, ctor, argtypes)

        if expr.name in self.functions:
            return self._user_call_type(expr, argtypes, scope)

        try:
            resolved = resolve_builtin(expr.name, argtypes)
        except TypeError as e:
            raise _err(expr.pos, str(e))
        if resolved is not None:
            ret, params = resolved
            expr.target = "builtin"
            expr.plan = params
            return ret

        raise _err(expr.pos, f"unknown function {expr.name!r}")

    def _constructor_type(self, expr: N.Call, ctor: T.Type, argtypes: list[T.Type]) -> T.Type:
        if ctor in (T.VOID, T.SAMPLER2D):
            raise _err(expr.pos, f"cannot construct {ctor}")
        if not expr.args:
            raise _err(expr.pos, f"{ctor}() needs arguments")
        if T.is_scalar(ctor):
            if len(expr.args) != 1 or not T.is_scalar(argtypes[0]):
                raise _err(expr.pos, f"{ctor}() takes one scalar")
            return ctor
        if T.is_vec(ctor):
            want = T.vec_size(ctor)
            if len(expr.args) == 1 and T.is_scalar(argtypes[0]):
                return ctor  # splat
            if len(expr.args) == 1 and T.is_vec(argtypes[0]):
                if T.vec_size(argtypes[0]) < want:
                    raise _err(expr.pos, f"{ctor}() from a smaller vector")
                return ctor  # truncate
            total = 0
            for a_ty, arg in zip(argtypes, expr.args):
                if T.is_scalar(a_ty):
                    total += 1
                elif T.is_vec(a_ty):
                    total += T.vec_size(a_ty)
                else:
                    raise _err(arg.pos, f"{ctor}() cannot take {a_ty}")
            if total != want:
                raise _err(expr.pos, f"{ctor}() needs {want} components, got {total}")
            return ctor
        # matrix
        size = T.mat_size(ctor)
        if len(expr.args) == 1 and T.is_scalar(argtypes[0]):
            return ctor  # diagonal
        if len(expr.args) == 1 and T.is_mat(argtypes[0]):
            return ctor  # resize
        if len(expr.args) == size and all(
            T.is_vec(t) and T.vec_size(t) == size for t in argtypes
        ):
            return ctor  # columns
        if len(expr.args) == size * size and all(T.is_scalar(t) for t in argtypes):
            return ctor  # column-major scalars
        raise _err(
            expr.pos,
            f"{ctor}() takes a scalar, a matrix, {size} vec{size} columns, or {size * size} scalars",
        )

    def _user_call_type(self, expr: N.Call, argtypes: list[T.Type], scope: _Scope) -> T.Type:
        func = self.functions[expr.name]
        if len(expr.args) != len(func.params):
            raise _err(
                expr.pos,
                f"{expr.name}() takes {len(func.params)} arguments, got {len(expr.args)}",
            )
        for i, (param, a_ty) in enumerate(zip(func.params, argtypes)):
            want = self._named_type(param.type_name, param.pos)
            if param.qualifier in ("out", "inout"):
                if a_ty is not want:
                    raise _err(
                        expr.args[i].pos,
                        f"argument for {param.qualifier} parameter {param.name!r} must be {want}",
                    )
                self._require_lvalue(expr.args[i], scope)
            else:
                expr.args[i] = self._coerce(expr.args[i], a_ty, want, expr.args[i].pos)
        expr.target = "user"
        expr.plan = func
        return self._named_type(func.return_type_name, expr.pos)

    def _check_const_expr(self, expr: N.Expr) -> None:
        """Constant initializers may reference literals, other consts, and
        pure builtins; uniforms and user functions are rejected."""
        if isinstance(expr, N.Ident):
            if expr.name not in self.const_names:
                raise _err(expr.pos, f"{expr.name!r} is not usable in a constant expression")
            return
        if isinstance(expr, N.Call):
            if expr.name == "texture" or expr.name in self.functions:
                raise _err(expr.pos, f"{expr.name!r} is not usable in a constant expression")
        for value in vars(expr).values():
            if isinstance(value, N.Expr):
                self._check_const_expr(value)
            elif isinstance(value, list):
                for item in value:
                    if isinstance(item, N.Expr):
                        self._check_const_expr(item)


def compile_shader(source: str) -> N.ShaderProgram:
    """Compile shader source; raises ShaderCompileError with diagnostics."""
    if not isinstance(source, str):
        raise ShaderCompileError([Diagnostic("error", 1, 1, "source must be text")])
    try:
        program = parse(source)
        main = _Checker(program).run()
    except SourceError as e:
        raise ShaderCompileError([e.diagnostic()]) from None
    except RecursionError:
        raise ShaderCompileError(
            [Diagnostic("error", 1, 1, "expression nesting too deep")]
        ) from None
    return N.ShaderProgram(ast=program, main=main, source=source)
