"""Vectorized evaluator for compiled shaders.

Every expression evaluates to an array over the pixels being rendered
(uniform values stay width-1 and broadcast lazily).  Divergent control flow
uses write masks: assignments inside a branch blend into the previous value
where the branch is inactive, mirroring per-pixel execution exactly.  All
arithmetic is float32/int32 to match GPU semantics; domain faults follow
IEEE (inf/NaN propagate) and the final quantization maps NaN to 0.

GLSL short-circuit rules are honored for side effects: &&, ||, and ?:
evaluate their right/branch operands under the refined mask, so out-param
writes in untaken lanes never land.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import Diagnostic, ShaderRuntimeError
from .builtins import IMPLEMENTATIONS
from . import nodes as N
from . import typesys as T

LOOP_GUARD = 10_000_000  # per-pixel loop iterations before aborting


@dataclass(frozen=True)
class Channel:
    """Texture channel: float32 rows stored bottom-up, bilinear filtered."""

    image: np.ndarray  # (H, W, 3) float32 in [0, 1], row 0 = v=0 (bottom)
    wrap: str = "repeat"  # or "clamp"

    @classmethod
    def from_rgb8(cls, img: np.ndarray, wrap: str = "repeat") -> "Channel":
        if img.ndim != 3 or img.shape[2] != 3:
            raise ValueError("channel image must be (H, W, 3)")
        if wrap not in ("repeat", "clamp"):
            raise ValueError("wrap must be 'repeat' or 'clamp'")
        data = np.flipud(img).astype(np.float32) / np.float32(255.0)
        return cls(image=np.ascontiguousarray(data), wrap=wrap)


@dataclass
class UniformBlock:
    resolution: tuple[float, float]  # (width, height); iResolution = (w, h, 1)
    time: float = 0.0
    time_delta: float = 1.0 / 60.0
    frame: int = 0
    mouse: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    channels: tuple = (None, None, None, None)

    def validate(self) -> None:
        if self.resolution[0] <= 0 or self.resolution[1] <= 0:
            raise ValueError("resolution must be positive")

    @classmethod
    def for_frame(
        cls,
        width: int,
        height: int,
        time: float = 0.0,
        channel0: np.ndarray | None = None,
        wrap0: str = "repeat",
    ) -> "UniformBlock":
        channels = [None, None, None, None]
        if channel0 is not None:
            channels[0] = Channel.from_rgb8(channel0, wrap=wrap0)
        return cls(
            resolution=(float(width), float(height)),
            time=float(time),
            time_delta=1.0 / 60.0,
            frame=int(math.floor(time * 60.0)),
            channels=tuple(channels),
        )


@dataclass
class Value:
    ty: T.Type
    data: np.ndarray  # (N,), (N, k), or (N, k, k); N is 1 or the pixel count


def _zeros(ty: T.Type) -> Value:
    if ty is T.BOOL:
        return Value(ty, np.zeros(1, dtype=bool))
    if ty is T.INT:
        return Value(ty, np.zeros(1, dtype=np.int32))
    if ty is T.FLOAT:
        return Value(ty, np.zeros(1, dtype=np.float32))
    if T.is_vec(ty):
        return Value(ty, np.zeros((1, T.vec_size(ty)), dtype=np.float32))
    if T.is_mat(ty):
        k = T.mat_size(ty)
        return Value(ty, np.zeros((1, k, k), dtype=np.float32))
    raise ValueError(f"cannot zero-initialize {ty}")


def _widen(data: np.ndarray, n: int) -> np.ndarray:
    if data.shape[0] == n:
        return data
    return np.broadcast_to(data, (n,) + data.shape[1:])


def _mask_reshape(mask: np.ndarray, ndim: int) -> np.ndarray:
    return mask.reshape(mask.shape + (1,) * (ndim - 1))


def _blend(old: np.ndarray, new: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    if mask is None:
        return new
    return np.where(_mask_reshape(mask, max(old.ndim, new.ndim)), new, old)


def _and_mask(mask: np.ndarray | None, cond: np.ndarray | None) -> np.ndarray | None:
    if cond is None:
        return mask
    if mask is None:
        return cond
    return mask & cond


def _as_lanes(data: np.ndarray, n: int) -> np.ndarray | None:
    """Bool data as a lane mask; None means true everywhere."""
    if data.shape[0] == 1:
        return None if bool(data[0]) else np.zeros(n, dtype=bool)
    return data


class _Flow:
    """Tracks which lanes have returned and the accumulated return value."""

    def __init__(self, npix: int):
        self.npix = npix
        self.returned: np.ndarray | None = None  # None = no lane returned
        self.all_returned = False
        self.ret: Value | None = None

    def active(self, mask: np.ndarray | None) -> np.ndarray | None | bool:
        """Mask of lanes still executing; False if none."""
        if self.all_returned:
            return False
        if self.returned is None:
            return mask
        live = ~self.returned if mask is None else (mask & ~self.returned)
        if not live.any():
            return False
        return live

    def mark_return(self, mask: np.ndarray | None, value: Value | None, ret_ty: T.Type):
        if value is not None:
            if self.ret is None:
                self.ret = _zeros(ret_ty)
            self.ret = Value(ret_ty, _blend(self.ret.data, value.data, mask))
        if mask is None:
            self.all_returned = True
            self.returned = np.ones(self.npix, dtype=bool)
        else:
            self.returned = mask if self.returned is None else (self.returned | mask)
            if self.returned.all():
                self.all_returned = True


class Evaluator:
    def __init__(self, program: N.ShaderProgram, uniforms: UniformBlock, npix: int):
        self.program = program
        self.uniforms = uniforms
        self.npix = npix
        self.iterations = 0
        self.globals: dict[str, Value] = {}
        w, h = uniforms.resolution
        f32 = np.float32
        self.globals["iResolution"] = Value(
            T.VEC3, np.array([[w, h, 1.0]], dtype=f32)
        )
        self.globals["iTime"] = Value(T.FLOAT, np.array([uniforms.time], dtype=f32))
        self.globals["iTimeDelta"] = Value(T.FLOAT, np.array([uniforms.time_delta], dtype=f32))
        self.globals["iFrame"] = Value(T.INT, np.array([uniforms.frame], dtype=np.int32))
        self.globals["iMouse"] = Value(T.VEC4, np.array([uniforms.mouse], dtype=f32))
        for i in range(4):
            self.globals[f"iChannel{i}"] = Value(
                T.SAMPLER2D, np.array([i], dtype=np.int32)
            )
        for const in program.ast.consts:
            self.globals[const.name] = self.eval(const.init, [self.globals], None)

    # ---- statements ----

    def exec_block(self, block: N.Block, env: list[dict], mask, flow: _Flow) -> None:
        env.append({})
        try:
            self.exec_stmts(block.stmts, env, mask, flow)
        finally:
            env.pop()

    def exec_stmts(self, stmts, env, mask, flow: _Flow) -> None:
        for stmt in stmts:
            live = flow.active(mask)
            if live is False:
                return
            self.exec_stmt(stmt, env, live, flow)

    def exec_stmt(self, stmt: N.Stmt, env, mask, flow: _Flow) -> None:
        if isinstance(stmt, N.Block):
            self.exec_block(stmt, env, mask, flow)
        elif isinstance(stmt, N.DeclStmt):
            ty = T.by_name(stmt.type_name)
            for decl in stmt.declarators:
                if decl.init is None:
                    env[-1][decl.name] = _zeros(ty)
                else:
                    val = self.eval(decl.init, env, mask)
                    env[-1][decl.name] = Value(ty, val.data)
        elif isinstance(stmt, N.AssignStmt):
            self._exec_assign(stmt, env, mask)
        elif isinstance(stmt, N.IncDecStmt):
            cur = self.eval(stmt.target, env, mask)
            one = (
                np.int32(1) if cur.ty is T.INT else np.float32(1.0)
            )
            data = cur.data + one if stmt.op == "++" else cur.data - one
            self._assign_lvalue(stmt.target, Value(cur.ty, data), env, mask)
        elif isinstance(stmt, N.ExprStmt):
            self.eval(stmt.expr, env, mask)
        elif isinstance(stmt, N.IfStmt):
            self._exec_if(stmt, env, mask, flow)
        elif isinstance(stmt, N.ForStmt):
            self._exec_for(stmt, env, mask, flow)
        elif isinstance(stmt, N.ReturnStmt):
            value = None
            ret_ty = None
            if stmt.value is not None:
                value = self.eval(stmt.value, env, mask)
                ret_ty = value.ty
            flow.mark_return(mask, value, ret_ty)
        else:  # pragma: no cover
            raise RuntimeError(f"unhandled statement {type(stmt).__name__}")

    def _exec_assign(self, stmt: N.AssignStmt, env, mask) -> None:
        if stmt.op == "=":
            value = self.eval(stmt.value, env, mask)
            target_ty = stmt.target.ty
            self._assign_lvalue(stmt.target, Value(target_ty, value.data), env, mask)
            return
        cur = self.eval(stmt.target, env, mask)
        rhs = self.eval(stmt.value, env, mask)
        combined = self._binary_values(stmt.op[0], cur, rhs, stmt.pos)
        self._assign_lvalue(stmt.target, combined, env, mask)

    def _exec_if(self, stmt: N.IfStmt, env, mask, flow: _Flow) -> None:
        cond = self.eval(stmt.cond, env, mask)
        lanes = _as_lanes(cond.data, self.npix)
        if cond.data.shape[0] == 1:
            if bool(cond.data[0]):
                self.exec_block(stmt.then_body, env, mask, flow)
            elif stmt.else_body is not None:
                self.exec_block(stmt.else_body, env, mask, flow)
            return
        then_mask = _and_mask(mask, lanes)
        if then_mask is None or then_mask.any():
            self.exec_block(stmt.then_body, env, then_mask, flow)
        if stmt.else_body is not None:
            else_mask = _and_mask(mask, ~cond.data)
            if else_mask is None or else_mask.any():
                self.exec_block(stmt.else_body, env, else_mask, flow)

    def _exec_for(self, stmt: N.ForStmt, env, mask, flow: _Flow) -> None:
        env.append({})
        try:
            self.exec_stmt(stmt.init, env, mask, flow)
            while True:
                live = flow.active(mask)
                if live is False:
                    return
                cond = self.eval(stmt.cond, env, live)
                lanes = _as_lanes(cond.data, self.npix)
                if lanes is not None:
                    live = _and_mask(live, lanes)
                    if live is not None and not live.any():
                        return
                elif cond.data.shape[0] == 1 and not bool(cond.data[0]):
                    return
                self.iterations += 1
                if self.iterations > LOOP_GUARD:
                    raise ShaderRuntimeError(
                        Diagnostic(
                            "error",
                            stmt.pos[0],
                            stmt.pos[1],
                            f"loop iteration guard exceeded ({LOOP_GUARD} iterations)",
                        )
                    )
                self.exec_block(stmt.body, env, live, flow)
                step_mask = flow.active(live)
                if step_mask is False:
                    return
                self.exec_stmt(stmt.step, env, step_mask, flow)
        finally:
            env.pop()

    # ---- lvalues ----

    def _lookup(self, env, name: str) -> tuple[dict, Value]:
        for scope in reversed(env):
            if name in scope:
                return scope, scope[name]
        raise KeyError(name)  # pragma: no cover - checker guarantees

    def _assign_lvalue(self, node: N.Expr, value: Value, env, mask) -> None:
        if isinstance(node, N.Ident):
            scope, old = self._lookup(env, node.name)
            scope[node.name] = Value(old.ty, _blend(old.data, value.data, mask))
            return
        if isinstance(node, N.Member):
            base = self.eval(node.base, env, mask)
            k = T.vec_size(base.ty)
            n = max(base.data.shape[0], value.data.shape[0])
            data = _widen(base.data, n).copy()
            if len(node.indices) == 1:
                data[:, node.indices[0]] = _widen(value.data, n)
            else:
                vdata = _widen(value.data, n)
                for j, idx in enumerate(node.indices):
                    data[:, idx] = vdata[:, j]
            self._assign_lvalue(node.base, Value(base.ty, data), env, mask)
            return
        if isinstance(node, N.IndexExpr):
            base = self.eval(node.base, env, mask)
            index = self.eval(node.index, env, mask)
            limit = T.vec_size(base.ty) if T.is_vec(base.ty) else T.mat_size(base.ty)
            n = max(base.data.shape[0], value.data.shape[0], index.data.shape[0])
            data = _widen(base.data, n).copy()
            if index.data.shape[0] == 1:
                i = int(np.clip(index.data[0], 0, limit - 1))
                if T.is_vec(base.ty):
                    data[:, i] = _widen(value.data, n)
                else:
                    data[:, :, i] = _widen(value.data, n)
            else:
                idx = np.clip(_widen(index.data, n), 0, limit - 1).astype(np.int64)
                if T.is_vec(base.ty):
                    np.put_along_axis(data, idx[:, None], _widen(value.data, n)[:, None], axis=1)
                else:
                    np.put_along_axis(
                        data, idx[:, None, None], _widen(value.data, n)[:, :, None], axis=2
                    )
            self._assign_lvalue(node.base, Value(base.ty, data), env, mask)
            return
        raise RuntimeError("not an lvalue")  # pragma: no cover - checker guarantees

    # ---- expressions ----

    def eval(self, expr: N.Expr, env, mask) -> Value:
        if isinstance(expr, N.IntLit):
            return Value(T.INT, np.array([expr.value], dtype=np.int32))
        if isinstance(expr, N.FloatLit):
            return Value(T.FLOAT, np.array([expr.value], dtype=np.float32))
        if isinstance(expr, N.BoolLit):
            return Value(T.BOOL, np.array([expr.value], dtype=bool))
        if isinstance(expr, N.Ident):
            _scope, val = self._lookup(env, expr.name)
            return val
        if isinstance(expr, N.Coerce):
            inner = self.eval(expr.operand, env, mask)
            return Value(T.FLOAT, inner.data.astype(np.float32))
        if isinstance(expr, N.Unary):
            val = self.eval(expr.operand, env, mask)
            if expr.op == "!":
                return Value(T.BOOL, ~val.data)
            if expr.op == "-":
                return Value(val.ty, -val.data)
            return val
        if isinstance(expr, N.Binary):
            return self._eval_binary(expr, env, mask)
        if isinstance(expr, N.Ternary):
            return self._eval_ternary(expr, env, mask)
        if isinstance(expr, N.Member):
            base = self.eval(expr.base, env, mask)
            if len(expr.indices) == 1:
                return Value(T.FLOAT, base.data[:, expr.indices[0]])
            return Value(expr.ty, base.data[:, expr.indices])
        if isinstance(expr, N.IndexExpr):
            return self._eval_index(expr, env, mask)
        if isinstance(expr, N.Call):
            return self._eval_call(expr, env, mask)
        raise RuntimeError(f"unhandled expression {type(expr).__name__}")  # pragma: no cover

    def _eval_binary(self, expr: N.Binary, env, mask) -> Value:
        op = expr.op
        if op == "&&":
            left = self.eval(expr.left, env, mask)
            lanes = _as_lanes(left.data, self.npix)
            right = self.eval(expr.right, env, _and_mask(mask, lanes))
            return Value(T.BOOL, left.data & right.data)
        if op == "||":
            left = self.eval(expr.left, env, mask)
            neg = _as_lanes(~left.data, self.npix)
            right = self.eval(expr.right, env, _and_mask(mask, neg))
            return Value(T.BOOL, left.data | right.data)
        left = self.eval(expr.left, env, mask)
        right = self.eval(expr.right, env, mask)
        if op in ("==", "!="):
            eq = left.data == right.data
            while eq.ndim > 1:
                eq = eq.all(axis=-1)
            return Value(T.BOOL, eq if op == "==" else ~eq)
        if op in ("<", ">", "<=", ">="):
            a, b = left.data, right.data
            if left.ty is T.INT and right.ty is T.FLOAT:
                a = a.astype(np.float32)
            elif left.ty is T.FLOAT and right.ty is T.INT:
                b = b.astype(np.float32)
            fn = {"<": np.less, ">": np.greater, "<=": np.less_equal, ">=": np.greater_equal}[op]
            return Value(T.BOOL, fn(a, b))
        return self._binary_values(op, left, right, expr.pos)

    def _binary_values(self, op: str, left: Value, right: Value, pos) -> Value:
        if left.ty is T.INT and right.ty is T.INT:
            a, b = left.data, right.data
            if op == "+":
                return Value(T.INT, a + b)
            if op == "-":
                return Value(T.INT, a - b)
            if op == "*":
                return Value(T.INT, a * b)
            if op == "/":
                return Value(T.INT, _int_div(a, b))
            if op == "%":
                return Value(T.INT, _int_mod(a, b))
        a = left.data.astype(np.float32) if left.ty is T.INT else left.data
        b = right.data.astype(np.float32) if right.ty is T.INT else right.data
        lt = T.FLOAT if left.ty is T.INT else left.ty
        rt = T.FLOAT if right.ty is T.INT else right.ty

        if op == "*" and T.is_mat(lt) and T.is_mat(rt):
            return Value(lt, np.einsum("nrk,nkc->nrc", *np.broadcast_arrays(a, b)))
        if op == "*" and T.is_mat(lt) and T.is_vec(rt):
            n = max(a.shape[0], b.shape[0])
            return Value(rt, np.einsum("nrc,nc->nr", _widen(a, n), _widen(b, n)))
        if op == "*" and T.is_vec(lt) and T.is_mat(rt):
            n = max(a.shape[0], b.shape[0])
            return Value(lt, np.einsum("nr,nrc->nc", _widen(a, n), _widen(b, n)))

        # componentwise with scalar spreading
        result_ty = lt if lt is not T.FLOAT else rt
        if a.ndim < b.ndim:
            a = a.reshape(a.shape + (1,) * (b.ndim - a.ndim))
        elif b.ndim < a.ndim:
            b = b.reshape(b.shape + (1,) * (a.ndim - b.ndim))
        fn = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[op]
        return Value(result_ty, fn(a, b))

    def _eval_ternary(self, expr: N.Ternary, env, mask) -> Value:
        cond = self.eval(expr.cond, env, mask)
        if cond.data.shape[0] == 1:
            branch = expr.then if bool(cond.data[0]) else expr.other
            return self.eval(branch, env, mask)
        lanes = cond.data
        then_val = self.eval(expr.then, env, _and_mask(mask, lanes))
        other_val = self.eval(expr.other, env, _and_mask(mask, ~lanes))
        ndim = max(then_val.data.ndim, other_val.data.ndim)
        sel = _mask_reshape(lanes, ndim)
        return Value(then_val.ty, np.where(sel, then_val.data, other_val.data))

    def _eval_index(self, expr: N.IndexExpr, env, mask) -> Value:
        base = self.eval(expr.base, env, mask)
        index = self.eval(expr.index, env, mask)
        is_vec = T.is_vec(base.ty)
        limit = T.vec_size(base.ty) if is_vec else T.mat_size(base.ty)
        if index.data.shape[0] == 1:
            i = int(np.clip(index.data[0], 0, limit - 1))
            if is_vec:
                return Value(T.FLOAT, base.data[:, i])
            return Value(T.vec_type(limit), base.data[:, :, i])
        n = max(base.data.shape[0], index.data.shape[0])
        idx = np.clip(_widen(index.data, n), 0, limit - 1).astype(np.int64)
        data = _widen(base.data, n)
        if is_vec:
            return Value(T.FLOAT, np.take_along_axis(data, idx[:, None], axis=1)[:, 0])
        col = np.take_along_axis(data, idx[:, None, None], axis=2)[:, :, 0]
        return Value(T.vec_type(limit), col)

    # ---- calls ----

    def _eval_call(self, expr: N.Call, env, mask) -> Value:
        if expr.target == "constructor":
            return self._eval_constructor(expr, env, mask)
        if expr.target == "user":
            return self._eval_user_call(expr, env, mask)
        if expr.name == "texture":
            sampler = self.eval(expr.args[0], env, mask)
            uv = self.eval(expr.args[1], env, mask)
            return self._sample_channel(int(sampler.data[0]), uv.data)
        args = [self.eval(a, env, mask) for a in expr.args]
        plan: list[T.Type] = expr.plan
        data = [self._convert(v, want) for v, want in zip(args, plan)]
        impl = IMPLEMENTATIONS[expr.name]
        out = impl(*data)
        if expr.ty is T.INT:
            out = out.astype(np.int32)
        elif out.dtype != np.float32 and expr.ty is not T.BOOL:
            out = out.astype(np.float32)
        return Value(expr.ty, out)

    def _convert(self, value: Value, want: T.Type) -> np.ndarray:
        data = value.data
        if value.ty is want:
            return data
        if value.ty is T.INT and want is T.FLOAT:
            return data.astype(np.float32)
        if value.ty in (T.INT, T.FLOAT) and T.is_vec(want):
            if value.ty is T.INT:
                data = data.astype(np.float32)
            return np.repeat(data[:, None], T.vec_size(want), axis=1)
        raise RuntimeError(f"cannot convert {value.ty} to {want}")  # pragma: no cover

    def _eval_constructor(self, expr: N.Call, env, mask) -> Value:
        ctor = T.by_name(expr.name)
        args = [self.eval(a, env, mask) for a in expr.args]
        if ctor is T.FLOAT:
            return Value(T.FLOAT, args[0].data.astype(np.float32))
        if ctor is T.INT:
            data = args[0].data
            if data.dtype == np.float32 or data.dtype == np.float64:
                with np.errstate(invalid="ignore"):
                    out = np.trunc(data)
                    out = np.where(np.isfinite(out), out, 0.0)
                return Value(T.INT, out.astype(np.int32))
            return Value(T.INT, data.astype(np.int32))
        if ctor is T.BOOL:
            return Value(T.BOOL, args[0].data != 0)
        if T.is_vec(ctor):
            k = T.vec_size(ctor)
            if len(args) == 1 and T.is_scalar(args[0].ty):
                base = args[0].data.astype(np.float32)
                return Value(ctor, np.repeat(base[:, None], k, axis=1))
            if len(args) == 1 and T.is_vec(args[0].ty):
                return Value(ctor, args[0].data[:, :k])
            comps: list[np.ndarray] = []
            for val in args:
                data = val.data.astype(np.float32) if val.ty in (T.INT, T.BOOL) else val.data
                if T.is_vec(val.ty):
                    comps.extend(data[:, j] for j in range(T.vec_size(val.ty)))
                else:
                    comps.append(data)
            n = max(c.shape[0] for c in comps)
            stacked = np.stack([_widen(c, n) for c in comps], axis=1)
            return Value(ctor, stacked.astype(np.float32))
        # matrix
        k = T.mat_size(ctor)
        eye = np.eye(k, dtype=np.float32)
        if len(args) == 1 and T.is_scalar(args[0].ty):
            s = args[0].data.astype(np.float32)
            return Value(ctor, s[:, None, None] * eye[None, :, :])
        if len(args) == 1 and T.is_mat(args[0].ty):
            src = args[0].data
            m = min(k, T.mat_size(args[0].ty))
            n = src.shape[0]
            out = np.broadcast_to(eye[None, :, :], (n, k, k)).copy()
            out[:, :m, :m] = src[:, :m, :m]
            return Value(ctor, out)
        if T.is_vec(args[0].ty):
            cols = [a.data.astype(np.float32) for a in args]
            n = max(c.shape[0] for c in cols)
            return Value(ctor, np.stack([_widen(c, n) for c in cols], axis=2))
        flat = [a.data.astype(np.float32) for a in args]
        n = max(c.shape[0] for c in flat)
        stacked = np.stack([_widen(c, n) for c in flat], axis=1)  # (n, k*k) column-major
        return Value(ctor, stacked.reshape(n, k, k).transpose(0, 2, 1))

    def _eval_user_call(self, expr: N.Call, env, mask) -> Value:
        func: N.FuncDef = expr.plan
        fscope: dict[str, Value] = {}
        out_params: list[tuple[N.Param, N.Expr]] = []
        for param, arg in zip(func.params, expr.args):
            ty = T.by_name(param.type_name)
            if param.qualifier == "out":
                fscope[param.name] = _zeros(ty)
                out_params.append((param, arg))
            else:
                val = self.eval(arg, env, mask)
                fscope[param.name] = Value(ty, val.data)
                if param.qualifier == "inout":
                    out_params.append((param, arg))
        fenv = [self.globals, fscope]
        flow = _Flow(self.npix)
        ret_ty = T.by_name(func.return_type_name)
        self.exec_block(func.body, fenv, mask, flow)
        for param, arg in out_params:
            self._assign_lvalue(arg, fscope[param.name], env, mask)
        if ret_ty is T.VOID:
            return Value(T.VOID, np.zeros(1, dtype=np.float32))
        if flow.ret is None:
            return _zeros(ret_ty)
        return flow.ret

    def _sample_channel(self, index: int, uv: np.ndarray) -> Value:
        channel: Channel | None = None
        if 0 <= index < len(self.uniforms.channels):
            channel = self.uniforms.channels[index]
        n = uv.shape[0]
        if channel is None:
            out = np.zeros((n, 4), dtype=np.float32)
            out[:, 3] = 1.0
            return Value(T.VEC4, out)
        img = channel.image
        h, w = img.shape[:2]
        u = uv[:, 0]
        v = uv[:, 1]
        if channel.wrap == "repeat":
            u = u - np.floor(u)
            v = v - np.floor(v)
        else:
            u = np.clip(u, 0.0, 1.0)
            v = np.clip(v, 0.0, 1.0)
        x = u * np.float32(w) - np.float32(0.5)
        y = v * np.float32(h) - np.float32(0.5)
        x0 = np.floor(x)
        y0 = np.floor(y)
        fx = (x - x0)[:, None]
        fy = (y - y0)[:, None]
        xi0 = x0.astype(np.int64)
        yi0 = y0.astype(np.int64)
        xi1 = xi0 + 1
        yi1 = yi0 + 1
        if channel.wrap == "repeat":
            xi0 %= w
            xi1 %= w
            yi0 %= h
            yi1 %= h
        else:
            xi0 = np.clip(xi0, 0, w - 1)
            xi1 = np.clip(xi1, 0, w - 1)
            yi0 = np.clip(yi0, 0, h - 1)
            yi1 = np.clip(yi1, 0, h - 1)
        top = img[yi0, xi0] * (1 - fx) + img[yi0, xi1] * fx
        bot = img[yi1, xi0] * (1 - fx) + img[yi1, xi1] * fx
        rgb = (top * (1 - fy) + bot * fy).astype(np.float32)
        out = np.empty((n, 4), dtype=np.float32)
        out[:, :3] = rgb
        out[:, 3] = 1.0
        return Value(T.VEC4, out)


def _int_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """GLSL-style int division: truncation toward zero, x/0 pinned to 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.trunc(a.astype(np.float64) / b.astype(np.float64))
        q = np.where(b == 0, 0.0, q)
    return q.astype(np.int32)


def _int_mod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a - _int_div(a, b) * b).astype(np.int32)


def render_region(
    program: N.ShaderProgram,
    uniforms: UniformBlock,
    size: tuple[int, int],
    row_start: int,
    row_stop: int,
) -> np.ndarray:
    """Evaluate mainImage for output rows [row_start, row_stop) of a (w, h)
    frame; fragCoord has a bottom-left origin and +0.5 pixel centers."""
    uniforms.validate()
    w, h = size
    if not (0 <= row_start <= row_stop <= h):
        raise ValueError("row range out of bounds")
    rows = row_stop - row_start
    npix = rows * w
    if npix == 0:
        return np.zeros((0, w, 3), dtype=np.uint8)

    rr, cc = np.mgrid[row_start:row_stop, 0:w]
    frag_x = cc.reshape(-1).astype(np.float32) + np.float32(0.5)
    frag_y = (h - 1 - rr.reshape(-1)).astype(np.float32) + np.float32(0.5)
    frag_coord = np.stack([frag_x, frag_y], axis=1)

    with np.errstate(all="ignore"):
        ev = Evaluator(program, uniforms, npix)
        main = program.main
        fscope = {
            main.params[0].name: Value(T.VEC4, np.zeros((1, 4), dtype=np.float32)),
            main.params[1].name: Value(T.VEC2, frag_coord),
        }
        flow = _Flow(npix)
        ev.exec_block(main.body, [ev.globals, fscope], None, flow)
        frag_color = fscope[main.params[0].name].data

        rgb = _widen(frag_color, npix)[:, :3]
        rgb = np.clip(rgb, 0.0, 1.0)
        rgb = np.where(np.isnan(rgb), np.float32(0.0), rgb)
        out = np.floor(rgb * np.float32(255.0) + np.float32(0.5)).astype(np.uint8)
    return out.reshape(rows, w, 3)


def render_frame(
    program: N.ShaderProgram, uniforms: UniformBlock, size: tuple[int, int]
) -> np.ndarray:
    """Render a full (w, h) frame to (H, W, 3) uint8 RGB."""
    return render_region(program, uniforms, size, 0, size[1])
