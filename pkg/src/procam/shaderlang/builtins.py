"""Built-in function signatures and vectorized implementations.

Resolution follows the GLSL genType pattern: `gen` parameters share one
float/vec2/vec3/vec4 shape, and designated parameters may instead be a
float scalar that broadcasts to that shape.  `resolve` returns the result
type plus fully resolved parameter types; the evaluator uses those as its
conversion plan (int arguments promote to float, scalar floats spread to
the gen shape).
"""

from __future__ import annotations

import numpy as np

from . import typesys as T

_GEN_TYPES = (T.FLOAT, T.VEC2, T.VEC3, T.VEC4)

_UNARY_GEN = frozenset(
    {
        "sin", "cos", "tan", "asin", "acos", "exp", "log", "exp2", "log2",
        "sqrt", "inversesqrt", "abs", "sign", "floor", "ceil", "fract",
        "normalize",
    }
)

# name -> (arity, spreadable parameter indices, reduces-to-float)
_GEN_FAMILY = {
    "pow": (2, (), False),
    "reflect": (2, (), False),
    "mod": (2, (1,), False),
    "min": (2, (1,), False),
    "max": (2, (1,), False),
    "clamp": (3, (1, 2), False),
    "mix": (3, (2,), False),
    "step": (2, (0,), False),
    "smoothstep": (3, (0, 1), False),
    "length": (1, (), True),
    "distance": (2, (), True),
    "dot": (2, (), True),
}

_INT_OK = frozenset({"abs", "sign", "min", "max", "clamp"})


def _as_gen(ty: T.Type) -> T.Type | None:
    if ty in _GEN_TYPES:
        return ty
    if ty is T.INT:
        return T.FLOAT  # implicit promotion
    return None


def resolve(name: str, argtypes: list[T.Type]) -> tuple[T.Type, list[T.Type]] | None:
    """Resolve a builtin call; None if the name is unknown.

    Raises TypeError with a readable message when the name exists but the
    argument types fit no accepted pattern.
    """
    if name not in IMPLEMENTATIONS:
        return None

    def fail():
        raise TypeError(f"{name}() does not accept ({', '.join(str(t) for t in argtypes)})")

    def unify(spread: tuple[int, ...]) -> T.Type:
        base = T.FLOAT
        gens = []
        for ty in argtypes:
            g = _as_gen(ty)
            if g is None:
                fail()
            gens.append(g)
            if g is not T.FLOAT:
                if base is T.FLOAT:
                    base = g
                elif base is not g:
                    fail()
        for i, g in enumerate(gens):
            if g is not base and not (i in spread and g is T.FLOAT):
                fail()
        return base

    n = len(argtypes)

    if name in _INT_OK and all(t is T.INT for t in argtypes):
        arity = 1 if name in ("abs", "sign") else (3 if name == "clamp" else 2)
        if n != arity:
            fail()
        return T.INT, [T.INT] * n

    if name in _UNARY_GEN:
        if n != 1:
            fail()
        base = unify(())
        return base, [base]

    if name == "atan":
        if n not in (1, 2):
            fail()
        base = unify(())
        return base, [base] * n

    if name in _GEN_FAMILY:
        arity, spread, reduces = _GEN_FAMILY[name]
        if n != arity:
            fail()
        base = unify(spread)
        return (T.FLOAT if reduces else base), [base] * n

    if name == "cross":
        if n != 2 or argtypes[0] is not T.VEC3 or argtypes[1] is not T.VEC3:
            fail()
        return T.VEC3, [T.VEC3, T.VEC3]

    if name == "texture":
        if n != 2 or argtypes[0] is not T.SAMPLER2D or argtypes[1] is not T.VEC2:
            fail()
        return T.VEC4, [T.SAMPLER2D, T.VEC2]

    fail()


def _glsl_mod(x, y):
    return x - y * np.floor(x / y)


def _length(x):
    if x.ndim == 1:
        return np.abs(x)
    return np.sqrt(np.sum(x * x, axis=-1))


def _normalize(x):
    ln = _length(x)
    if x.ndim == 1:
        return x / ln
    return x / ln[..., None]


def _dot(a, b):
    if a.ndim == 1:
        return a * b
    return np.sum(a * b, axis=-1)


def _clamp(x, lo, hi):
    return np.minimum(np.maximum(x, lo), hi)


def _mix(a, b, t):
    return a * (1.0 - t) + b * t


def _step(edge, x):
    return np.where(x < edge, np.float32(0.0), np.float32(1.0))


def _smoothstep(e0, e1, x):
    t = _clamp((x - e0) / (e1 - e0), np.float32(0.0), np.float32(1.0))
    return t * t * (3.0 - 2.0 * t)


def _reflect(i, n):
    d = _dot(n, i)
    if i.ndim == 1:
        return i - 2.0 * d * n
    return i - 2.0 * d[..., None] * n


def _cross(a, b):
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=a.dtype)
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


IMPLEMENTATIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": lambda *a: np.arctan2(a[0], a[1]) if len(a) == 2 else np.arctan(a[0]),
    "pow": np.power,
    "exp": np.exp,
    "log": np.log,
    "exp2": np.exp2,
    "log2": np.log2,
    "sqrt": np.sqrt,
    "inversesqrt": lambda x: np.float32(1.0) / np.sqrt(x),
    "abs": np.abs,
    "sign": np.sign,
    "floor": np.floor,
    "ceil": np.ceil,
    "fract": lambda x: x - np.floor(x),
    "mod": _glsl_mod,
    "min": np.minimum,
    "max": np.maximum,
    "clamp": _clamp,
    "mix": _mix,
    "step": _step,
    "smoothstep": _smoothstep,
    "length": _length,
    "distance": lambda a, b: _length(a - b),
    "dot": _dot,
    "cross": _cross,
    "normalize": _normalize,
    "reflect": _reflect,
    # texture is special-cased by the evaluator (needs channel state)
    "texture": None,
}

BUILTIN_NAMES = frozenset(IMPLEMENTATIONS)
