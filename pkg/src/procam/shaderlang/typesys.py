"""Type lattice for the shader subset: scalars, float vectors, square
float matrices, and 2D samplers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Type:
    name: str

    def __str__(self) -> str:
        return self.name


VOID = Type("void")
BOOL = Type("bool")
INT = Type("int")
FLOAT = Type("float")
VEC2 = Type("vec2")
VEC3 = Type("vec3")
VEC4 = Type("vec4")
MAT2 = Type("mat2")
MAT3 = Type("mat3")
MAT4 = Type("mat4")
SAMPLER2D = Type("sampler2D")

_VEC_SIZE = {VEC2: 2, VEC3: 3, VEC4: 4}
_MAT_SIZE = {MAT2: 2, MAT3: 3, MAT4: 4}
_BY_NAME = {
    t.name: t
    for t in (VOID, BOOL, INT, FLOAT, VEC2, VEC3, VEC4, MAT2, MAT3, MAT4, SAMPLER2D)
}

TYPE_KEYWORDS = frozenset(_BY_NAME)


def by_name(name: str) -> Type | None:
    return _BY_NAME.get(name)


def is_vec(t: Type) -> bool:
    return t in _VEC_SIZE


def vec_size(t: Type) -> int:
    return _VEC_SIZE[t]


def vec_type(n: int) -> Type:
    return {2: VEC2, 3: VEC3, 4: VEC4}[n]


def is_mat(t: Type) -> bool:
    return t in _MAT_SIZE


def mat_size(t: Type) -> int:
    return _MAT_SIZE[t]


def mat_type(n: int) -> Type:
    return {2: MAT2, 3: MAT3, 4: MAT4}[n]


def is_scalar(t: Type) -> bool:
    return t in (BOOL, INT, FLOAT)


def is_numeric_scalar(t: Type) -> bool:
    return t in (INT, FLOAT)


def component_count(t: Type) -> int:
    """Scalar component count of a constructible type."""
    if is_scalar(t):
        return 1
    if is_vec(t):
        return vec_size(t)
    if is_mat(t):
        return mat_size(t) ** 2
    raise ValueError(f"{t} has no components")
