import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from procam import shaderlang as sl
from procam.shaderlang import (
    Channel,
    Diagnostic,
    ShaderCompileError,
    ShaderRuntimeError,
    UniformBlock,
    compile_shader,
    render_frame,
    render_region,
)


def _wrap(body: str, prelude: str = "") -> str:
    return f"{prelude}\nvoid mainImage(out vec4 fragColor, in vec2 fragCoord) {{\n{body}\n}}\n"


def _render1(body: str, prelude: str = "", uniforms: UniformBlock | None = None):
    """Render a 1x1 frame and return the single RGB pixel."""
    program = compile_shader(_wrap(body, prelude))
    u = uniforms or UniformBlock.for_frame(1, 1)
    return render_frame(program, u, (1, 1))[0, 0]


def _diag(source: str) -> Diagnostic:
    with pytest.raises(ShaderCompileError) as exc:
        compile_shader(source)
    return exc.value.diagnostics[0]


# ---- compilation ----

def test_compile_minimal():
    program = compile_shader("void mainImage(out vec4 c, in vec2 f){ c = vec4(1.0); }")
    assert program.main.name == "mainImage"


def test_missing_semicolon_diagnostic():
    d = _diag("void mainImage(out vec4 c, in vec2 f){ c = vec4(1.0) }")
    assert d.severity == "error" and d.line == 1


def test_type_mismatch_diagnostic():
    d = _diag("void mainImage(out vec4 c, in vec2 f){ c = vec3(1.0); }")
    assert "vec3" in d.message and "vec4" in d.message


def test_missing_main_diagnostic():
    d = _diag("float helper() { return 1.0; }")
    assert "mainImage" in d.message


def test_wrong_main_signature():
    assert "mainImage" in _diag("void mainImage(in vec4 c, in vec2 f){ }").message
    assert "mainImage" in _diag("float mainImage(out vec4 c, in vec2 f){ return 1.0; }").message


def test_unsupported_constructs_rejected():
    for snippet, needle in (
        ("void mainImage(out vec4 c, in vec2 f){ while(true) { } }", "while"),
        ("struct S { float x; };", "struct"),
        ("#define PI 3.14", "preprocessor"),
        ("uniform float t;", "uniform"),
        ("void mainImage(out vec4 c, in vec2 f){ float a[3]; }", None),
        ("float g = 1.0;", "const"),
    ):
        d = _diag(snippet)
        if needle:
            assert needle in d.message, snippet


def test_undeclared_identifier():
    d = _diag("void mainImage(out vec4 c, in vec2 f){ c = vec4(bogus); }")
    assert "bogus" in d.message


def test_recursion_rejected():
    src = """
    float f(float x) { return g(x); }
    float g(float x) { return f(x); }
    void mainImage(out vec4 c, in vec2 p) { c = vec4(f(1.0)); }
    """
    assert "recursion" in _diag(src).message


def test_swizzle_errors():
    assert "swizzle" in _diag(_wrap("vec2 v = vec2(1.0); float a = v.z;")).message
    assert "swizzle" in _diag(_wrap("vec3 v = vec3(1.0); v.xx = vec2(1.0);")).message
    assert "swizzle" in _diag(_wrap("vec3 v = vec3(1.0); float a = v.xq;")).message


def test_const_globals():
    pixel = _render1("fragColor = vec4(vec3(HALF), 1.0);", prelude="const float HALF = 0.25 * 2.0;")
    assert tuple(pixel) == (128, 128, 128)
    d = _diag("const float T = iTime;\nvoid mainImage(out vec4 c, in vec2 f){ c = vec4(T); }")
    assert "constant" in d.message


def test_for_loop_shape_enforced():
    ok = _wrap("float s = 0.0; for (int i = 0; i < 4; i++) { s += 0.1; } fragColor = vec4(s);")
    compile_shader(ok)
    bad = _wrap("for (int i = 0; i < int(iTime); i++) { } fragColor = vec4(1.0);")
    assert "literal" in _diag(bad).message


def test_out_param_requires_lvalue():
    src = """
    void fill(out float x) { x = 3.0; }
    void mainImage(out vec4 c, in vec2 f) { fill(1.0); c = vec4(0.0); }
    """
    d = _diag(src)
    assert "out" in d.message or "assignable" in d.message


def test_line_column_accuracy():
    src = "void mainImage(out vec4 c, in vec2 f)\n{\n    c = vec4(1.0)\n}\n"
    d = _diag(src)
    assert d.line == 4  # the missing ';' is noticed at the closing brace


# ---- rendering semantics ----

def test_constant_white():
    frame = render_frame(
        compile_shader("void mainImage(out vec4 c, in vec2 f){ c = vec4(1.0); }"),
        UniformBlock.for_frame(4, 4), (4, 4),
    )
    assert (frame == 255).all()


def test_gradient_bottom_left_origin():
    program = compile_shader(
        "void mainImage(out vec4 c, in vec2 f){ c = vec4(f/iResolution.xy, 0.0, 1.0); }"
    )
    frame = render_frame(program, UniformBlock.for_frame(4, 4), (4, 4))
    assert tuple(frame[3, 0]) == (32, 32, 0)  # fragCoord (0.5, 0.5)
    assert tuple(frame[0, 3]) == (223, 223, 0)  # fragCoord (3.5, 3.5)


def test_swizzle_example():
    pixel = _render1("fragColor = vec4(vec3(1., 2., 3.).zxy / 3., 1.);")
    assert tuple(pixel) == (255, 85, 170)


@given(st.permutations([0, 1, 2, 3]))
@settings(max_examples=24, deadline=None)
def test_swizzle_algebra_round_trip(perm):
    fields = "xyzw"
    fwd = "".join(fields[i] for i in perm)
    inverse = [0] * 4
    for pos, src in enumerate(perm):
        inverse[src] = pos
    inv = "".join(fields[i] for i in inverse)
    body = f"""
    vec4 v = vec4(0.125, 0.25, 0.5, 0.75);
    vec4 w = v.{fwd}.{inv};
    fragColor = vec4(w.xyz, 1.0);
    """
    assert tuple(_render1(body)) == (32, 64, 128)


def test_purity_and_row_split():
    src = _wrap("""
    vec2 uv = fragCoord / iResolution.xy;
    float v = 0.0;
    for (int i = 0; i < 5; i++) {
        v += sin(uv.x * 11.0 + float(i)) * cos(uv.y * 7.0);
    }
    if (uv.x > 0.5) { v = v * 0.5 + 0.3; } else { v = abs(v) * 0.4; }
    fragColor = vec4(vec3(clamp(v, 0.0, 1.0)), 1.0);
    """)
    program = compile_shader(src)
    u = UniformBlock.for_frame(24, 16, time=1.5)
    a = render_frame(program, u, (24, 16))
    b = render_frame(program, u, (24, 16))
    assert np.array_equal(a, b)
    top = render_region(program, u, (24, 16), 0, 7)
    bottom = render_region(program, u, (24, 16), 7, 16)
    assert np.array_equal(np.concatenate([top, bottom], axis=0), a)


def test_scalar_promotion_and_int_ops():
    pixel = _render1("""
    int a = 7 / 2;
    int b = -7 / 2;
    int c = 7 % 3;
    float f = float(a) * 0.1 + float(b + 3) * 0.1 + float(c) * 0.1;
    fragColor = vec4(f, 1 + 0.5, float(a == 3), 1.0);
    """)
    # a=3 (trunc), b=-3 (trunc toward zero), c=1 -> f = 0.3 + 0.0 + 0.1
    assert pixel[0] == round(0.4 * 255)
    assert pixel[1] == 255
    assert pixel[2] == 255


def test_division_by_zero_and_nan_policy():
    pixel = _render1("""
    float inf = 1.0 / 0.0;
    float nan = 0.0 / 0.0;
    vec3 bad = normalize(vec3(0.0));
    fragColor = vec4(clamp(inf, 0.0, 1.0), nan, bad.x, 1.0);
    """)
    assert tuple(pixel) == (255, 0, 0)  # inf clamps to 1, NaN maps to 0


def test_matrix_semantics():
    body = """
    mat2 m = mat2(1.0, 2.0, 3.0, 4.0);    // columns (1,2), (3,4)
    vec2 v = m * vec2(1.0, 0.0);          // first column
    vec2 w = vec2(1.0, 0.0) * m;          // first row of m^T = (1, 3)
    mat2 mm = m * mat2(0.0, 1.0, 1.0, 0.0);
    fragColor = vec4(v.x / 4.0, v.y / 4.0, w.y / 4.0, mm[0][0] / 4.0);
    """
    pixel = _render1(body)
    # v = (1,2); w = (1,3); mm first column = m * (0,1) = (3,4) -> mm[0][0] = 3
    assert tuple(pixel) == (
        round(0.25 * 255), round(0.5 * 255), round(0.75 * 255),
    )[:3]


def test_matrix_scalar_and_index_write():
    pixel = _render1("""
    mat2 m = mat2(2.0);
    m[1] = vec2(0.5, 1.0);
    vec2 v = m * vec2(1.0, 1.0);
    fragColor = vec4(v.x / 4.0, v.y / 4.0, m[1][0], 1.0);
    """)
    # m = [[2, .5], [0, 1]]; v = (2.5, 1.0)
    assert pixel[0] == round(2.5 / 4 * 255)
    assert pixel[1] == round(1.0 / 4 * 255)
    assert pixel[2] == round(0.5 * 255)


def test_divergent_if_and_nested_functions():
    src = _wrap("""
    vec2 uv = fragCoord / iResolution.xy;
    float v;
    if (uv.x < 0.5) {
        v = pick(0.2, uv.y);
    } else {
        v = pick(0.8, uv.y);
    }
    fragColor = vec4(vec3(v), 1.0);
    """, prelude="""
    float pick(float base, float y) {
        if (y > 0.5) { return base + 0.1; }
        return base;
    }
    """)
    def q(*terms):  # float32 sum then the pinned 8-bit quantization
        acc = np.float32(0.0)
        for term in terms:
            acc = acc + np.float32(term)
        return int(np.floor(acc * np.float32(255.0) + np.float32(0.5)))

    frame = render_frame(compile_shader(src), UniformBlock.for_frame(8, 8), (8, 8))
    assert frame[7, 0, 0] == q(0.2)         # bottom-left
    assert frame[0, 0, 0] == q(0.2, 0.1)    # top-left
    assert frame[7, 7, 0] == q(0.8)         # bottom-right
    assert frame[0, 7, 0] == q(0.8, 0.1)    # top-right


def test_out_and_inout_params():
    src = _wrap("""
    float a = 1.0;
    float b;
    bump(a, b);
    fragColor = vec4(a / 4.0, b / 4.0, 0.0, 1.0);
    """, prelude="""
    void bump(inout float x, out float doubled) {
        x = x + 1.0;
        doubled = x * 2.0;
    }
    """)
    pixel = render_frame(compile_shader(src), UniformBlock.for_frame(1, 1), (1, 1))[0, 0]
    assert pixel[0] == round(2.0 / 4 * 255)
    assert pixel[1] == 255  # 4/4


def test_ternary_and_logic_short_circuit():
    pixel = _render1("""
    float x = fragCoord.x;
    float v = (x > 0.0 && x < 1.0) ? 0.25 : 0.75;
    bool other = x > 100.0 || v > 0.2;
    fragColor = vec4(v, other ? 1.0 : 0.0, 0.0, 1.0);
    """)
    assert pixel[0] == round(0.25 * 255)
    assert pixel[1] == 255


def test_for_loop_accumulation():
    pixel = _render1("""
    float s = 0.0;
    for (int i = 0; i < 10; i++) { s += 0.05; }
    float t = 0.0;
    for (float k = 10.0; k > 2.0; k -= 2.0) { t += 0.1; }
    fragColor = vec4(s, t, 0.0, 1.0);
    """)
    assert pixel[0] == round(0.5 * 255)
    assert pixel[1] == round(0.4 * 255)


def test_loop_guard_aborts(monkeypatch):
    src = _wrap("""
    float s = 0.0;
    for (int i = 0; i != 3; i += 2) { s += 1.0; }
    fragColor = vec4(s);
    """)
    program = compile_shader(src)
    # production guard is 1e7 iterations; shrink it so the test is quick
    from procam.shaderlang import interp

    assert interp.LOOP_GUARD == 10_000_000
    monkeypatch.setattr(interp, "LOOP_GUARD", 5_000)
    with pytest.raises(ShaderRuntimeError) as exc:
        render_frame(program, UniformBlock.for_frame(2, 2), (2, 2))
    assert "guard" in exc.value.diagnostic.message


def test_texture_bilinear_and_wrap():
    tex = np.zeros((2, 2, 3), np.uint8)
    tex[0, 0] = 255  # top-left of the source image
    u = UniformBlock.for_frame(1, 1, channel0=tex)
    # sample at the exact texel center of the top-left source pixel: in
    # texture space (bottom-up) that texel is at uv = (0.25, 0.75)
    pixel = _render1("fragColor = texture(iChannel0, vec2(0.25, 0.75));", uniforms=u)
    assert tuple(pixel) == (255, 255, 255)
    # midpoint between texels: bilinear average of 255 and 0
    mid = _render1("fragColor = texture(iChannel0, vec2(0.5, 0.75));", uniforms=u)
    assert tuple(mid) == (128, 128, 128)
    # repeat wrap: uv + 1 samples the same texel
    rep = _render1("fragColor = texture(iChannel0, vec2(1.25, -0.25));", uniforms=u)
    assert tuple(rep) == (255, 255, 255)

    clamped = UniformBlock.for_frame(1, 1)
    clamped = UniformBlock(
        resolution=(1.0, 1.0),
        channels=(Channel.from_rgb8(tex, wrap="clamp"), None, None, None),
    )
    out = _render1("fragColor = texture(iChannel0, vec2(-3.0, 9.0));", uniforms=clamped)
    assert tuple(out) == (255, 255, 255)  # clamps to the top-left texel


def test_unbound_channel_samples_black():
    pixel = _render1("fragColor = texture(iChannel2, vec2(0.5));")
    assert tuple(pixel) == (0, 0, 0)


def test_builtins_against_math():
    cases = {
        "sin(1.0)": math.sin(1.0),
        "cos(1.0)": math.cos(1.0),
        "atan(1.0, 2.0)": math.atan2(1.0, 2.0),
        "pow(0.5, 2.0)": 0.25,
        "exp2(-1.0)": 0.5,
        "inversesqrt(4.0)": 0.5,
        "fract(1.75)": 0.75,
        "mod(-1.25, 1.0)": 0.75,
        "mix(0.0, 1.0, 0.25)": 0.25,
        "step(0.5, 0.75)": 1.0,
        "smoothstep(0.0, 1.0, 0.5)": 0.5,
        "length(vec2(3.0, 4.0)) / 10.0": 0.5,
        "distance(vec2(1.0, 1.0), vec2(1.0, 0.5))": 0.5,
        "dot(vec2(0.5, 0.25), vec2(1.0, 1.0))": 0.75,
        "cross(vec3(1.0, 0.0, 0.0), vec3(0.0, 1.0, 0.0)).z": 1.0,
        "normalize(vec2(2.0, 0.0)).x": 1.0,
        "reflect(vec2(1.0, -1.0), vec2(0.0, 1.0)).y / 4.0 + 0.5": 0.75,
        "clamp(5, 0, 3) == 3 ? 0.5 : 0.0": 0.5,
        "abs(-3) == 3 ? 0.5 : 0.0": 0.5,
        "min(vec2(0.25), 0.75).x": 0.25,
    }
    for expr, want in cases.items():
        pixel = _render1(f"fragColor = vec4(vec3({expr}), 1.0);")
        assert pixel[0] == round(want * 255), expr


def test_vector_equality_and_constructors():
    pixel = _render1("""
    vec3 a = vec3(vec2(0.5, 0.25), 1.0);
    vec4 b = vec4(a.xy, vec2(0.0, 1.0));
    bool same = a == vec3(0.5, 0.25, 1.0);
    bool diff = b != vec4(0.0);
    fragColor = vec4(same ? a.x : 0.0, diff ? a.y : 0.0, vec2(a).x, 1.0);
    """)
    assert tuple(pixel) == (128, 64, 128)


def test_compile_totality_fuzz():
    """compile() must return diagnostics or a program on arbitrary mangled
    input and never raise anything else."""
    base_sources = [
        "void mainImage(out vec4 c, in vec2 f){ c = vec4(1.0); }",
        _wrap("""
        vec2 uv = fragCoord / iResolution.xy;
        float s = 0.0;
        for (int i = 0; i < 8; i++) { s += sin(uv.x * float(i)); }
        fragColor = vec4(vec3(s), 1.0);
        """, prelude="const float K = 2.0;\nfloat h(float x) { return fract(x * K); }"),
    ]
    rng = np.random.default_rng(1234)
    alphabet = list("abcxyz01(){};=+-*/.,<>?!&|[]# \n\"'\\%^~@$")
    attempts = 0
    for _ in range(1000):
        src = base_sources[int(rng.integers(len(base_sources)))]
        chars = list(src)
        op = rng.integers(4)
        if op == 0 and chars:  # truncate
            chars = chars[: int(rng.integers(len(chars)))]
        elif op == 1:  # delete a slice
            i = int(rng.integers(max(len(chars) - 3, 1)))
            del chars[i : i + int(rng.integers(1, 8))]
        elif op == 2:  # random substitutions
            for _k in range(int(rng.integers(1, 12))):
                i = int(rng.integers(len(chars)))
                chars[i] = alphabet[int(rng.integers(len(alphabet)))]
        else:  # random insertions
            for _k in range(int(rng.integers(1, 12))):
                i = int(rng.integers(len(chars) + 1))
                chars.insert(i, alphabet[int(rng.integers(len(alphabet)))])
        mangled = "".join(chars)
        attempts += 1
        try:
            program = compile_shader(mangled)
            assert program.main is not None
        except ShaderCompileError as e:
            assert e.diagnostics and all(d.line >= 1 and d.column >= 1 for d in e.diagnostics)
    assert attempts == 1000
