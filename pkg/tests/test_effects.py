import numpy as np
import pytest

from oracle_canny import canny_reference
from procam.effects import (
    EffectSpec,
    canny,
    chain_phase,
    render_cartoon,
    render_distort,
    render_effect,
    render_tron,
    trace_chains,
)
from procam.masks import Mask


def test_canny_constant_image_empty():
    img = np.full((16, 16, 3), 120, np.uint8)
    assert not canny(img).any()


def test_canny_step_edge_single_column():
    img = np.zeros((16, 16, 3), np.uint8)
    img[:, 8:] = 255
    edges = canny(img, sigma=1.0, low=0.2, high=0.5)
    cols = np.nonzero(edges.any(axis=0))[0]
    assert len(cols) == 1  # exactly one 1-pixel-wide vertical line
    assert edges[:, cols[0]].all()
    assert np.array_equal(edges, canny_reference(img, 1.0, 0.2, 0.5))


def test_canny_matches_reference_random():
    rng = np.random.default_rng(100)
    for trial in range(6):
        img = rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8)
        got = canny(img, sigma=1.0, low=0.2, high=0.5)
        want = canny_reference(img, 1.0, 0.2, 0.5)
        assert np.array_equal(got, want), f"trial {trial}"


def test_canny_matches_reference_other_params():
    rng = np.random.default_rng(200)
    img = rng.integers(0, 256, size=(48, 48, 3), dtype=np.uint8)
    for sigma, low, high in ((0.6, 0.1, 0.3), (2.0, 0.05, 0.6), (1.4, 0.0, 0.9)):
        got = canny(img, sigma=sigma, low=low, high=high)
        want = canny_reference(img, sigma, low, high)
        assert np.array_equal(got, want)


def test_canny_threshold_validation():
    img = np.zeros((8, 8, 3), np.uint8)
    with pytest.raises(ValueError):
        canny(img, sigma=0.0)
    with pytest.raises(ValueError):
        canny(img, low=0.5, high=0.5)
    with pytest.raises(ValueError):
        canny(img, low=0.2, high=1.2)


def test_trace_chains_empty():
    assert trace_chains(np.zeros((8, 8), bool)) == []


def test_trace_chains_straight_segment():
    edges = np.zeros((8, 32), bool)
    edges[4, 5:25] = True  # 20 pixels
    chains = trace_chains(edges, min_chain_length=8)
    assert len(chains) == 1
    chain = chains[0]
    assert len(chain) == 20
    assert chain.arc_length == pytest.approx(19.0)
    assert not chain.is_loop


def test_trace_chains_plus_sign():
    edges = np.zeros((13, 13), bool)
    edges[6, 1:12] = True
    edges[1:12, 6] = True
    chains = trace_chains(edges, min_chain_length=2)
    assert len(chains) == 4  # one chain per arm, split at the junction
    # the center and its 4 diagonal-coupled neighbors count >2 neighbors and
    # belong to no chain; each arm keeps its outer 4 pixels
    assert sorted(len(c) for c in chains) == [4, 4, 4, 4]
    for chain in chains:
        assert not chain.is_loop
        assert chain.arc_length == pytest.approx(3.0)


def test_trace_chains_loop():
    # diamond ring: every pixel has exactly two diagonal neighbors
    edges = np.zeros((13, 13), bool)
    c, r = 6, 5
    for dx in range(-r, r + 1):
        dy = r - abs(dx)
        edges[c + dy, c + dx] = True
        edges[c - dy, c + dx] = True
    chains = trace_chains(edges, min_chain_length=4)
    assert len(chains) == 1
    chain = chains[0]
    assert chain.is_loop
    assert len(chain) == edges.sum()
    assert chain.arc_length == pytest.approx(len(chain) * np.sqrt(2.0))


def test_trace_chains_min_length_drop():
    edges = np.zeros((8, 8), bool)
    edges[1, 1:4] = True  # 3 pixels
    assert trace_chains(edges, min_chain_length=8) == []
    assert len(trace_chains(edges, min_chain_length=3)) == 1


def test_trace_chains_membership_unique():
    rng = np.random.default_rng(3)
    edges = rng.random((32, 32)) > 0.7
    chains = trace_chains(edges, min_chain_length=2)
    seen = set()
    for chain in chains:
        for x, y in chain.points.tolist():
            assert (x, y) not in seen
            seen.add((x, y))
            assert edges[y, x]


def test_tron_no_chains_black():
    frame = render_tron([], (16, 16), t=1.0)
    assert not frame.any()


def _single_chain(length=25):
    edges = np.zeros((8, 40), bool)
    edges[4, 5 : 5 + length] = True
    return trace_chains(edges, min_chain_length=2)


def test_tron_periodicity_bit_equal():
    chains = _single_chain()
    L = chains[0].arc_length
    speed = 120.0
    a = render_tron(chains, (40, 8), t=0.0, params={"speed": speed}, seed=9)
    b = render_tron(chains, (40, 8), t=L / speed, params={"speed": speed}, seed=9)
    assert np.array_equal(a, b)


def test_tron_pulse_position_closed_form():
    chains = _single_chain()
    chain = chains[0]
    t = 0.05
    speed, sigma, base = 120.0, 6.0, 0.15
    frame = render_tron(chains, (40, 8), t=t, params={"speed": speed, "pulse_sigma": sigma,
                                                      "base_glow": base, "color": (0, 255, 255)}, seed=9)
    import math
    phase = chain_phase(9, 0, chain.arc_length)
    s = math.fmod(speed * math.fmod(t, chain.arc_length / speed) + phase, chain.arc_length)
    expected = []
    for a in chain.arc_pos:
        d = abs(a - s)
        inten = base + (1 - base) * math.exp(-(d * d) / (2 * sigma * sigma))
        expected.append(math.floor(inten * 255 + 0.5))
    got = [int(frame[y, x, 1]) for x, y in chain.points.tolist()]
    assert got == expected
    # brightest pixel sits at the arc position closest to the pulse center
    brightest = int(np.argmax(got))
    assert abs(chain.arc_pos[brightest] - s) <= 0.5


def test_tron_phase_deterministic_in_seed():
    assert chain_phase(5, 2, 10.0) == chain_phase(5, 2, 10.0)
    assert chain_phase(5, 2, 10.0) != chain_phase(6, 2, 10.0)
    assert 0.0 <= chain_phase(123, 7, 42.0) < 42.0


def test_distort_amplitude_zero_identity():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
    out = render_distort(img, t=0.37, params={"amplitude": 0.0})
    assert np.array_equal(out, img)


def test_distort_periodicity():
    rng = np.random.default_rng(5)
    img = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
    a = render_distort(img, t=0.0)
    b = render_distort(img, t=2.0)  # default temporal_freq 0.5 -> period 2 s
    assert np.array_equal(a, b)


def test_distort_displacement_closed_form():
    img = np.zeros((16, 16, 3), np.uint8)
    img[8, 8] = (255, 255, 255)
    amp, fs, ft, t = 2.0, 0.05, 0.5, 0.3
    out = render_distort(img, t=t, params={"amplitude": amp, "spatial_freq": fs, "temporal_freq": ft})
    import math
    phase = math.fmod(ft * t, 1.0)
    ys, xs = np.nonzero(out.any(axis=2))
    for y, x in zip(ys, xs):
        sx = x + amp * math.sin(2 * math.pi * (fs * y + phase))
        sy = y + amp * math.sin(2 * math.pi * (fs * x + phase))
        # output pixel is lit only if its displaced sample window overlaps (8,8)
        assert abs(sx - 8) < 1.0 and abs(sy - 8) < 1.0


def test_cartoon_constant_maps_to_bin_center():
    img = np.full((12, 12, 3), 100, np.uint8)
    out = render_cartoon(img, params={"levels": 6, "smooth_iters": 1})
    # bin of 100 at 6 levels: floor(100*6/256)=2; center floor(2.5*256/6)=106
    assert (out == 106).all()


def test_cartoon_identity_at_256_levels():
    rng = np.random.default_rng(6)
    img = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
    out = render_cartoon(img, params={"levels": 256, "smooth_iters": 0})
    edges = canny(img, sigma=1.0, low=0.2, high=0.5)
    expected = img.copy()
    expected[edges] = 0
    assert np.array_equal(out, expected)


def test_cartoon_two_tone():
    img = np.zeros((16, 16, 3), np.uint8)
    img[:, 8:] = 240
    out = render_cartoon(img, params={"levels": 4, "smooth_iters": 1})
    # centers: bin 0 -> 32, bin 3 -> 224
    assert (out[:, :4] == 32).all()
    assert (out[:, 12:] == 224).all()
    border = (out == 0).all(axis=2)
    assert border.any()


def test_cartoon_levels_validation():
    with pytest.raises(ValueError):
        render_cartoon(np.zeros((8, 8, 3), np.uint8), params={"levels": 1})


def _square_scene():
    img = np.zeros((48, 48, 3), np.uint8)
    img[12:36, 12:36] = 255
    return img


def test_render_effect_determinism_all_kinds():
    scene = _square_scene()
    shader = "void mainImage(out vec4 c, in vec2 f){ c = vec4(f/iResolution.xy, iTime, 1.0); }"
    for spec in (
        EffectSpec(kind="tron", seed=3, params={"min_chain_length": 4}),
        EffectSpec(kind="distort"),
        EffectSpec(kind="cartoon"),
        EffectSpec(kind="shader", shader_source=shader),
    ):
        a = render_effect(spec, scene, t=0.4)
        b = render_effect(spec, scene, t=0.4)
        assert np.array_equal(a, b), spec.kind


def test_render_effect_tron_confined_to_square_outline():
    scene = _square_scene()
    spec = EffectSpec(kind="tron", params={"min_chain_length": 4})
    frame = render_effect(spec, scene, t=0.1)
    lit = frame.any(axis=2)
    edges = canny(scene, sigma=1.0, low=0.2, high=0.5)
    assert lit.any()
    assert not (lit & ~edges).any()  # glow only on detected outline pixels


def test_render_effect_mask_policies():
    scene = _square_scene()
    member = np.zeros((48, 48), bool)
    member[:, :24] = True
    mask = Mask(width=48, height=48, member=member)

    tron = render_effect(EffectSpec(kind="tron", mask="m", params={"min_chain_length": 4}),
                         scene, t=0.2, mask=mask)
    assert not tron[~member].any()  # black outside

    distort = render_effect(EffectSpec(kind="distort", mask="m"), scene, t=0.2, mask=mask)
    assert np.array_equal(distort[~member], scene[~member])  # source outside

    cartoon = render_effect(EffectSpec(kind="cartoon", mask="m"), scene, t=0.0, mask=mask)
    assert np.array_equal(cartoon[~member], scene[~member])

    shader = EffectSpec(kind="shader", mask="m",
                        shader_source="void mainImage(out vec4 c, in vec2 f){ c = vec4(1.0); }")
    out = render_effect(shader, scene, t=0.0, mask=mask)
    assert np.array_equal(out[~member], scene[~member])
    assert (out[member] == 255).all()


def test_render_effect_distort_identity_inside_mask():
    scene = _square_scene()
    spec = EffectSpec(kind="distort", params={"amplitude": 0.0})
    frame = render_effect(spec, scene, t=1.23)
    assert np.array_equal(frame, scene)


def test_effect_spec_validation():
    with pytest.raises(ValueError):
        EffectSpec(kind="sparkle").validate()
    with pytest.raises(ValueError):
        EffectSpec(kind="shader", shader_source="  ").validate()
    with pytest.raises(ValueError):
        EffectSpec(kind="tron", params={"bogus": 1}).validate()
    with pytest.raises(ValueError):
        EffectSpec(kind="cartoon", params={"levels": 1}).validate()
    spec = EffectSpec.from_json(
        {"kind": "distort", "mask": None, "seed": 4, "params": {"amplitude": 2.0}}
    )
    assert spec.resolved_params()["temporal_freq"] == 0.5


def test_effect_spec_json_round_trip(tmp_path):
    import json

    spec = EffectSpec(kind="tron", mask="m7", seed=12, params={"speed": 90.0})
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_json()))
    loaded = EffectSpec.load(path)
    assert loaded == spec
