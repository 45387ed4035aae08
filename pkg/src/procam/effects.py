"""Procedural effects over the projector image.

The Canny variant is pinned down to arithmetic order so an independent
reference implementation agrees bit for bit: Rec.601 luminance
(0.299 R + 0.587 G + 0.114 B) in float64; separable Gaussian blur with
kernel radius ceil(3 sigma), taps accumulated in index order, replicate
border; Sobel as an explicit 3x3 expression, replicate border; direction
quantized to 4 bins by comparing |gy| against |gx| * tan(pi/8) (no trig at
runtime); non-maximum suppression keeps a pixel iff its magnitude is >= the
neighbor at the positive direction offset and > the neighbor at the
negative offset (out-of-bounds neighbors count as 0); thresholds are
fractions of the pre-suppression maximum magnitude; weak pixels survive iff
8-connected to a strong pixel through weak pixels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .masks import NEIGHBORS_8, Mask
from .projimage import ProjectorImage

TAN_PI_8 = 0.4142135623730951
SQRT2 = 1.4142135623730951

EFFECT_KINDS = ("tron", "distort", "cartoon", "shader")

TRON_DEFAULTS = {
    "speed": 120.0,  # px/s
    "pulse_sigma": 6.0,  # px
    "base_glow": 0.15,
    "color": (0, 255, 255),
    "sigma": 1.0,  # edge-detection blur
    "low": 0.2,
    "high": 0.5,
    "min_chain_length": 8,
}
DISTORT_DEFAULTS = {
    "amplitude": 4.0,  # px
    "spatial_freq": 0.05,  # 1/px
    "temporal_freq": 0.5,  # Hz
}
CARTOON_DEFAULTS = {
    "smooth_iters": 3,
    "sigma_spatial": 3.0,  # px
    "sigma_range": 30.0,  # RGB units
    "levels": 6,
}


@dataclass
class EffectSpec:
    kind: str
    mask: str | None = None  # mask id (service) or mask file path (CLI)
    seed: int = 0
    params: dict = field(default_factory=dict)
    shader_source: str = ""

    def validate(self) -> None:
        if self.kind not in EFFECT_KINDS:
            raise ValueError(f"unknown effect kind: {self.kind!r}")
        if self.kind == "shader" and not self.shader_source.strip():
            raise ValueError("shader effects require shader_source")
        defaults = {
            "tron": TRON_DEFAULTS,
            "distort": DISTORT_DEFAULTS,
            "cartoon": CARTOON_DEFAULTS,
            "shader": {},
        }[self.kind]
        for key in self.params:
            if key not in defaults:
                raise ValueError(f"unknown parameter {key!r} for kind {self.kind!r}")
        p = {**defaults, **self.params}
        if self.kind == "tron" and (p["speed"] <= 0 or p["pulse_sigma"] <= 0):
            raise ValueError("tron speed and pulse_sigma must be positive")
        if self.kind == "distort" and (p["amplitude"] < 0 or p["temporal_freq"] <= 0):
            raise ValueError("distort amplitude must be >= 0 and temporal_freq > 0")
        if self.kind == "cartoon" and p["levels"] < 2:
            raise ValueError("cartoon needs at least 2 levels")

    def resolved_params(self) -> dict:
        defaults = {
            "tron": TRON_DEFAULTS,
            "distort": DISTORT_DEFAULTS,
            "cartoon": CARTOON_DEFAULTS,
            "shader": {},
        }[self.kind]
        return {**defaults, **self.params}

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "mask": self.mask,
            "seed": self.seed,
            "params": self.params,
            "shader_source": self.shader_source,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EffectSpec":
        spec = cls(
            kind=obj.get("kind", ""),
            mask=obj.get("mask"),
            seed=int(obj.get("seed", 0)),
            params=dict(obj.get("params", {})),
            shader_source=obj.get("shader_source", "") or "",
        )
        spec.validate()
        return spec

    @classmethod
    def load(cls, path: str | Path) -> "EffectSpec":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass
class EdgeChain:
    points: np.ndarray  # (N, 2) int, columns x, y
    arc_length: float
    is_loop: bool
    arc_pos: np.ndarray  # (N,) cumulative arc position of each pixel

    def __len__(self) -> int:
        return len(self.points)


def _gauss_kernel(sigma: float) -> list[float]:
    # pure-Python construction with sequential normalization keeps the taps
    # bit-identical to a straightforward reference implementation
    radius = math.ceil(3.0 * sigma)
    taps = [math.exp(-(i * i) / (2.0 * sigma * sigma)) for i in range(-radius, radius + 1)]
    total = 0.0
    for t in taps:
        total += t
    return [t / total for t in taps]


def _blur(lum: np.ndarray, sigma: float) -> np.ndarray:
    taps = _gauss_kernel(sigma)
    radius = (len(taps) - 1) // 2
    h, w = lum.shape
    padded = np.pad(lum, ((0, 0), (radius, radius)), mode="edge")
    horiz = np.zeros_like(lum)
    for j, i in enumerate(range(-radius, radius + 1)):
        horiz += taps[j] * padded[:, radius + i : radius + i + w]
    padded = np.pad(horiz, ((radius, radius), (0, 0)), mode="edge")
    out = np.zeros_like(lum)
    for j, i in enumerate(range(-radius, radius + 1)):
        out += taps[j] * padded[radius + i : radius + i + h, :]
    return out


def _sobel(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.pad(p, 1, mode="edge")
    gx = (q[:-2, 2:] + 2.0 * q[1:-1, 2:] + q[2:, 2:]) - (
        q[:-2, :-2] + 2.0 * q[1:-1, :-2] + q[2:, :-2]
    )
    gy = (q[2:, :-2] + 2.0 * q[2:, 1:-1] + q[2:, 2:]) - (
        q[:-2, :-2] + 2.0 * q[:-2, 1:-1] + q[:-2, 2:]
    )
    return gx, gy


def _shifted(mag: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Magnitude of the neighbor at (dx, dy), 0 outside the image."""
    h, w = mag.shape
    out = np.zeros_like(mag)
    src_y = slice(max(0, dy), h + min(0, dy))
    src_x = slice(max(0, dx), w + min(0, dx))
    dst_y = slice(max(0, -dy), h + min(0, -dy))
    dst_x = slice(max(0, -dx), w + min(0, -dx))
    out[dst_y, dst_x] = mag[src_y, src_x]
    return out


def canny(image: np.ndarray, sigma: float = 1.0, low: float = 0.2, high: float = 0.5) -> np.ndarray:
    """Binary edge map of an RGB image under the pinned pipeline."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if not (0.0 <= low < high <= 1.0):
        raise ValueError("thresholds must satisfy 0 <= low < high <= 1")
    img = image.astype(np.float64)
    lum = 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]
    blurred = _blur(lum, sigma)
    gx, gy = _sobel(blurred)
    mag = np.sqrt(gx * gx + gy * gy)

    ax = np.abs(gx)
    ay = np.abs(gy)
    horiz = ay <= ax * TAN_PI_8
    vert = ~horiz & (ax <= ay * TAN_PI_8)
    diag_main = ~horiz & ~vert & (gx * gy > 0)  # gradient along (+1, +1)
    diag_anti = ~horiz & ~vert & ~diag_main

    keep = np.zeros(mag.shape, dtype=bool)
    for sel, (dx, dy) in (
        (horiz, (1, 0)),
        (vert, (0, 1)),
        (diag_main, (1, 1)),
        (diag_anti, (1, -1)),
    ):
        pos = _shifted(mag, dx, dy)
        neg = _shifted(mag, -dx, -dy)
        keep |= sel & (mag >= pos) & (mag > neg)

    gmax = mag.max()
    if gmax == 0:
        return np.zeros(mag.shape, dtype=bool)
    strong = keep & (mag >= high * gmax)
    weak = keep & (mag >= low * gmax)
    edges = ndimage.binary_dilation(strong, structure=np.ones((3, 3), dtype=bool), iterations=0, mask=weak)
    return edges


def trace_chains(edges: np.ndarray, min_chain_length: int = 8) -> list[EdgeChain]:
    """Link edge pixels into 8-connected chains.

    Pixels with more than two edge neighbors are junctions: they split
    chains and belong to none.  Walks start at endpoints in scan order,
    then remaining pixels are traced as loops.  Chains shorter than
    min_chain_length pixels are dropped.
    """
    h, w = edges.shape
    ys, xs = np.nonzero(edges)
    edge_set = set(zip(xs.tolist(), ys.tolist()))
    if not edge_set:
        return []

    def neighbors(p):
        x, y = p
        return [(x + dx, y + dy) for dx, dy in NEIGHBORS_8 if (x + dx, y + dy) in edge_set]

    degree = {p: len(neighbors(p)) for p in edge_set}
    junctions = {p for p, d in degree.items() if d > 2}
    walkable = edge_set - junctions

    def walk_neighbors(p):
        x, y = p
        return [
            (x + dx, y + dy) for dx, dy in NEIGHBORS_8 if (x + dx, y + dy) in walkable
        ]

    visited: set[tuple[int, int]] = set()
    chains: list[EdgeChain] = []

    def build(points: list[tuple[int, int]], is_loop: bool) -> None:
        if len(points) < max(min_chain_length, 1):
            return
        arc = np.zeros(len(points))
        for i in range(1, len(points)):
            dx = points[i][0] - points[i - 1][0]
            dy = points[i][1] - points[i - 1][1]
            arc[i] = arc[i - 1] + (SQRT2 if dx and dy else 1.0)
        if is_loop:
            dx = points[0][0] - points[-1][0]
            dy = points[0][1] - points[-1][1]
            total = arc[-1] + (SQRT2 if dx and dy else 1.0)
        else:
            total = float(arc[-1])
        chains.append(
            EdgeChain(
                points=np.array(points, dtype=np.int64),
                arc_length=float(total),
                is_loop=is_loop,
                arc_pos=arc,
            )
        )

    def walk(start: tuple[int, int]) -> list[tuple[int, int]]:
        points = [start]
        visited.add(start)
        while True:
            nxt = None
            for cand in walk_neighbors(points[-1]):
                if cand not in visited:
                    nxt = cand
                    break
            if nxt is None:
                return points
            visited.add(nxt)
            points.append(nxt)

    # endpoint-first walks, scan order (y, then x) for determinism
    ordered = sorted(edge_set, key=lambda p: (p[1], p[0]))
    for p in ordered:
        if p in walkable and p not in visited and len(walk_neighbors(p)) <= 1:
            build(walk(p), is_loop=False)
    # remaining walkable pixels lie on loops
    for p in ordered:
        if p in walkable and p not in visited:
            pts = walk(p)
            x0, y0 = pts[0]
            x1, y1 = pts[-1]
            closes = len(pts) >= 3 and max(abs(x1 - x0), abs(y1 - y0)) == 1
            build(pts, is_loop=closes)
    return chains


_M64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def chain_phase(seed: int, index: int, arc_length: float) -> float:
    """Deterministic per-chain pulse phase in [0, arc_length)."""
    if arc_length <= 0:
        return 0.0
    u = _splitmix64((seed & _M64) ^ index) / 2.0**64
    return u * arc_length


def render_tron(
    chains: list[EdgeChain],
    size: tuple[int, int],
    t: float,
    params: dict | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Glowing pulses running along edge chains, composited over black."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = {**TRON_DEFAULTS, **(params or {})}
    w, h = size
    speed = float(p["speed"])
    sig = float(p["pulse_sigma"])
    base = float(p["base_glow"])
    color = np.asarray(p["color"], dtype=np.float64)

    frame = np.zeros((h, w, 3), dtype=np.float64)
    for i, chain in enumerate(chains):
        L = chain.arc_length
        if L <= 0:
            continue
        phase = chain_phase(seed, i, L)
        period = L / speed
        tau = math.fmod(t, period)
        s = math.fmod(speed * tau + phase, L)
        d = np.abs(chain.arc_pos - s)
        if chain.is_loop:
            d = np.minimum(d, L - d)
        intensity = base + (1.0 - base) * np.exp(-(d * d) / (2.0 * sig * sig))
        xs = chain.points[:, 0]
        ys = chain.points[:, 1]
        inside = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        xs, ys, inten = xs[inside], ys[inside], intensity[inside]
        # over-composite in chain order
        frame[ys, xs] = inten[:, None] * color[None, :] + (1.0 - inten)[:, None] * frame[ys, xs]
    return np.floor(np.clip(frame, 0, 255) + 0.5).astype(np.uint8)


def _bilinear_sample(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    img = img.astype(np.float64)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def render_distort(source: np.ndarray, t: float, params: dict | None = None) -> np.ndarray:
    """Sinusoidal warp of the source image; phase reduced mod 1 so frames a
    whole temporal period apart are identical."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = {**DISTORT_DEFAULTS, **(params or {})}
    amp = float(p["amplitude"])
    fs = float(p["spatial_freq"])
    ft = float(p["temporal_freq"])
    h, w = source.shape[:2]
    phase = math.fmod(ft * t, 1.0)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    sx = xx + amp * np.sin(2.0 * np.pi * (fs * yy + phase))
    sy = yy + amp * np.sin(2.0 * np.pi * (fs * xx + phase))
    out = _bilinear_sample(source, sx, sy)
    return np.floor(np.clip(out, 0, 255) + 0.5).astype(np.uint8)


def _bilateral(img: np.ndarray, sigma_spatial: float, sigma_range: float) -> np.ndarray:
    """One 5x5 bilateral pass; the window is clipped at image borders."""
    h, w = img.shape[:2]
    wsum = np.zeros((h, w), dtype=np.float64)
    csum = np.zeros((h, w, 3), dtype=np.float64)
    for dy in range(-2, 3):
        for dx in range(-2, 3):
            spatial = math.exp(-(dx * dx + dy * dy) / (2.0 * sigma_spatial * sigma_spatial))
            src_y = slice(max(0, dy), h + min(0, dy))
            src_x = slice(max(0, dx), w + min(0, dx))
            dst_y = slice(max(0, -dy), h + min(0, -dy))
            dst_x = slice(max(0, -dx), w + min(0, -dx))
            nb = img[src_y, src_x]
            center = img[dst_y, dst_x]
            diff = nb - center
            rw = np.exp(-np.sum(diff * diff, axis=-1) / (2.0 * sigma_range * sigma_range))
            wgt = spatial * rw
            wsum[dst_y, dst_x] += wgt
            csum[dst_y, dst_x] += nb * wgt[..., None]
    return csum / wsum[..., None]


def quantize_levels(img: np.ndarray, levels: int) -> np.ndarray:
    """Per-channel quantization to uniform bins, mapping to bin centers."""
    bins = np.minimum(levels - 1, np.floor(img * levels / 256.0)).astype(np.int64)
    return np.floor((bins + 0.5) * 256.0 / levels)


def render_cartoon(source: np.ndarray, params: dict | None = None) -> np.ndarray:
    """Bilateral smoothing, palette quantization, and black edge overlay."""
    p = {**CARTOON_DEFAULTS, **(params or {})}
    if p["levels"] < 2:
        raise ValueError("levels must be >= 2")
    img = source.astype(np.float64)
    for _ in range(int(p["smooth_iters"])):
        img = _bilateral(img, float(p["sigma_spatial"]), float(p["sigma_range"]))
    quant = quantize_levels(img, int(p["levels"]))
    out = np.floor(np.clip(quant, 0, 255) + 0.5).astype(np.uint8)
    edges = canny(out, sigma=1.0, low=0.2, high=0.5)
    out[edges] = 0
    return out


def render_effect(
    spec: EffectSpec,
    scene: ProjectorImage | np.ndarray,
    t: float,
    mask: Mask | None = None,
) -> np.ndarray:
    """Render one effect frame.  Pure in (spec, scene, t, mask): equal inputs
    produce bit-identical frames.

    Outside the mask, tron stays black while distort/cartoon/shader pass the
    source through untouched.
    """
    source = scene.color if isinstance(scene, ProjectorImage) else scene
    if source.ndim != 3 or source.shape[2] != 3:
        raise ValueError("scene must be an RGB image")
    spec.validate()
    params = spec.resolved_params()
    h, w = source.shape[:2]

    if spec.kind == "tron":
        edges = canny(source, sigma=params["sigma"], low=params["low"], high=params["high"])
        chains = trace_chains(edges, min_chain_length=int(params["min_chain_length"]))
        render_params = {k: params[k] for k in ("speed", "pulse_sigma", "base_glow", "color")}
        frame = render_tron(chains, (w, h), t, render_params, seed=spec.seed)
        if mask is not None:
            frame = frame.copy()
            frame[~mask.member] = 0
        return frame

    if spec.kind == "distort":
        frame = render_distort(source, t, params)
    elif spec.kind == "cartoon":
        frame = render_cartoon(source, params)
    elif spec.kind == "shader":
        from . import shaderlang

        program = shaderlang.compile_shader(spec.shader_source)
        uniforms = shaderlang.UniformBlock.for_frame(
            width=w, height=h, time=t, channel0=source
        )
        frame = shaderlang.render_frame(program, uniforms, (w, h))
    else:
        raise ValueError(f"unknown effect kind: {spec.kind!r}")

    if mask is not None:
        frame = frame.copy()
        frame[~mask.member] = source[~mask.member]
    return frame
