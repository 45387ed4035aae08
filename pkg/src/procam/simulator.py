"""Virtual projector-camera rig over textured planes.

Synthesizes pattern captures with exact geometric ground truth so the whole
pipeline is verifiable without hardware.  Geometry is evaluated once per
scene (camera-ray hits, projector mapping, occlusion) and reused across
pattern frames.

Pinned conventions: pattern light is sampled nearest-neighbor at the
projected point (lit pixel index = floor(coord + 0.5)); albedo is sampled
bilinearly in plane-local uv; capture noise for frame i is the field
``default_rng([seed, i]).standard_normal()`` scaled by noise_sigma, applied
in linear space before 8-bit quantization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import StereoRig
from .images import load_rgb
from .slcodec import CaptureSet, CorrespondenceMap, PatternSet

_LUMA = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Plane:
    """Textured parallelogram: corner + a*edge_u + b*edge_v, a,b in [0,1]."""

    corner: np.ndarray  # (3,) meters
    edge_u: np.ndarray  # (3,) meters
    edge_v: np.ndarray  # (3,) meters
    texture: np.ndarray  # (H, W, 3) uint8 albedo

    def validate(self) -> None:
        n = np.cross(self.edge_u, self.edge_v)
        if np.linalg.norm(n) == 0:
            raise ValueError("plane edges are parallel (zero area)")
        if self.texture.ndim != 3 or self.texture.shape[2] != 3 or self.texture.dtype != np.uint8:
            raise ValueError("texture must be (H, W, 3) uint8")


@dataclass
class SceneModel:
    planes: list[Plane]
    rig: StereoRig
    ambient: float = 0.2
    projector_gain: float = 1.0
    noise_sigma: float = 0.0
    gamma: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if not self.planes:
            raise ValueError("scene has no planes")
        for p in self.planes:
            p.validate()
        self.rig.validate()
        if not (0.0 <= self.ambient <= 1.0 and 0.0 <= self.projector_gain <= 1.0):
            raise ValueError("ambient and projector_gain must be in [0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    def to_json(self, texture_paths: list[str]) -> dict:
        return {
            "rig": self.rig.to_json(),
            "planes": [
                {
                    "corner": [float(v) for v in p.corner],
                    "edge_u": [float(v) for v in p.edge_u],
                    "edge_v": [float(v) for v in p.edge_v],
                    "texture": texture_paths[i],
                }
                for i, p in enumerate(self.planes)
            ],
            "ambient": self.ambient,
            "projector_gain": self.projector_gain,
            "noise_sigma": self.noise_sigma,
            "gamma": self.gamma,
            "seed": self.seed,
        }


def load_scene(path: str | Path) -> SceneModel:
    """Load scene.json; plane texture paths resolve relative to the file."""
    p = Path(path)
    obj = json.loads(p.read_text())
    planes = []
    for pl in obj["planes"]:
        tex_path = Path(pl["texture"])
        if not tex_path.is_absolute():
            tex_path = p.parent / tex_path
        planes.append(
            Plane(
                corner=np.asarray(pl["corner"], dtype=np.float64),
                edge_u=np.asarray(pl["edge_u"], dtype=np.float64),
                edge_v=np.asarray(pl["edge_v"], dtype=np.float64),
                texture=load_rgb(tex_path),
            )
        )
    scene = SceneModel(
        planes=planes,
        rig=StereoRig.from_json(obj["rig"]),
        ambient=float(obj.get("ambient", 0.2)),
        projector_gain=float(obj.get("projector_gain", 1.0)),
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        gamma=float(obj.get("gamma", 1.0)),
        seed=int(obj.get("seed", 0)),
    )
    scene.validate()
    return scene


def scene_from_json(obj: dict, textures: dict[str, np.ndarray] | None = None) -> SceneModel:
    """Build a scene from an inline JSON object.

    Plane textures may be inline under "texture_rgb" as nested lists, or a
    "texture" key naming an entry of the `textures` mapping.
    """
    planes = []
    for pl in obj["planes"]:
        if "texture_rgb" in pl:
            tex = np.asarray(pl["texture_rgb"], dtype=np.uint8)
        elif textures is not None and pl.get("texture") in textures:
            tex = textures[pl["texture"]]
        else:
            raise ValueError("plane texture missing (use texture_rgb inline)")
        planes.append(
            Plane(
                corner=np.asarray(pl["corner"], dtype=np.float64),
                edge_u=np.asarray(pl["edge_u"], dtype=np.float64),
                edge_v=np.asarray(pl["edge_v"], dtype=np.float64),
                texture=tex,
            )
        )
    scene = SceneModel(
        planes=planes,
        rig=StereoRig.from_json(obj["rig"]),
        ambient=float(obj.get("ambient", 0.2)),
        projector_gain=float(obj.get("projector_gain", 1.0)),
        noise_sigma=float(obj.get("noise_sigma", 0.0)),
        gamma=float(obj.get("gamma", 1.0)),
        seed=int(obj.get("seed", 0)),
    )
    scene.validate()
    return scene


def _det3(u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.sum(u * np.cross(v, w), axis=-1)


def _intersect_rays(scene: SceneModel, origin: np.ndarray, dirs: np.ndarray, front_only: bool):
    """Nearest plane hit for rays origin + s*dirs.

    Returns (s, plane_index, a, b); s = inf where nothing is hit.  With
    front_only, back-facing hits (normal pointing away from the ray origin)
    are ignored.
    """
    n = dirs.shape[0]
    best_s = np.full(n, np.inf)
    best_plane = np.full(n, -1, dtype=np.int32)
    best_a = np.zeros(n)
    best_b = np.zeros(n)
    for i, plane in enumerate(scene.planes):
        eu, ev = plane.edge_u, plane.edge_v
        rhs = plane.corner - origin
        denom = _det3(dirs, -eu[None, :], -ev[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            s = _det3(np.broadcast_to(rhs, dirs.shape), -eu[None, :], -ev[None, :]) / denom
            a = _det3(dirs, np.broadcast_to(rhs, dirs.shape), -ev[None, :]) / denom
            b = _det3(dirs, -eu[None, :], np.broadcast_to(rhs, dirs.shape)) / denom
        hit = (s > 1e-12) & (a >= 0) & (a <= 1) & (b >= 0) & (b <= 1) & np.isfinite(s)
        if front_only:
            hit &= np.sum(dirs * np.cross(eu, ev), axis=-1) < 0
        closer = hit & (s < best_s)
        best_s = np.where(closer, s, best_s)
        best_plane = np.where(closer, i, best_plane)
        best_a = np.where(closer, a, best_a)
        best_b = np.where(closer, b, best_b)
    return best_s, best_plane, best_a, best_b


def _sample_texture(texture: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bilinear albedo lookup at plane-local uv in [0,1]^2; returns (..., 3) in [0,1]."""
    th, tw = texture.shape[:2]
    x = np.clip(a, 0.0, 1.0) * (tw - 1)
    y = np.clip(b, 0.0, 1.0) * (th - 1)
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    x1 = np.minimum(x0 + 1, tw - 1)
    y1 = np.minimum(y0 + 1, th - 1)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    tex = texture.astype(np.float64) / 255.0
    top = tex[y0, x0] * (1 - fx) + tex[y0, x1] * fx
    bot = tex[y1, x0] * (1 - fx) + tex[y1, x1] * fx
    return top * (1 - fy) + bot * fy


class _Geometry:
    """Per-scene camera geometry, computed once and reused per frame."""

    def __init__(self, scene: SceneModel):
        rig = scene.rig
        cam = rig.camera
        h, w = cam.height, cam.width
        vv, uu = np.mgrid[0:h, 0:w]
        dirs = cam.ray_dirs(uu.reshape(-1).astype(np.float64), vv.reshape(-1).astype(np.float64))

        s, plane_idx, a, b = _intersect_rays(scene, np.zeros(3), dirs, front_only=True)
        self.hit = plane_idx >= 0
        self.plane_idx = plane_idx
        points = dirs * s[:, None]
        self.points = np.where(self.hit[:, None], points, 0.0)

        # albedo at the camera hit
        self.albedo = np.zeros((h * w, 3))
        for i, plane in enumerate(scene.planes):
            sel = self.hit & (plane_idx == i)
            if sel.any():
                self.albedo[sel] = _sample_texture(plane.texture, a[sel], b[sel])

        # continuous projector coordinates of the hit points
        proj_pts = rig.to_projector_frame(self.points)
        px, py, pz = rig.projector.project(proj_pts)
        self.proj_x = px
        self.proj_y = py
        in_front = self.hit & (pz > 0)

        # lit projector pixel: nearest sample of the projected point.  A point
        # is physically lit when that pixel index exists; ground-truth
        # validity additionally requires the continuous coordinate in
        # [0, size) so the correspondence-map invariant holds.
        nx = np.floor(px + 0.5).astype(np.int64)
        ny = np.floor(py + 0.5).astype(np.int64)
        pw, ph = rig.projector.width, rig.projector.height
        in_frustum = in_front & (nx >= 0) & (nx < pw) & (ny >= 0) & (ny < ph)
        in_continuous = in_front & (px >= 0) & (px < pw) & (py >= 0) & (py < ph)
        self.lit_x = np.clip(nx, 0, pw - 1)
        self.lit_y = np.clip(ny, 0, ph - 1)

        # occlusion: shadow ray from projector center toward the hit point
        proj_center = rig.projector_center
        unoccluded = in_frustum.copy()
        idx = np.nonzero(in_frustum)[0]
        if idx.size:
            seg = self.points[idx] - proj_center[None, :]
            s2, _p, _a, _b = _intersect_rays(scene, proj_center, seg, front_only=False)
            unoccluded[idx] = ~(s2 < 1.0 - 1e-6)
        self.lit = unoccluded  # physically lit: in frustum and unoccluded
        self.gt_valid = in_continuous & unoccluded

        self.shape = (h, w)


def _geometry(scene: SceneModel) -> _Geometry:
    geom = getattr(scene, "_geom", None)
    if geom is None:
        geom = _Geometry(scene)
        scene._geom = geom  # scene treated as immutable after construction
    return geom


def simulate_capture(scene: SceneModel, pattern: np.ndarray, frame_index: int = 0) -> np.ndarray:
    """Render one camera capture of the scene under a projected pattern."""
    scene.validate()
    proj = scene.rig.projector
    if pattern.shape != (proj.height, proj.width):
        raise ValueError(
            f"pattern size {pattern.shape[::-1]} does not match projector "
            f"{(proj.width, proj.height)}"
        )
    g = _geometry(scene)
    albedo_luma = (
        _LUMA[0] * g.albedo[:, 0] + _LUMA[1] * g.albedo[:, 1] + _LUMA[2] * g.albedo[:, 2]
    )
    sample = pattern.astype(np.float64)[g.lit_y, g.lit_x] / 255.0
    contrib = np.where(g.lit, scene.projector_gain * sample**scene.gamma, 0.0)
    lum = albedo_luma * np.clip(scene.ambient + contrib, 0.0, 1.0)
    lum = np.where(g.hit, lum, 0.0)
    if scene.noise_sigma > 0:
        rng = np.random.default_rng([scene.seed, frame_index])
        lum = lum + rng.standard_normal(lum.shape) * scene.noise_sigma
    lum = np.clip(lum, 0.0, 1.0)
    return np.floor(lum * 255.0 + 0.5).astype(np.uint8).reshape(g.shape)


def simulate_captures(scene: SceneModel, patterns: PatternSet) -> CaptureSet:
    """Capture every pattern frame; frame index seeds the per-frame noise."""
    frames = tuple(
        simulate_capture(scene, f, frame_index=i) for i, f in enumerate(patterns.frames)
    )
    cam = scene.rig.camera
    cs = CaptureSet(camera_width=cam.width, camera_height=cam.height, frames=frames)
    cs.validate()
    return cs


def ground_truth(scene: SceneModel) -> CorrespondenceMap:
    """Exact camera-to-projector mapping (real-valued projector coordinates).

    A pixel is valid iff its camera ray hits a plane whose lit projector
    pixel is inside the projector and unoccluded from both devices.
    """
    scene.validate()
    g = _geometry(scene)
    h, w = g.shape
    valid = g.gt_valid.reshape(h, w)
    proj_x = np.where(g.gt_valid, g.proj_x, 0.0).reshape(h, w).astype(np.float32)
    proj_y = np.where(g.gt_valid, g.proj_y, 0.0).reshape(h, w).astype(np.float32)
    corr = CorrespondenceMap(
        camera_width=w,
        camera_height=h,
        projector_width=scene.rig.projector.width,
        projector_height=scene.rig.projector.height,
        proj_x=proj_x,
        proj_y=proj_y,
        confidence=np.where(valid, 1.0, 0.0).astype(np.float32),
        valid=valid,
    )
    corr.validate()
    return corr


def render_color(scene: SceneModel, view: str = "camera") -> np.ndarray:
    """Noiseless albedo render from the camera or projector point of view.

    The projector view is the oracle for projector-image reconstruction; the
    camera view is the color input that reconstruction resamples.
    """
    scene.validate()
    if view == "camera":
        g = _geometry(scene)
        rgb = np.where(g.hit[:, None], g.albedo, 0.0)
        h, w = g.shape
        return np.floor(rgb * 255.0 + 0.5).astype(np.uint8).reshape(h, w, 3)
    if view != "projector":
        raise ValueError("view must be 'camera' or 'projector'")

    rig = scene.rig
    proj = rig.projector
    h, w = proj.height, proj.width
    vv, uu = np.mgrid[0:h, 0:w]
    dirs = rig.projector_ray_dirs(
        uu.reshape(-1).astype(np.float64), vv.reshape(-1).astype(np.float64)
    )
    origin = rig.projector_center
    s, plane_idx, a, b = _intersect_rays(scene, origin, dirs, front_only=True)
    hit = plane_idx >= 0
    rgb = np.zeros((h * w, 3))
    for i, plane in enumerate(scene.planes):
        sel = hit & (plane_idx == i)
        if sel.any():
            rgb[sel] = _sample_texture(plane.texture, a[sel], b[sel])
    return np.floor(rgb * 255.0 + 0.5).astype(np.uint8).reshape(h, w, 3)
