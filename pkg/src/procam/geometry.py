"""Stereo-style geometry: pinhole models, ray triangulation, disparity, depth.

Conventions: integer pixel (u, v) is the center of that pixel; the camera
sits at the origin of the world/camera frame; the rig's rotation R and
translation t map camera-frame points into the projector frame
(X_proj = R X_cam + t), so the projector center in camera coordinates is
-R^T t.  The projector is modeled as an inverse camera with its own
pinhole intrinsics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .slcodec import CorrespondenceMap

MIN_RAY_ANGLE = 1e-6  # radians


class DegenerateGeometryError(ValueError):
    """Rays are too close to parallel to triangulate."""


@dataclass(frozen=True)
class PinholeModel:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def validate(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside image")

    def ray_dirs(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Unnormalized ray directions ((u-cx)/fx, (v-cy)/fy, 1) as (..., 3)."""
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        return np.stack(
            [(u - self.cx) / self.fx, (v - self.cy) / self.fy, np.ones_like(u)], axis=-1
        )

    def project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Project (..., 3) points to continuous pixel coords; returns (x, y, z)."""
        points = np.asarray(points, dtype=np.float64)
        z = points[..., 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = self.fx * points[..., 0] / z + self.cx
            y = self.fy * points[..., 1] / z + self.cy
        return x, y, z

    def to_json(self) -> dict:
        return {
            "fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
            "width": self.width, "height": self.height,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PinholeModel":
        m = cls(
            fx=float(obj["fx"]), fy=float(obj["fy"]),
            cx=float(obj["cx"]), cy=float(obj["cy"]),
            width=int(obj["width"]), height=int(obj["height"]),
        )
        m.validate()
        return m


@dataclass(frozen=True)
class StereoRig:
    camera: PinholeModel
    projector: PinholeModel
    rotation: np.ndarray  # (3, 3) projector-from-camera
    translation: np.ndarray  # (3,) meters

    def validate(self) -> None:
        self.camera.validate()
        self.projector.validate()
        R = np.asarray(self.rotation, dtype=np.float64)
        if R.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-9:
            raise ValueError("rotation is not orthonormal within 1e-9")
        t = np.asarray(self.translation, dtype=np.float64)
        if t.shape != (3,) or np.linalg.norm(t) == 0:
            raise ValueError("translation must be a nonzero 3-vector")

    @property
    def projector_center(self) -> np.ndarray:
        """Projector center of projection in the camera frame."""
        return -np.asarray(self.rotation).T @ np.asarray(self.translation)

    def projector_ray_dirs(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Projector pixel rays expressed in the camera frame, (..., 3)."""
        d = self.projector.ray_dirs(x, y)
        return d @ np.asarray(self.rotation, dtype=np.float64)  # = (R^T d^T)^T

    def to_projector_frame(self, points: np.ndarray) -> np.ndarray:
        R = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        return points @ R.T + t

    def to_json(self) -> dict:
        return {
            "camera": self.camera.to_json(),
            "projector": self.projector.to_json(),
            "rotation": [float(v) for v in np.asarray(self.rotation).reshape(9)],
            "translation": [float(v) for v in np.asarray(self.translation)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StereoRig":
        rig = cls(
            camera=PinholeModel.from_json(obj["camera"]),
            projector=PinholeModel.from_json(obj["projector"]),
            rotation=np.asarray(obj["rotation"], dtype=np.float64).reshape(3, 3),
            translation=np.asarray(obj["translation"], dtype=np.float64),
        )
        rig.validate()
        return rig


def load_rig(path: str | Path) -> StereoRig:
    return StereoRig.from_json(json.loads(Path(path).read_text()))


def save_rig(rig: StereoRig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(rig.to_json(), indent=2))


@dataclass
class DepthMap:
    width: int
    height: int
    depth: np.ndarray  # (H, W) float32, NaN where invalid

    def validate(self) -> None:
        if self.depth.shape != (self.height, self.width):
            raise ValueError("depth has wrong shape")
        finite = self.depth[np.isfinite(self.depth)]
        if finite.size and finite.min() <= 0:
            raise ValueError("finite depths must be positive")

    def save_pfm(self, path: str | Path) -> None:
        """Write grayscale PFM, little-endian (scale -1.0), NaN for invalid."""
        header = f"Pf\n{self.width} {self.height}\n-1.0\n".encode("ascii")
        rows = np.flipud(self.depth.astype("<f4"))  # PFM stores bottom row first
        Path(path).write_bytes(header + rows.tobytes())

    @classmethod
    def load_pfm(cls, path: str | Path) -> "DepthMap":
        data = Path(path).read_bytes()
        parts = data.split(b"\n", 3)
        if parts[0] != b"Pf":
            raise ValueError(f"{path}: not a grayscale PFM")
        w, h = (int(v) for v in parts[1].split())
        scale = float(parts[2])
        dtype = "<f4" if scale < 0 else ">f4"
        depth = np.frombuffer(parts[3], dtype=dtype, count=w * h).reshape(h, w)
        return cls(width=w, height=h, depth=np.flipud(depth).astype(np.float32))


def disparity_map(corr: CorrespondenceMap, axis: str) -> np.ndarray:
    """Projector-minus-camera coordinate along an axis; NaN where invalid."""
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if axis == "x":
        cam = np.arange(corr.camera_width, dtype=np.float64)[None, :]
        disp = corr.proj_x.astype(np.float64) - cam
    else:
        cam = np.arange(corr.camera_height, dtype=np.float64)[:, None]
        disp = corr.proj_y.astype(np.float64) - cam
    return np.where(corr.valid, disp, np.nan)


def _closest_point_params(o1, d1, o2, d2):
    """Segment parameters (s, t, denom, a*c) for closest points of two rays."""
    a = np.sum(d1 * d1, axis=-1)
    b = np.sum(d1 * d2, axis=-1)
    c = np.sum(d2 * d2, axis=-1)
    w0 = o1 - o2
    d = np.sum(d1 * w0, axis=-1)
    e = np.sum(d2 * w0, axis=-1)
    denom = a * c - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (b * e - c * d) / denom
        t = (a * e - b * d) / denom
    return s, t, denom, a * c


def triangulate(
    rig: StereoRig, cam_pixel: tuple[float, float], proj_pixel: tuple[float, float]
) -> np.ndarray:
    """Midpoint of the shortest segment between the two pixel rays (camera frame)."""
    d1 = rig.camera.ray_dirs(np.float64(cam_pixel[0]), np.float64(cam_pixel[1]))
    d2 = rig.projector_ray_dirs(np.float64(proj_pixel[0]), np.float64(proj_pixel[1]))
    o1 = np.zeros(3)
    o2 = rig.projector_center
    s, t, denom, ac = _closest_point_params(o1, d1, o2, d2)
    # sin^2 of the ray angle; guards near-parallel rays
    if denom / ac < MIN_RAY_ANGLE**2:
        raise DegenerateGeometryError("rays are nearly parallel")
    p1 = o1 + s * d1
    p2 = o2 + t * d2
    return (p1 + p2) / 2.0


def depth_map(rig: StereoRig, corr: CorrespondenceMap) -> DepthMap:
    """Triangulate every valid correspondence; returns camera-z depth in meters."""
    if (corr.camera_width, corr.camera_height) != (rig.camera.width, rig.camera.height):
        raise ValueError("correspondence/camera size mismatch")
    if (corr.projector_width, corr.projector_height) != (rig.projector.width, rig.projector.height):
        raise ValueError("correspondence/projector size mismatch")

    h, w = corr.camera_height, corr.camera_width
    depth = np.full((h, w), np.nan, dtype=np.float32)
    vy, vx = np.nonzero(corr.valid)
    if vy.size == 0:
        return DepthMap(width=w, height=h, depth=depth)

    d1 = rig.camera.ray_dirs(vx.astype(np.float64), vy.astype(np.float64))
    d2 = rig.projector_ray_dirs(
        corr.proj_x[vy, vx].astype(np.float64), corr.proj_y[vy, vx].astype(np.float64)
    )
    o1 = np.zeros(3)
    o2 = rig.projector_center
    s, t, denom, ac = _closest_point_params(o1, d1, o2, d2)
    z = (s * d1[:, 2] + (o2[2] + t * d2[:, 2])) / 2.0
    ok = (denom / ac >= MIN_RAY_ANGLE**2) & (z > 0) & np.isfinite(z)
    depth[vy[ok], vx[ok]] = z[ok].astype(np.float32)
    dm = DepthMap(width=w, height=h, depth=depth)
    dm.validate()
    return dm


def rot_x(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=np.float64)


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=np.float64)


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=np.float64)


def rig_from_pose(
    camera: PinholeModel,
    projector: PinholeModel,
    rotation: np.ndarray,
    projector_center: np.ndarray,
) -> StereoRig:
    """Build a rig from the projector's pose in the camera frame."""
    R = np.asarray(rotation, dtype=np.float64)
    t = -R @ np.asarray(projector_center, dtype=np.float64)
    rig = StereoRig(camera=camera, projector=projector, rotation=R, translation=t)
    rig.validate()
    return rig
