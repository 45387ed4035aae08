"""Projector-image reconstruction: resample camera pixels into the
projector's pixel grid by forward splatting through the correspondence map.

Every valid camera pixel splats its color into the four projector pixels
around (proj_x, proj_y) with bilinear weights; accumulated color is
normalized by accumulated weight.  Taps falling outside the projector grid
are dropped.  Pixels that receive no weight are holes; `fill_holes` grows
covered regions into them by bounded dilation averaging.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .images import save_gray16, save_rgb
from .slcodec import CorrespondenceMap


@dataclass
class ProjectorImage:
    width: int
    height: int
    color: np.ndarray  # (H, W, 3) uint8
    coverage: np.ndarray  # (H, W) float32, splat weight (0 = hole)
    filled: np.ndarray = field(default=None)  # (H, W) bool, set by fill_holes

    def __post_init__(self):
        if self.filled is None:
            self.filled = np.zeros((self.height, self.width), dtype=bool)

    def validate(self) -> None:
        if self.color.shape != (self.height, self.width, 3) or self.color.dtype != np.uint8:
            raise ValueError("color must be (H, W, 3) uint8")
        if self.coverage.shape != (self.height, self.width):
            raise ValueError("coverage has wrong shape")
        if (self.coverage < 0).any():
            raise ValueError("coverage must be nonnegative")
        if (self.filled & (self.coverage > 0)).any():
            raise ValueError("filled pixels cannot also be covered")

    @property
    def holes(self) -> np.ndarray:
        return (self.coverage == 0) & ~self.filled

    def save(self, path: str | Path, coverage_path: str | Path | None = None) -> None:
        save_rgb(path, self.color)
        if coverage_path is not None:
            # 16-bit coverage side file, fixed scale of 256 counts per unit weight
            cov = np.clip(self.coverage * 256.0, 0, 65535).astype(np.uint16)
            save_gray16(coverage_path, cov)


def reconstruct(
    corr: CorrespondenceMap, camera_color: np.ndarray, proj_size: tuple[int, int]
) -> ProjectorImage:
    """Splat valid camera pixels into a projector-sized image."""
    if camera_color.shape[:2] != (corr.camera_height, corr.camera_width):
        raise ValueError("camera image size does not match correspondence map")
    if camera_color.ndim != 3 or camera_color.shape[2] != 3:
        raise ValueError("camera image must be RGB")
    pw, ph = proj_size

    vy, vx = np.nonzero(corr.valid)
    acc = np.zeros((ph, pw, 3), dtype=np.float64)
    wsum = np.zeros((ph, pw), dtype=np.float64)

    if vy.size:
        px = corr.proj_x[vy, vx].astype(np.float64)
        py = corr.proj_y[vy, vx].astype(np.float64)
        colors = camera_color[vy, vx].astype(np.float64)

        x0 = np.floor(px).astype(np.int64)
        y0 = np.floor(py).astype(np.int64)
        fx = px - x0
        fy = py - y0
        taps = (
            (x0, y0, (1 - fx) * (1 - fy)),
            (x0 + 1, y0, fx * (1 - fy)),
            (x0, y0 + 1, (1 - fx) * fy),
            (x0 + 1, y0 + 1, fx * fy),
        )
        for tx, ty, w in taps:
            inside = (tx >= 0) & (tx < pw) & (ty >= 0) & (ty < ph)
            np.add.at(wsum, (ty[inside], tx[inside]), w[inside])
            np.add.at(acc, (ty[inside], tx[inside]), colors[inside] * w[inside][:, None])

    covered = wsum > 0
    color = np.zeros((ph, pw, 3), dtype=np.uint8)
    if covered.any():
        norm = acc[covered] / wsum[covered][:, None]
        color[covered] = np.floor(norm + 0.5).astype(np.uint8)
    img = ProjectorImage(width=pw, height=ph, color=color, coverage=wsum.astype(np.float32))
    img.validate()
    return img


def fill_holes(img: ProjectorImage, max_radius: int = 8) -> ProjectorImage:
    """Grow covered regions into holes by up to max_radius dilation passes.

    Each pass, a hole with at least one solid 8-neighbor (covered, or filled
    by an earlier pass) takes the coverage-weighted mean color of those
    neighbors; its working weight becomes their mean coverage.  Holes still
    open after the last pass stay black with coverage 0.
    """
    color = img.color.astype(np.float64)
    weight = img.coverage.astype(np.float64).copy()
    solid = weight > 0
    filled = img.filled.copy()

    for _ in range(max_radius):
        holes = ~solid & ~filled
        if not holes.any():
            break
        wsum = np.zeros_like(weight)
        csum = np.zeros((img.height, img.width, 3), dtype=np.float64)
        count = np.zeros_like(weight)
        live = solid | filled
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dx == 0 and dy == 0:
                    continue
                src_y = slice(max(0, -dy), img.height - max(0, dy))
                src_x = slice(max(0, -dx), img.width - max(0, dx))
                dst_y = slice(max(0, dy), img.height - max(0, -dy))
                dst_x = slice(max(0, dx), img.width - max(0, -dx))
                nb_live = live[src_y, src_x]
                nb_w = np.where(nb_live, weight[src_y, src_x], 0.0)
                wsum[dst_y, dst_x] += nb_w
                csum[dst_y, dst_x] += color[src_y, src_x] * nb_w[..., None]
                count[dst_y, dst_x] += nb_live
        grow = holes & (wsum > 0)
        if not grow.any():
            break
        color[grow] = csum[grow] / wsum[grow][:, None]
        weight[grow] = wsum[grow] / count[grow]
        filled |= grow

    out_color = img.color.copy()
    out_color[filled] = np.floor(color[filled] + 0.5).astype(np.uint8)
    out = ProjectorImage(
        width=img.width,
        height=img.height,
        color=out_color,
        coverage=img.coverage.copy(),
        filled=filled,
    )
    out.validate()
    return out
