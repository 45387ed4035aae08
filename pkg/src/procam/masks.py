"""Vision-assisted selection tools over the projector image.

Tool semantics are pinned for determinism: color similarity is Euclidean
RGB distance; the lasso is a minimum-cost 8-connected path over an
edge-strength cost field with a fixed neighbor tie-break order
(N, NE, E, SE, S, SW, W, NW).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .images import load_gray, save_gray

# (dx, dy) with y down; order is part of the contract
NEIGHBORS_8 = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))

_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


@dataclass
class Mask:
    width: int
    height: int
    member: np.ndarray  # (H, W) bool

    def validate(self) -> None:
        if self.member.shape != (self.height, self.width) or self.member.dtype != bool:
            raise ValueError("member must be (H, W) bool")

    def save(self, path: str | Path) -> None:
        save_gray(path, np.where(self.member, 255, 0).astype(np.uint8))

    @classmethod
    def load(cls, path: str | Path) -> "Mask":
        img = load_gray(path)
        h, w = img.shape
        return cls(width=w, height=h, member=img >= 128)


@dataclass
class LassoPath:
    points: np.ndarray  # (N, 2) int, columns x, y

    def validate(self) -> None:
        p = self.points
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ValueError("path must be (N, 2)")
        steps = np.diff(p, axis=0)
        if steps.size and (np.abs(steps).max() > 1 or (steps == 0).all(axis=1).any()):
            raise ValueError("path steps must be 8-connected and nonzero")


def _color_distance(image: np.ndarray, ref: np.ndarray) -> np.ndarray:
    diff = image.astype(np.float64) - ref.astype(np.float64)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def magic_wand(
    image: np.ndarray, seed: tuple[int, int], tolerance: float, connectivity: int = 4
) -> Mask:
    """Flood fill from a seed pixel: members are connected pixels whose
    Euclidean RGB distance to the seed color is within tolerance."""
    h, w = image.shape[:2]
    x, y = seed
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"seed {seed} out of bounds for {w}x{h} image")
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    dist = _color_distance(image, image[y, x])
    admissible = dist <= tolerance
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    labels, _n = ndimage.label(admissible, structure=structure)
    member = labels == labels[y, x]
    return Mask(width=w, height=h, member=member)


def quick_select(image: np.ndarray, scribble: list[tuple[int, int]], tolerance: float) -> Mask:
    """Region growing from a scribble: pixels within tolerance of the mean
    scribble color are admitted wherever 8-connected to the growing mask."""
    if not scribble:
        raise ValueError("scribble must be nonempty")
    h, w = image.shape[:2]
    for x, y in scribble:
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"scribble pixel ({x}, {y}) out of bounds")
    sx = np.array([p[0] for p in scribble])
    sy = np.array([p[1] for p in scribble])
    ref = image[sy, sx].astype(np.float64).mean(axis=0)

    admissible = _color_distance(image, ref) <= tolerance
    labels, n = ndimage.label(admissible, structure=_STRUCT_8)

    seeds = np.zeros((h, w), dtype=bool)
    seeds[sy, sx] = True
    # components touching the scribble's 8-neighborhood join in full; any
    # further growth would stay within the same 8-connected component
    reach = ndimage.binary_dilation(seeds, structure=_STRUCT_8)
    touched = np.unique(labels[reach & admissible])
    member = seeds.copy()
    if touched.size:
        member |= np.isin(labels, touched[touched > 0])
    return Mask(width=w, height=h, member=member)


def _luminance(image: np.ndarray) -> np.ndarray:
    img = image.astype(np.float64)
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def _sobel_magnitude(lum: np.ndarray) -> np.ndarray:
    p = np.pad(lum, 1, mode="edge")
    gx = (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2]
    )
    gy = (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:]) - (
        p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:]
    )
    return np.sqrt(gx * gx + gy * gy)


def edge_strength(image: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude of luminance, normalized to [0, 1]."""
    mag = _sobel_magnitude(_luminance(image))
    peak = mag.max()
    return mag / peak if peak > 0 else mag


def _min_cost_path(
    cost_field: np.ndarray, start: tuple[int, int], goal: tuple[int, int]
) -> tuple[list[tuple[int, int]], float]:
    """Dijkstra over the 8-connected grid; stepping onto pixel p costs
    cost_field[p] * step length.  Ties resolved by push order, neighbors
    expanded in NEIGHBORS_8 order."""
    h, w = cost_field.shape
    dist = np.full((h, w), np.inf)
    settled = np.zeros((h, w), dtype=bool)
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    sx, sy = start
    gx, gy = goal
    dist[sy, sx] = 0.0
    counter = 0
    heap: list[tuple[float, int, int, int]] = [(0.0, counter, sx, sy)]
    while heap:
        d, _c, x, y = heapq.heappop(heap)
        if settled[y, x]:
            continue
        settled[y, x] = True
        if (x, y) == (gx, gy):
            break
        for dx, dy in NEIGHBORS_8:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h) or settled[ny, nx]:
                continue
            step = 1.4142135623730951 if dx and dy else 1.0
            nd = d + cost_field[ny, nx] * step
            if nd < dist[ny, nx]:
                dist[ny, nx] = nd
                parent[(nx, ny)] = (x, y)
                counter += 1
                heapq.heappush(heap, (nd, counter, nx, ny))
    if not settled[gy, gx]:
        raise RuntimeError("goal unreachable")  # cannot happen on a full grid
    path = [(gx, gy)]
    while path[-1] != (sx, sy):
        path.append(parent[path[-1]])
    path.reverse()
    return path, float(dist[gy, gx])


def magnetic_lasso(image: np.ndarray, anchors: list[tuple[int, int]]) -> LassoPath:
    """Edge-following path through the anchors: per segment, the minimum-cost
    8-connected path where cost is (1 - edge_strength) * step length."""
    if len(anchors) < 2:
        raise ValueError("need at least 2 anchors")
    h, w = image.shape[:2]
    for x, y in anchors:
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"anchor ({x}, {y}) out of bounds")
    cost_field = 1.0 - edge_strength(image)
    points: list[tuple[int, int]] = []
    for a, b in zip(anchors[:-1], anchors[1:]):
        seg, _cost = _min_cost_path(cost_field, tuple(a), tuple(b))
        if points:
            seg = seg[1:]  # shared anchor
        points.extend(seg)
    # drop zero-length steps from repeated anchors
    deduped = [points[0]]
    for p in points[1:]:
        if p != deduped[-1]:
            deduped.append(p)
    path = LassoPath(points=np.array(deduped, dtype=np.int64))
    path.validate()
    return path


def lasso_cost(image: np.ndarray, path: LassoPath) -> float:
    """Total cost of a path under the lasso cost model (for verification)."""
    cost_field = 1.0 - edge_strength(image)
    total = 0.0
    pts = path.points
    for i in range(1, len(pts)):
        dx = int(pts[i, 0] - pts[i - 1, 0])
        dy = int(pts[i, 1] - pts[i - 1, 1])
        step = 1.4142135623730951 if dx and dy else 1.0
        total += cost_field[pts[i, 1], pts[i, 0]] * step
    return total


def _bresenham(p0: tuple[int, int], p1: tuple[int, int]) -> list[tuple[int, int]]:
    x0, y0 = p0
    x1, y1 = p1
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    out = [(x0, y0)]
    while (x0, y0) != (x1, y1):
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
        out.append((x0, y0))
    return out


def path_to_mask(path: LassoPath, size: tuple[int, int]) -> Mask:
    """Even-odd rasterization of the closed path (closing segment implied).

    Degenerate paths (zero enclosed area) produce an empty mask.
    """
    w, h = size
    pts = [(int(x), int(y)) for x, y in path.points]
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    member = np.zeros((h, w), dtype=bool)
    if len(pts) < 3:
        return Mask(width=w, height=h, member=member)

    # shoelace area; exactly zero for collinear/degenerate rings
    area2 = 0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        area2 += x0 * y1 - x1 * y0
    if area2 == 0:
        return Mask(width=w, height=h, member=member)

    # scanline even-odd fill over pixel centers
    for y in range(h):
        crossings = []
        for i in range(len(pts)):
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % len(pts)]
            if y0 == y1:
                continue
            if min(y0, y1) <= y < max(y0, y1):
                crossings.append(x0 + (y - y0) * (x1 - x0) / (y1 - y0))
        crossings.sort()
        for a, b in zip(crossings[::2], crossings[1::2]):
            lo = max(0, int(np.ceil(a)))
            hi = min(w - 1, int(np.ceil(b)) - 1)
            if lo <= hi:
                member[y, lo : hi + 1] = True

    # boundary pixels (path plus the implicit closing segment)
    boundary = list(pts)
    boundary.extend(_bresenham(pts[-1], pts[0]))
    for x, y in boundary:
        if 0 <= x < w and 0 <= y < h:
            member[y, x] = True
    return Mask(width=w, height=h, member=member)
