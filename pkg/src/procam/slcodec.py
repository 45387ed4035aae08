"""Structured-light pattern generation and Gray-code decoding.

Pattern sequence (fixed, portable): white, black, then for each x bit from
MSB to LSB a bit frame followed by its pixelwise inverse, then y bits the
same way.  Pixel column c is lit in x-bit frame k iff bit k of
``gray_encode(c)`` is set; rows likewise for y.  Decoding compares each bit
frame against its complement per pixel, so no global threshold is needed.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .images import load_gray, save_gray

MAX_DIM = 8192
DEFAULT_CONTRAST_THRESHOLD = 0.05

_LFCM_MAGIC = b"LFCM"
_LFCM_VERSION = 1
_LFCM_RECORD = np.dtype(
    [
        ("proj_x", "<f4"),
        ("proj_y", "<f4"),
        ("confidence", "<f4"),
        ("valid", "u1"),
        ("pad", "3u1"),
    ]
)


class FrameMismatchError(ValueError):
    """Capture frames do not line up with the pattern manifest."""


def gray_encode(n: int) -> int:
    """Reflected binary code of n: n XOR (n >> 1)."""
    return n ^ (n >> 1)


def gray_decode(g: int) -> int:
    """Inverse of gray_encode via prefix XOR."""
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


def bits_for(extent: int) -> int:
    """Number of bit planes needed to index `extent` positions (0 for extent 1)."""
    return int(extent - 1).bit_length()


def role_white() -> str:
    return "white"


def role_black() -> str:
    return "black"


def role_bit(axis: str, k: int, inverse: bool = False) -> str:
    return f"{axis}-bit-inv({k})" if inverse else f"{axis}-bit({k})"


_ROLE_BIT_RE = re.compile(r"^([xy])-bit(-inv)?\((\d+)\)$")


def parse_role(role: str) -> tuple[str, int | None, bool]:
    """Split a role tag into (axis-or-kind, bit index, is-inverse)."""
    if role in ("white", "black"):
        return role, None, False
    m = _ROLE_BIT_RE.match(role)
    if m is None:
        raise ValueError(f"unknown pattern role: {role!r}")
    return m.group(1), int(m.group(3)), m.group(2) is not None


@dataclass(frozen=True)
class PatternManifest:
    """Projector size plus the ordered role tag of every pattern frame."""

    projector_width: int
    projector_height: int
    roles: tuple[str, ...]

    @classmethod
    def for_size(cls, projector_width: int, projector_height: int) -> "PatternManifest":
        roles = [role_white(), role_black()]
        for axis, extent in (("x", projector_width), ("y", projector_height)):
            for k in range(bits_for(extent) - 1, -1, -1):
                roles.append(role_bit(axis, k))
                roles.append(role_bit(axis, k, inverse=True))
        return cls(projector_width, projector_height, tuple(roles))

    @property
    def frame_count(self) -> int:
        return len(self.roles)

    def index_of(self, role: str) -> int:
        return self.roles.index(role)

    def bit_indices(self, axis: str) -> list[tuple[int, int, int]]:
        """(bit k, frame index, inverse frame index) for an axis, MSB first."""
        out = []
        for k in range(bits_for(self._extent(axis)) - 1, -1, -1):
            out.append((k, self.index_of(role_bit(axis, k)), self.index_of(role_bit(axis, k, True))))
        return out

    def _extent(self, axis: str) -> int:
        return self.projector_width if axis == "x" else self.projector_height

    def to_json(self) -> dict:
        return {
            "projector_width": self.projector_width,
            "projector_height": self.projector_height,
            "roles": list(self.roles),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PatternManifest":
        return cls(int(obj["projector_width"]), int(obj["projector_height"]), tuple(obj["roles"]))


@dataclass(frozen=True)
class PatternSet:
    """Ordered 8-bit grayscale pattern frames plus their manifest."""

    manifest: PatternManifest
    frames: tuple[np.ndarray, ...]

    @property
    def projector_width(self) -> int:
        return self.manifest.projector_width

    @property
    def projector_height(self) -> int:
        return self.manifest.projector_height

    def validate(self) -> None:
        w, h = self.projector_width, self.projector_height
        expected = 2 + 2 * bits_for(w) + 2 * bits_for(h)
        if len(self.frames) != expected or len(self.manifest.roles) != expected:
            raise ValueError(f"expected {expected} frames, have {len(self.frames)}")
        for f in self.frames:
            if f.shape != (h, w) or f.dtype != np.uint8:
                raise ValueError("pattern frames must be uint8 of projector size")


@dataclass(frozen=True)
class CaptureSet:
    """Camera images, one per pattern frame, in manifest order."""

    camera_width: int
    camera_height: int
    frames: tuple[np.ndarray, ...]

    def validate(self) -> None:
        for f in self.frames:
            if f.shape != (self.camera_height, self.camera_width):
                raise FrameMismatchError("capture frames differ in size")
            if f.dtype != np.uint8:
                raise ValueError("capture frames must be uint8")


@dataclass
class CorrespondenceMap:
    """Per camera pixel: projector coordinate, confidence in [0,1], validity.

    Invalid pixels carry confidence 0 and projector coordinate (0, 0).
    """

    camera_width: int
    camera_height: int
    projector_width: int
    projector_height: int
    proj_x: np.ndarray  # (H, W) float32
    proj_y: np.ndarray  # (H, W) float32
    confidence: np.ndarray  # (H, W) float32
    valid: np.ndarray  # (H, W) bool

    def validate(self) -> None:
        shape = (self.camera_height, self.camera_width)
        for name in ("proj_x", "proj_y", "confidence", "valid"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has wrong shape")
        v = self.valid
        if v.any():
            px, py = self.proj_x[v], self.proj_y[v]
            if px.min() < 0 or px.max() >= self.projector_width:
                raise ValueError("valid proj_x out of projector bounds")
            if py.min() < 0 or py.max() >= self.projector_height:
                raise ValueError("valid proj_y out of projector bounds")
        if self.confidence[~v].any():
            raise ValueError("invalid pixels must have confidence 0")

    def save(self, path: str | Path) -> None:
        """Write the LFCM binary format (little-endian, 16-byte records)."""
        rec = np.zeros((self.camera_height, self.camera_width), dtype=_LFCM_RECORD)
        rec["proj_x"] = self.proj_x
        rec["proj_y"] = self.proj_y
        rec["confidence"] = self.confidence
        rec["valid"] = self.valid.astype(np.uint8)
        header = _LFCM_MAGIC + struct.pack(
            "<5I",
            _LFCM_VERSION,
            self.camera_width,
            self.camera_height,
            self.projector_width,
            self.projector_height,
        )
        Path(path).write_bytes(header + rec.tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "CorrespondenceMap":
        data = Path(path).read_bytes()
        if data[:4] != _LFCM_MAGIC:
            raise ValueError(f"{path}: not an LFCM file")
        version, cw, ch, pw, ph = struct.unpack("<5I", data[4:24])
        if version != _LFCM_VERSION:
            raise ValueError(f"{path}: unsupported LFCM version {version}")
        rec = np.frombuffer(data[24:], dtype=_LFCM_RECORD, count=cw * ch).reshape(ch, cw)
        return cls(
            camera_width=cw,
            camera_height=ch,
            projector_width=pw,
            projector_height=ph,
            proj_x=rec["proj_x"].astype(np.float32),
            proj_y=rec["proj_y"].astype(np.float32),
            confidence=rec["confidence"].astype(np.float32),
            valid=rec["valid"].astype(bool),
        )


def generate_patterns(projector_width: int, projector_height: int) -> PatternSet:
    """Build the complementary Gray-code pattern sequence for a projector size."""
    for name, v in (("width", projector_width), ("height", projector_height)):
        if not 1 <= v <= MAX_DIM:
            raise ValueError(f"projector {name} {v} outside [1, {MAX_DIM}]")
    manifest = PatternManifest.for_size(projector_width, projector_height)
    w, h = projector_width, projector_height
    gray_cols = np.arange(w) ^ (np.arange(w) >> 1)
    gray_rows = np.arange(h) ^ (np.arange(h) >> 1)

    frames: list[np.ndarray] = []
    for role in manifest.roles:
        kind, k, inverse = parse_role(role)
        if kind == "white":
            frames.append(np.full((h, w), 255, dtype=np.uint8))
        elif kind == "black":
            frames.append(np.zeros((h, w), dtype=np.uint8))
        elif kind == "x":
            col = (((gray_cols >> k) & 1) * 255).astype(np.uint8)
            if inverse:
                col = 255 - col
            frames.append(np.broadcast_to(col[None, :], (h, w)).copy())
        else:
            row = (((gray_rows >> k) & 1) * 255).astype(np.uint8)
            if inverse:
                row = 255 - row
            frames.append(np.broadcast_to(row[:, None], (h, w)).copy())
    ps = PatternSet(manifest, tuple(frames))
    ps.validate()
    return ps


def decode(
    captures: CaptureSet,
    manifest: PatternManifest,
    contrast_threshold: float = DEFAULT_CONTRAST_THRESHOLD,
) -> CorrespondenceMap:
    """Decode captured pattern images into a camera-to-projector map.

    Per pixel: contrast c = (I_white - I_black)/255; pixels with c below the
    threshold are invalid.  Bit k is 1 iff its frame is brighter than its
    complement; per-bit confidence is min(1, |difference| / (255 c)) and the
    pixel confidence is the minimum over all bits.  Decoded coordinates
    falling outside the projector are marked invalid.
    """
    captures.validate()
    if len(captures.frames) != manifest.frame_count:
        raise FrameMismatchError(
            f"expected {manifest.frame_count} capture frames, got {len(captures.frames)}"
        )

    frames = [f.astype(np.float64) for f in captures.frames]
    white = frames[manifest.index_of(role_white())]
    black = frames[manifest.index_of(role_black())]
    contrast = (white - black) / 255.0
    valid = contrast >= contrast_threshold

    shape = white.shape
    confidence = np.ones(shape, dtype=np.float64)
    denom = 255.0 * np.where(valid, contrast, 1.0)

    coords: dict[str, np.ndarray] = {}
    for axis in ("x", "y"):
        code = np.zeros(shape, dtype=np.int64)
        for _k, idx, idx_inv in manifest.bit_indices(axis):
            diff = frames[idx] - frames[idx_inv]
            bit = diff > 0
            code = (code << 1) | bit.astype(np.int64)
            conf_bit = np.minimum(1.0, np.abs(diff) / denom)
            confidence = np.minimum(confidence, conf_bit)
        # vectorized Gray -> binary prefix XOR (fold doubling shifts of the
        # running value: n ^= n>>1; n ^= n>>2; n ^= n>>4; ...)
        decoded = code.copy()
        shift = 1
        nbits = bits_for(manifest._extent(axis))
        while shift < nbits:
            decoded ^= decoded >> shift
            shift <<= 1
        coords[axis] = decoded

    valid &= coords["x"] < manifest.projector_width
    valid &= coords["y"] < manifest.projector_height

    corr = CorrespondenceMap(
        camera_width=captures.camera_width,
        camera_height=captures.camera_height,
        projector_width=manifest.projector_width,
        projector_height=manifest.projector_height,
        proj_x=np.where(valid, coords["x"], 0).astype(np.float32),
        proj_y=np.where(valid, coords["y"], 0).astype(np.float32),
        confidence=np.where(valid, confidence, 0.0).astype(np.float32),
        valid=valid,
    )
    corr.validate()
    return corr


def write_pattern_dir(patterns: PatternSet, out_dir: str | Path) -> None:
    """Write numbered pattern PNGs plus manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(patterns.frames):
        save_gray(out / f"pattern_{i:03d}.png", frame)
    (out / "manifest.json").write_text(json.dumps(patterns.manifest.to_json(), indent=2))


def read_pattern_dir(in_dir: str | Path) -> PatternSet:
    src = Path(in_dir)
    manifest = PatternManifest.from_json(json.loads((src / "manifest.json").read_text()))
    frames = tuple(load_gray(src / f"pattern_{i:03d}.png") for i in range(manifest.frame_count))
    ps = PatternSet(manifest, frames)
    ps.validate()
    return ps


def write_capture_dir(captures: CaptureSet, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(captures.frames):
        save_gray(out / f"capture_{i:03d}.png", frame)


def read_capture_dir(in_dir: str | Path) -> CaptureSet:
    paths = sorted(Path(in_dir).glob("capture_*.png"))
    if not paths:
        raise FileNotFoundError(f"no capture_*.png files in {in_dir}")
    frames = tuple(load_gray(p) for p in paths)
    h, w = frames[0].shape
    cs = CaptureSet(camera_width=w, camera_height=h, frames=frames)
    cs.validate()
    return cs
