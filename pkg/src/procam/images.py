"""PNG image I/O helpers shared across the pipeline."""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image


def load_rgb(path: str | Path) -> np.ndarray:
    """Load an image as (H, W, 3) uint8, converting grayscale/RGBA as needed."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def load_gray(path: str | Path) -> np.ndarray:
    """Load an image as (H, W) uint8 luminance."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def save_rgb(path: str | Path, img: np.ndarray) -> None:
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("expected (H, W, 3) uint8 image")
    Image.fromarray(img, mode="RGB").save(path)


def save_gray(path: str | Path, img: np.ndarray) -> None:
    if img.dtype != np.uint8 or img.ndim != 2:
        raise ValueError("expected (H, W) uint8 image")
    Image.fromarray(img, mode="L").save(path)


def save_gray16(path: str | Path, img: np.ndarray) -> None:
    if img.dtype != np.uint16 or img.ndim != 2:
        raise ValueError("expected (H, W) uint16 image")
    Image.fromarray(img).save(path)


def encode_png(img: np.ndarray) -> bytes:
    """Encode an RGB or grayscale uint8 array as PNG bytes (deterministic)."""
    mode = "RGB" if img.ndim == 3 else "L"
    buf = io.BytesIO()
    Image.fromarray(img, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data: bytes) -> np.ndarray:
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)
