"""Scan-quality report: matplotlib figures plus a delimited metrics file.

Given a correspondence map (and optionally a rig and/or a ground-truth
map), writes diagnostic figures and `metrics.csv` side by side into an
output directory, and returns the metrics as a dict.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .geometry import StereoRig, depth_map, disparity_map
from .slcodec import CorrespondenceMap


def _save_map(path: Path, data: np.ndarray, title: str, cmap: str = "viridis") -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5), dpi=110)
    im = ax.imshow(data, cmap=cmap)
    ax.set_title(title)
    ax.set_xlabel("camera x (px)")
    ax.set_ylabel("camera y (px)")
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _save_hist(path: Path, values: np.ndarray, title: str, xlabel: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4), dpi=110)
    if values.size:
        ax.hist(values, bins=60, color="#3572b0")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("pixels")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def scan_report(
    corr: CorrespondenceMap,
    out_dir: str | Path,
    rig: StereoRig | None = None,
    truth: CorrespondenceMap | None = None,
) -> dict[str, float]:
    """Render report figures and metrics.csv into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    metrics: dict[str, float] = {}
    total = corr.camera_width * corr.camera_height
    nvalid = int(corr.valid.sum())
    metrics["valid_fraction"] = nvalid / total if total else 0.0
    if nvalid:
        metrics["mean_confidence"] = float(corr.confidence[corr.valid].mean())
        metrics["min_confidence"] = float(corr.confidence[corr.valid].min())
    else:
        metrics["mean_confidence"] = 0.0
        metrics["min_confidence"] = 0.0

    _save_map(out / "validity.png", corr.valid.astype(float), "valid pixels", cmap="gray")
    _save_map(out / "confidence.png", np.where(corr.valid, corr.confidence, np.nan), "decode confidence")

    for axis in ("x", "y"):
        disp = disparity_map(corr, axis)
        _save_map(out / f"disparity_{axis}.png", disp, f"disparity {axis} (px)", cmap="coolwarm")
        finite = disp[np.isfinite(disp)]
        if finite.size:
            metrics[f"disparity_{axis}_mean"] = float(finite.mean())
            metrics[f"disparity_{axis}_std"] = float(finite.std())

    if rig is not None:
        dm = depth_map(rig, corr)
        _save_map(out / "depth.png", dm.depth, "depth (m)", cmap="magma")
        finite = dm.depth[np.isfinite(dm.depth)]
        if finite.size:
            metrics["depth_mean_m"] = float(finite.mean())
            metrics["depth_min_m"] = float(finite.min())
            metrics["depth_max_m"] = float(finite.max())
        _save_hist(out / "depth_hist.png", finite, "depth distribution", "depth (m)")

    if truth is not None:
        both = corr.valid & truth.valid
        metrics["truth_valid_fraction"] = float(truth.valid.mean())
        metrics["decoded_of_visible_fraction"] = (
            float((corr.valid & truth.valid).sum() / truth.valid.sum()) if truth.valid.any() else 0.0
        )
        if both.any():
            dx = corr.proj_x[both].astype(np.float64) - truth.proj_x[both]
            dy = corr.proj_y[both].astype(np.float64) - truth.proj_y[both]
            err = np.sqrt(dx * dx + dy * dy)
            metrics["corr_error_mean_px"] = float(err.mean())
            metrics["corr_error_p99_px"] = float(np.percentile(err, 99))
            metrics["corr_error_within_1px"] = float((err <= 1.0).mean())
            errmap = np.full(corr.valid.shape, np.nan)
            errmap[both] = err
            _save_map(out / "corr_error.png", errmap, "correspondence error (px)", cmap="inferno")
            _save_hist(out / "corr_error_hist.png", err, "correspondence error", "error (px)")

    with open(out / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key, value in metrics.items():
            writer.writerow([key, f"{value:.9g}"])
    return metrics
