"""Shared fixtures: the desk-scale simulator scene used across the suite."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import ndimage

from procam import geometry, simulator


def smooth_texture(seed: int, size: int = 256, lo: float = 80, hi: float = 255) -> np.ndarray:
    """Band-limited random albedo so resampling comparisons stay clean."""
    rng = np.random.default_rng(seed)
    small = rng.uniform(lo, hi, size=(17, 17, 3))
    zoomed = ndimage.zoom(small, (size / 17, size / 17, 1), order=1)
    return np.clip(zoomed[:size, :size], 0, 255).astype(np.uint8)


def desk_rig() -> geometry.StereoRig:
    camera = geometry.PinholeModel(fx=350, fy=350, cx=159.5, cy=119.5, width=320, height=240)
    projector = geometry.PinholeModel(fx=300, fy=300, cx=127.5, cy=127.5, width=256, height=256)
    return geometry.rig_from_pose(
        camera, projector, geometry.rot_y(-0.17), np.array([0.25, 0.0, 0.0])
    )


def tilted_plane(texture: np.ndarray, tilt_deg: float = 25.0) -> simulator.Plane:
    theta = np.deg2rad(tilt_deg)
    edge_u = np.array([0.0, 1.5, 0.0])
    edge_v = np.array([np.cos(theta), 0.0, -np.sin(theta)]) * 1.9
    center = np.array([0.12, 0.0, 1.25])
    return simulator.Plane(
        corner=center - edge_u / 2 - edge_v / 2, edge_u=edge_u, edge_v=edge_v, texture=texture
    )


def make_desk_scene(noise_sigma: float = 1.0 / 255.0, seed: int = 11) -> simulator.SceneModel:
    scene = simulator.SceneModel(
        planes=[tilted_plane(smooth_texture(7))],
        rig=desk_rig(),
        ambient=0.2,
        projector_gain=1.0,
        noise_sigma=noise_sigma,
        gamma=1.0,
        seed=seed,
    )
    scene.validate()
    return scene


def frontal_scene(noise_sigma: float = 0.0) -> simulator.SceneModel:
    """Rectified rig (identity rotation) looking at a frontal plane."""
    camera = geometry.PinholeModel(fx=300, fy=300, cx=79.5, cy=59.5, width=160, height=120)
    projector = geometry.PinholeModel(fx=300, fy=300, cx=63.5, cy=63.5, width=128, height=128)
    rig = geometry.rig_from_pose(camera, projector, np.eye(3), np.array([0.1, 0.0, 0.0]))
    plane = simulator.Plane(
        corner=np.array([-0.7, -0.55, 1.0]),
        edge_u=np.array([0.0, 1.1, 0.0]),
        edge_v=np.array([1.5, 0.0, 0.0]),
        texture=smooth_texture(3, size=128),
    )
    return simulator.SceneModel(
        planes=[plane], rig=rig, ambient=0.2, projector_gain=1.0,
        noise_sigma=noise_sigma, gamma=1.0, seed=5,
    )


@pytest.fixture(scope="session")
def desk_scene() -> simulator.SceneModel:
    return make_desk_scene()


@pytest.fixture(scope="session")
def desk_scene_noiseless() -> simulator.SceneModel:
    return make_desk_scene(noise_sigma=0.0)
