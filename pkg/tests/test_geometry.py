import numpy as np
import pytest

from procam import geometry
from procam.geometry import (
    DegenerateGeometryError,
    DepthMap,
    PinholeModel,
    StereoRig,
    depth_map,
    disparity_map,
    rig_from_pose,
    triangulate,
)
from procam.slcodec import CorrespondenceMap


def _identity_corr(w, h, proj_x=None, proj_y=None, valid=None):
    xx = np.tile(np.arange(w, dtype=np.float32), (h, 1))
    yy = np.tile(np.arange(h, dtype=np.float32)[:, None], (1, w))
    valid = np.ones((h, w), bool) if valid is None else valid
    return CorrespondenceMap(
        camera_width=w, camera_height=h, projector_width=w * 2, projector_height=h * 2,
        proj_x=(xx if proj_x is None else proj_x).astype(np.float32),
        proj_y=(yy if proj_y is None else proj_y).astype(np.float32),
        confidence=np.where(valid, 1.0, 0.0).astype(np.float32),
        valid=valid,
    )


def _symmetric_rig(f=500.0, baseline=0.1, size=400):
    cam = PinholeModel(fx=f, fy=f, cx=size / 2 - 0.5, cy=size / 2 - 0.5, width=size, height=size)
    proj = PinholeModel(fx=f, fy=f, cx=size / 2 - 0.5, cy=size / 2 - 0.5, width=size, height=size)
    return rig_from_pose(cam, proj, np.eye(3), np.array([baseline, 0.0, 0.0]))


def test_disparity_definition():
    corr = _identity_corr(8, 4)
    corr.proj_x[2, 5] = 25.0  # camera u=5, proj 25 -> disparity 20
    disp = disparity_map(corr, "x")
    assert disp[2, 5] == 20.0


def test_disparity_identity_zero():
    corr = _identity_corr(8, 4)
    disp = disparity_map(corr, "x")
    assert np.nanmax(np.abs(disp)) == 0.0
    disp_y = disparity_map(corr, "y")
    assert np.nanmax(np.abs(disp_y)) == 0.0


def test_disparity_invalid_nan():
    valid = np.ones((4, 8), bool)
    valid[1, 3] = False
    corr = _identity_corr(8, 4, valid=valid)
    disp = disparity_map(corr, "x")
    assert np.isnan(disp[1, 3])
    assert np.isfinite(disp[valid]).all()


def test_triangulate_rectified_depth():
    rig = _symmetric_rig(f=500.0, baseline=0.1)
    cx = rig.camera.cx
    point = triangulate(rig, (cx + 25.0, rig.camera.cy), (cx - 25.0, rig.projector.cy))
    assert point[2] == pytest.approx(1.0, abs=1e-9)  # z = f b / d = 500*0.1/50


def test_triangulate_exact_intersection():
    rig = _symmetric_rig()
    target = np.array([0.03, -0.02, 1.4])
    cam_px = rig.camera.project(target[None, :])
    proj_pt = rig.to_projector_frame(target[None, :])
    proj_px = rig.projector.project(proj_pt)
    got = triangulate(rig, (cam_px[0][0], cam_px[1][0]), (proj_px[0][0], proj_px[1][0]))
    assert np.linalg.norm(got - target) < 1e-9


def test_triangulate_round_trip_random_rigs():
    rng = np.random.default_rng(12)
    for _ in range(25):
        cam = PinholeModel(fx=400 + rng.uniform(0, 200), fy=400 + rng.uniform(0, 200),
                           cx=159.5, cy=119.5, width=320, height=240)
        proj = PinholeModel(fx=300 + rng.uniform(0, 200), fy=300 + rng.uniform(0, 200),
                            cx=127.5, cy=127.5, width=256, height=256)
        angles = rng.uniform(-0.2, 0.2, size=3)
        R = geometry.rot_z(angles[2]) @ geometry.rot_y(angles[1]) @ geometry.rot_x(angles[0])
        center = rng.uniform(-0.3, 0.3, size=3) + np.array([0.3, 0, 0])
        rig = rig_from_pose(cam, proj, R, center)
        point = np.array([rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(0.8, 2.5)])
        cam_px = rig.camera.project(point[None, :])
        proj_px = rig.projector.project(rig.to_projector_frame(point[None, :]))
        got = triangulate(rig, (cam_px[0][0], cam_px[1][0]), (proj_px[0][0], proj_px[1][0]))
        assert np.linalg.norm(got - point) < 1e-6


def test_triangulate_midpoint_symmetry():
    """Swapping the two devices' roles (pose inverted) gives the same point."""
    rng = np.random.default_rng(3)
    cam = PinholeModel(fx=450, fy=430, cx=159.5, cy=119.5, width=320, height=240)
    proj = PinholeModel(fx=320, fy=330, cx=127.5, cy=127.5, width=256, height=256)
    R = geometry.rot_y(0.12) @ geometry.rot_x(-0.05)
    center = np.array([0.25, 0.02, 0.01])
    rig = rig_from_pose(cam, proj, R, center)
    # perturbed pixels so the rays do not exactly intersect
    cam_pixel = (170.3, 100.2)
    proj_pixel = (80.7, 140.1)
    p1 = triangulate(rig, cam_pixel, proj_pixel)

    # same geometry expressed from the projector's frame: the camera center
    # lands at t there, and poses invert
    cam_center_in_proj = rig.translation
    swapped = rig_from_pose(proj, cam, R.T, cam_center_in_proj)
    p2 = triangulate(swapped, proj_pixel, cam_pixel)  # point in projector frame
    p2_cam_frame = R.T @ (p2 - rig.translation)
    assert np.linalg.norm(p1 - p2_cam_frame) < 1e-9


def test_triangulate_degenerate_parallel():
    rig = _symmetric_rig()
    with pytest.raises(DegenerateGeometryError):
        # translation along z with identical pixels makes near-parallel rays
        bad = rig_from_pose(rig.camera, rig.projector, np.eye(3), np.array([0.0, 0.0, -0.1]))
        triangulate(bad, (rig.camera.cx, rig.camera.cy), (bad.projector.cx, bad.projector.cy))


def test_depth_map_all_invalid():
    rig = _symmetric_rig(size=8)
    corr = _identity_corr(8, 8, valid=np.zeros((8, 8), bool))
    corr.projector_width = corr.projector_height = 8
    dm = depth_map(rig, corr)
    assert np.isnan(dm.depth).all()


def test_depth_map_dimension_mismatch():
    rig = _symmetric_rig(size=8)
    corr = _identity_corr(4, 4)
    with pytest.raises(ValueError):
        depth_map(rig, corr)


def test_depth_positivity():
    rig = _symmetric_rig(f=500.0, baseline=0.1, size=64)
    xx = np.tile(np.arange(64, dtype=np.float32), (64, 1))
    yy = np.tile(np.arange(64, dtype=np.float32)[:, None], (1, 64))
    corr = CorrespondenceMap(
        camera_width=64, camera_height=64, projector_width=64, projector_height=64,
        proj_x=np.clip(xx - 10, 0, 63), proj_y=yy,
        confidence=np.ones((64, 64), np.float32), valid=np.ones((64, 64), bool),
    )
    dm = depth_map(rig, corr)
    finite = dm.depth[np.isfinite(dm.depth)]
    assert finite.size and (finite > 0).all()


def test_rig_validation():
    cam = PinholeModel(fx=100, fy=100, cx=10, cy=10, width=32, height=32)
    bad_rot = np.eye(3)
    bad_rot[0, 0] = 1.0 + 1e-6
    with pytest.raises(ValueError):
        StereoRig(camera=cam, projector=cam, rotation=bad_rot,
                  translation=np.array([0.1, 0, 0])).validate()
    with pytest.raises(ValueError):
        StereoRig(camera=cam, projector=cam, rotation=np.eye(3),
                  translation=np.zeros(3)).validate()
    with pytest.raises(ValueError):
        PinholeModel(fx=-1, fy=1, cx=0, cy=0, width=4, height=4).validate()


def test_rig_json_round_trip(tmp_path):
    rig = _symmetric_rig()
    path = tmp_path / "rig.json"
    geometry.save_rig(rig, path)
    loaded = geometry.load_rig(path)
    assert loaded.camera == rig.camera
    assert np.allclose(loaded.rotation, rig.rotation)
    assert np.allclose(loaded.translation, rig.translation)


def test_pfm_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    depth = rng.uniform(0.5, 3.0, size=(6, 9)).astype(np.float32)
    depth[2, 3] = np.nan
    dm = DepthMap(width=9, height=6, depth=depth)
    path = tmp_path / "depth.pfm"
    dm.save_pfm(path)
    raw = path.read_bytes()
    assert raw.startswith(b"Pf\n9 6\n-1.0\n")
    loaded = DepthMap.load_pfm(path)
    assert loaded.width == 9 and loaded.height == 6
    assert np.isnan(loaded.depth[2, 3])
    mask = ~np.isnan(depth)
    assert np.array_equal(loaded.depth[mask], depth[mask])
