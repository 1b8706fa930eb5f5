"""
Tests for synthetic cuboid scenes and their ground truth
"""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from edgepose.pose.geometry import boxes_overlap
from edgepose.pose.types import CuboidDims, Pose
from edgepose.scene.scene_generator import (TOP_FACE, PlacementError, SceneGroundTruth, SceneSpec, face_grid,
                                            gen_clutter_scene, random_rotation, rle_decode, rle_encode,
                                            sample_cuboid_surface, sample_planar_grid, visible_faces)

BRICK = CuboidDims(0.2, 0.1, 0.05)


@pytest.fixture
def clutter_spec():
    return SceneSpec(dims=BRICK, count=5, position_lower=(-0.25, -0.25, 0.6), position_upper=(0.25, 0.25, 0.9),
                     noise=0.001, seed=7)


def _flat_pose(z: float = 0.8) -> Pose:
    return Pose(Rotation.from_rotvec([math.pi, 0.0, 0.0]).as_matrix(), np.array([0.0, 0.0, z]))


def test_face_grid_sample_count():
    """0.2 x 0.1 face at 2 mm pitch is 101 x 51 samples"""
    points, border = face_grid(BRICK, TOP_FACE, 0.002)
    assert points.shape == (101 * 51, 3)
    np.testing.assert_allclose(points[:, 2], 0.025)
    assert border.min() == 0.0
    assert border.max() == pytest.approx(0.05)


def test_axis_aligned_cuboid_shows_only_top_face():
    assert visible_faces(BRICK, _flat_pose()) == [TOP_FACE]


def test_tilted_cuboid_shows_a_side_face():
    tilt = Rotation.from_rotvec([0.0, math.radians(30.0), 0.0]).as_matrix()
    pose = Pose(tilt @ _flat_pose().rotation, np.array([0.3, 0.0, 0.8]))
    faces = visible_faces(BRICK, pose)
    assert TOP_FACE in faces
    assert len(faces) >= 2
    assert 5 not in faces


def test_noiseless_points_lie_on_surface():
    pose = Pose(Rotation.from_euler('XYZ', [170.0, 8.0, 40.0], degrees=True).as_matrix(), [0.1, -0.05, 0.7])
    cloud, labels = sample_cuboid_surface(BRICK, pose, pitch=0.004)
    local = pose.inverse().apply(cloud.points)
    half = BRICK.half
    assert len(labels) == len(cloud)
    assert np.all(np.abs(local) <= half + 1e-12)
    on_face = np.isclose(np.abs(local), half, atol=1e-12).any(axis=1)
    assert on_face.all()


def test_sampling_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample_cuboid_surface(BRICK, _flat_pose(), pitch=0.0)
    with pytest.raises(ValueError):
        sample_cuboid_surface(BRICK, _flat_pose(), noise=-0.001)


def test_random_rotation_respects_tilt():
    rng = np.random.default_rng(0)
    for _ in range(50):
        rotation = random_rotation(rng, 15.0)
        assert np.linalg.det(rotation) == pytest.approx(1.0)
        angle = math.degrees(math.acos(np.clip(-rotation[2, 2], -1.0, 1.0)))
        assert angle <= 15.0 + 1e-9
    flat = random_rotation(rng, 0.0)
    np.testing.assert_allclose(flat[:, 2], [0.0, 0.0, -1.0], atol=1e-12)


def test_single_cuboid_scene_matches_surface_sampling():
    spec = SceneSpec(dims=BRICK, count=1, seed=3)
    cloud, truth = gen_clutter_scene(spec)
    direct, _ = sample_cuboid_surface(BRICK, truth.poses[0], spec.pitch)
    np.testing.assert_array_equal(cloud.points, direct.points)


def test_clutter_scene_is_deterministic(clutter_spec):
    a, truth_a = gen_clutter_scene(clutter_spec)
    b, truth_b = gen_clutter_scene(clutter_spec)
    np.testing.assert_array_equal(a.points, b.points)
    assert truth_a.to_json() == truth_b.to_json()


def test_clutter_cuboids_never_overlap(clutter_spec):
    for seed in range(5):
        clutter_spec.seed = seed
        _, truth = gen_clutter_scene(clutter_spec)
        assert len(truth.poses) == 5
        half = BRICK.half
        for i, a in enumerate(truth.poses):
            for b in truth.poses[i + 1:]:
                assert not boxes_overlap(a.rotation, a.translation, half, b.rotation, b.translation, half)


def test_clutter_labels(clutter_spec):
    cloud, truth = gen_clutter_scene(clutter_spec)
    assert len(truth.labels) == len(cloud)
    assert set(np.unique(truth.labels.cuboid_id).tolist()) == {0, 1, 2, 3, 4}
    assert 0 < truth.boundary.sum() < len(cloud)
    assert not np.any(truth.labels.face_id == 5)


def test_placement_error_when_box_too_small():
    spec = SceneSpec(dims=BRICK, count=2, position_lower=(0.0, 0.0, 0.8), position_upper=(0.0, 0.0, 0.8),
                     max_attempts=10)
    with pytest.raises(PlacementError):
        gen_clutter_scene(spec)


def test_scene_spec_from_dict():
    spec = SceneSpec.from_dict({'count': 3, 'noise': 0.002}, dims=BRICK, seed=None, count=4)
    assert spec.count == 4
    assert spec.noise == 0.002
    assert spec.seed == 0
    with pytest.raises(ValueError):
        SceneSpec.from_dict({})
    with pytest.raises(ValueError):
        SceneSpec(dims=BRICK, pitch=0.0)
    with pytest.raises(ValueError):
        SceneSpec(dims=BRICK, position_lower=(0.0, 0.0, 1.0), position_upper=(0.0, 0.0, 0.5))


def test_rle():
    assert rle_encode(np.array([0, 0, 1, 1, 1, 0])) == [[0, 2], [1, 3], [0, 1]]
    np.testing.assert_array_equal(rle_decode([[0, 2], [1, 3], [0, 1]]), [0, 0, 1, 1, 1, 0])
    assert rle_encode(np.zeros(0)) == []
    assert len(rle_decode([])) == 0


def test_ground_truth_save_load(tmp_path, clutter_spec):
    _, truth = gen_clutter_scene(clutter_spec)
    path = tmp_path / "truth.json"
    truth.save(str(path))
    back = SceneGroundTruth.load(str(path))
    assert back.dims == truth.dims
    assert back.noise == truth.noise
    assert back.seed == 7
    np.testing.assert_array_equal(back.labels.cuboid_id, truth.labels.cuboid_id)
    np.testing.assert_array_equal(back.labels.face_id, truth.labels.face_id)
    np.testing.assert_array_equal(back.boundary, truth.boundary)
    np.testing.assert_allclose(back.labels.border_distance, truth.labels.border_distance, atol=1e-6)
    for a, b in zip(back.poses, truth.poses):
        np.testing.assert_allclose(a.rotation, b.rotation, atol=1e-8)
        np.testing.assert_allclose(a.translation, b.translation, atol=1e-9)


def test_planar_grid():
    cloud, truth = sample_planar_grid(size=0.2, pitch=0.002)
    assert len(cloud) == 101 * 101
    np.testing.assert_allclose(cloud.points[:, 2], 0.75, atol=1e-12)
    assert truth.boundary.sum() == 101 * 101 - 97 * 97
    with pytest.raises(ValueError):
        sample_planar_grid(distance=0.0)
    print(f"✓ {truth.boundary.sum()} boundary points of {len(cloud)}")
