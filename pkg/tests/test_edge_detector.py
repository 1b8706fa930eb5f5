"""
Tests for resultant-direction edge scoring
"""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from edgepose.analyzer.edge_detector import EdgeDetector, extract_edge_points, point_score
from edgepose.analyzer.edge_metrics import evaluate_edge_flags
from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud
from edgepose.scene.scene_generator import sample_planar_grid
from edgepose.utils.params import CropBox, EdgeParams


def _disk_sector(n: int, radius: float, max_angle: float, seed: int) -> PointCloud:
    """Query point at the origin followed by n uniform samples of a disk sector in the xy plane."""
    rng = np.random.default_rng(seed)
    rho = radius * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, max_angle, size=n)
    samples = np.column_stack([rho * np.cos(theta), rho * np.sin(theta), np.zeros(n)])
    return PointCloud(points=np.vstack([np.zeros((1, 3)), samples]))


def test_symmetric_neighbors_cancel():
    """Neighbors at +x and -x give R = 0 and score 0"""
    cloud = PointCloud(points=[[0, 0, 0], [0.01, 0, 0], [-0.01, 0, 0]])
    index = SpatialIndex.build(cloud)
    score, k = point_score(cloud, index, 0, 0.02, min_neighbors=1)
    assert k == 2
    assert score == 0.0


def test_single_neighbor_scores_one():
    cloud = PointCloud(points=[[0, 0, 0], [0.0, 0.01, 0]])
    index = SpatialIndex.build(cloud)
    score, k = point_score(cloud, index, 0, 0.02, min_neighbors=1)
    assert k == 1
    assert score == pytest.approx(1.0)


def test_below_min_neighbors_scores_zero():
    cloud = PointCloud(points=[[0, 0, 0], [0.0, 0.01, 0]])
    index = SpatialIndex.build(cloud)
    assert point_score(cloud, index, 0, 0.02)[0] == 0.0
    scored = EdgeDetector(EdgeParams(radius=0.02)).score(cloud, index)
    assert not scored.edge_mask.any()


def test_half_disk_boundary_scores_two_over_pi():
    """Straight boundary of a uniform half-disk"""
    cloud = _disk_sector(100000, 0.0199, math.pi, seed=0)
    score, k = point_score(cloud, SpatialIndex.build(cloud), 0, 0.02)
    assert k == 100000
    assert score == pytest.approx(2.0 / math.pi, abs=0.01)


def test_quarter_disk_corner_scores_two_root_two_over_pi():
    cloud = _disk_sector(100000, 0.0199, math.pi / 2.0, seed=1)
    score, _ = point_score(cloud, SpatialIndex.build(cloud), 0, 0.02)
    assert score == pytest.approx(2.0 * math.sqrt(2.0) / math.pi, abs=0.01)


def test_kernel_matches_term_by_term_score():
    """|R|/k from the kernel equals the mean projection onto R-hat"""
    rng = np.random.default_rng(3)
    cloud = PointCloud(points=rng.uniform(0.0, 0.05, size=(400, 3)))
    index = SpatialIndex.build(cloud)
    scored = EdgeDetector(EdgeParams(radius=0.015)).score(cloud, index)
    for i in range(0, 400, 7):
        score, k = point_score(cloud, index, i, 0.015)
        assert k == scored.neighbor_counts[i]
        assert score == pytest.approx(scored.scores[i], abs=1e-9)


def test_scores_in_unit_range():
    rng = np.random.default_rng(4)
    cloud = PointCloud(points=rng.normal(scale=0.02, size=(2000, 3)))
    scored = EdgeDetector().score(cloud)
    assert np.all(scored.scores >= 0.0)
    assert np.all(scored.scores <= 1.0)
    assert np.all(scored.scores[scored.neighbor_counts == 0] == 0.0)


def test_edge_flag_rule():
    rng = np.random.default_rng(5)
    cloud = PointCloud(points=rng.uniform(0.0, 0.1, size=(1500, 3)))
    params = EdgeParams(radius=0.015, threshold=0.3, min_neighbors=3)
    scored = EdgeDetector(params).score(cloud)
    expected = (scored.scores > params.threshold) & (scored.neighbor_counts >= params.min_neighbors)
    np.testing.assert_array_equal(scored.edge_mask, expected)


def test_rigid_invariance():
    rng = np.random.default_rng(6)
    cloud = PointCloud(points=rng.uniform(0.0, 0.1, size=(1500, 3)))
    rotation = Rotation.from_rotvec([0.3, -1.1, 0.7]).as_matrix()
    moved = cloud.transformed(rotation, np.array([0.5, -0.2, 1.3]))
    a = EdgeDetector().score(cloud)
    b = EdgeDetector().score(moved)
    np.testing.assert_allclose(a.scores, b.scores, atol=1e-6)


def test_permutation_invariance():
    rng = np.random.default_rng(8)
    points = rng.uniform(0.0, 0.1, size=(1500, 3))
    order = rng.permutation(1500)
    a = EdgeDetector().score(PointCloud(points=points))
    b = EdgeDetector().score(PointCloud(points=points[order]))
    np.testing.assert_allclose(a.scores[order], b.scores, atol=1e-12)
    np.testing.assert_array_equal(a.edge_mask[order], b.edge_mask)


def test_one_point_cloud_has_no_edges():
    edges, index_map = extract_edge_points(PointCloud(points=[[0, 0, 0.5]]))
    assert len(edges) == 0
    assert len(index_map) == 0


def test_empty_cloud_scores_empty():
    scored = EdgeDetector().score(PointCloud())
    assert len(scored) == 0
    assert scored.edge_count == 0


def test_planar_grid_edges_are_the_border_band():
    """0.2 m plate at 2 mm pitch: every boundary point flagged, no interior point"""
    cloud, truth = sample_planar_grid(size=0.2, pitch=0.002)
    edges, index_map = extract_edge_points(cloud, EdgeParams(radius=0.02, threshold=0.35))
    flags = np.zeros(len(cloud), dtype=bool)
    flags[index_map] = True
    border = truth.labels.border_distance
    assert flags[truth.boundary].all()
    assert not flags[border > 0.02].any()
    np.testing.assert_array_equal(edges.points, cloud.points[index_map])
    print(f"✓ {len(edges)} edge points of {len(cloud)}")


def test_noisy_planar_grid_interior_false_positives():
    """sigma = 1 mm keeps interior false positives under 5%"""
    cloud, truth = sample_planar_grid(size=0.2, pitch=0.002, noise=0.001, seed=1)
    scored = EdgeDetector(EdgeParams(radius=0.02, threshold=0.35)).score(cloud)
    metrics = evaluate_edge_flags(scored.edge_mask, truth.boundary, truth.labels.border_distance, 0.02)
    assert metrics.interior_fp_rate < 0.05
    assert metrics.boundary_recall > 0.8
    print(f"✓ recall {metrics.boundary_recall:.3f}, interior FP {metrics.interior_fp_rate:.4f}")


def test_crop_box_limits_scoring():
    cloud, _ = sample_planar_grid(size=0.2, pitch=0.002)
    crop = CropBox(lower=(-0.05, -0.05, 0.7), upper=(0.05, 0.05, 0.8))
    edges, index_map, scored = EdgeDetector().extract(cloud, crop=crop)
    assert len(scored) < len(cloud)
    inside = cloud.points[index_map]
    assert np.all(np.abs(inside[:, :2]) <= 0.05 + 1e-12)
    # the crop border becomes a border
    assert len(edges) > 0
