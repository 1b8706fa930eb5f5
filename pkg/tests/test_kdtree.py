"""
Tests for the k-d tree neighbor queries
"""

import numpy as np
import pytest

from edgepose.index.kdtree import SpatialIndex, brute_force_neighbors
from edgepose.parser.pointcloud import PointCloud


def test_build_single_point():
    index = SpatialIndex.build(PointCloud(points=[[1.0, 2.0, 3.0]]))
    assert len(index) == 1
    assert index.radius_neighbors(0, 1.0).k == 0


def test_build_empty_cloud_fails():
    with pytest.raises(ValueError):
        SpatialIndex.build(PointCloud())


def test_collinear_query_by_index():
    """Spacing 1 cm, query index 5, r = 2.5 cm"""
    points = np.array([[0.01 * i, 0.0, 0.0] for i in range(11)])
    index = SpatialIndex.build(points)
    assert index.radius_neighbors(5, 0.025).as_set() == {3, 4, 6, 7}


def test_radius_below_closest_pair_is_empty():
    points = np.array([[0.01 * i, 0.0, 0.0] for i in range(11)])
    index = SpatialIndex.build(points)
    assert len(index.radius_neighbors(5, 0.005)) == 0


def test_free_point_query_returns_coincident_point():
    points = np.array([[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]])
    index = SpatialIndex.build(points)
    assert index.radius_neighbors(np.array([0.0, 0.0, 0.0]), 0.01).as_set() == {0}
    assert index.radius_neighbors(0, 0.01).as_set() == set()


def test_duplicates_both_retrievable():
    points = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    index = SpatialIndex.build(points)
    assert index.radius_neighbors(np.zeros(3), 0.001).as_set() == {0, 1}
    assert index.radius_neighbors(0, 0.001).as_set() == {1}


def test_closed_ball():
    """A point at distance exactly r is a neighbor"""
    points = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]])
    index = SpatialIndex.build(points)
    assert index.radius_neighbors(0, 0.5).as_set() == {1}


def test_invalid_radius_and_index():
    index = SpatialIndex.build(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        index.radius_neighbors(0, 0.0)
    with pytest.raises(ValueError):
        index.radius_neighbors(0, -1.0)
    with pytest.raises(IndexError):
        index.radius_neighbors(3, 0.1)


def test_oracle_equivalence_random_clouds():
    """200 random clouds, random radii: tree result equals brute force"""
    rng = np.random.default_rng(42)
    for trial in range(200):
        n = int(rng.integers(1, 2001))
        points = rng.uniform(0.0, 0.2, size=(n, 3))
        index = SpatialIndex.build(points, leaf_size=int(rng.integers(1, 33)))
        r = float(rng.uniform(0.001, 0.05))
        for q in rng.integers(0, n, size=3):
            assert index.radius_neighbors(int(q), r).as_set() == brute_force_neighbors(points, int(q), r)
        free = rng.uniform(-0.05, 0.25, size=3)
        assert index.radius_neighbors(free, r).as_set() == brute_force_neighbors(points, free, r)


def test_build_10k_matches_brute_force():
    rng = np.random.default_rng(7)
    points = rng.uniform(-0.5, 0.5, size=(10000, 3))
    index = SpatialIndex.build(points)
    for q in (0, 1234, 9999):
        assert index.radius_neighbors(q, 0.05).as_set() == brute_force_neighbors(points, q, 0.05)


def test_monotone_in_radius():
    rng = np.random.default_rng(5)
    points = rng.uniform(0.0, 0.1, size=(500, 3))
    index = SpatialIndex.build(points)
    for q in range(0, 500, 50):
        small = index.radius_neighbors(q, 0.01).as_set()
        large = index.radius_neighbors(q, 0.02).as_set()
        assert small <= large


def test_batch_matches_single_queries():
    rng = np.random.default_rng(11)
    points = rng.uniform(0.0, 0.1, size=(300, 3))
    index = SpatialIndex.build(points)
    offsets, indices = index.radius_neighbors_batch(0.015)
    counts = index.count_neighbors(0.015)
    assert offsets[-1] == counts.sum()
    for i in range(0, 300, 17):
        row = set(int(j) for j in indices[offsets[i]:offsets[i + 1]])
        assert row == index.radius_neighbors(i, 0.015).as_set()
        assert counts[i] == len(row)


def test_build_is_deterministic():
    rng = np.random.default_rng(2)
    points = rng.normal(size=(1000, 3))
    a = SpatialIndex.build(points)
    b = SpatialIndex.build(points)
    np.testing.assert_array_equal(a.perm, b.perm)
    np.testing.assert_array_equal(a.starts, b.starts)


def test_knn_includes_self_and_sorted():
    rng = np.random.default_rng(9)
    points = rng.uniform(size=(200, 3))
    index = SpatialIndex.build(points)
    idx, dist = index.knn(5)
    assert idx.shape == (200, 5)
    np.testing.assert_array_equal(idx[:, 0], np.arange(200))
    assert np.all(np.diff(dist, axis=1) >= 0)
    full = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    expected = np.sort(full, axis=1)[:, :5]
    np.testing.assert_allclose(dist, expected, atol=1e-12)


def test_knn_k_too_large():
    index = SpatialIndex.build(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        index.knn(4)
    with pytest.raises(ValueError):
        index.knn(0)
