"""
Tests for the covariance-eigenvalue baseline and the matched-recall comparison
"""

import numpy as np
import pytest

from edgepose.analyzer.covariance_baseline import covariance_edge_baseline
from edgepose.analyzer.edge_metrics import evaluate_edge_flags, flags_at_threshold, matched_recall_threshold
from edgepose.parser.pointcloud import PointCloud
from edgepose.pipeline.baseline_comparison import BASELINE_KS, compare_baseline, compare_on_scene
from edgepose.scene.scene_generator import sample_planar_grid


def test_exact_plane_scores_zero():
    xx, yy = np.meshgrid(np.arange(10) * 0.002, np.arange(10) * 0.002)
    cloud = PointCloud(points=np.column_stack([xx.ravel(), yy.ravel(), np.full(100, 0.5)]))
    scores = covariance_edge_baseline(cloud, k=10)
    assert np.all(scores < 1e-12)


def test_exact_line_scores_zero():
    cloud = PointCloud(points=[[0.002 * i, 0.001 * i, 0.5] for i in range(30)])
    scores = covariance_edge_baseline(cloud, k=5)
    assert np.all(scores < 1e-12)


def test_isotropic_blob_approaches_one_third():
    rng = np.random.default_rng(0)
    cloud = PointCloud(points=rng.normal(size=(3000, 3)))
    scores = covariance_edge_baseline(cloud, k=30)
    assert np.all(scores <= 1.0 / 3.0 + 1e-12)
    assert scores.mean() > 0.1


def test_invalid_k():
    cloud = PointCloud(points=np.zeros((5, 3)))
    with pytest.raises(ValueError):
        covariance_edge_baseline(cloud, k=2)
    with pytest.raises(ValueError):
        covariance_edge_baseline(cloud, k=6)


def test_noisy_plane_scores_above_exact_plane():
    exact, _ = sample_planar_grid(size=0.1, pitch=0.002)
    noisy, _ = sample_planar_grid(size=0.1, pitch=0.002, noise=0.002, seed=3)
    assert covariance_edge_baseline(noisy, k=10).mean() > covariance_edge_baseline(exact, k=10).mean()


def test_matched_recall_threshold():
    scores = np.array([0.1, 0.2, 0.3, 0.4, 0.9, 0.0])
    boundary = np.array([True, True, True, True, False, False])
    threshold = matched_recall_threshold(scores, boundary, 0.5)
    flags = flags_at_threshold(scores, threshold)
    assert flags[boundary].mean() >= 0.5
    assert matched_recall_threshold(scores, np.zeros(6, dtype=bool), 0.5) == float("inf")
    assert not flags_at_threshold(scores, float("inf")).any()


def test_edge_metrics_counts():
    flags = np.array([True, False, True, False])
    boundary = np.array([True, True, False, False])
    border = np.array([0.0, 0.001, 0.05, 0.05])
    metrics = evaluate_edge_flags(flags, boundary, border, guard=0.02)
    assert metrics.boundary_recall == 0.5
    assert metrics.interior_fp_rate == 0.5
    assert metrics.boundary_count == 2
    assert metrics.interior_count == 2
    assert metrics.flagged_count == 2


def test_comparison_has_one_row_per_noise_and_k():
    rows = compare_baseline(size=0.1)
    assert len(rows) == 12
    assert [(r.noise, r.k) for r in rows] == [(s, k) for s in (0.0, 0.001, 0.002) for k in BASELINE_KS]


def test_exact_plane_both_methods_near_zero_fp():
    cloud, truth = sample_planar_grid(size=0.2, pitch=0.002)
    rows = compare_on_scene(cloud, truth, 0.0)
    for row in rows:
        assert row.proposed_interior_fp == 0.0
        assert row.baseline_interior_fp < 0.01


def test_noisy_plane_baseline_worse_at_matched_recall():
    """sigma = 2 mm: the resultant score flags fewer interior points at every k"""
    cloud, truth = sample_planar_grid(size=0.2, pitch=0.002, noise=0.002, seed=2)
    rows = compare_on_scene(cloud, truth, 0.002)
    for row in rows:
        assert row.proposed_interior_fp < row.baseline_interior_fp
        print(f"✓ k={row.k}: proposed FP {row.proposed_interior_fp:.4f}, baseline FP {row.baseline_interior_fp:.4f}")
