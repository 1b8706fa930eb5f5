"""
Tests for RANSAC line fitting, extreme points and the segment loop
"""

import json

import numpy as np
import pytest

from edgepose.extractor.line_extractor import (LineExtractor, LineModel, extract_all_segments, extreme_points,
                                               fit_line, ransac_line, reference_index, segments_to_json)
from edgepose.parser.pointcloud import PointCloud
from edgepose.pipeline.pipeline_runner import PipelineRunner
from edgepose.pose.geometry import segments_orthogonal
from edgepose.pose.types import CuboidDims
from edgepose.scene.scene_generator import SceneSpec, gen_clutter_scene
from edgepose.utils.params import ExtractParams, PoseParams, RunConfig

TOP_FACE_EDGES = ((1, 5), (3, 7), (1, 3), (5, 7))


def _collinear(n: int, spacing: float = 0.01) -> np.ndarray:
    return np.array([[spacing * i, 0.0, 0.0] for i in range(n)])


def _rectangle_outline(length: float, width: float, pitch: float = 0.002,
                       origin=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Boundary points of a length x width face in the xy plane."""
    xs = np.linspace(0.0, length, int(round(length / pitch)) + 1)
    ys = np.linspace(0.0, width, int(round(width / pitch)) + 1)[1:-1]
    rows = [np.column_stack([xs, np.zeros_like(xs), np.zeros_like(xs)]),
            np.column_stack([xs, np.full_like(xs, width), np.zeros_like(xs)]),
            np.column_stack([np.zeros_like(ys), ys, np.zeros_like(ys)]),
            np.column_stack([np.full_like(ys, length), ys, np.zeros_like(ys)])]
    return np.vstack(rows) + np.asarray(origin, dtype=np.float64)


def test_line_model_direction_is_unit():
    line = LineModel(point=[0, 0, 0], direction=[3.0, 4.0, 0.0])
    assert np.linalg.norm(line.direction) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        LineModel(point=[0, 0, 0], direction=[0, 0, 0])


def test_fit_line_needs_two_points():
    with pytest.raises(ValueError):
        fit_line(np.zeros((1, 3)))


def test_ransac_exact_collinear_points():
    """100 collinear points: all inliers, direction parallel to the line"""
    axis = np.array([1.0, 2.0, 2.0]) / 3.0
    points = np.outer(np.arange(100) * 0.01, axis) + np.array([0.1, -0.2, 0.5])
    model, inliers = ransac_line(points, ExtractParams(), seed=0)
    assert inliers.shape[0] == 100
    assert abs(float(model.direction @ axis)) > 1.0 - 1e-6


def test_ransac_picks_one_of_two_orthogonal_segments():
    """Two 100-point segments plus 20 outliers: inliers are exactly one segment"""
    rng = np.random.default_rng(0)
    t = 0.05 + np.arange(100) * 0.01
    along_x = np.column_stack([t, np.zeros(100), np.zeros(100)])
    along_y = np.column_stack([np.zeros(100), t, np.zeros(100)])
    outliers = np.column_stack([rng.uniform(0.0, 1.0, 20), rng.uniform(0.0, 1.0, 20), rng.uniform(0.2, 1.0, 20)])
    points = np.vstack([along_x, along_y, outliers])
    _, inliers = ransac_line(points, ExtractParams(), seed=3)
    assert set(inliers.tolist()) in (set(range(100)), set(range(100, 200)))


def test_ransac_single_point_fails():
    with pytest.raises(ValueError):
        ransac_line(np.zeros((1, 3)))


def test_ransac_no_line_signal():
    """Scattered points never reach the inlier minimum"""
    rng = np.random.default_rng(1)
    points = rng.uniform(0.0, 1.0, size=(40, 3))
    assert ransac_line(points, ExtractParams(), seed=0, min_inliers=30) is None


def test_ransac_deterministic_for_seed():
    rng = np.random.default_rng(2)
    points = np.vstack([_collinear(60), rng.uniform(0.0, 0.6, size=(30, 3))])
    a_model, a_inliers = ransac_line(points, ExtractParams(), seed=11)
    b_model, b_inliers = ransac_line(points, ExtractParams(), seed=11)
    np.testing.assert_array_equal(a_inliers, b_inliers)
    np.testing.assert_array_equal(a_model.direction, b_model.direction)


def test_min_inliers_scaling():
    params = ExtractParams()
    assert params.min_inliers_for(100) == 10
    assert params.min_inliers_for(2000) == 20
    assert params.min_inliers_for(50000) == 30


def test_reference_index_lowest_interior_point():
    """Spacing 1 cm, r_s = 2.5 cm: first point with 4 neighbors is index 2"""
    assert reference_index(_collinear(11), 0.025) == 2


def test_reference_index_tie_goes_to_lowest():
    assert reference_index(_collinear(2), 0.025) == 0


def test_reference_index_strict_maximum():
    points = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.5, 0.01, 0.0], [0.5, -0.01, 0.0], [0.51, 0.0, 0.0]])
    assert reference_index(points, 0.015) == 1


def test_extreme_points_collinear():
    """Reference at index 2: candidates are the endpoints, e1 = 0 and e2 = 10"""
    extremes = extreme_points(_collinear(11), 2, 0.025)
    assert extremes.e1 == 0
    assert extremes.e2 == 10
    assert not extremes.one_sided


def test_extreme_points_one_sided_at_physical_end():
    extremes = extreme_points(_collinear(11), 0, 0.025)
    assert extremes.e1 == 10
    assert extremes.e2 == 0
    assert extremes.one_sided


def test_extreme_points_one_sided_takes_farthest_candidate():
    """Reference at a physical end of two collinear runs: e2 is the farthest end, not the reference"""
    run_a = _collinear(11)
    run_b = _collinear(11) + np.array([0.2, 0.0, 0.0])
    extremes = extreme_points(np.vstack([run_a, run_b]), 0, 0.025)
    assert extremes.e1 == 10
    assert extremes.e2 == 21
    assert extremes.one_sided


def test_extreme_points_bound_the_reference_run():
    """Two collinear runs with a gap wider than r_s: only the run holding the reference is bounded"""
    run_a = _collinear(11)
    run_b = _collinear(11) + np.array([0.2, 0.0, 0.0])
    extremes = extreme_points(np.vstack([run_a, run_b]), 5, 0.025)
    assert {extremes.e1, extremes.e2} == {0, 10}


def test_extreme_points_errors():
    with pytest.raises(ValueError):
        extreme_points(np.zeros((1, 3)), 0, 0.02)
    with pytest.raises(IndexError):
        extreme_points(_collinear(5), 5, 0.02)


def test_extract_empty_edge_cloud():
    assert extract_all_segments(PointCloud()) == []


def test_extract_rectangle_face_four_segments():
    """Boundary of a 0.2 x 0.1 face gives 4 segments near the true lengths"""
    points = _rectangle_outline(0.2, 0.1)
    params = ExtractParams()
    segments = LineExtractor(params).extract(points, seed=0)
    assert len(segments) == 4
    lengths = sorted(s.length for s in segments)
    np.testing.assert_allclose(lengths, [0.1, 0.1, 0.2, 0.2], atol=0.01)

    seen = set()
    for segment in segments:
        members = set(segment.members.tolist())
        assert not members & seen
        seen |= members
        line = LineModel(point=segment.e1, direction=segment.direction)
        assert np.all(line.distances2(points[segment.members]) <= params.ransac_threshold ** 2 + 1e-12)
        along = line.project(points[segment.members])
        assert along.min() >= -params.radius - 1e-9
        assert along.max() <= segment.length + params.radius + 1e-9


def test_extract_two_faces_partition_by_object():
    first = _rectangle_outline(0.2, 0.1)
    second = _rectangle_outline(0.15, 0.15, origin=(0.5, 0.3, 0.05))
    points = np.vstack([first, second])
    split = first.shape[0]
    segments = extract_all_segments(points, seed=4)
    per_object = [0, 0]
    for segment in segments:
        owners = set((segment.members >= split).tolist())
        assert len(owners) == 1
        per_object[int(owners.pop())] += 1
    assert per_object == [4, 4]


def test_extract_deterministic_and_json():
    points = _rectangle_outline(0.2, 0.1)
    a = extract_all_segments(points, seed=9)
    b = extract_all_segments(points, seed=9)
    assert segments_to_json(a) == segments_to_json(b)
    data = json.loads(segments_to_json(a))
    assert set(data["segments"][0]) == {"e1", "e2", "length", "member_count", "one_sided"}
    print(f"✓ {len(a)} segments")


@pytest.fixture(scope="module")
def generated_brick():
    """Segments of one generated 0.2 x 0.1 x 0.05 brick at sigma = 1 mm, with its top-face edges"""
    dims = CuboidDims(0.2, 0.1, 0.05)
    cloud, truth = gen_clutter_scene(SceneSpec(dims=dims, count=1, noise=0.001, seed=7))
    segments = PipelineRunner(RunConfig()).run(cloud, stop_after="all_edges").segments
    corners = truth.poses[0].corners(dims)
    return segments, [(corners[a], corners[b]) for a, b in TOP_FACE_EDGES]


def _nearest_segment(segments, edge):
    """Segment whose endpoints are closest to the edge's corners, and that endpoint distance."""
    best, best_gap = None, float("inf")
    for segment in segments:
        gap = min(max(np.linalg.norm(segment.e1 - edge[0]), np.linalg.norm(segment.e2 - edge[1])),
                  max(np.linalg.norm(segment.e1 - edge[1]), np.linalg.norm(segment.e2 - edge[0])))
        if gap < best_gap:
            best, best_gap = segment, gap
    return best, best_gap


def test_generated_brick_top_face_lengths(generated_brick):
    """Each of the 4 top-face segments is within 10 mm of its true length"""
    segments, edges = generated_brick
    for edge in edges:
        segment, gap = _nearest_segment(segments, edge)
        truth = float(np.linalg.norm(edge[1] - edge[0]))
        assert gap < 0.02
        assert abs(segment.length - truth) <= 0.01, f"{segment.length:.4f} m against {truth:.4f} m"


def test_generated_brick_top_face_pair_is_orthogonal(generated_brick):
    """The length and breadth segments meeting at a top corner pass the orthogonality test"""
    segments, edges = generated_brick
    length_edge, _ = _nearest_segment(segments, edges[0])
    breadth_edge, _ = _nearest_segment(segments, edges[2])
    assert segments_orthogonal(length_edge, breadth_edge, PoseParams().orthogonality_tol)
