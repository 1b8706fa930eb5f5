"""
Resultant-score edges versus the covariance baseline on labeled scenes.

For every noise level a planar scene is generated (or a labeled scene is
given). The proposed detector runs at its configured threshold; each
baseline k is then thresholded to flag the same share of boundary points,
and the interior false-positive rates are compared at that matched recall.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Sequence

from edgepose.analyzer.covariance_baseline import covariance_edge_baseline
from edgepose.analyzer.edge_detector import EdgeDetector
from edgepose.analyzer.edge_metrics import evaluate_edge_flags, flags_at_threshold, matched_recall_threshold
from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud
from edgepose.scene.scene_generator import SceneGroundTruth, sample_planar_grid
from edgepose.utils.params import EdgeParams

logger = logging.getLogger(__name__)

NOISE_LEVELS = (0.0, 0.001, 0.002)
BASELINE_KS = (4, 5, 10, 30)


@dataclass
class ComparisonRow:
    noise: float
    k: int
    points: int
    proposed_recall: float
    proposed_interior_fp: float
    baseline_threshold: float
    baseline_recall: float
    baseline_interior_fp: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def compare_on_scene(cloud: PointCloud, truth: SceneGroundTruth, noise: float,
                     edge: Optional[EdgeParams] = None, ks: Sequence[int] = BASELINE_KS,
                     guard: Optional[float] = None) -> List[ComparisonRow]:
    edge = edge or EdgeParams()
    guard = edge.radius if guard is None else guard
    if len(truth.labels) != len(cloud):
        raise ValueError(f"truth has {len(truth.labels)} labels for {len(cloud)} points")
    index = SpatialIndex.build(cloud)
    scored = EdgeDetector(edge).score(cloud, index)
    boundary = truth.boundary
    border = truth.labels.border_distance
    proposed = evaluate_edge_flags(scored.edge_mask, boundary, border, guard)

    rows = []
    for k in ks:
        scores = covariance_edge_baseline(cloud, index, k)
        threshold = matched_recall_threshold(scores, boundary, proposed.boundary_recall)
        baseline = evaluate_edge_flags(flags_at_threshold(scores, threshold), boundary, border, guard)
        rows.append(ComparisonRow(
            noise=noise, k=int(k), points=len(cloud),
            proposed_recall=round(proposed.boundary_recall, 6),
            proposed_interior_fp=round(proposed.interior_fp_rate, 6),
            baseline_threshold=round(threshold, 9) if threshold != float("inf") else -1.0,
            baseline_recall=round(baseline.boundary_recall, 6),
            baseline_interior_fp=round(baseline.interior_fp_rate, 6),
        ))
        logger.debug(f"noise {noise} k {k}: proposed FP {proposed.interior_fp_rate:.4f}, "
                     f"baseline FP {baseline.interior_fp_rate:.4f}")
    return rows


def compare_baseline(noise_levels: Sequence[float] = NOISE_LEVELS, ks: Sequence[int] = BASELINE_KS,
                     edge: Optional[EdgeParams] = None, size: float = 0.2, pitch: float = 0.002,
                     guard: Optional[float] = None, seed: int = 0) -> List[ComparisonRow]:
    """One row per (noise, k), planar scenes seeded ``seed + level index``."""
    rows: List[ComparisonRow] = []
    for i, noise in enumerate(noise_levels):
        cloud, truth = sample_planar_grid(size=size, pitch=pitch, noise=noise, seed=seed + i)
        rows.extend(compare_on_scene(cloud, truth, noise, edge, ks, guard))
    logger.info(f"Baseline comparison: {len(rows)} rows")
    return rows
