"""
Resultant-direction edge scoring.

For each point p the unit vectors towards its neighbors within radius r are
summed into a resultant R(p). The score is the mean projection of those unit
vectors onto R/|R|, which simplifies to |R|/k. Interior points of a densely
sampled surface have neighbors all around them and score near 0; points on
a border or crease see their neighbors on one side and score high.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from edgepose.index.kdtree import SpatialIndex, _box_distance2
from edgepose.parser.pointcloud import PointCloud
from edgepose.utils.accel import njit, prange
from edgepose.utils.params import CropBox, EdgeParams

logger = logging.getLogger(__name__)

RESULTANT_EPS = 1e-12
COINCIDENT_EPS = 1e-12


@njit(parallel=True)
def _score_all(points, perm, starts, ends, lefts, rights, lower, upper,
               r, k_min, eps, coincident, scores, counts, pairs):
    r2 = r * r
    for i in prange(points.shape[0]):
        qx = points[i, 0]
        qy = points[i, 1]
        qz = points[i, 2]
        rx = 0.0
        ry = 0.0
        rz = 0.0
        k = 0
        visited = 0
        stack = np.empty(128, np.int64)
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            if _box_distance2(node, lower, upper, qx, qy, qz) > r2:
                continue
            if lefts[node] < 0:
                for p in range(starts[node], ends[node]):
                    j = perm[p]
                    visited += 1
                    if j == i:
                        continue
                    dx = points[j, 0] - qx
                    dy = points[j, 1] - qy
                    dz = points[j, 2] - qz
                    dd = dx * dx + dy * dy + dz * dz
                    if dd <= r2:
                        k += 1
                        dist = math.sqrt(dd)
                        if dist > coincident:
                            rx += dx / dist
                            ry += dy / dist
                            rz += dz / dist
            else:
                stack[top] = lefts[node]
                stack[top + 1] = rights[node]
                top += 2
        counts[i] = k
        pairs[i] = visited
        norm = math.sqrt(rx * rx + ry * ry + rz * rz)
        if k >= k_min and norm > eps:
            scores[i] = min(1.0, norm / k)
        else:
            scores[i] = 0.0


@dataclass
class ScoredCloud:
    """Per-point scores, neighbor counts and edge flags for one cloud."""
    scores: np.ndarray
    neighbor_counts: np.ndarray
    edge_mask: np.ndarray
    params: EdgeParams = field(default_factory=EdgeParams)
    visited_pairs: int = 0

    @property
    def edge_indices(self) -> np.ndarray:
        return np.flatnonzero(self.edge_mask)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.edge_mask))

    def __len__(self) -> int:
        return int(self.scores.shape[0])

    def histogram(self, bins: int = 20) -> Tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.scores, bins=bins, range=(0.0, 1.0))


def point_score(cloud: PointCloud, index: SpatialIndex, i: int, radius: float,
                min_neighbors: int = 3) -> Tuple[float, int]:
    """Score of one point written out term by term: sum_j R_hat . d_hat_j / k."""
    if not 0 <= int(i) < len(cloud):
        raise IndexError(f"point index {i} out of range for {len(cloud)} points")
    neighbors = index.radius_neighbors(int(i), radius)
    k = neighbors.k
    if k == 0:
        return 0.0, 0
    offsets = cloud.points[neighbors.indices] - cloud.points[int(i)]
    lengths = np.linalg.norm(offsets, axis=1)
    directions = np.zeros_like(offsets)
    usable = lengths > COINCIDENT_EPS
    directions[usable] = offsets[usable] / lengths[usable, None]
    resultant = directions.sum(axis=0)
    norm = float(np.linalg.norm(resultant))
    if k < min_neighbors or norm <= RESULTANT_EPS:
        return 0.0, k
    score = float(np.sum(directions @ (resultant / norm)) / k)
    return min(1.0, max(0.0, score)), k


class EdgeDetector:
    """Classifies the points of a cloud as edge or interior."""

    def __init__(self, params: Optional[EdgeParams] = None):
        self.params = params or EdgeParams()

    def score(self, cloud: PointCloud, index: Optional[SpatialIndex] = None) -> ScoredCloud:
        n = len(cloud)
        if n == 0:
            empty = np.zeros(0)
            return ScoredCloud(scores=empty, neighbor_counts=np.zeros(0, dtype=np.int64),
                               edge_mask=np.zeros(0, dtype=bool), params=self.params)
        if index is None:
            index = SpatialIndex.build(cloud)
        scores = np.zeros(n, dtype=np.float64)
        counts = np.zeros(n, dtype=np.int64)
        pairs = np.zeros(n, dtype=np.int64)
        _score_all(index.points, index.perm, index.starts, index.ends, index.lefts, index.rights,
                   index.lower, index.upper, float(self.params.radius), int(self.params.min_neighbors),
                   RESULTANT_EPS, COINCIDENT_EPS, scores, counts, pairs)
        edge_mask = (scores > self.params.threshold) & (counts >= self.params.min_neighbors)
        scored = ScoredCloud(scores=scores, neighbor_counts=counts, edge_mask=edge_mask,
                             params=self.params, visited_pairs=int(pairs.sum()))
        logger.debug(f"Scored {n} points at r_s={self.params.radius}: {scored.edge_count} edge points")
        return scored

    def extract(self, cloud: PointCloud,
                crop: Optional[CropBox] = None) -> Tuple[PointCloud, np.ndarray, ScoredCloud]:
        """Edge cloud, map from edge index to original index, and the scores of the scored cloud.

        With a crop box only points inside it are scored (and the map still
        refers to the uncropped cloud).
        """
        working, base_map = cloud, np.arange(len(cloud), dtype=np.int64)
        if crop is not None:
            working, base_map = cloud.crop(crop.lower, crop.upper)
            logger.info(f"Crop kept {len(working)} of {len(cloud)} points")
        scored = self.score(working)
        index_map = base_map[scored.edge_indices]
        return cloud.subset(index_map), index_map, scored


def extract_edge_points(cloud: PointCloud, params: Optional[EdgeParams] = None,
                        crop: Optional[CropBox] = None) -> Tuple[PointCloud, np.ndarray]:
    """Edge cloud E plus the index map back to ``cloud``."""
    edges, index_map, _ = EdgeDetector(params).extract(cloud, crop=crop)
    return edges, index_map
