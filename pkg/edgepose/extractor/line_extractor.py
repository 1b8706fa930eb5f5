"""
Straight-edge extraction from an edge cloud.

Each round fits the best-supported line with RANSAC, anchors it at the
reference point (the inlier with the most inlier neighbors), bounds it by the
two extreme points on either side of that anchor, and removes the covered
points before the next round.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud
from edgepose.utils.accel import njit, prange
from edgepose.utils.params import ExtractParams

logger = logging.getLogger(__name__)

DOT_TOL = 1e-12
COINCIDENT_EPS = 1e-12
REFIT_ROUNDS = 5


@dataclass
class LineModel:
    """Infinite line through ``point`` along unit ``direction``."""
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        self.point = np.asarray(self.point, dtype=np.float64).reshape(3)
        direction = np.asarray(self.direction, dtype=np.float64).reshape(3)
        norm = np.linalg.norm(direction)
        if not norm > COINCIDENT_EPS:
            raise ValueError("line direction must be non-zero")
        self.direction = direction / norm

    def project(self, points: np.ndarray) -> np.ndarray:
        """Signed coordinate of each point's foot along the line."""
        return (np.asarray(points, dtype=np.float64) - self.point) @ self.direction

    def snap(self, points: np.ndarray) -> np.ndarray:
        return self.point + np.outer(self.project(points), self.direction)

    def distances2(self, points: np.ndarray) -> np.ndarray:
        offsets = np.asarray(points, dtype=np.float64) - self.point
        along = offsets @ self.direction
        return np.maximum(np.einsum('ij,ij->i', offsets, offsets) - along * along, 0.0)

    def inliers(self, points: np.ndarray, threshold: float) -> np.ndarray:
        return np.flatnonzero(self.distances2(points) <= threshold * threshold)


@dataclass
class LineSegment:
    """Edge bounded by extreme points ``e1`` and ``e2``."""
    e1: np.ndarray
    e2: np.ndarray
    members: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    one_sided: bool = False

    def __post_init__(self):
        self.e1 = np.asarray(self.e1, dtype=np.float64).reshape(3)
        self.e2 = np.asarray(self.e2, dtype=np.float64).reshape(3)
        self.members = np.asarray(self.members, dtype=np.int64)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.e2 - self.e1))

    @property
    def direction(self) -> np.ndarray:
        length = self.length
        if length <= 0:
            raise ValueError("zero-length segment has no direction")
        return (self.e2 - self.e1) / length

    @property
    def endpoints(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.e1, self.e2

    @property
    def member_count(self) -> int:
        return int(self.members.shape[0])

    def to_dict(self) -> dict:
        return {
            "e1": [round(float(v), 6) for v in self.e1],
            "e2": [round(float(v), 6) for v in self.e2],
            "length": round(self.length, 6),
            "member_count": self.member_count,
            "one_sided": bool(self.one_sided),
        }


@dataclass
class ExtremePoints:
    e1: int
    e2: int
    one_sided: bool = False


@njit(parallel=True)
def _consensus(points, anchors, directions, valid, threshold2, counts):
    n = points.shape[0]
    for h in prange(anchors.shape[0]):
        if valid[h]:
            ax = anchors[h, 0]
            ay = anchors[h, 1]
            az = anchors[h, 2]
            ux = directions[h, 0]
            uy = directions[h, 1]
            uz = directions[h, 2]
            c = 0
            for i in range(n):
                vx = points[i, 0] - ax
                vy = points[i, 1] - ay
                vz = points[i, 2] - az
                t = vx * ux + vy * uy + vz * uz
                if vx * vx + vy * vy + vz * vz - t * t <= threshold2:
                    c += 1
            counts[h] = c
        else:
            counts[h] = -1


def fit_line(points: np.ndarray) -> LineModel:
    """Total least-squares line; direction sign fixed so its largest component is positive."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] < 2:
        raise ValueError("a line fit needs at least 2 points")
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    direction = vt[0]
    if direction[np.argmax(np.abs(direction))] < 0:
        direction = -direction
    return LineModel(point=centroid, direction=direction)


def _as_rng(seed: Union[int, np.random.Generator, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ransac_line(points: np.ndarray, params: Optional[ExtractParams] = None,
                seed: Union[int, np.random.Generator, None] = 0,
                min_inliers: Optional[int] = None) -> Optional[Tuple[LineModel, np.ndarray]]:
    """Best-consensus line over ``points``; None when no line reaches ``min_inliers``."""
    params = params or ExtractParams()
    points = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    n = points.shape[0]
    if n < 2:
        raise ValueError(f"RANSAC needs at least 2 points, got {n}")
    needed = params.min_inliers_for(n) if min_inliers is None else int(min_inliers)
    rng = _as_rng(seed)

    iterations = params.max_iterations
    first = rng.integers(0, n, size=iterations)
    second = rng.integers(0, n - 1, size=iterations)
    second = second + (second >= first)
    anchors = np.ascontiguousarray(points[first])
    directions = points[second] - anchors
    norms = np.linalg.norm(directions, axis=1)
    valid = norms > COINCIDENT_EPS
    directions[valid] /= norms[valid, None]
    directions = np.ascontiguousarray(directions)

    counts = np.empty(iterations, dtype=np.int64)
    threshold = params.ransac_threshold
    _consensus(points, anchors, directions, valid, threshold * threshold, counts)
    best = int(np.argmax(counts))
    logger.debug(f"RANSAC best consensus {counts[best]} of {n} (need {needed})")
    if counts[best] < needed:
        return None

    model = LineModel(point=anchors[best], direction=directions[best])
    inliers = model.inliers(points, threshold)
    # a hypothesis cutting obliquely through a wide edge band keeps a biased
    # slice of it; refit until the tube around the fit selects the same points
    for _ in range(REFIT_ROUNDS):
        refined = fit_line(points[inliers])
        refined_inliers = refined.inliers(points, threshold)
        if refined_inliers.shape[0] < needed:
            break
        settled = np.array_equal(refined_inliers, inliers)
        model, inliers = refined, refined_inliers
        if settled:
            break
    return model, inliers


def reference_index(points: np.ndarray, radius: float) -> int:
    """Position of the point with the most neighbors within ``radius``; ties go to the lowest."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if points.shape[0] == 0:
        raise ValueError("reference index of an empty inlier set")
    counts = SpatialIndex(points).count_neighbors(radius)
    return int(np.argmax(counts))


def extreme_points(points: np.ndarray, ref: int, radius: float) -> Optional[ExtremePoints]:
    """Bounding extremes of the run of points around ``points[ref]``.

    A candidate qualifies when every neighbor within ``radius`` lies on the
    reference side of it (non-negative dot with the direction towards the
    reference point). e1 is the qualifying candidate nearest the reference;
    e2 is the nearest qualifying candidate on the opposite side. Without an
    opposite candidate the result is one-sided: e2 is the qualifying candidate
    farthest from the reference, or the reference point itself when e1 is the
    only candidate. Returns None when nothing qualifies.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    m = points.shape[0]
    if m < 2:
        raise ValueError("extreme points need at least 2 points")
    if not 0 <= ref < m:
        raise IndexError(f"reference index {ref} out of range for {m} points")
    anchor = points[ref]

    offsets, neighbors = SpatialIndex(points).radius_neighbors_batch(radius)
    owner = np.repeat(np.arange(m), np.diff(offsets))
    toward = anchor - points[owner]
    dots = np.einsum('ij,ij->i', toward, points[neighbors] - points[owner])
    blocked = np.zeros(m, dtype=bool)
    blocked[owner[dots < -DOT_TOL]] = True

    distance = np.linalg.norm(points - anchor, axis=1)
    qualifies = ~blocked & (distance > COINCIDENT_EPS)
    qualifies[ref] = False
    candidates = np.flatnonzero(qualifies)
    if candidates.size == 0:
        return None
    e1 = int(candidates[np.argmin(distance[candidates])])

    side = (points[candidates] - anchor) @ (points[e1] - anchor)
    opposite = candidates[side < 0]
    if opposite.size == 0:
        farthest = int(candidates[np.argmax(distance[candidates])])
        return ExtremePoints(e1=e1, e2=farthest if farthest != e1 else int(ref), one_sided=True)
    e2 = int(opposite[np.argmin(distance[opposite])])
    return ExtremePoints(e1=e1, e2=e2, one_sided=False)


class LineExtractor:
    """Repeated RANSAC + extremes until no line has enough support."""

    def __init__(self, params: Optional[ExtractParams] = None):
        self.params = params or ExtractParams()

    def _core_line(self, points: np.ndarray, line: LineModel, ends: np.ndarray, needed: int) -> LineModel:
        """Refit on the stretch between the extremes, one radius clear of the corners at either end."""
        radius = self.params.radius
        threshold2 = self.params.ransac_threshold ** 2
        for _ in range(REFIT_ROUNDS):
            bounds = line.project(ends)
            along = line.project(points)
            core = ((line.distances2(points) <= threshold2)
                    & (along >= bounds.min() + radius) & (along <= bounds.max() - radius))
            if np.count_nonzero(core) < max(2, needed):
                break
            line = fit_line(points[core])
        return line

    def extract(self, edges: Union[PointCloud, np.ndarray],
                seed: Union[int, np.random.Generator, None] = 0) -> List[LineSegment]:
        points = edges.points if isinstance(edges, PointCloud) else np.asarray(edges, dtype=np.float64)
        points = np.ascontiguousarray(points.reshape(-1, 3))
        n = points.shape[0]
        params = self.params
        needed = params.min_inliers_for(n)
        rng = _as_rng(seed)
        working = np.ones(n, dtype=bool)
        segments: List[LineSegment] = []
        rounds = 0

        while len(segments) < params.max_segments:
            work_idx = np.flatnonzero(working)
            if work_idx.shape[0] < max(2, needed):
                break
            rounds += 1
            fit = ransac_line(points[work_idx], params, rng, min_inliers=needed)
            if fit is None:
                break
            line, _ = fit

            # inliers over the whole edge cloud, so points already taken by
            # earlier segments still extend this one to its true ends
            d2 = line.distances2(points)
            within = d2 <= params.ransac_threshold ** 2
            full_inliers = np.flatnonzero(within)
            work_inliers = work_idx[within[work_idx]]
            if work_inliers.shape[0] == 0:
                break

            ref_global = int(work_inliers[reference_index(points[work_inliers], params.radius)])
            snapped = line.snap(points[full_inliers])
            ref_local = int(np.searchsorted(full_inliers, ref_global))
            extremes = extreme_points(snapped, ref_local, params.radius)
            if extremes is None:
                logger.debug(f"Round {rounds}: no extreme points, dropping {work_inliers.shape[0]} inliers")
                working[work_inliers] = False
                continue

            ends = points[full_inliers[[extremes.e1, extremes.e2]]]
            s1, s2 = line.project(ends)
            along = line.project(points[work_inliers])
            covered = work_inliers[(along >= min(s1, s2) - params.radius) & (along <= max(s1, s2) + params.radius)]

            line = self._core_line(points, line, ends, needed)
            e1, e2 = line.snap(ends)
            s1, s2 = line.project(np.vstack([e1, e2]))
            lower, upper = min(s1, s2) - params.radius, max(s1, s2) + params.radius
            near = work_idx[line.distances2(points[work_idx]) <= params.ransac_threshold ** 2]
            along = line.project(points[near])
            members = near[(along >= lower) & (along <= upper)]
            working[covered] = False
            working[members] = False

            segment = LineSegment(e1=e1, e2=e2, members=members, one_sided=extremes.one_sided)
            if members.shape[0] < needed or segment.length <= 0:
                logger.debug(f"Round {rounds}: segment with {members.shape[0]} members dropped")
                working[work_inliers] = False
                continue
            segments.append(segment)
            logger.debug(f"Round {rounds}: segment length {segment.length:.4f} m, "
                         f"{segment.member_count} members{' (one-sided)' if segment.one_sided else ''}")

        logger.info(f"Extracted {len(segments)} segments from {n} edge points in {rounds} rounds")
        return segments


def extract_all_segments(edges: Union[PointCloud, np.ndarray], params: Optional[ExtractParams] = None,
                         seed: Union[int, np.random.Generator, None] = 0) -> List[LineSegment]:
    return LineExtractor(params).extract(edges, seed=seed)


def segments_to_json(segments: List[LineSegment]) -> str:
    return json.dumps({"segments": [s.to_dict() for s in segments]}, indent=2)
