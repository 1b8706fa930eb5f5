"""
Per-group pose hypotheses, corner refinement and candidate selection.
"""

import json
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from edgepose.extractor.line_extractor import LineSegment
from edgepose.pose.clubbing import EdgeGroup, club_all
from edgepose.pose.correspondences import CorrespondenceSet, assign_directions, resolve_labels
from edgepose.pose.geometry import boxes_overlap, corner_triplet, segments_intersect, segments_orthogonal
from edgepose.pose.rigid import pose_from_correspondences
from edgepose.pose.types import CuboidDims, DegenerateGeometryError, Pose
from edgepose.utils.params import PoseParams

logger = logging.getLogger(__name__)

OVERLAP_SHRINK = 0.9
REFINE_ROUNDS = 2
# corner index pairs that differ in exactly one sign
BOX_EDGES = tuple((a, b) for a in range(8) for b in range(a + 1, 8) if (a ^ b) in (1, 2, 4))


@dataclass
class RefineResult:
    pose: Pose
    matched: int
    residual: float
    refined: bool


@dataclass
class PoseQuality:
    corner_count: int
    edge_support: int
    mean_residual: Optional[float]
    one_sided: List[bool]
    group_size: int
    labels: List[str]
    symmetry: str
    refined: bool


@dataclass
class PoseCandidate:
    pose: Pose
    quality: PoseQuality
    initial: Pose
    group_index: int
    corners: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def to_dict(self) -> Dict[str, Any]:
        data = self.pose.to_dict()
        data["quality"] = asdict(self.quality)
        data["group"] = self.group_index
        return data


@dataclass
class GroupDiagnostic:
    group_index: int
    members: List[int]
    reason: str


def refine_pose(initial: Pose, detected: np.ndarray, dims: CuboidDims, gate: float = 0.02) -> RefineResult:
    """Re-solve the pose from detected corners matched to the 8 predicted corners.

    Matching is greedy by smallest distance; each predicted corner is used at
    most once and pairs farther apart than ``gate`` are rejected. With fewer
    than 3 usable matches the initial pose is kept.
    """
    detected = np.asarray(detected, dtype=np.float64).reshape(-1, 3)
    local_corners = dims.corners()
    if detected.shape[0] == 0:
        return RefineResult(initial, 0, float("inf"), False)
    predicted = initial.apply(local_corners)
    distance = np.linalg.norm(detected[:, None, :] - predicted[None, :, :], axis=2)

    rows, cols = [], []
    masked = distance.copy()
    while True:
        r, c = np.unravel_index(int(np.argmin(masked)), masked.shape)
        if not masked[r, c] <= gate:
            break
        rows.append(int(r))
        cols.append(int(c))
        masked[r, :] = np.inf
        masked[:, c] = np.inf

    if not rows:
        return RefineResult(initial, 0, float("inf"), False)
    pairs = CorrespondenceSet(camera=detected[rows], local=local_corners[cols])
    if len(pairs) < 3 or not pairs.solvable:
        residual = float(distance[rows, cols].mean())
        return RefineResult(initial, len(rows), residual, False)
    pose = pose_from_correspondences(pairs)
    residual = float(np.linalg.norm(pose.apply(pairs.local) - pairs.camera, axis=1).mean())
    return RefineResult(pose, len(rows), residual, True)


def _dedupe_points(points: Sequence[np.ndarray], tol: float) -> np.ndarray:
    kept: List[np.ndarray] = []
    for p in points:
        if not kept or np.min(np.linalg.norm(np.asarray(kept) - p, axis=1)) > tol:
            kept.append(np.asarray(p, dtype=np.float64))
    return np.array(kept).reshape(-1, 3)


def edge_support(pose: Pose, dims: CuboidDims, segments: Sequence[LineSegment],
                 gate: float = 0.02, parallel_tol: float = 0.1) -> int:
    """How many of the 12 predicted box edges have a segment lying along them.

    A segment counts for an edge when 1 - |cos| between them is within
    ``parallel_tol`` and its midpoint is within ``gate`` of the edge, between
    the edge's two corners.
    """
    if len(segments) == 0:
        return 0
    starts = np.array([s.e1 for s in segments], dtype=np.float64)
    spans = np.array([s.e2 for s in segments], dtype=np.float64) - starts
    lengths = np.linalg.norm(spans, axis=1)
    usable = lengths > 0
    if not np.any(usable):
        return 0
    mids = starts[usable] + spans[usable] / 2.0
    directions = spans[usable] / lengths[usable, None]

    corners = pose.corners(dims)
    supported = 0
    for a, b in BOX_EDGES:
        edge = corners[b] - corners[a]
        edge_length = float(np.linalg.norm(edge))
        unit = edge / edge_length
        offset = mids - corners[a]
        along = offset @ unit
        across = np.linalg.norm(offset - along[:, None] * unit, axis=1)
        hit = ((np.abs(directions @ unit) >= 1.0 - parallel_tol) & (across <= gate)
               & (along >= 0.0) & (along <= edge_length))
        if np.any(hit):
            supported += 1
    return supported


class PoseEstimator:
    """Fits one pose per edge group of a scene."""

    def __init__(self, dims: CuboidDims, params: Optional[PoseParams] = None):
        self.dims = dims
        self.params = params or PoseParams()

    def _intersecting_pairs(self, members: Sequence[int],
                            segments: Sequence[LineSegment]) -> List[Tuple[int, int, np.ndarray]]:
        pairs = []
        for a_pos, a in enumerate(members):
            for b in members[a_pos + 1:]:
                if not segments_orthogonal(segments[a], segments[b], self.params.orthogonality_tol):
                    continue
                corner = segments_intersect(segments[a], segments[b], self.params.intersection_tol)
                if corner is not None:
                    pairs.append((a, b, corner))
        return pairs

    def scene_corners(self, segments: Sequence[LineSegment]) -> np.ndarray:
        """Corners from every orthogonal intersecting pair in the scene, not only within one group."""
        corners = [c for _, _, c in self._intersecting_pairs(range(len(segments)), segments)]
        return _dedupe_points(corners, self.params.intersection_tol)

    def _refine(self, initial: Pose, corners: np.ndarray) -> RefineResult:
        gate = self.params.refine_gate
        result = refine_pose(initial, corners, self.dims, gate)
        # a refined pose can gate in corners the first guess missed
        for _ in range(REFINE_ROUNDS - 1):
            if not result.refined:
                break
            again = refine_pose(result.pose, corners, self.dims, gate)
            if again.matched < result.matched:
                break
            result = again
        return result

    def fit_group(self, group: EdgeGroup, segments: Sequence[LineSegment], group_index: int = 0,
                  scene_corners: Optional[np.ndarray] = None) -> Tuple[Optional[PoseCandidate], str]:
        """Best pose over the group's usable corner pairs, or None and the reason.

        Each pair is tried on both faces normal to its remaining axis. Hypotheses
        rank by how many box edges the scene's segments support, then by matched
        corners, then the camera-facing placement, then residual.
        """
        if not group.posable:
            return None, "singleton group"
        pairs = self._intersecting_pairs(group.members, segments)
        # stable sort keeps discovery order among equally supported pairs
        pairs.sort(key=lambda p: -(segments[p[0]].member_count + segments[p[1]].member_count))
        params = self.params
        known = [c for _, _, c in pairs]
        if scene_corners is not None:
            known.extend(np.asarray(scene_corners, dtype=np.float64).reshape(-1, 3))
        reasons = []
        best: Optional[PoseCandidate] = None
        best_key = None

        for a, b, _ in pairs:
            try:
                triplet = corner_triplet(segments[a], segments[b], params.intersection_tol, params.camera)
                labels = resolve_labels(triplet.length1, triplet.length2, self.dims, params.dimension_rel_tol)
                hypotheses = [
                    pose_from_correspondences(assign_directions(triplet, labels[0], labels[1], self.dims,
                                                                params.grazing_tol, face_sign))
                    for face_sign in (1.0, -1.0)]
            except DegenerateGeometryError as e:
                reasons.append(f"degenerate geometry ({e})")
                continue
            except ValueError as e:
                reasons.append(f"ambiguous labels ({e})")
                continue

            corners = _dedupe_points(known + [triplet.p2, triplet.p3], params.intersection_tol)
            for face_rank, initial in enumerate(hypotheses):
                result = self._refine(initial, corners)
                support = edge_support(result.pose, self.dims, segments, params.refine_gate,
                                       params.orthogonality_tol)
                key = (-support, -result.matched, face_rank, result.residual)
                if best_key is not None and key >= best_key:
                    continue
                best_key = key
                members = group.segments(segments)
                best = PoseCandidate(
                    pose=result.pose,
                    initial=initial,
                    group_index=group_index,
                    corners=corners,
                    quality=PoseQuality(
                        corner_count=result.matched,
                        edge_support=support,
                        mean_residual=round(result.residual, 9) if np.isfinite(result.residual) else None,
                        one_sided=[bool(s.one_sided) for s in members],
                        group_size=len(group),
                        labels=[labels[0].value, labels[1].value],
                        symmetry=self.dims.symmetry,
                        refined=result.refined,
                    ),
                )

        if best is None:
            reason = reasons[0] if reasons else "no orthogonal intersecting pair"
            return None, reason
        return best, "ok"

    def _suppress_overlaps(self, candidates: List[PoseCandidate]) -> List[PoseCandidate]:
        ranked = sorted(candidates, key=lambda c: (
            -c.quality.edge_support,
            -c.quality.corner_count,
            c.quality.mean_residual if c.quality.mean_residual is not None else float("inf"),
            c.group_index))
        half = self.dims.half * OVERLAP_SHRINK
        kept: List[PoseCandidate] = []
        for candidate in ranked:
            clash = any(boxes_overlap(candidate.pose.rotation, candidate.pose.translation, half,
                                      other.pose.rotation, other.pose.translation, half)
                        for other in kept)
            if clash:
                logger.debug(f"Group {candidate.group_index}: pose overlaps a better one, suppressed")
                continue
            kept.append(candidate)
        return kept

    def estimate(self, segments: Sequence[LineSegment],
                 groups: Optional[List[EdgeGroup]] = None) -> Tuple[List[PoseCandidate], List[GroupDiagnostic]]:
        """Poses nearest the camera first, plus a diagnostic for every group without one."""
        if groups is None:
            groups = club_all(segments, self.params)
        candidates: List[PoseCandidate] = []
        diagnostics: List[GroupDiagnostic] = []
        shared = self.scene_corners(segments) if groups else None
        for index, group in enumerate(groups):
            candidate, reason = self.fit_group(group, segments, index, shared)
            if candidate is None:
                logger.debug(f"Group {index} ({len(group)} segments) skipped: {reason}")
                diagnostics.append(GroupDiagnostic(group_index=index, members=list(group.members), reason=reason))
            else:
                candidates.append(candidate)

        kept = self._suppress_overlaps(candidates)
        camera = np.asarray(self.params.camera)
        kept.sort(key=lambda c: (float(np.linalg.norm(c.pose.translation - camera)), c.group_index))
        logger.info(f"Estimated {len(kept)} poses from {len(groups)} groups")
        return kept, diagnostics


def poses_to_json(candidates: List[PoseCandidate], diagnostics: List[GroupDiagnostic],
                  dims: CuboidDims) -> str:
    return json.dumps({
        "dims": dims.to_list(),
        "symmetry": dims.symmetry,
        "poses": [c.to_dict() for c in candidates],
        "diagnostics": [asdict(d) for d in diagnostics],
    }, indent=2)
