"""
Segment relations, corner triplets and oriented-box overlap.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from edgepose.extractor.line_extractor import LineSegment
from edgepose.pose.types import DegenerateGeometryError

ORTHOGONALITY_TOL = 0.1
INTERSECTION_TOL = 0.01


def segments_orthogonal(l1: LineSegment, l2: LineSegment, tol: float = ORTHOGONALITY_TOL) -> bool:
    if l1.length <= 0 or l2.length <= 0:
        return False
    return abs(float(l1.direction @ l2.direction)) <= tol


def closest_endpoints(l1: LineSegment, l2: LineSegment) -> Tuple[int, int, float]:
    """(endpoint of l1, endpoint of l2, distance) for the closest of the 4 endpoint pairs."""
    best = (0, 0, float("inf"))
    for i, a in enumerate(l1.endpoints):
        for j, b in enumerate(l2.endpoints):
            dist = float(np.linalg.norm(a - b))
            if dist < best[2]:
                best = (i, j, dist)
    return best


def segments_intersect(l1: LineSegment, l2: LineSegment,
                       tol: float = INTERSECTION_TOL) -> Optional[np.ndarray]:
    """Corner point shared by the two segments, or None.

    The corner is the midpoint of the closest endpoint pair when that pair is
    within ``tol`` meters.
    """
    i, j, dist = closest_endpoints(l1, l2)
    if dist > tol:
        return None
    return (l1.endpoints[i] + l2.endpoints[j]) / 2.0


@dataclass
class CornerTriplet:
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    t: np.ndarray
    d: np.ndarray

    @property
    def length1(self) -> float:
        return float(np.linalg.norm(self.p2 - self.p1))

    @property
    def length2(self) -> float:
        return float(np.linalg.norm(self.p3 - self.p1))

    @property
    def facing(self) -> float:
        """d . t; its sign says which side of the corner's face the camera is on."""
        return float(self.d @ self.t)


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm <= 1e-12:
        raise DegenerateGeometryError(f"zero-length {what}")
    return v / norm


def corner_triplet(l1: LineSegment, l2: LineSegment, tol: float = INTERSECTION_TOL,
                   camera: Sequence[float] = (0.0, 0.0, 0.0)) -> CornerTriplet:
    """Shared corner p1, far ends p2 (of l1) and p3 (of l2), and the unit vectors

    d1 = (p2 - p1)/|..|, d2 = (p3 - p1)/|..|, t towards the camera from p1 and
    d = d1 x d2 normalized.
    """
    i, j, dist = closest_endpoints(l1, l2)
    if dist > tol:
        raise DegenerateGeometryError(f"segments do not intersect (closest endpoints {dist:.4f} m apart)")
    p1 = (l1.endpoints[i] + l2.endpoints[j]) / 2.0
    p2 = l1.endpoints[1 - i].copy()
    p3 = l2.endpoints[1 - j].copy()
    d1 = _unit(p2 - p1, "first edge")
    d2 = _unit(p3 - p1, "second edge")
    t = _unit(np.asarray(camera, dtype=np.float64) - p1, "camera ray")
    d = _unit(np.cross(d1, d2), "corner normal")
    return CornerTriplet(p1=p1, p2=p2, p3=p3, d1=d1, d2=d2, t=t, d=d)


def boxes_overlap(rotation_a: np.ndarray, center_a: np.ndarray, half_a: np.ndarray,
                  rotation_b: np.ndarray, center_b: np.ndarray, half_b: np.ndarray) -> bool:
    """Separating-axis test for two oriented boxes (columns of each rotation are the box axes)."""
    ra = np.asarray(rotation_a, dtype=np.float64)
    rb = np.asarray(rotation_b, dtype=np.float64)
    ha = np.asarray(half_a, dtype=np.float64)
    hb = np.asarray(half_b, dtype=np.float64)
    offset = np.asarray(center_b, dtype=np.float64) - np.asarray(center_a, dtype=np.float64)

    axes = [ra[:, k] for k in range(3)] + [rb[:, k] for k in range(3)]
    for m in range(3):
        for n in range(3):
            cross = np.cross(ra[:, m], rb[:, n])
            if np.linalg.norm(cross) > 1e-9:
                axes.append(cross)
    for axis in axes:
        axis = axis / np.linalg.norm(axis)
        reach_a = float(np.sum(ha * np.abs(ra.T @ axis)))
        reach_b = float(np.sum(hb * np.abs(rb.T @ axis)))
        if abs(float(offset @ axis)) > reach_a + reach_b:
            return False
    return True
