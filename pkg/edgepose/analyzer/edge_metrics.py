"""
Edge classification metrics against generator labels.

Boundary points are those within one sampling pitch of a face border.
Interior points are those farther than the guard distance (normally the
scoring radius) from every border, so their whole neighborhood lies on one
face. Points in between are neither and count towards no rate.
"""

import json
from dataclasses import dataclass, asdict

import numpy as np

SCORE_FLOOR = 1e-12


@dataclass
class EdgeMetrics:
    boundary_recall: float
    interior_fp_rate: float
    boundary_count: int
    interior_count: int
    flagged_count: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def evaluate_edge_flags(flags: np.ndarray, boundary: np.ndarray,
                        border_distance: np.ndarray, guard: float) -> EdgeMetrics:
    flags = np.asarray(flags, dtype=bool)
    boundary = np.asarray(boundary, dtype=bool)
    interior = np.asarray(border_distance, dtype=np.float64) > guard
    if not (len(flags) == len(boundary) == len(interior)):
        raise ValueError("flags and labels must have the same length")
    n_boundary = int(boundary.sum())
    n_interior = int(interior.sum())
    recall = float(flags[boundary].mean()) if n_boundary else 0.0
    fp_rate = float(flags[interior].mean()) if n_interior else 0.0
    return EdgeMetrics(boundary_recall=recall, interior_fp_rate=fp_rate,
                       boundary_count=n_boundary, interior_count=n_interior,
                       flagged_count=int(flags.sum()))


def matched_recall_threshold(scores: np.ndarray, boundary: np.ndarray, target_recall: float) -> float:
    """Score threshold at which ``scores >= threshold`` flags ``target_recall`` of the boundary."""
    boundary_scores = np.asarray(scores)[np.asarray(boundary, dtype=bool)]
    if boundary_scores.size == 0:
        return float("inf")
    target = min(1.0, max(0.0, float(target_recall)))
    if target <= 0.0:
        return float("inf")
    return float(np.quantile(boundary_scores, 1.0 - target, method="lower"))


def flags_at_threshold(scores: np.ndarray, threshold: float) -> np.ndarray:
    scores = np.asarray(scores)
    return (scores >= threshold) & (scores > SCORE_FLOOR)
