"""
Pick-and-place waypoints.

The gripper goes from the initial point I to an approach point M above the
goal G, down to G, up to the retrieval point R and on to the final point F.
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from edgepose.parser.pointcloud import Point3

WAYPOINT_ORDER = ("I", "M", "G", "R", "F")


@dataclass
class Waypoints:
    initial: np.ndarray
    approach: np.ndarray
    goal: np.ndarray
    retrieval: np.ndarray
    final: np.ndarray

    def as_list(self) -> List[np.ndarray]:
        """Waypoints in travel order I, M, G, R, F."""
        return [self.initial, self.approach, self.goal, self.retrieval, self.final]

    def to_dict(self) -> Dict[str, List[float]]:
        return {name: [round(float(v), 9) for v in point]
                for name, point in zip(WAYPOINT_ORDER, self.as_list())}

    def to_json(self) -> str:
        return json.dumps({"order": list(WAYPOINT_ORDER), "waypoints": self.to_dict()}, indent=2)


def _point(value: Point3, name: str) -> np.ndarray:
    point = np.asarray(value, dtype=np.float64).reshape(-1)
    if point.shape != (3,) or not np.all(np.isfinite(point)):
        raise ValueError(f"{name} must be three finite coordinates")
    return point


def plan_pick_waypoints(goal: Point3, approach: float, lift: float, initial: Point3, final: Point3,
                        up: Sequence[float] = (0.0, 0.0, 1.0)) -> Waypoints:
    """M = G + approach * up and R = G + lift * up, with ``up`` normalized."""
    if not approach > 0:
        raise ValueError(f"approach distance must be positive, got {approach}")
    if not lift > 0:
        raise ValueError(f"lift height must be positive, got {lift}")
    up = _point(up, "up")
    norm = np.linalg.norm(up)
    if norm == 0:
        raise ValueError("up vector must be non-zero")
    up = up / norm
    g = _point(goal, "goal")
    return Waypoints(
        initial=_point(initial, "initial"),
        approach=g + approach * up,
        goal=g,
        retrieval=g + lift * up,
        final=_point(final, "final"),
    )
