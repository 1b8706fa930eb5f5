"""
Point cloud container shared by every stage.

Coordinates are meters in the camera frame (z forward from the camera
origin). Point order is preserved by every reader and writer, so indices
into a cloud stay valid for its lifetime.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

Point3 = Union[Tuple[float, float, float], np.ndarray]


class ParseError(ValueError):
    """Structured reader failure, optionally tied to a 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class PointCloud:
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    colors: Optional[np.ndarray] = None
    dropped_count: int = 0
    source: str = ""

    def __post_init__(self):
        self.points = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64).reshape(-1, 3))
        if self.colors is not None:
            self.colors = np.asarray(self.colors, dtype=np.uint8).reshape(-1, 3)
            if len(self.colors) != len(self.points):
                raise ValueError(
                    f"color count {len(self.colors)} does not match point count {len(self.points)}")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("point coordinates must be finite")

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    def subset(self, indices: np.ndarray) -> 'PointCloud':
        """Cloud of the given indices, in the given order."""
        indices = np.asarray(indices, dtype=np.int64)
        colors = self.colors[indices] if self.colors is not None else None
        return PointCloud(points=self.points[indices], colors=colors, source=self.source)

    def crop(self, lower, upper) -> Tuple['PointCloud', np.ndarray]:
        """Keep points inside the closed axis-aligned box; returns the index map too."""
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        inside = np.all((self.points >= lower) & (self.points <= upper), axis=1)
        index_map = np.flatnonzero(inside)
        return self.subset(index_map), index_map

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> 'PointCloud':
        points = self.points @ np.asarray(rotation).T + np.asarray(translation)
        return PointCloud(points=points, colors=self.colors, source=self.source)

    def summary(self) -> dict:
        info = {"points": len(self), "dropped": self.dropped_count, "source": self.source}
        if len(self):
            info["lower"] = [round(float(v), 6) for v in self.points.min(axis=0)]
            info["upper"] = [round(float(v), 6) for v in self.points.max(axis=0)]
        return info

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)
