"""
Cuboid dimensions and 6D poses.

The local object frame sits at the cuboid centroid with x, y, z along the
length, breadth and height. A pose maps local coordinates to the camera
frame: x_camera = R @ x_local + t.
"""

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

ORTHONORMAL_TOL = 1e-6


class DegenerateGeometryError(ValueError):
    """Geometry that admits no unique answer (collinear points, grazing view, ...)."""


@dataclass(frozen=True)
class CuboidDims:
    l: float
    b: float
    h: float

    def __post_init__(self):
        for name in ('l', 'b', 'h'):
            value = float(getattr(self, name))
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"cuboid dimension {name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def parse(cls, text: str) -> 'CuboidDims':
        """Parse 'L,B,H' in meters."""
        parts = [p for p in text.replace(' ', '').split(',') if p]
        if len(parts) != 3:
            raise ValueError(f"--dims expects L,B,H, got '{text}'")
        return cls(*(float(p) for p in parts))

    @classmethod
    def from_sequence(cls, values) -> 'CuboidDims':
        values = list(values)
        if len(values) != 3:
            raise ValueError(f"dims need three values, got {values}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        return np.array([self.l, self.b, self.h], dtype=np.float64)

    @property
    def half(self) -> np.ndarray:
        return self.as_array() / 2.0

    @property
    def symmetry(self) -> str:
        distinct = len({self.l, self.b, self.h})
        return {3: "box", 2: "square-prism", 1: "cube"}[distinct]

    def corners(self) -> np.ndarray:
        """The 8 local-frame corners, sign pattern in lexicographic (-,-,-) ... (+,+,+) order."""
        signs = np.array(list(product((-1.0, 1.0), repeat=3)))
        return signs * self.half

    def to_list(self) -> list:
        return [self.l, self.b, self.h]


@dataclass
class Pose:
    """Rigid transform local -> camera."""
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3)

    @property
    def is_valid(self) -> bool:
        r = self.rotation
        return (np.allclose(r.T @ r, np.eye(3), atol=ORTHONORMAL_TOL)
                and abs(np.linalg.det(r) - 1.0) <= ORTHONORMAL_TOL)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def inverse(self) -> 'Pose':
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)

    def compose(self, other: 'Pose') -> 'Pose':
        """self after other."""
        return Pose(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)

    def corners(self, dims: CuboidDims) -> np.ndarray:
        return self.apply(dims.corners())

    @property
    def quaternion(self) -> np.ndarray:
        """(w, x, y, z), w >= 0."""
        x, y, z, w = Rotation.from_matrix(self.rotation).as_quat()
        q = np.array([w, x, y, z])
        return -q if w < 0 else q

    @classmethod
    def from_quaternion(cls, wxyz, translation) -> 'Pose':
        w, x, y, z = wxyz
        return cls(Rotation.from_quat([x, y, z, w]).as_matrix(), translation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "quaternion_wxyz": [round(float(v), 9) for v in self.quaternion],
            "rotation": [[round(float(v), 9) for v in row] for row in self.rotation],
            "translation": [round(float(v), 9) for v in self.translation],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Pose':
        if 'rotation' in data:
            return cls(np.array(data['rotation']), np.array(data['translation']))
        return cls.from_quaternion(data['quaternion_wxyz'], data['translation'])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
