"""
Edge labelling and local-frame corner correspondences.

Two measured edge lengths are labelled with cuboid axes, and the triplet's
corners are placed on the cuboid face that looks at the camera.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple, Union

import numpy as np

from edgepose.pose.geometry import CornerTriplet
from edgepose.pose.types import CuboidDims, DegenerateGeometryError

DIMENSION_REL_TOL = 0.2
GRAZING_TOL = 0.05


class EdgeLabel(Enum):
    LENGTH = "length"
    BREADTH = "breadth"
    HEIGHT = "height"
    AMBIGUOUS = "ambiguous"

    @property
    def axis(self) -> int:
        if self is EdgeLabel.AMBIGUOUS:
            raise ValueError("ambiguous label has no axis")
        return {EdgeLabel.LENGTH: 0, EdgeLabel.BREADTH: 1, EdgeLabel.HEIGHT: 2}[self]

    @classmethod
    def from_axis(cls, axis: int) -> 'EdgeLabel':
        return (cls.LENGTH, cls.BREADTH, cls.HEIGHT)[axis]


def _matching_axes(length: float, dims: CuboidDims, rel_tol: float) -> List[int]:
    values = dims.as_array()
    return [a for a in range(3) if abs(length - values[a]) <= rel_tol * values[a]]


def classify_edge_dimension(length: float, dims: CuboidDims,
                            rel_tol: float = DIMENSION_REL_TOL) -> EdgeLabel:
    """Axis whose dimension is within ``rel_tol`` of ``length``; ambiguous for none or several."""
    axes = _matching_axes(length, dims, rel_tol)
    if len(axes) != 1:
        return EdgeLabel.AMBIGUOUS
    return EdgeLabel.from_axis(axes[0])


def resolve_labels(length1: float, length2: float, dims: CuboidDims,
                   rel_tol: float = DIMENSION_REL_TOL) -> Tuple[EdgeLabel, EdgeLabel]:
    """Distinct axis labels for two orthogonal edges.

    Several matches are acceptable only when they are axes of equal dimension;
    those resolve in order, the first edge taking the first free axis.
    """
    values = dims.as_array()
    labels = []
    taken = set()
    for length in (length1, length2):
        axes = _matching_axes(length, dims, rel_tol)
        if not axes or len({values[a] for a in axes}) > 1:
            raise ValueError(f"edge length {length:.4f} m has an ambiguous label for dims {dims.to_list()}")
        free = [a for a in axes if a not in taken]
        if not free:
            raise ValueError(f"edges of length {length1:.4f} and {length2:.4f} m map to the same axis")
        taken.add(free[0])
        labels.append(EdgeLabel.from_axis(free[0]))
    return labels[0], labels[1]


@dataclass
class CorrespondenceSet:
    camera: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    local: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        self.camera = np.asarray(self.camera, dtype=np.float64).reshape(-1, 3)
        self.local = np.asarray(self.local, dtype=np.float64).reshape(-1, 3)
        if self.camera.shape != self.local.shape:
            raise ValueError("camera and local corner counts differ")

    def __len__(self) -> int:
        return int(self.camera.shape[0])

    @property
    def solvable(self) -> bool:
        """At least 3 pairs whose local corners are not collinear."""
        if len(self) < 3:
            return False
        singular = np.linalg.svd(self.local - self.local.mean(axis=0), compute_uv=False)
        return bool(singular[0] > 1e-12 and singular[1] > 1e-9 * singular[0])


def _levi_civita(i: int, j: int) -> float:
    return 1.0 if (j - i) % 3 == 1 else -1.0


def assign_directions(triplet: CornerTriplet, label1: Union[EdgeLabel, int], label2: Union[EdgeLabel, int],
                      dims: CuboidDims, grazing_tol: float = GRAZING_TOL,
                      face_sign: float = 1.0) -> CorrespondenceSet:
    """Local-frame corners for p1, p2, p3.

    d1 is taken as +axis(label1). d2 is +axis(label2) when that makes the
    remaining axis point at the camera, otherwise -axis(label2); d1 never flips.
    The triplet lies on the +k face for ``face_sign`` 1 and on the -k face for -1,
    which keeps the rotation and puts the box body on the camera side of the triplet.
    """
    axes = []
    for label in (label1, label2):
        if isinstance(label, EdgeLabel):
            axes.append(label.axis)
        else:
            axes.append(int(label))
    i, j = axes
    if i == j or not (0 <= i < 3 and 0 <= j < 3):
        raise ValueError(f"edge labels must be two distinct axes, got {label1} and {label2}")
    k = 3 - i - j
    if face_sign not in (1.0, -1.0):
        raise ValueError(f"face_sign must be 1 or -1, got {face_sign}")
    facing = triplet.facing
    if abs(facing) < grazing_tol:
        raise DegenerateGeometryError(f"grazing view: |d.t| = {abs(facing):.4f} < {grazing_tol}")

    sign = _levi_civita(i, j) * np.sign(facing)
    half = dims.half
    p1_local = np.zeros(3)
    p1_local[i] = -half[i]
    p1_local[j] = -sign * half[j]
    p1_local[k] = face_sign * half[k]
    step_i = np.zeros(3)
    step_i[i] = triplet.length1
    step_j = np.zeros(3)
    step_j[j] = sign * triplet.length2

    # the remaining axis maps to eps_ijk * sign * d in the camera frame
    assert _levi_civita(i, j) * sign * facing > 0

    return CorrespondenceSet(
        camera=np.vstack([triplet.p1, triplet.p2, triplet.p3]),
        local=np.vstack([p1_local, p1_local + step_i, p1_local + step_j]),
    )
