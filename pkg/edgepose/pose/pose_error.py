"""
Pose errors modulo the symmetry group of the cuboid.

A box with distinct dims looks the same after a half-turn about any local
axis; equal dims add axis swaps. Rotation error is the smallest angle over
those equivalent ground-truth rotations. The centroid is fixed by every
symmetry, so translation error needs no such minimum.
"""

import json
from dataclasses import dataclass, asdict
from itertools import permutations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from edgepose.pose.types import CuboidDims, Pose


@dataclass
class PoseError:
    rotation_deg: float
    translation_m: float

    def within(self, max_rotation_deg: float, max_translation_m: float) -> bool:
        return self.rotation_deg < max_rotation_deg and self.translation_m < max_translation_m

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def symmetry_rotations(dims: CuboidDims, rel_tol: float = 1e-9) -> List[np.ndarray]:
    """Proper signed permutation matrices that map the cuboid onto itself."""
    values = dims.as_array()
    group = []
    for perm in permutations(range(3)):
        if not all(abs(values[perm[a]] - values[a]) <= rel_tol * values[a] for a in range(3)):
            continue
        for signs in product((1.0, -1.0), repeat=3):
            matrix = np.zeros((3, 3))
            for a in range(3):
                matrix[perm[a], a] = signs[a]
            if np.linalg.det(matrix) > 0:
                group.append(matrix)
    return group


def rotation_angle_deg(rotation_a: np.ndarray, rotation_b: np.ndarray) -> float:
    cosine = (np.trace(np.asarray(rotation_a).T @ np.asarray(rotation_b)) - 1.0) / 2.0
    return float(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))


def pose_error(estimate: Pose, truth: Pose, dims: CuboidDims) -> PoseError:
    rotation = min(rotation_angle_deg(estimate.rotation, truth.rotation @ s)
                   for s in symmetry_rotations(dims))
    translation = float(np.linalg.norm(estimate.translation - truth.translation))
    return PoseError(rotation_deg=rotation, translation_m=translation)


def match_to_truth(estimate: Pose, truths: Sequence[Pose],
                   dims: CuboidDims) -> Optional[Tuple[int, PoseError]]:
    """Ground-truth pose nearest in translation, with its error."""
    if not truths:
        return None
    distances = [np.linalg.norm(estimate.translation - t.translation) for t in truths]
    best = int(np.argmin(distances))
    return best, pose_error(estimate, truths[best], dims)
