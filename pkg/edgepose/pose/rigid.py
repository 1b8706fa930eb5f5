"""
Least-squares rigid alignment of corresponding point sets.
"""

from typing import Optional, Union

import numpy as np

from edgepose.pose.correspondences import CorrespondenceSet
from edgepose.pose.types import DegenerateGeometryError, Pose


def pose_from_correspondences(pairs: Union[CorrespondenceSet, np.ndarray],
                              local: Optional[np.ndarray] = None) -> Pose:
    """Pose minimizing sum |R @ local_i + t - camera_i|^2.

    Accepts a CorrespondenceSet or the (camera, local) arrays. Needs at least
    three pairs with non-collinear local points.
    """
    if not isinstance(pairs, CorrespondenceSet):
        pairs = CorrespondenceSet(camera=pairs, local=local)
    if len(pairs) < 3:
        raise DegenerateGeometryError(f"pose needs at least 3 correspondences, got {len(pairs)}")
    if not pairs.solvable:
        raise DegenerateGeometryError("correspondences are collinear")

    camera_centroid = pairs.camera.mean(axis=0)
    local_centroid = pairs.local.mean(axis=0)
    covariance = (pairs.local - local_centroid).T @ (pairs.camera - camera_centroid)
    u, _, vt = np.linalg.svd(covariance)
    reflection = np.sign(np.linalg.det(vt.T @ u.T))
    if reflection == 0:
        reflection = 1.0
    rotation = vt.T @ np.diag([1.0, 1.0, reflection]) @ u.T
    translation = camera_centroid - rotation @ local_centroid
    return Pose(rotation=rotation, translation=translation)
