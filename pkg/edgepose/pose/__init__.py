"""Cuboid pose estimation"""

from edgepose.pose.types import CuboidDims, DegenerateGeometryError, Pose
from edgepose.pose.geometry import (CornerTriplet, boxes_overlap, corner_triplet,
                                    segments_intersect, segments_orthogonal)
from edgepose.pose.clubbing import EdgeGroup, EdgeLink, club_all, club_edges
from edgepose.pose.correspondences import (CorrespondenceSet, EdgeLabel, assign_directions,
                                           classify_edge_dimension, resolve_labels)
from edgepose.pose.rigid import pose_from_correspondences
from edgepose.pose.estimator import (GroupDiagnostic, PoseCandidate, PoseEstimator, PoseQuality,
                                     RefineResult, edge_support, poses_to_json, refine_pose)
from edgepose.pose.pose_error import PoseError, match_to_truth, pose_error, symmetry_rotations

__all__ = [
    'CuboidDims', 'DegenerateGeometryError', 'Pose',
    'CornerTriplet', 'boxes_overlap', 'corner_triplet', 'segments_intersect', 'segments_orthogonal',
    'EdgeGroup', 'EdgeLink', 'club_all', 'club_edges',
    'CorrespondenceSet', 'EdgeLabel', 'assign_directions', 'classify_edge_dimension', 'resolve_labels',
    'pose_from_correspondences',
    'GroupDiagnostic', 'PoseCandidate', 'PoseEstimator', 'PoseQuality', 'RefineResult',
    'edge_support', 'poses_to_json', 'refine_pose',
    'PoseError', 'match_to_truth', 'pose_error', 'symmetry_rotations',
]
