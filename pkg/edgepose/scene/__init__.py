"""Synthetic scenes with ground truth"""

from edgepose.scene.scene_generator import (FACE_AXES, PlacementError, SceneGroundTruth, SceneSpec,
                                            SurfaceLabels, face_grid, gen_clutter_scene, place_cuboids,
                                            random_rotation, rle_decode, rle_encode, sample_cuboid_surface,
                                            sample_planar_grid, visible_faces)

__all__ = [
    'FACE_AXES', 'PlacementError', 'SceneGroundTruth', 'SceneSpec', 'SurfaceLabels', 'face_grid',
    'gen_clutter_scene', 'place_cuboids', 'random_rotation', 'rle_decode', 'rle_encode',
    'sample_cuboid_surface', 'sample_planar_grid', 'visible_faces',
]
