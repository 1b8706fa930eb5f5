"""Spatial indexing"""

from edgepose.index.kdtree import NeighborSet, SpatialIndex, brute_force_neighbors

__all__ = ['NeighborSet', 'SpatialIndex', 'brute_force_neighbors']
