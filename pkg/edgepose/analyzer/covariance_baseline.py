"""
Covariance-eigenvalue edge baseline (surface variation).

For every point the covariance of its k nearest neighbors (the point itself
included) is decomposed; the score is lambda_min / (lambda_0 + lambda_1 + lambda_2).
Flat neighborhoods score 0, sharp features and noise push it towards 1/3.
"""

import logging
from typing import Optional

import numpy as np

from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud

logger = logging.getLogger(__name__)

_CHUNK = 65536


def covariance_edge_baseline(cloud: PointCloud, index: Optional[SpatialIndex] = None,
                             k: int = 10) -> np.ndarray:
    """Per-point surface variation from the k-nearest-neighbor covariance."""
    if k < 3:
        raise ValueError(f"covariance baseline needs k >= 3, got {k}")
    if len(cloud) < k:
        raise ValueError(f"cloud has {len(cloud)} points, fewer than k = {k}")
    if index is None:
        index = SpatialIndex.build(cloud)

    scores = np.zeros(len(cloud), dtype=np.float64)
    for start in range(0, len(cloud), _CHUNK):
        stop = min(start + _CHUNK, len(cloud))
        neighbor_idx, _ = index.knn(k, cloud.points[start:stop])
        neighborhoods = cloud.points[neighbor_idx]
        centered = neighborhoods - neighborhoods.mean(axis=1, keepdims=True)
        covariance = np.einsum('nki,nkj->nij', centered, centered) / k
        eigenvalues = np.clip(np.linalg.eigvalsh(covariance), 0.0, None)
        total = eigenvalues.sum(axis=1)
        chunk_scores = np.zeros(stop - start)
        nonzero = total > 0
        chunk_scores[nonzero] = eigenvalues[nonzero, 0] / total[nonzero]
        scores[start:stop] = chunk_scores
    logger.debug(f"Covariance baseline k={k}: mean score {scores.mean():.4g}")
    return scores
