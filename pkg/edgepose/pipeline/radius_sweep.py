"""
Edge-stage timing across scoring radii.
"""

import logging
import time
from dataclasses import dataclass, asdict, replace
from typing import Dict, List, Optional, Sequence

from edgepose.analyzer.edge_detector import EdgeDetector
from edgepose.index.kdtree import SpatialIndex
from edgepose.parser.pointcloud import PointCloud
from edgepose.pipeline.pipeline_runner import warm_up_kernels
from edgepose.utils.params import EdgeParams

logger = logging.getLogger(__name__)

SWEEP_RADII = (0.010, 0.015, 0.020, 0.025, 0.030)


@dataclass
class SweepRow:
    radius: float
    seconds: float
    edge_points: int
    neighbor_pairs: int
    visited_pairs: int
    points: int

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def sweep_radii(cloud: PointCloud, radii: Sequence[float] = SWEEP_RADII, repeats: int = 3,
                edge: Optional[EdgeParams] = None) -> List[SweepRow]:
    """Best-of-``repeats`` scoring time per radius; the tree is built once and not timed."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    edge = edge or EdgeParams()
    warm_up_kernels()
    rows: List[SweepRow] = []
    if cloud.is_empty:
        return [SweepRow(radius=float(r), seconds=0.0, edge_points=0, neighbor_pairs=0,
                         visited_pairs=0, points=0) for r in radii]
    index = SpatialIndex.build(cloud)
    for radius in radii:
        detector = EdgeDetector(replace(edge, radius=float(radius)))
        best = float("inf")
        scored = None
        for _ in range(repeats):
            started = time.perf_counter()
            scored = detector.score(cloud, index)
            best = min(best, time.perf_counter() - started)
        rows.append(SweepRow(radius=float(radius), seconds=best, edge_points=scored.edge_count,
                             neighbor_pairs=int(scored.neighbor_counts.sum()),
                             visited_pairs=scored.visited_pairs, points=len(cloud)))
        logger.info(f"r_s={radius:.3f}: {best:.4f} s, {scored.edge_count} edge points")
    return rows
