"""Edge scoring and metrics"""

from edgepose.analyzer.edge_detector import EdgeDetector, ScoredCloud, extract_edge_points, point_score
from edgepose.analyzer.covariance_baseline import covariance_edge_baseline
from edgepose.analyzer.edge_metrics import (EdgeMetrics, evaluate_edge_flags, flags_at_threshold,
                                            matched_recall_threshold)

__all__ = [
    'EdgeDetector', 'ScoredCloud', 'extract_edge_points', 'point_score',
    'covariance_edge_baseline',
    'EdgeMetrics', 'evaluate_edge_flags', 'flags_at_threshold', 'matched_recall_threshold',
]
