"""Result files and annotated clouds"""

from edgepose.reporter.cloud_writer import (CATEGORY_COLORS, PointCategory, save_cloud, wireframe_points,
                                            write_annotated, write_pcd, write_ply)
from edgepose.reporter.report_generator import Reporter, machine_info

__all__ = [
    'CATEGORY_COLORS', 'PointCategory', 'save_cloud', 'wireframe_points', 'write_annotated', 'write_pcd',
    'write_ply', 'Reporter', 'machine_info',
]
