"""Point cloud readers"""

from edgepose.parser.pointcloud import ParseError, Point3, PointCloud
from edgepose.parser.pcd_parser import read_pcd
from edgepose.parser.ply_parser import read_ply
from edgepose.parser.cloud_loader import load_cloud

__all__ = ['ParseError', 'Point3', 'PointCloud', 'read_pcd', 'read_ply', 'load_cloud']
