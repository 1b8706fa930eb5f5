import os

from edgepose.parser.pcd_parser import read_pcd
from edgepose.parser.ply_parser import read_ply
from edgepose.parser.pointcloud import ParseError, PointCloud

READERS = {".pcd": read_pcd, ".ply": read_ply}


def load_cloud(path: str) -> PointCloud:
    """Read a .pcd or .ply file from disk, choosing the reader by suffix."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    suffix = os.path.splitext(path)[1].lower()
    if suffix not in READERS:
        raise ParseError(f"unsupported point cloud file type '{suffix}' (expected .pcd or .ply)")
    with open(path, "rb") as f:
        cloud = READERS[suffix](f)
    cloud.source = os.path.basename(path)
    return cloud
