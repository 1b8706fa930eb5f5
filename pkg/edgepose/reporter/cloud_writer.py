"""
ASCII PLY/PCD writers.

Coordinates are written as fixed 6-decimal text (sub-micrometer at meter
scale), so a write/read round trip moves no coordinate by more than 5e-7 m.
Output bytes depend only on the input arrays.
"""

import os
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from edgepose.parser.pointcloud import PointCloud


class PointCategory(Enum):
    """Per-point annotation classes and their display colors."""
    NON_EDGE = "non_edge"
    EDGE = "edge"
    SEGMENT_INLIER = "segment_inlier"
    CORNER = "corner"
    WIREFRAME = "wireframe"


CATEGORY_COLORS = {
    PointCategory.NON_EDGE: (128, 128, 128),
    PointCategory.EDGE: (255, 0, 0),
    PointCategory.SEGMENT_INLIER: (0, 0, 255),
    PointCategory.CORNER: (0, 255, 0),
    PointCategory.WIREFRAME: (255, 255, 0),
}


def _format_rows(points: np.ndarray, colors: Optional[np.ndarray] = None) -> str:
    if colors is None:
        rows = [f"{x:.6f} {y:.6f} {z:.6f}" for x, y, z in points]
    else:
        rows = [f"{x:.6f} {y:.6f} {z:.6f} {r} {g} {b}"
                for (x, y, z), (r, g, b) in zip(points, colors.tolist())]
    return "".join(row + "\n" for row in rows)


def write_ply(cloud: PointCloud, colors: Optional[np.ndarray] = None) -> bytes:
    """Serialize a cloud as ASCII PLY; colors default to the cloud's own."""
    if colors is None:
        colors = cloud.colors
    if colors is not None:
        colors = np.asarray(colors, dtype=np.uint8).reshape(-1, 3)
        if len(colors) != len(cloud):
            raise ValueError(f"{len(colors)} colors for {len(cloud)} points")
    header = [
        "ply",
        "format ascii 1.0",
        "comment edgepose",
        f"element vertex {len(cloud)}",
        "property float x",
        "property float y",
        "property float z",
    ]
    if colors is not None:
        header += ["property uchar red", "property uchar green", "property uchar blue"]
    header.append("end_header")
    text = "\n".join(header) + "\n" + _format_rows(cloud.points, colors)
    return text.encode("ascii")


def write_pcd(cloud: PointCloud) -> bytes:
    """Serialize a cloud as ASCII PCD v0.7 (x y z only)."""
    n = len(cloud)
    header = [
        "# .PCD v0.7 - Point Cloud Data file format",
        "VERSION 0.7",
        "FIELDS x y z",
        "SIZE 4 4 4",
        "TYPE F F F",
        "COUNT 1 1 1",
        f"WIDTH {n}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {n}",
        "DATA ascii",
    ]
    return ("\n".join(header) + "\n" + _format_rows(cloud.points)).encode("ascii")


def write_annotated(cloud: PointCloud, labels: Sequence[PointCategory]) -> bytes:
    """PLY colored by per-point category."""
    if len(labels) != len(cloud):
        raise ValueError(f"{len(labels)} labels for {len(cloud)} points")
    colors = np.array([CATEGORY_COLORS[PointCategory(label)] for label in labels],
                      dtype=np.uint8).reshape(-1, 3)
    return write_ply(cloud, colors)


def save_cloud(path: str, cloud: PointCloud) -> None:
    """Write a cloud to disk, format chosen by suffix."""
    suffix = os.path.splitext(path)[1].lower()
    if suffix == ".pcd":
        data = write_pcd(cloud)
    elif suffix == ".ply":
        data = write_ply(cloud)
    else:
        raise ValueError(f"unsupported point cloud file type '{suffix}' (expected .pcd or .ply)")
    with open(path, "wb") as f:
        f.write(data)


def wireframe_points(corners: np.ndarray, step: float = 0.002) -> np.ndarray:
    """Points every ``step`` along the 12 edges of a box given its 8 corners in sign order."""
    if not step > 0:
        raise ValueError(f"wireframe step must be positive, got {step}")
    corners = np.asarray(corners, dtype=np.float64).reshape(8, 3)
    lines = []
    for i in range(8):
        for bit in (1, 2, 4):
            j = i ^ bit
            if j < i:
                continue
            count = max(2, int(np.ceil(np.linalg.norm(corners[j] - corners[i]) / step)) + 1)
            t = np.linspace(0.0, 1.0, count)[:, None]
            lines.append(corners[i] + t * (corners[j] - corners[i]))
    return np.vstack(lines)
