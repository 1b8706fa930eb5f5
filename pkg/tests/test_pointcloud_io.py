"""
Tests for the PCD/PLY readers and writers
"""

import numpy as np
import pytest

from edgepose.parser.cloud_loader import load_cloud
from edgepose.parser.pcd_parser import read_pcd
from edgepose.parser.ply_parser import read_ply
from edgepose.parser.pointcloud import ParseError, PointCloud
from edgepose.reporter.cloud_writer import (CATEGORY_COLORS, PointCategory, save_cloud, write_annotated,
                                            write_pcd, write_ply)


def _pcd(rows, width=None, points=None):
    n = len(rows)
    header = [
        "# .PCD v0.7 - Point Cloud Data file format",
        "VERSION 0.7",
        "FIELDS x y z",
        "SIZE 4 4 4",
        "TYPE F F F",
        "COUNT 1 1 1",
        f"WIDTH {n if width is None else width}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {n if points is None else points}",
        "DATA ascii",
    ]
    return ("\n".join(header + rows) + "\n").encode("ascii")


PLY_ONE = b"""ply
format ascii 1.0
element vertex 1
property float x
property float y
property float z
end_header
0.5 -0.25 1.0
"""


def test_read_pcd_three_points_in_order():
    """3-point PCD keeps file order"""
    cloud = read_pcd(_pcd(["0 0 0", "1 0 0", "0 1 0"]))
    assert len(cloud) == 3
    np.testing.assert_array_equal(cloud.points, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    assert cloud.dropped_count == 0


def test_read_pcd_drops_nan_rows():
    """One nan row among 10 is dropped and counted"""
    rows = [f"{i} 0 0" for i in range(9)]
    rows.insert(4, "nan nan nan")
    cloud = read_pcd(_pcd(rows))
    assert len(cloud) == 9
    assert cloud.dropped_count == 1
    assert cloud.points[4, 0] == 4.0


def test_read_pcd_row_mismatch():
    """WIDTH 5 with 4 data rows is a row mismatch"""
    with pytest.raises(ParseError, match="row mismatch"):
        read_pcd(_pcd(["0 0 0"] * 4, width=5, points=5))


def test_read_pcd_width_points_disagree():
    with pytest.raises(ParseError) as excinfo:
        read_pcd(_pcd(["0 0 0"] * 4, width=5, points=4))
    assert excinfo.value.line is not None


def test_read_pcd_binary_rejected():
    data = _pcd(["0 0 0"]).replace(b"DATA ascii", b"DATA binary")
    with pytest.raises(ParseError, match="binary"):
        read_pcd(data)


def test_read_pcd_extra_fields_and_count():
    """Fields beyond xyz, including COUNT>1, occupy their own columns"""
    data = b"""VERSION 0.7
FIELDS x y z normal
SIZE 4 4 4 4
TYPE F F F F
COUNT 1 1 1 3
WIDTH 2
HEIGHT 1
POINTS 2
DATA ascii
1 2 3 0 0 1
4 5 6 0 1 0
"""
    cloud = read_pcd(data)
    np.testing.assert_array_equal(cloud.points, [[1, 2, 3], [4, 5, 6]])


def test_read_pcd_error_names_line():
    data = _pcd(["0 0 0", "1 zero 0"])
    with pytest.raises(ParseError) as excinfo:
        read_pcd(data)
    assert excinfo.value.line == 13
    assert "line 13" in str(excinfo.value)


def test_read_pcd_unknown_header_key():
    data = _pcd(["0 0 0"]).replace(b"VERSION 0.7", b"COLOUR 0.7")
    with pytest.raises(ParseError, match="unknown header key"):
        read_pcd(data)


def test_read_ply_minimal():
    cloud = read_ply(PLY_ONE)
    assert len(cloud) == 1
    np.testing.assert_array_equal(cloud.points[0], [0.5, -0.25, 1.0])


def test_read_ply_ignores_extra_properties():
    """Normals in the vertex element are skipped"""
    data = b"""ply
format ascii 1.0
comment with normals
element vertex 2
property float x
property float nx
property float y
property float ny
property float z
property float nz
end_header
1 0 2 0 3 1
4 1 5 0 6 0
"""
    cloud = read_ply(data)
    np.testing.assert_array_equal(cloud.points, [[1, 2, 3], [4, 5, 6]])


def test_read_ply_binary_rejected():
    data = PLY_ONE.replace(b"format ascii 1.0", b"format binary_little_endian 1.0")
    with pytest.raises(ParseError, match="unsupported encoding"):
        read_ply(data)


def test_read_ply_skips_elements_before_vertex():
    data = b"""ply
format ascii 1.0
element camera 1
property float fx
element vertex 1
property float x
property float y
property float z
end_header
525.0
1 2 3
"""
    cloud = read_ply(data)
    np.testing.assert_array_equal(cloud.points, [[1, 2, 3]])


def test_read_ply_colors():
    data = b"""ply
format ascii 1.0
element vertex 1
property float x
property float y
property float z
property uchar red
property uchar green
property uchar blue
end_header
1 2 3 255 0 128
"""
    cloud = read_ply(data)
    np.testing.assert_array_equal(cloud.colors, [[255, 0, 128]])


def test_write_annotated_two_points():
    """Edge and non-edge points get distinct colors"""
    cloud = PointCloud(points=[[0, 0, 0], [1, 1, 1]])
    data = write_annotated(cloud, [PointCategory.EDGE, PointCategory.NON_EDGE])
    back = read_ply(data)
    assert len(back) == 2
    assert tuple(back.colors[0]) == CATEGORY_COLORS[PointCategory.EDGE]
    assert tuple(back.colors[1]) == CATEGORY_COLORS[PointCategory.NON_EDGE]
    assert tuple(back.colors[0]) != tuple(back.colors[1])


def test_write_annotated_empty_cloud():
    data = write_annotated(PointCloud(), [])
    assert b"element vertex 0" in data
    assert len(read_ply(data)) == 0


def test_write_annotated_length_mismatch():
    with pytest.raises(ValueError):
        write_annotated(PointCloud(points=[[0, 0, 0]]), [])


def test_round_trip_1000_points_both_formats():
    """Write then read moves no coordinate by 1e-6 m or more"""
    rng = np.random.default_rng(0)
    cloud = PointCloud(points=rng.uniform(-1.0, 1.0, size=(1000, 3)))
    for data, reader in ((write_ply(cloud), read_ply), (write_pcd(cloud), read_pcd)):
        back = reader(data)
        assert len(back) == 1000
        assert np.max(np.abs(back.points - cloud.points)) < 1e-6


def test_write_is_deterministic():
    rng = np.random.default_rng(3)
    cloud = PointCloud(points=rng.normal(size=(50, 3)))
    assert write_ply(cloud) == write_ply(cloud)
    assert write_pcd(cloud) == write_pcd(cloud)


def test_load_cloud_by_suffix(tmp_path):
    cloud = PointCloud(points=[[0.1, 0.2, 0.3]])
    for name in ("a.ply", "a.pcd"):
        path = tmp_path / name
        save_cloud(str(path), cloud)
        loaded = load_cloud(str(path))
        assert loaded.source == name
        np.testing.assert_allclose(loaded.points, cloud.points, atol=1e-6)


def test_load_cloud_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_cloud(str(tmp_path / "missing.ply"))
    other = tmp_path / "cloud.xyz"
    other.write_text("0 0 0\n")
    with pytest.raises(ParseError):
        load_cloud(str(other))


def _mutations(rng, seed_bytes: bytes, n: int):
    for _ in range(n):
        data = bytearray(seed_bytes)
        kind = rng.integers(0, 4)
        if kind == 0 and data:
            for _ in range(rng.integers(1, 6)):
                data[rng.integers(0, len(data))] = int(rng.integers(0, 256))
        elif kind == 1 and data:
            cut = int(rng.integers(0, len(data)))
            data = data[:cut]
        elif kind == 2:
            pos = int(rng.integers(0, len(data) + 1))
            data[pos:pos] = bytes(rng.integers(0, 256, size=int(rng.integers(1, 12))).astype(np.uint8))
        else:
            data = bytearray(rng.integers(0, 256, size=int(rng.integers(0, 80))).astype(np.uint8))
        yield bytes(data)


def test_readers_never_raise_anything_but_parse_error():
    """10^4 mutated and random inputs yield a cloud or a ParseError"""
    rng = np.random.default_rng(1234)
    seeds = [(_pcd(["0 0 0", "1 2 3", "nan 0 0"]), read_pcd), (PLY_ONE, read_ply)]
    outcomes = {"cloud": 0, "error": 0}
    for seed_bytes, reader in seeds:
        for data in _mutations(rng, seed_bytes, 5000):
            try:
                cloud = reader(data)
            except ParseError:
                outcomes["error"] += 1
                continue
            assert isinstance(cloud, PointCloud)
            assert np.all(np.isfinite(cloud.points))
            outcomes["cloud"] += 1
    assert outcomes["cloud"] + outcomes["error"] == 10000
    assert outcomes["error"] > 0
    print(f"✓ Fuzz: {outcomes['cloud']} clouds, {outcomes['error']} parse errors")
