"""
Reader for the ASCII subset of PCD v0.7.

Binary encodings are rejected. Rows with non-finite coordinates are dropped
and counted in ``PointCloud.dropped_count``. Any malformed input raises
``ParseError``; no other exception escapes ``read_pcd``.
"""

import logging
import math
from typing import BinaryIO, Dict, List, Union

import numpy as np

from edgepose.parser.pointcloud import ParseError, PointCloud

logger = logging.getLogger(__name__)

HEADER_KEYS = ("VERSION", "FIELDS", "SIZE", "TYPE", "COUNT", "WIDTH", "HEIGHT",
               "VIEWPOINT", "POINTS", "DATA")


def _read_bytes(source: Union[bytes, bytearray, BinaryIO]) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    return source.read()


def _decode(raw: bytes, kind: str) -> str:
    try:
        return raw.decode("ascii")
    except UnicodeDecodeError as e:
        raise ParseError(f"not an ASCII {kind} stream (byte {e.start} is not ASCII)")


def _to_int(value: str, key: str, line_no: int) -> int:
    try:
        number = int(value)
    except ValueError:
        raise ParseError(f"{key} expects an integer, got '{value}'", line_no)
    if number < 0:
        raise ParseError(f"{key} must not be negative, got {number}", line_no)
    return number


def _parse_header(lines: List[str]) -> Dict:
    header: Dict = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, *values = line.split()
        key = key.upper()
        if key not in HEADER_KEYS:
            raise ParseError(f"unknown header key '{key}'", line_no)
        if key in header:
            raise ParseError(f"duplicate header key '{key}'", line_no)
        header[key] = (values, line_no)
        if key == "DATA":
            header["_data_line"] = line_no
            return header
    raise ParseError("header ended without a DATA line")


def _column_layout(header: Dict) -> Dict[str, int]:
    """Map x, y, z to their column offsets in a data row."""
    if "FIELDS" not in header:
        raise ParseError("header has no FIELDS line")
    fields, fields_line = header["FIELDS"]
    if not fields:
        raise ParseError("FIELDS is empty", fields_line)

    counts = [1] * len(fields)
    if "COUNT" in header:
        values, line_no = header["COUNT"]
        if len(values) != len(fields):
            raise ParseError(f"COUNT has {len(values)} entries for {len(fields)} fields", line_no)
        counts = [_to_int(v, "COUNT", line_no) for v in values]
    for key in ("SIZE", "TYPE"):
        if key in header and len(header[key][0]) != len(fields):
            raise ParseError(f"{key} has {len(header[key][0])} entries for {len(fields)} fields",
                             header[key][1])

    layout = {}
    offset = 0
    for name, count in zip(fields, counts):
        if name in ("x", "y", "z"):
            if count != 1:
                raise ParseError(f"field '{name}' must have COUNT 1", fields_line)
            layout[name] = offset
        offset += count
    missing = [axis for axis in ("x", "y", "z") if axis not in layout]
    if missing:
        raise ParseError(f"FIELDS lacks {', '.join(missing)}", fields_line)
    layout["_columns"] = offset
    return layout


def read_pcd(source: Union[bytes, BinaryIO]) -> PointCloud:
    """Parse an ASCII PCD stream into a PointCloud."""
    try:
        return _read_pcd(_decode(_read_bytes(source), "PCD"))
    except ParseError:
        raise
    except (ValueError, IndexError, KeyError, OverflowError, TypeError) as e:
        raise ParseError(f"malformed PCD: {e}")


def _read_pcd(text: str) -> PointCloud:
    lines = text.splitlines()
    header = _parse_header(lines)
    layout = _column_layout(header)

    encoding, data_line = header["DATA"]
    if not encoding:
        raise ParseError("DATA has no encoding", data_line)
    if encoding[0].lower() != "ascii":
        raise ParseError(f"unsupported DATA encoding '{encoding[0]}' (only ascii is read)", data_line)

    width = _to_int(header["WIDTH"][0][0], "WIDTH", header["WIDTH"][1]) if "WIDTH" in header else None
    height = _to_int(header["HEIGHT"][0][0], "HEIGHT", header["HEIGHT"][1]) if "HEIGHT" in header else 1
    if "POINTS" in header:
        declared = _to_int(header["POINTS"][0][0], "POINTS", header["POINTS"][1])
        if width is not None and width * height != declared:
            raise ParseError(
                f"WIDTH*HEIGHT = {width * height} disagrees with POINTS = {declared}",
                header["POINTS"][1])
    elif width is not None:
        declared = width * height
    else:
        raise ParseError("header declares neither WIDTH nor POINTS")

    n_columns = layout["_columns"]
    cx, cy, cz = layout["x"], layout["y"], layout["z"]
    rows: List[List[float]] = []
    dropped = 0
    n_rows = 0
    for line_no in range(data_line + 1, len(lines) + 1):
        tokens = lines[line_no - 1].split()
        if not tokens:
            continue
        n_rows += 1
        if n_rows > declared:
            raise ParseError(f"row mismatch: more data rows than the {declared} declared", line_no)
        if len(tokens) != n_columns:
            raise ParseError(f"expected {n_columns} values per row, found {len(tokens)}", line_no)
        try:
            xyz = [float(tokens[cx]), float(tokens[cy]), float(tokens[cz])]
        except ValueError:
            raise ParseError("non-numeric coordinate", line_no)
        if all(math.isfinite(v) for v in xyz):
            rows.append(xyz)
        else:
            dropped += 1

    if n_rows != declared:
        raise ParseError(f"row mismatch: header declares {declared} points but found {n_rows} data rows")
    if dropped:
        logger.info(f"Dropped {dropped} non-finite PCD rows")
    points = np.array(rows, dtype=np.float64).reshape(-1, 3)
    return PointCloud(points=points, dropped_count=dropped)
