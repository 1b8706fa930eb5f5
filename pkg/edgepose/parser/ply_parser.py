"""
Reader for ASCII PLY 1.0.

Only the ``vertex`` element is kept: x, y, z plus red/green/blue when
present. Every other property and element is skipped.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import BinaryIO, List, Optional, Union

import numpy as np

from edgepose.parser.pcd_parser import _decode, _read_bytes
from edgepose.parser.pointcloud import ParseError, PointCloud

logger = logging.getLogger(__name__)


@dataclass
class _Element:
    name: str
    count: int
    line: int
    properties: List[str] = field(default_factory=list)
    has_list: bool = False


def read_ply(source: Union[bytes, BinaryIO]) -> PointCloud:
    """Parse an ASCII PLY stream into a PointCloud."""
    try:
        return _read_ply(_decode(_read_bytes(source), "PLY"))
    except ParseError:
        raise
    except (ValueError, IndexError, KeyError, OverflowError, TypeError) as e:
        raise ParseError(f"malformed PLY: {e}")


def _parse_header(lines: List[str]):
    if not lines or lines[0].strip() != "ply":
        raise ParseError("missing 'ply' magic line", 1)
    elements: List[_Element] = []
    saw_format = False
    for line_no in range(2, len(lines) + 1):
        tokens = lines[line_no - 1].split()
        if not tokens:
            continue
        keyword = tokens[0]
        if keyword in ("comment", "obj_info"):
            continue
        if keyword == "format":
            if len(tokens) != 3:
                raise ParseError("format line needs an encoding and a version", line_no)
            if tokens[1] != "ascii":
                raise ParseError(f"unsupported encoding '{tokens[1]}' (only ascii is read)", line_no)
            if tokens[2] != "1.0":
                raise ParseError(f"unsupported PLY version '{tokens[2]}'", line_no)
            saw_format = True
        elif keyword == "element":
            if len(tokens) != 3:
                raise ParseError("element line needs a name and a count", line_no)
            try:
                count = int(tokens[2])
            except ValueError:
                raise ParseError(f"element count '{tokens[2]}' is not an integer", line_no)
            if count < 0:
                raise ParseError("element count must not be negative", line_no)
            elements.append(_Element(name=tokens[1], count=count, line=line_no))
        elif keyword == "property":
            if not elements:
                raise ParseError("property before any element", line_no)
            if len(tokens) >= 2 and tokens[1] == "list":
                if len(tokens) != 5:
                    raise ParseError("list property needs count type, item type and name", line_no)
                elements[-1].has_list = True
                elements[-1].properties.append(tokens[4])
            elif len(tokens) == 3:
                elements[-1].properties.append(tokens[2])
            else:
                raise ParseError("property line needs a type and a name", line_no)
        elif keyword == "end_header":
            if not saw_format:
                raise ParseError("header has no format line", line_no)
            return elements, line_no
        else:
            raise ParseError(f"unknown header keyword '{keyword}'", line_no)
    raise ParseError("header ended without end_header")


def _column(properties: List[str], name: str) -> Optional[int]:
    return properties.index(name) if name in properties else None


def _read_ply(text: str) -> PointCloud:
    lines = text.splitlines()
    elements, header_end = _parse_header(lines)

    vertex = next((e for e in elements if e.name == "vertex"), None)
    if vertex is None:
        raise ParseError("no vertex element")
    if vertex.has_list:
        raise ParseError("list properties in the vertex element are not supported", vertex.line)
    cx, cy, cz = (_column(vertex.properties, axis) for axis in ("x", "y", "z"))
    if cx is None or cy is None or cz is None:
        raise ParseError("vertex element lacks x, y or z", vertex.line)
    color_columns = [_column(vertex.properties, c) for c in ("red", "green", "blue")]
    has_color = all(c is not None for c in color_columns)

    # body rows, blank lines ignored
    body = [(n, lines[n - 1].split()) for n in range(header_end + 1, len(lines) + 1)]
    body = [(n, tokens) for n, tokens in body if tokens]

    cursor = 0
    for element in elements:
        if element is vertex:
            break
        cursor += element.count
        if cursor > len(body):
            raise ParseError(f"file ends inside element '{element.name}'")

    points: List[List[float]] = []
    colors: List[List[int]] = []
    dropped = 0
    n_props = len(vertex.properties)
    for row in range(vertex.count):
        if cursor + row >= len(body):
            raise ParseError(f"row mismatch: header declares {vertex.count} vertices, found {row}")
        line_no, tokens = body[cursor + row]
        if len(tokens) != n_props:
            raise ParseError(f"expected {n_props} vertex values, found {len(tokens)}", line_no)
        try:
            xyz = [float(tokens[cx]), float(tokens[cy]), float(tokens[cz])]
            rgb = [int(float(tokens[c])) for c in color_columns] if has_color else None
        except ValueError:
            raise ParseError("non-numeric vertex value", line_no)
        if not all(math.isfinite(v) for v in xyz):
            dropped += 1
            continue
        points.append(xyz)
        if rgb is not None:
            colors.append([min(255, max(0, v)) for v in rgb])

    if dropped:
        logger.info(f"Dropped {dropped} non-finite PLY vertices")
    cloud_colors = np.array(colors, dtype=np.uint8).reshape(-1, 3) if has_color else None
    return PointCloud(points=np.array(points, dtype=np.float64).reshape(-1, 3),
                      colors=cloud_colors, dropped_count=dropped)
