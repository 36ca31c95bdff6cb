"""PLY 1.0 reader and writer.

Supports ascii and binary_little_endian files with x, y, z positions
(float32/float64 or integer) and optional red, green, blue uint8 colors.
Point order is preserved and duplicates are kept.
"""

from __future__ import annotations

import os

import numpy as np

from .cloud import PointCloud, infer_bit_depth
from .errors import PlyParseError, SchemaError, UnsupportedFormatError

_SCALAR_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}

_POSITION_NAMES = ("x", "y", "z")
_COLOR_NAMES = ("red", "green", "blue")


class _Header:
    def __init__(self):
        self.fmt = None  # "ascii" | "binary_little_endian"
        self.vertex_count = None
        self.properties = []  # [(name, numpy typecode)]
        self.data_offset = 0


def _parse_header(raw: bytes) -> _Header:
    header = _Header()
    lines = []
    pos = 0
    while True:
        nl = raw.find(b"\n", pos)
        if nl < 0:
            raise PlyParseError("end_header not found")
        lines.append(raw[pos:nl])
        pos = nl + 1
        if lines[-1].strip() == b"end_header":
            break
        if len(lines) > 1000:
            raise PlyParseError("header too long; end_header not found")
    header.data_offset = pos

    def text(i):
        return lines[i].decode("ascii", "replace").strip()

    if not lines or lines[0].strip() != b"ply":
        raise PlyParseError("missing 'ply' magic", 1, text(0) if lines else "")

    in_vertex = False
    seen_vertex = False
    for i, bline in enumerate(lines[1:-1], start=2):
        line = bline.decode("ascii", "replace").strip()
        if not line or line.startswith("comment") or line.startswith("obj_info"):
            continue
        fields = line.split()
        if fields[0] == "format":
            if len(fields) != 3:
                raise PlyParseError("malformed format line", i, line)
            if fields[1] == "ascii":
                header.fmt = "ascii"
            elif fields[1] == "binary_little_endian":
                header.fmt = "binary_little_endian"
            elif fields[1] == "binary_big_endian":
                raise UnsupportedFormatError("binary_big_endian PLY is not supported")
            else:
                raise PlyParseError(f"unknown format {fields[1]!r}", i, line)
        elif fields[0] == "element":
            if len(fields) != 3:
                raise PlyParseError("malformed element line", i, line)
            try:
                count = int(fields[2])
            except ValueError:
                raise PlyParseError("element count is not an integer", i, line)
            if fields[1] == "vertex":
                header.vertex_count = count
                in_vertex = True
                seen_vertex = True
            else:
                # Non-vertex elements are only tolerated after the vertex
                # block, where we can stop reading before them.
                if not seen_vertex and count > 0:
                    raise UnsupportedFormatError(
                        f"element {fields[1]!r} precedes vertex data"
                    )
                in_vertex = False
        elif fields[0] == "property":
            if not in_vertex:
                continue
            if fields[1] == "list":
                raise UnsupportedFormatError("list properties on vertices are not supported")
            if len(fields) != 3:
                raise PlyParseError("malformed property line", i, line)
            ptype, pname = fields[1], fields[2]
            if ptype not in _SCALAR_TYPES:
                raise UnsupportedFormatError(f"unsupported property type {ptype!r}")
            header.properties.append((pname, _SCALAR_TYPES[ptype]))
        elif fields[0] == "end_header":
            break
        else:
            raise PlyParseError(f"unrecognized header keyword {fields[0]!r}", i, line)

    if header.fmt is None:
        raise PlyParseError("header declares no format")
    if header.vertex_count is None:
        raise SchemaError("header declares no vertex element")
    names = [n for n, _ in header.properties]
    for want in _POSITION_NAMES:
        if want not in names:
            raise SchemaError(f"vertex element lacks position property {want!r}")
    for want in _COLOR_NAMES:
        if want in names and dict(header.properties)[want] != "u1":
            raise UnsupportedFormatError(f"color property {want!r} must be 8-bit")
    return header


def load_ply(path: str | os.PathLike, bit_depth: int | None = None, name: str | None = None) -> PointCloud:
    """Read a PLY point cloud.

    ``bit_depth`` defaults to the smallest precision covering the
    coordinate range (PLY itself does not store it).
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    header = _parse_header(raw)
    names = [n for n, _ in header.properties]

    if header.fmt == "binary_little_endian":
        dtype = np.dtype([(n, "<" + t) for n, t in header.properties])
        body = raw[header.data_offset:header.data_offset + dtype.itemsize * header.vertex_count]
        if len(body) < dtype.itemsize * header.vertex_count:
            raise PlyParseError(
                f"file truncated: expected {header.vertex_count} vertices, "
                f"got {len(body) // dtype.itemsize}"
            )
        rows = np.frombuffer(body, dtype=dtype, count=header.vertex_count)
    else:
        text = raw[header.data_offset:].decode("ascii", "replace")
        dtype = np.dtype([(n, t) for n, t in header.properties])
        rows = np.zeros(header.vertex_count, dtype=dtype)
        lines = text.splitlines()
        if len(lines) < header.vertex_count:
            raise PlyParseError(
                f"file truncated: expected {header.vertex_count} vertex rows, got {len(lines)}"
            )
        ncols = len(header.properties)
        for r in range(header.vertex_count):
            parts = lines[r].split()
            if len(parts) < ncols:
                raise PlyParseError("vertex row has too few values",
                                    r + 1, lines[r])
            for (pname, code), value in zip(header.properties, parts):
                rows[pname][r] = np.dtype(code).type(value)

    positions = np.column_stack([rows[n].astype(np.float64) for n in _POSITION_NAMES])
    colors = None
    if all(n in names for n in _COLOR_NAMES):
        colors = np.column_stack([rows[n] for n in _COLOR_NAMES]).astype(np.uint8)

    if bit_depth is None:
        bit_depth = infer_bit_depth(positions)
    if name is None:
        name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return PointCloud(positions=positions, colors=colors, bit_depth=bit_depth, name=name)


def save_ply(cloud: PointCloud, path: str | os.PathLike, *,
             binary: bool = True, double_precision: bool = False) -> None:
    """Write a PLY file (binary_little_endian float32 by default)."""
    ptype = "double" if double_precision else "float"
    code = "f8" if double_precision else "f4"
    n = len(cloud)
    header = [
        "ply",
        "format binary_little_endian 1.0" if binary else "format ascii 1.0",
        f"element vertex {n}",
        f"property {ptype} x",
        f"property {ptype} y",
        f"property {ptype} z",
    ]
    if cloud.has_colors:
        header += [f"property uchar {c}" for c in _COLOR_NAMES]
    header.append("end_header")

    pos = cloud.positions.astype("<" + code)
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            fields = [("x", "<" + code), ("y", "<" + code), ("z", "<" + code)]
            if cloud.has_colors:
                fields += [(c, "u1") for c in _COLOR_NAMES]
            rows = np.zeros(n, dtype=np.dtype(fields))
            for j, axis in enumerate(_POSITION_NAMES):
                rows[axis] = pos[:, j]
            if cloud.has_colors:
                for j, chan in enumerate(_COLOR_NAMES):
                    rows[chan] = cloud.colors[:, j]
            fh.write(rows.tobytes())
        else:
            colors = cloud.colors
            out = []
            for i in range(n):
                coords = " ".join(f"{float(v):.17g}" for v in pos[i])
                if colors is not None:
                    coords += " " + " ".join(str(int(v)) for v in colors[i])
                out.append(coords)
            fh.write(("\n".join(out) + "\n").encode("ascii"))
