"""Field file format: one JSON header line followed by one base64 payload line.

The header records the format version, dimensions, the full grid (radial nodes
and weights are stored explicitly, so custom grids round-trip losslessly), the
value dtype, and free-form metadata.  The payload is the raw little-endian
value buffer in row-major order, base64-encoded.  complex128 is the default
and round-trips bit-for-bit; complex64 halves the file size at reduced
precision.
"""

import base64
import json

import numpy as np

from .errors import MalformedFile, VersionMismatch
from .grids import PeriodicField, PolarGrid, SampledField

FORMAT_VERSION = 1
_DTYPES = {"complex128": "<c16", "complex64": "<c8"}


def _grid_header(grid):
    return {
        "n": grid.n,
        "r_max": grid.r_max,
        "radial_nodes": [list(map(float, r)) for r in grid.radial_nodes],
        "radial_weights": [list(map(float, w)) for w in grid.radial_weights],
        "angular_counts": list(grid.angular_counts),
    }


def _grid_from_header(h):
    try:
        return PolarGrid(
            int(h["n"]),
            float(h["r_max"]),
            tuple(np.array(r, dtype=float) for r in h["radial_nodes"]),
            tuple(np.array(w, dtype=float) for w in h["radial_weights"]),
            tuple(int(a) for a in h["angular_counts"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"invalid grid header: {exc}") from exc


def write_field(field, path, dtype="complex128"):
    """Write a SampledField or PeriodicField to `path`."""
    if dtype not in _DTYPES:
        raise MalformedFile(f"unsupported dtype {dtype!r}; use complex128 or complex64")
    header = {
        "version": FORMAT_VERSION,
        "kind": "periodic" if isinstance(field, PeriodicField) else "field",
        "grid": _grid_header(field.grid),
        "metadata": field.metadata,
        "dtype": dtype,
        "count": int(field.values.size),
    }
    if isinstance(field, PeriodicField):
        header["m"] = field.m
        header["center_counts"] = list(field.center_counts)
    payload = np.ascontiguousarray(field.values).astype(_DTYPES[dtype]).tobytes()
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        fh.write(base64.b64encode(payload).decode("ascii") + "\n")


def read_field(path):
    """Read a field file, returning a SampledField or PeriodicField."""
    with open(path, "r") as fh:
        head_line = fh.readline()
        body_line = fh.readline()
    if not head_line.strip():
        raise MalformedFile("empty file: missing header line")
    try:
        header = json.loads(head_line)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"header line is not valid JSON at char {exc.pos}") from exc
    if not isinstance(header, dict):
        raise MalformedFile("header must be a JSON object")
    version = header.get("version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"file version {version!r}, this reader supports {FORMAT_VERSION}")
    dtype = header.get("dtype")
    if dtype not in _DTYPES:
        raise MalformedFile(f"unsupported dtype {dtype!r}")
    grid = _grid_from_header(header.get("grid", {}))
    try:
        raw = base64.b64decode(body_line.strip(), validate=True)
    except Exception as exc:
        raise MalformedFile(f"payload is not valid base64: {exc}") from exc
    values = np.frombuffer(raw, dtype=_DTYPES[dtype])
    count = header.get("count")
    if values.size != count:
        raise MalformedFile(
            f"payload holds {values.size} values, header declares {count} "
            f"(byte {len(raw)} of expected {count * np.dtype(_DTYPES[dtype]).itemsize})"
        )
    metadata = header.get("metadata", "")
    kind = header.get("kind", "field")
    if kind == "periodic":
        center_counts = tuple(int(c) for c in header.get("center_counts", []))
        shape = grid.shape + center_counts
        if int(np.prod(shape)) != values.size:
            raise MalformedFile("value count does not match grid x center shape")
        return PeriodicField(grid, int(header["m"]), center_counts,
                             values.reshape(shape).astype(complex), metadata)
    if kind != "field":
        raise MalformedFile(f"unknown kind {kind!r}")
    if int(np.prod(grid.shape)) != values.size:
        raise MalformedFile("value count does not match grid shape")
    return SampledField(grid, values.reshape(grid.shape).astype(complex), metadata)


def export_radial_slice_csv(field, path, angle_indices=None):
    """Write a CSV of the field along the first radial axis at fixed angles.

    Columns: r, re, im.  angle_indices fixes every non-leading axis (defaults
    to index 0 each).
    """
    g = field.grid
    tail = field.values.ndim - 1
    if angle_indices is None:
        angle_indices = (0,) * tail
    if len(angle_indices) != tail:
        raise MalformedFile(f"need {tail} trailing indices, got {len(angle_indices)}")
    sl = field.values[(slice(None),) + tuple(int(i) for i in angle_indices)]
    with open(path, "w") as fh:
        fh.write("r,re,im\n")
        for r, v in zip(g.radial_nodes[0], sl):
            fh.write(f"{r!r},{v.real!r},{v.imag!r}\n")
