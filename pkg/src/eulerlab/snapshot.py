"""Field snapshot files.

One snapshot holds one scalar or vector field.  The file starts with a single
ASCII header line

    dim n1 [n2 [n3]] spacing... origin... components

followed by the values in row-major (C) order, components fastest:

* ``.bin``  -- raw little-endian float64 bytes,
* anything else -- CSV, one cell per line, components comma-separated.

Periodicity is not part of the format; readers supply it (default periodic).
"""

from __future__ import annotations

import numpy as np

from .fields import ScalarField, VectorField
from .grid import Grid


def _header(grid: Grid, ncomp: int) -> str:
    parts = [str(grid.dim)]
    parts += [str(n) for n in grid.cells]
    parts += [f"{h:.17g}" for h in grid.spacing]
    parts += [f"{x:.17g}" for x in grid.origin]
    parts.append(str(ncomp))
    return " ".join(parts)


def write_snapshot(path, field):
    """Write a ScalarField or VectorField; format chosen by file suffix."""
    if isinstance(field, ScalarField):
        ncomp = 1
        flat = field.values.reshape(-1, 1)
    elif isinstance(field, VectorField):
        ncomp = field.grid.dim
        flat = field.values.reshape(-1, ncomp)
    else:
        raise TypeError("write_snapshot expects a ScalarField or VectorField")
    header = _header(field.grid, ncomp)
    path = str(path)
    if path.endswith(".bin"):
        with open(path, "wb") as fh:
            fh.write((header + "\n").encode("ascii"))
            fh.write(np.ascontiguousarray(flat, dtype="<f8").tobytes())
    else:
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in flat:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_snapshot(path, periodic=True):
    """Read a snapshot back into a ScalarField or VectorField."""
    path = str(path)
    binary = path.endswith(".bin")
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        payload = fh.read()
    dim = int(header[0])
    cells = tuple(int(v) for v in header[1 : 1 + dim])
    spacing = tuple(float(v) for v in header[1 + dim : 1 + 2 * dim])
    origin = tuple(float(v) for v in header[1 + 2 * dim : 1 + 3 * dim])
    ncomp = int(header[1 + 3 * dim])
    if isinstance(periodic, bool):
        periodic = (periodic,) * dim
    grid = Grid(dim, cells, spacing, origin, tuple(periodic))
    count = int(np.prod(cells)) * ncomp
    if binary:
        values = np.frombuffer(payload, dtype="<f8", count=count).astype(float)
    else:
        text = payload.decode("ascii").strip().splitlines()
        values = np.array([float(v) for line in text for v in line.split(",")])
    if values.size != count:
        raise ValueError(f"snapshot payload has {values.size} values, expected {count}")
    if ncomp == 1:
        return ScalarField(grid, values.reshape(cells))
    return VectorField(grid, values.reshape(cells + (ncomp,)))
