"""Uniform cell-centered Cartesian grids in 1, 2 or 3 dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of a rectangular box.

    Cell ``i`` along an axis is centered at ``origin + (i + 1/2) * spacing``.
    ``periodic`` marks axes that wrap around; non-periodic axes are treated as
    a truncation of the whole space (fields there are expected to plateau to a
    constant well before the edge).
    """

    dim: int
    cells: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        for name in ("cells", "spacing", "origin", "periodic"):
            if len(getattr(self, name)) != self.dim:
                raise ValueError(f"{name} must have length dim={self.dim}")
        if any(n < 2 for n in self.cells):
            raise ValueError("need at least 2 cells per axis")
        if any(h <= 0 for h in self.spacing):
            raise ValueError("spacing must be positive on every axis")

    @classmethod
    def regular(cls, cells, lengths, origin=None, periodic=True):
        """Grid with ``cells[a]`` cells spanning ``lengths[a]`` per axis."""
        cells = tuple(int(n) for n in np.atleast_1d(cells))
        lengths = tuple(float(w) for w in np.atleast_1d(lengths))
        dim = len(cells)
        spacing = tuple(w / n for w, n in zip(lengths, cells))
        if origin is None:
            origin = tuple(-w / 2 for w in lengths)
        else:
            origin = tuple(float(x) for x in np.atleast_1d(origin))
        if isinstance(periodic, bool):
            periodic = (periodic,) * dim
        return cls(dim, cells, spacing, origin, tuple(periodic))

    @classmethod
    def centered(cls, half_width, n, dim=1, periodic=True):
        """Symmetric box [-half_width, half_width]^dim with n cells per axis."""
        return cls.regular((n,) * dim, (2.0 * half_width,) * dim, periodic=periodic)

    @property
    def shape(self):
        return self.cells

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def lengths(self):
        return tuple(n * h for n, h in zip(self.cells, self.spacing))

    def axis_centers(self, axis):
        n, h, x0 = self.cells[axis], self.spacing[axis], self.origin[axis]
        return x0 + (np.arange(n) + 0.5) * h

    def centers(self):
        """Cell center coordinates, shape ``(*cells, dim)``."""
        axes = [self.axis_centers(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def radius(self):
        """Distance of each cell center from the coordinate origin."""
        return np.sqrt(np.sum(self.centers() ** 2, axis=-1))
