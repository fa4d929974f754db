"""Off-grid evaluation of vector fields.

The characteristic-map inversion needs a C^1 sampler of the initial velocity
together with its Jacobian.  ``CubicSampler`` implements tensor-product
Catmull-Rom interpolation (local 4-point stencil per axis, reproduces
quadratics, C^1 across cells) with the gradient taken as the exact derivative
of the interpolant, so values and Jacobians are mutually consistent to
roundoff.  ``AnalyticSampler`` wraps closed-form initial data.
"""

from __future__ import annotations

import numpy as np

from .fields import VectorField


def _cr_weights(s):
    """Catmull-Rom weights for offsets (-1, 0, 1, 2) at local coordinate s."""
    s2 = s * s
    s3 = s2 * s
    return (
        -0.5 * s + s2 - 0.5 * s3,
        1.0 - 2.5 * s2 + 1.5 * s3,
        0.5 * s + 2.0 * s2 - 1.5 * s3,
        -0.5 * s2 + 0.5 * s3,
    )


def _cr_weight_derivs(s):
    s2 = s * s
    return (
        -0.5 + 2.0 * s - 1.5 * s2,
        -5.0 * s + 4.5 * s2,
        0.5 + 4.0 * s - 4.5 * s2,
        -s + 1.5 * s2,
    )


class CubicSampler:
    """Catmull-Rom interpolant of a gridded vector field.

    Periodic axes wrap; truncated axes clamp to the edge cell (fields are
    expected to plateau there).  ``__call__`` maps (N, d) points to (N, d)
    values, ``gradient`` to (N, d, d) Jacobians with J[i, j] = d u_i / d x_j.
    """

    def __init__(self, field: VectorField):
        self.grid = field.grid
        self.values = field.values
        self._d = self.grid.dim

    def _locate(self, pts):
        idx, frac = [], []
        for ax in range(self._d):
            h = self.grid.spacing[ax]
            xi = (pts[:, ax] - self.grid.origin[ax]) / h - 0.5
            base = np.floor(xi).astype(np.int64)
            frac.append(xi - base)
            idx.append(base)
        return idx, frac

    def _neighbor_index(self, base, offset, ax):
        n = self.grid.cells[ax]
        j = base + offset
        if self.grid.periodic[ax]:
            return np.mod(j, n)
        return np.clip(j, 0, n - 1)

    def _accumulate(self, pts, deriv_axis=None):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        idx, frac = self._locate(pts)
        wts = []
        for ax in range(self._d):
            if ax == deriv_axis:
                w = _cr_weight_derivs(frac[ax])
                w = tuple(c / self.grid.spacing[ax] for c in w)
            else:
                w = _cr_weights(frac[ax])
            wts.append(w)
        out = np.zeros((pts.shape[0], self._d))
        for flat in range(4**self._d):
            offs, rem = [], flat
            for _ in range(self._d):
                offs.append(rem % 4 - 1)
                rem //= 4
            w = np.ones(pts.shape[0])
            gather = []
            for ax in range(self._d):
                w = w * wts[ax][offs[ax] + 1]
                gather.append(self._neighbor_index(idx[ax], offs[ax], ax))
            out += w[:, None] * self.values[tuple(gather)]
        return out

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        out = self._accumulate(pts)
        return out[0] if single else out

    def gradient(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        cols = [self._accumulate(pts, deriv_axis=j) for j in range(self._d)]
        jac = np.stack(cols, axis=-1)  # (N, d_i, d_j)
        return jac[0] if single else jac


class AnalyticSampler:
    """Wrap closed-form u0(x); gradient analytic or central finite-difference."""

    def __init__(self, func, grad=None, dim=1, fd_step=1e-6):
        self.func = func
        self.grad = grad
        self.dim = dim
        self.fd_step = fd_step

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        out = np.atleast_2d(np.asarray(self.func(np.atleast_2d(pts)), dtype=float))
        return out[0] if single else out

    def gradient(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        p = np.atleast_2d(pts)
        if self.grad is not None:
            jac = np.asarray(self.grad(p), dtype=float)
        else:
            jac = np.empty((p.shape[0], self.dim, self.dim))
            for j in range(self.dim):
                dp = np.zeros_like(p)
                dp[:, j] = self.fd_step
                jac[..., j] = (self.func(p + dp) - self.func(p - dp)) / (2 * self.fd_step)
        return jac[0] if single else jac


def as_sampler(u0, kind="cubic"):
    """Accept a VectorField or an existing sampler."""
    if isinstance(u0, VectorField):
        if kind != "cubic":
            raise ValueError(f"unknown sampler kind {kind!r}")
        return CubicSampler(u0)
    if callable(u0) and hasattr(u0, "gradient"):
        return u0
    raise TypeError("u0 must be a VectorField or a sampler with .gradient")
