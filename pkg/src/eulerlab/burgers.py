"""Exact characteristic solution of the pressureless vector transport flow.

Characteristics are straight lines X(t, x0) = x0 + t*u0(x0); the solution is
v(t, X(t, x0)) = u0(x0) until the first time det(I + t*grad u0) vanishes
somewhere (the gradient catastrophe).  The velocity gradient along the flow is
(I + t*grad u0)^-1 grad u0, so the first blow-up time is -1/lambda for the
most negative real eigenvalue lambda of grad u0 over all points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import eig
from .fields import VectorField, gradient
from .sampling import as_sampler


class CausticError(RuntimeError):
    """Raised when the characteristic map is singular; carries the critical time."""

    def __init__(self, message, t_critical=None):
        super().__init__(message)
        self.t_critical = t_critical


class NewtonError(RuntimeError):
    """Characteristic inversion did not converge (near caustic or bad seed)."""


@dataclass
class BlowupVerdict:
    blows_up: bool
    t_star: float  # +inf when no blow-up
    x_star: np.ndarray | None
    lam: float  # most negative real eigenvalue found (>= 0 -> no blow-up)


@dataclass
class CharacteristicMap:
    """Forward map x0 -> x0 + t*u0(x0), evaluated from the stored initial data."""

    sampler: object
    t: float

    def __call__(self, x0):
        x0 = np.asarray(x0, dtype=float)
        return x0 + self.t * np.asarray(self.sampler(x0))

    def jacobian(self, x0):
        g = np.asarray(self.sampler.gradient(x0))
        d = g.shape[-1]
        return np.eye(d) + self.t * g


def _critical_time(grad_u0):
    lams = eig.real_eigenvalues(grad_u0)
    neg = lams[np.isfinite(lams) & (lams < 0)]
    if neg.size == 0:
        return np.inf
    return float(-1.0 / np.min(neg))


def burgers_gradient(grad_u0, t):
    """(I + t A)^-1 A for A = grad u0 at a point (or batch of points).

    Raises ``CausticError`` carrying the critical time when I + tA is
    singular, i.e. the gradient has already blown up along this trajectory.
    """
    a = np.asarray(grad_u0, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    d = a.shape[-1]
    m = np.eye(d) + t * a
    det = np.linalg.det(m)
    if np.any(np.abs(det) < 1e-14 * max(1.0, abs(t)) ** d):
        raise CausticError(
            f"characteristic map singular at t={t}", t_critical=_critical_time(a)
        )
    return np.linalg.solve(m, a)


def burgers_blowup_time(u0: VectorField, method="central") -> BlowupVerdict:
    """Scan the grid for the most negative real eigenvalue of grad u0.

    Blow-up happens iff some cell has a negative real eigenvalue lambda; the
    first caustic time is min over cells of -1/lambda, attained at the cell
    with the most negative eigenvalue.
    """
    if not np.all(np.isfinite(u0.values)):
        raise ValueError("u0 must be finite")
    g = gradient(u0, method=method).values  # (*shape, d, d)
    lams = eig.real_eigenvalues(g)
    lams = np.where(np.isfinite(lams), lams, np.inf)
    lam_min = lams.min(axis=-1)
    flat = int(np.argmin(lam_min))
    lam = float(lam_min.reshape(-1)[flat])
    if lam >= 0.0:
        return BlowupVerdict(False, np.inf, None, lam if np.isfinite(lam) else 0.0)
    cell = np.unravel_index(flat, u0.grid.shape)
    x_star = u0.grid.centers()[cell]
    return BlowupVerdict(True, -1.0 / lam, x_star, lam)


def evaluate_burgers(u0, t, x, tol=1e-12, max_iter=60):
    """Velocity v(t, x) by damped Newton inversion of the characteristic map.

    ``u0`` is a VectorField or a sampler.  Seeds start at x; the residual
    target is tol*(1+|x|) per point.  Non-convergence raises ``NewtonError``
    (proximity to a caustic or a seed outside the basin).
    """
    sampler = as_sampler(u0)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    n, d = pts.shape

    x0 = pts.copy()
    target = tol * (1.0 + np.linalg.norm(pts, axis=1))

    def residual(z, goal):
        return z + t * np.asarray(sampler(z)) - goal

    r = residual(x0, pts)
    rnorm = np.linalg.norm(r, axis=1)
    active = rnorm > target
    for _ in range(max_iter):
        if not np.any(active):
            break
        idx = np.where(active)[0]
        jac = np.eye(d) + t * np.asarray(sampler.gradient(x0[idx]))
        try:
            step = np.linalg.solve(jac, r[idx][..., None])[..., 0]
        except np.linalg.LinAlgError:
            raise CausticError(
                f"singular Jacobian during characteristic inversion at t={t}"
            )
        # damped update: halve the step while the residual grows
        lam = np.ones(len(idx))
        cand = x0[idx] - step
        rc = residual(cand, pts[idx])
        rcn = np.linalg.norm(rc, axis=1)
        for _ in range(25):
            worse = rcn > rnorm[idx]
            if not np.any(worse):
                break
            lam[worse] *= 0.5
            cand[worse] = x0[idx][worse] - lam[worse, None] * step[worse]
            rc[worse] = residual(cand[worse], pts[idx][worse])
            rcn[worse] = np.linalg.norm(rc[worse], axis=1)
        x0[idx] = cand
        r[idx] = rc
        rnorm[idx] = rcn
        active = rnorm > target
    if np.any(active):
        bad = int(np.where(active)[0][0])
        raise NewtonError(
            f"characteristic inversion failed at t={t} for x={pts[bad]} "
            f"(residual {rnorm[bad]:.3e})"
        )
    out = np.asarray(sampler(x0))
    return out[0] if single else out


def velocity_field(u0, t, grid, **kwargs) -> VectorField:
    """Sample the characteristic solution on a grid (reference flow for diagnostics)."""
    pts = grid.centers().reshape(-1, grid.dim)
    vals = evaluate_burgers(u0, t, pts, **kwargs)
    return VectorField(grid, vals.reshape(grid.shape + (grid.dim,)))


def grassin_remainder(u0, t, region_points):
    """sup over the region of |(1+t)^2 (grad v - I/(1+t))| (max entry).

    ``region_points`` are seed points x0 (the region moves with the flow:
    gradients are evaluated at X(t, x0)).  Bounded in t exactly when the flow
    matches the dilation-wave leading term there.
    """
    sampler = as_sampler(u0)
    pts = np.atleast_2d(np.asarray(region_points, dtype=float))
    if pts.size == 0:
        raise ValueError("region is empty")
    g = np.asarray(sampler.gradient(pts))
    gv = burgers_gradient(g, t)
    d = gv.shape[-1]
    rem = (1.0 + t) ** 2 * (gv - np.eye(d) / (1.0 + t))
    return float(np.max(np.abs(rem)))
