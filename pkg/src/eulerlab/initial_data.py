"""Generators for the explicit example data and standard test families.

All profiles are built from one exponential smoothstep, so every generated
field is C-infinity on the continuum; where a construction needs the
antiderivative of the bump (velocity ramps with an exactly linear core) it is
evaluated by fixed-order Gauss-Legendre quadrature to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ScalarField, VectorField
from .grid import Grid


@dataclass(frozen=True)
class BumpProfile:
    """Plateau-1 inside ``inner``, smooth decay to 0 at ``outer``."""

    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if not self.inner_radius < self.outer_radius:
            raise ValueError("need inner_radius < outer_radius")


def _g(s):
    """exp(-1/s) for s > 0, else 0 (the classic mollifier edge factor)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_bump(profile: BumpProfile, z):
    """C-infinity bump: 1 on |z| <= inner, 0 beyond outer, smoothstep between.

    The transition is g(1-t)/(g(1-t)+g(t)) with g(s)=exp(-1/s), which is
    exactly 1/2 at the band midpoint and symmetric about it.
    """
    z = np.asarray(z, dtype=float)
    t = np.clip(
        (np.abs(z) - profile.inner_radius)
        / (profile.outer_radius - profile.inner_radius),
        0.0,
        1.0,
    )
    num = _g(1.0 - t)
    den = num + _g(t)
    # den is never 0: at t in {0,1} one factor is exp(-1)
    out = num / den
    return out if out.shape else float(out)


_UNIT_BUMP = BumpProfile(1.0, 2.0)


def _phi(z):
    """The canonical cutoff: 1 for |z|<=1, 0 for |z|>=2."""
    return smooth_bump(_UNIT_BUMP, z)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _phi_antiderivative(xi):
    """F(xi) = int_0^xi phi(s) ds for xi >= 0, to machine precision.

    Linear (= xi) inside the plateau; the band integral uses 64-point
    Gauss-Legendre, which is converged to roundoff for this smooth integrand.
    """
    xi = np.asarray(xi, dtype=float)

    def band_integral(b):
        # int_1^b phi, for b in [1, 2]
        half = 0.5 * (b - 1.0)
        mid = 0.5 * (b + 1.0)
        nodes = mid[..., None] + half[..., None] * _GL_NODES
        return half * np.sum(_GL_WEIGHTS * _phi(nodes), axis=-1)

    full_band = float(band_integral(np.asarray(2.0)))
    out = np.where(xi <= 1.0, xi, 0.0)
    band = (xi > 1.0) & (xi < 2.0)
    if np.any(band):
        out = np.where(band, 1.0 + band_integral(np.clip(xi, 1.0, 2.0)), out)
    out = np.where(xi >= 2.0, 1.0 + full_band, out)
    return out


def plateau_ramp(x, slope=1.0, core=1.0):
    """Odd C-infinity ramp: exactly ``slope * x`` on |x| <= core, constant
    beyond 2*core, with |derivative| <= slope everywhere."""
    x = np.asarray(x, dtype=float)
    return slope * core * np.sign(x) * _phi_antiderivative(np.abs(x) / core)


def gaussian_density(grid: Grid, amplitude, width, rho_bar=0.0, center=None) -> ScalarField:
    """rho_bar + amplitude * exp(-|x-center|^2 / width^2)."""
    centers = grid.centers()
    if center is not None:
        centers = centers - np.asarray(center, dtype=float)
    r2 = np.sum(centers**2, axis=-1)
    return ScalarField(grid, rho_bar + amplitude * np.exp(-r2 / width**2))


def bump_density(grid: Grid, amplitude, inner, outer, rho_bar=0.0) -> ScalarField:
    """rho_bar + amplitude * compactly supported radial bump."""
    r = grid.radius()
    return ScalarField(grid, rho_bar + amplitude * smooth_bump(BumpProfile(inner, outer), r))


# ---------------------------------------------------------------------------
# explicit 2D example data
# ---------------------------------------------------------------------------


def example1(grid: Grid, R, n=2) -> VectorField:
    """Anisotropic compressive 2D velocity with gradient -I at the origin.

    u1 = -x1 (1 + x1^2/R^2)^(-n) phi((1 + x1^2/R^2) x2 / R) and u2 with the
    roles of x1, x2 swapped.  Exactly self-similar: u(x) = R * U(x/R).
    """
    if grid.dim != 2:
        raise ValueError("example1 is a 2D datum")
    if R <= 1:
        raise ValueError("R must exceed 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = grid.centers()
    x1, x2 = c[..., 0], c[..., 1]
    g1 = 1.0 + (x1 / R) ** 2
    g2 = 1.0 + (x2 / R) ** 2
    u1 = -x1 * g1 ** (-float(n)) * _phi(g1 * x2 / R)
    u2 = -x2 * g2 ** (-float(n)) * _phi(g2 * x1 / R)
    return VectorField(grid, np.stack([u1, u2], axis=-1))


def example2(grid: Grid, R, lam, rho_bar, n=2):
    """Uniform density plus the radially cut-off example1 velocity.

    The cutoff psi is 1 on B(0, 2R) and vanishes beyond ``lam`` (> 2R), so the
    datum matches the constant background outside B(0, lam) yet its radial
    momentum moment is negative: the breakdown integral condition fails.
    """
    if lam <= 2 * R:
        raise ValueError("need lam > 2R")
    u = example1(grid, R, n=n)
    psi = smooth_bump(BumpProfile(2.0 * R, lam), grid.radius())
    rho = ScalarField(grid, np.full(grid.shape, float(rho_bar)))
    return rho, VectorField(grid, u.values * psi[..., None])


def example3_radial(grid: Grid, R) -> VectorField:
    """Radial 2D velocity h(r) x/|x| with gradient diag(-1, +1) at (R, 0).

    h(z) = R * exp(-(z - R)/R) * phi(z - R), supported on R-2 <= z <= R+2, so
    the field vanishes near the origin whenever R > 3.  The exponential is
    centered at z = R, which makes h(R) = R and h'(R) = -1 exactly.
    """
    if grid.dim != 2:
        raise ValueError("example3 is a 2D datum")
    if R <= 3:
        raise ValueError("R must exceed 3 (origin regularity)")
    r = grid.radius()
    h = R * np.exp(-(r - R) / R) * _phi(r - R)
    safe_r = np.maximum(r, 1e-300)
    vals = (h / safe_r)[..., None] * grid.centers()
    return VectorField(grid, vals)


# ---------------------------------------------------------------------------
# standard test families
# ---------------------------------------------------------------------------


def compressive_1d(grid: Grid, lambda0=1.0, core=1.0, rho_amp=1e-4, rho_width=0.5,
                   rho_floor=1e-12):
    """1D velocity with exactly linear slope -lambda0 near 0, plateaued by bumps."""
    if grid.dim != 1:
        raise ValueError("compressive_1d is a 1D datum")
    x = grid.centers()[..., 0]
    u = -plateau_ramp(x, slope=lambda0, core=core)
    rho = gaussian_density(grid, rho_amp, rho_width, rho_bar=rho_floor)
    return rho, VectorField(grid, u[..., None])


def expansive_linear(grid: Grid, lambda0=1.0, core=1.0, rho_amp=1e-2, rho_width=0.3,
                     rho_floor=1e-12):
    """1D monotone expansive ramp (slope +lambda0 on the core, plateaus outside)."""
    if grid.dim != 1:
        raise ValueError("expansive_linear is a 1D datum")
    x = grid.centers()[..., 0]
    u = plateau_ramp(x, slope=lambda0, core=core)
    rho = gaussian_density(grid, rho_amp, rho_width, rho_bar=rho_floor)
    return rho, VectorField(grid, u[..., None])


def _radial_outward(grid: Grid, amplitude, r0):
    """u = amplitude * x * phi(|x|/r0) / r0: linear-in-x core, support 2*r0."""
    r = grid.radius()
    cut = _phi(r / r0)
    return VectorField(grid, (amplitude / r0) * cut[..., None] * grid.centers())


def sideris_pulse(grid: Grid, rho_bar=1.0, rho_amp=0.5, r0=1.0, margin=1.5,
                  gamma=2.0, max_amplitude=1e6):
    """Outward pulse tuned by bisection until lhs/rhs of the breakdown
    integral condition equals ``margin``.

    Returns (rho0, u0, R) with R = 2*r0 the support radius.  Fails when the
    requested margin is not reachable before ``max_amplitude`` (box too small
    or margin too large).
    """
    from . import criteria  # local import: criteria depends on fields only

    rho = bump_density(grid, rho_amp, 0.5 * r0, r0, rho_bar=rho_bar)
    R = 2.0 * r0

    def margin_of(a):
        u = _radial_outward(grid, a, r0)
        res = criteria.sideris_condition(rho, u, rho_bar, R, gamma)
        return res.lhs / res.rhs

    lo, hi = 0.0, 1.0
    it = 0
    while margin_of(hi) < margin:
        hi *= 2.0
        it += 1
        if hi > max_amplitude:
            raise RuntimeError(
                "sideris_pulse bisection failed: margin unreachable "
                f"(margin({max_amplitude}) < {margin})"
            )
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if margin_of(mid) < margin:
            lo = mid
        else:
            hi = mid
    amplitude = 0.5 * (lo + hi)
    return rho, _radial_outward(grid, amplitude, r0), R


def constant_state(grid: Grid, rho_bar=1.0):
    rho = ScalarField(grid, np.full(grid.shape, float(rho_bar)))
    u = VectorField(grid, np.zeros(grid.shape + (grid.dim,)))
    return rho, u


def standard_family(kind, grid: Grid, **params):
    """Dispatch for the named test data families; returns (rho0, u0)."""
    if kind == "constant":
        return constant_state(grid, **params)
    if kind == "compressive_1d":
        return compressive_1d(grid, **params)
    if kind == "expansive_linear":
        return expansive_linear(grid, **params)
    if kind == "sideris_pulse":
        rho, u, _ = sideris_pulse(grid, **params)
        return rho, u
    raise ValueError(f"unknown data family {kind!r}")
