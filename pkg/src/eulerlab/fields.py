"""Gridded scalar/vector/tensor fields, discrete calculus and norms.

Differentiation is either second-order central (``numpy.gradient`` stencils,
one-sided at non-periodic edges) or spectral on fully periodic grids.  Sobolev
norms combine derivative levels with midpoint quadrature, which matches the
finite-volume cell averages used elsewhere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Grid

VACUUM_RHO = 1e-14  # density at or below this is treated as exact vacuum


class FieldShapeError(ValueError):
    pass


def _check_finite(values, allow_nonfinite):
    if not allow_nonfinite and not np.all(np.isfinite(values)):
        raise ValueError("field contains NaN/Inf (pass blowup_snapshot=True to allow)")


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray
    blowup_snapshot: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise FieldShapeError(
                f"scalar values shape {self.values.shape} != grid shape {self.grid.shape}"
            )
        _check_finite(self.values, self.blowup_snapshot)

    def copy(self):
        return ScalarField(self.grid, self.values.copy(), self.blowup_snapshot)


@dataclass
class VectorField:
    grid: Grid
    values: np.ndarray  # (*grid.shape, dim)
    blowup_snapshot: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        want = self.grid.shape + (self.grid.dim,)
        if self.values.shape != want:
            raise FieldShapeError(f"vector values shape {self.values.shape} != {want}")
        _check_finite(self.values, self.blowup_snapshot)

    def copy(self):
        return VectorField(self.grid, self.values.copy(), self.blowup_snapshot)

    def component(self, i):
        return ScalarField(self.grid, self.values[..., i])

    def magnitude(self):
        return np.sqrt(np.sum(self.values**2, axis=-1))


@dataclass
class TensorField:
    grid: Grid
    values: np.ndarray  # (*grid.shape, dim, dim)
    blowup_snapshot: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        d = self.grid.dim
        want = self.grid.shape + (d, d)
        if self.values.shape != want:
            raise FieldShapeError(f"tensor values shape {self.values.shape} != {want}")
        _check_finite(self.values, self.blowup_snapshot)


def constant_scalar(grid, value):
    return ScalarField(grid, np.full(grid.shape, float(value)))


def constant_vector(grid, vec):
    vec = np.asarray(vec, dtype=float)
    values = np.broadcast_to(vec, grid.shape + (grid.dim,)).copy()
    return VectorField(grid, values)


# ---------------------------------------------------------------------------
# fluid states and the symmetrizing change of variables
# ---------------------------------------------------------------------------


@dataclass
class FluidState:
    """Density/velocity pair with polytropic pressure rho**gamma."""

    rho: ScalarField
    u: VectorField
    gamma: float

    def __post_init__(self):
        if self.rho.grid is not self.u.grid and self.rho.grid != self.u.grid:
            raise ValueError("rho and u must live on the same grid")
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.rho.blowup_snapshot and np.any(self.rho.values < 0):
            raise ValueError("density must be nonnegative")

    @property
    def grid(self):
        return self.rho.grid

    def pressure(self):
        return self.rho.values**self.gamma

    def sound_speed(self):
        # c = sqrt(p'(rho)) = sqrt(gamma) * rho**((gamma-1)/2)
        return math.sqrt(self.gamma) * self.rho.values ** ((self.gamma - 1.0) / 2.0)

    def copy(self):
        return FluidState(self.rho.copy(), self.u.copy(), self.gamma)


@dataclass
class SymmetrizedState:
    """(pi, u) variables of the symmetric-hyperbolic form of the system."""

    pi: ScalarField
    u: VectorField
    gamma: float

    @property
    def c1(self):
        return (self.gamma - 1.0) / 2.0

    @property
    def grid(self):
        return self.pi.grid


def pi_coefficient(gamma):
    """Multiplier k in pi = k * rho**((gamma-1)/2)."""
    if gamma <= 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    return math.sqrt((gamma - 1.0) / (4.0 * gamma))


def pi_from_rho(rho_values, gamma):
    rho = np.where(rho_values < VACUUM_RHO, 0.0, rho_values)
    return pi_coefficient(gamma) * rho ** ((gamma - 1.0) / 2.0)


def to_symmetrized(state: FluidState) -> SymmetrizedState:
    """Change variables to pi = sqrt((gamma-1)/(4*gamma)) rho**((gamma-1)/2)."""
    pi = pi_from_rho(state.rho.values, state.gamma)
    return SymmetrizedState(ScalarField(state.grid, pi), state.u.copy(), state.gamma)


def from_symmetrized(s: SymmetrizedState) -> FluidState:
    if np.any(s.pi.values < 0):
        raise ValueError("pi must be nonnegative")
    k = pi_coefficient(s.gamma)
    rho = (s.pi.values / k) ** (2.0 / (s.gamma - 1.0))
    return FluidState(ScalarField(s.pi.grid, rho), s.u.copy(), s.gamma)


# ---------------------------------------------------------------------------
# discrete differentiation
# ---------------------------------------------------------------------------


def axis_derivative(values, grid, axis, method="central"):
    """d/dx_axis of a cell-centered array.

    central: 2nd-order stencils, periodic wrap on periodic axes, one-sided at
    truncated edges.  spectral: exact differentiation of the trigonometric
    interpolant; the axis must be periodic.
    """
    h = grid.spacing[axis]
    if method == "central":
        if grid.periodic[axis]:
            return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2.0 * h)
        return np.gradient(values, h, axis=axis, edge_order=2)
    if method == "spectral":
        if not grid.periodic[axis]:
            raise ValueError("spectral differentiation needs a periodic axis")
        n = grid.cells[axis]
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        if n % 2 == 0:
            k[n // 2] = 0.0  # drop the Nyquist mode of the derivative
        shape = [1] * values.ndim
        shape[axis] = n
        vhat = np.fft.fft(values, axis=axis)
        return np.real(np.fft.ifft(1j * k.reshape(shape) * vhat, axis=axis))
    raise ValueError(f"unknown method {method!r}")


def _resolve_method(grid, method):
    if method == "auto":
        return "spectral" if all(grid.periodic) else "central"
    return method


def gradient(f, method="central"):
    """Gradient of a scalar (-> VectorField) or vector (-> TensorField).

    Tensor convention: ``grad(u)[..., i, j] = d u_i / d x_j`` so that the
    directional increment is ``grad(u) @ xi``.
    """
    grid = f.grid
    method = _resolve_method(grid, method)
    if isinstance(f, ScalarField):
        comps = [axis_derivative(f.values, grid, a, method) for a in range(grid.dim)]
        return VectorField(grid, np.stack(comps, axis=-1), f.blowup_snapshot)
    if isinstance(f, VectorField):
        d = grid.dim
        out = np.empty(grid.shape + (d, d))
        for i in range(d):
            for j in range(d):
                out[..., i, j] = axis_derivative(f.values[..., i], grid, j, method)
        return TensorField(grid, out, f.blowup_snapshot)
    raise TypeError("gradient expects a ScalarField or VectorField")


def _multinomial(alpha):
    k = sum(alpha)
    out = math.factorial(k)
    for a in alpha:
        out //= math.factorial(a)
    return out


def derivative_levels(values, grid, order, method="central"):
    """Iterate over derivative levels 0..order as multi-index tables.

    Yields ``(k, {alpha: array})`` where alpha is a multi-index with
    ``|alpha| = k``.  Mixed partials are computed once (stencils commute), so
    level k holds C(k+dim-1, dim-1) arrays instead of dim**k.
    """
    dim = grid.dim
    table = {(0,) * dim: np.asarray(values, dtype=float)}
    yield 0, table
    for k in range(1, order + 1):
        nxt = {}
        for alpha, arr in table.items():
            for ax in range(dim):
                beta = list(alpha)
                beta[ax] += 1
                beta = tuple(beta)
                if beta not in nxt:
                    nxt[beta] = axis_derivative(arr, grid, ax, method)
        table = nxt
        yield k, table


def level_magnitude_sq(table):
    """Pointwise |grad^k f|^2 from a level table (sums all dim**k slots)."""
    out = None
    for alpha, arr in table.items():
        term = _multinomial(alpha) * arr**2
        out = term if out is None else out + term
    return out


def _support_touches_boundary(values, grid, tol_rel=1e-10):
    """True when the field is nonzero at a truncated (non-periodic) edge."""
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return False
    for ax in range(values.ndim):
        if grid.periodic[ax]:
            continue
        edge = np.abs(np.take(values, [0, -1], axis=ax))
        if np.max(edge) > tol_rel * scale:
            return True
    return False


def _component_arrays(f):
    if isinstance(f, ScalarField):
        return [f.values]
    if isinstance(f, VectorField):
        return [f.values[..., i] for i in range(f.grid.dim)]
    if isinstance(f, TensorField):
        d = f.grid.dim
        return [f.values[..., i, j] for i in range(d) for j in range(d)]
    raise TypeError(f"unsupported field type {type(f)}")


def l2_norm(f):
    """sqrt(cell volume * sum of squared entries); vectors use |f|^2."""
    sq = sum(np.sum(c**2) for c in _component_arrays(f))
    return math.sqrt(f.grid.cell_volume * sq)


def linf_norm(f):
    """Max abs value; for vectors the max Euclidean magnitude."""
    if isinstance(f, VectorField):
        return float(np.max(f.magnitude()))
    if isinstance(f, TensorField):
        return float(np.max(np.sqrt(np.sum(f.values**2, axis=(-2, -1)))))
    return float(np.max(np.abs(f.values)))


def sobolev_norm(f, m, method="auto"):
    """H^m norm (sum of L2 norms of derivative levels 0..m, then sqrt).

    Warns when the field support touches the box edge: the truncated-box
    quadrature then no longer represents a whole-space integral.
    """
    if m < 0:
        raise ValueError("m must be a nonnegative integer")
    grid = f.grid
    method = _resolve_method(grid, method)
    comps = _component_arrays(f)
    for c in comps:
        if _support_touches_boundary(c, grid):
            warnings.warn(
                "field support touches the truncated box edge; the Sobolev "
                "norm does not represent the whole-space integral",
                stacklevel=2,
            )
            break
    vol = grid.cell_volume
    total = 0.0
    for c in comps:
        for k, table in derivative_levels(c, grid, m, method):
            total += vol * float(np.sum(level_magnitude_sq(table)))
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# interpolation-inequality ratio checks
# ---------------------------------------------------------------------------


@dataclass
class InterpolationRatios:
    ratio42: float
    ratio43: float
    defined: bool


def check_interpolation_lemmas(psi: ScalarField, phi: ScalarField, method="auto"):
    """Numerical ratios for the two interpolation inequalities.

    ratio42 = int |D2 psi|^4 / (||D psi||_inf^2 * int |D3 psi|^2)
    ratio43 = [int |D2|^2|D3|^2 cross terms of psi, phi]
              / ((1 + ||D phi||_inf + ||D psi||_inf)^3 * int (|D4 phi|^2 + |D4 psi|^2))

    Both are scale-invariant under the dilation psi_lam(x) = lam * psi(x/lam),
    which preserves ||D psi||_inf.  A degenerate psi (D3 psi identically zero)
    yields ``defined=False`` with NaN ratios.
    """
    grid = psi.grid
    if phi.grid != grid:
        raise ValueError("psi and phi must share a grid")
    method = _resolve_method(grid, method)
    vol = grid.cell_volume

    def mags(values, order):
        out = {}
        for k, table in derivative_levels(values, grid, order, method):
            if k >= 1:
                out[k] = level_magnitude_sq(table)
        return out

    dpsi = mags(psi.values, 4)
    dphi = mags(phi.values, 4)

    grad_inf_psi = math.sqrt(float(np.max(dpsi[1])))
    grad_inf_phi = math.sqrt(float(np.max(dphi[1])))

    int_d3psi_sq = vol * float(np.sum(dpsi[3]))
    scale = vol * float(np.sum(dpsi[2] + dphi[2]))
    if int_d3psi_sq <= 1e-300 or scale <= 1e-300 or grad_inf_psi == 0.0:
        return InterpolationRatios(float("nan"), float("nan"), False)

    num42 = vol * float(np.sum(dpsi[2] ** 2))
    ratio42 = num42 / (grad_inf_psi**2 * int_d3psi_sq)

    lhs43 = vol * float(
        np.sum(
            dpsi[2] * dpsi[3]
            + dphi[2] * dphi[3]
            + dpsi[2] * dphi[3]
            + dphi[2] * dpsi[3]
        )
    )
    den43 = (1.0 + grad_inf_phi + grad_inf_psi) ** 3 * vol * float(
        np.sum(dphi[4] + dpsi[4])
    )
    if den43 <= 1e-300:
        return InterpolationRatios(ratio42, float("nan"), False)
    return InterpolationRatios(ratio42, lhs43 / den43, True)
