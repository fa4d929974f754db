"""Blow-up / global-existence criteria on initial data and trajectories.

Each operation evaluates one quantitative condition from the breakdown or
global-existence theory: the radial-momentum integral condition and its
support hypothesis, negative-definiteness of the initial velocity gradient,
Sobolev smallness of second derivatives, the lifespan epsilon formula, the
Riccati lower bound, moment functionals F/M along a run, the finite-speed
cone, relative entropy, the expansive-regime hypotheses and the weighted
decay energy.  ``evaluate_criteria`` aggregates everything into a report with
a single verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import eig
from .burgers import evaluate_burgers
from .fields import (
    FluidState,
    ScalarField,
    VectorField,
    derivative_levels,
    gradient,
    level_magnitude_sq,
    linf_norm,
    pi_from_rho,
    sobolev_norm,
)
from .grid import Grid

PLATEAU_TOL = 1e-10

SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


class SupportViolation(ValueError):
    """Data does not match the background state outside the stated ball."""


def _sigma(rho_bar, gamma):
    """Background sound speed sqrt(gamma) * rho_bar**((gamma-1)/2)."""
    return math.sqrt(gamma) * rho_bar ** ((gamma - 1.0) / 2.0)


def _exterior_deviation(rho, u, rho_bar, radius):
    """max over cells outside the ball of |rho-rho_bar| + |u|."""
    grid = rho.grid
    outside = grid.radius() > radius
    if not np.any(outside):
        return 0.0
    dev = np.abs(rho.values - rho_bar) + u.magnitude()
    return float(np.max(dev[outside]))


# ---------------------------------------------------------------------------
# conditions on initial data
# ---------------------------------------------------------------------------


@dataclass
class SiderisResult:
    lhs: float
    rhs: float
    holds: bool


def sideris_condition(rho0: ScalarField, u0: VectorField, rho_bar, R, gamma) -> SiderisResult:
    """Radial momentum moment against the background sound speed.

    lhs = (1/(omega_d R^(d+1))) * int rho0 u0 . x dx,
    rhs = (d+1) * sigma * ||rho0||_inf.  Requires the datum to equal the
    background outside B_R (raises ``SupportViolation`` otherwise).
    """
    grid = rho0.grid
    d = grid.dim
    dev = _exterior_deviation(rho0, u0, rho_bar, R)
    if dev > PLATEAU_TOL:
        raise SupportViolation(
            f"data deviates from background outside |x|>{R} by {dev:.3e}"
        )
    moment = grid.cell_volume * float(
        np.sum(rho0.values * np.sum(u0.values * grid.centers(), axis=-1))
    )
    lhs = moment / (SPHERE_AREA[d] * R ** (d + 1))
    rhs = (d + 1) * _sigma(rho_bar, gamma) * linf_norm(rho0)
    return SiderisResult(lhs, rhs, bool(lhs >= rhs))


def support_condition(rho0: ScalarField, u0: VectorField, rho_bar, R) -> bool:
    """Background plateau outside B_R plus nonnegative mass excess."""
    grid = rho0.grid
    if _exterior_deviation(rho0, u0, rho_bar, R) > PLATEAU_TOL:
        return False
    excess = grid.cell_volume * float(np.sum(rho0.values - rho_bar))
    volume = float(np.prod(grid.lengths))
    return bool(excess >= -PLATEAU_TOL * volume)


@dataclass
class NDResult:
    found: bool
    x0: list | None
    lambda_max: float | None
    xi0: list | None
    symmetric: bool
    asymmetric_negative: bool  # some non-symmetric cell still has a negative real eigenvalue
    min_real_eigenvalue: float


def nd_condition(u0: VectorField, at_point=None, sym_tol=1e-8, method="central") -> NDResult:
    """Scan for a symmetric velocity gradient with a negative eigenvalue.

    Cells whose discrete gradient fails the symmetry test (||A - A^T|| >
    sym_tol * ||A||) are excluded from the certificate but still scanned for
    negative real eigenvalues, which are reported via
    ``asymmetric_negative`` rather than silently used.  ``at_point``
    restricts the certificate to the cell nearest the given point (the
    condition is existential, so certifying a chosen point is legitimate).
    """
    grid = u0.grid
    g = gradient(u0, method=method).values  # (*shape, d, d)
    d = grid.dim
    asym = np.sqrt(np.sum((g - np.swapaxes(g, -1, -2)) ** 2, axis=(-2, -1)))
    scale = np.sqrt(np.sum(g**2, axis=(-2, -1)))
    is_sym = asym <= sym_tol * np.maximum(scale, 1e-300)

    sym_eigs = eig.symmetric_eigenvalues(g)  # ascending
    lam_min_sym = sym_eigs[..., 0]

    real = eig.real_eigenvalues(g)
    real = np.where(np.isfinite(real), real, np.inf)
    lam_min_real = real.min(axis=-1)
    min_real = float(np.min(lam_min_real))
    asym_negative = bool(np.any((~is_sym) & (lam_min_real < 0)))

    if at_point is not None:
        pt = np.atleast_1d(np.asarray(at_point, dtype=float))
        dist = np.sum((grid.centers() - pt) ** 2, axis=-1)
        cell = np.unravel_index(int(np.argmin(dist)), grid.shape)
        lam = float(lam_min_sym[cell])
        if not is_sym[cell] or lam >= 0:
            return NDResult(False, None, None, None, bool(is_sym[cell]),
                            asym_negative, min_real)
        vec = eig.symmetric_eigenvector(eig.symmetric_part(g[cell]), lam)
        x0 = grid.centers()[cell]
        return NDResult(True, list(map(float, np.atleast_1d(x0))), -lam,
                        list(map(float, vec)), True, asym_negative, min_real)

    candidate = np.where(is_sym, lam_min_sym, np.inf)
    flat = int(np.argmin(candidate))
    lam = float(candidate.reshape(-1)[flat])
    if not np.isfinite(lam) or lam >= 0:
        return NDResult(False, None, None, None, False, asym_negative, min_real)
    cell = np.unravel_index(flat, grid.shape)
    vec = eig.symmetric_eigenvector(eig.symmetric_part(g[cell]), lam)
    x0 = grid.centers()[cell]
    return NDResult(True, list(map(float, np.atleast_1d(x0))), -lam,
                    list(map(float, vec)), True, asym_negative, min_real)


@dataclass
class HmResult:
    value: float
    threshold: float | None
    holds: bool | None
    m: int


def _hessian_hm_norm_sq(values, grid, m, method):
    """||grad^2 f||_{H^m}^2 = sum_{j=2..m+2} ||grad^j f||_{L^2}^2."""
    vol = grid.cell_volume
    total = 0.0
    for k, table in derivative_levels(values, grid, m + 2, method):
        if k >= 2:
            total += vol * float(np.sum(level_magnitude_sq(table)))
    return total


def hm_smallness(rho0: ScalarField, u0: VectorField, m, gamma, lambda_max=None,
                 method="auto") -> HmResult:
    """Smallness quantity of the Sobolev blow-up theorem.

    value = (||grad^2 rho0^((gamma-1)/2)||_{H^m} + ||grad^2 u0||_{H^m})
            * ||rho0^((gamma-1)/2)||_inf,
    threshold = lambda_max^2 / (5 (gamma-1)).  Requires integer m > 1 + d/2.
    """
    grid = rho0.grid
    d = grid.dim
    if m <= 1 + d / 2:
        raise ValueError(f"need integer m > 1 + d/2 = {1 + d / 2}, got {m}")
    if method == "auto":
        method = "spectral" if all(grid.periodic) else "central"
    s = np.where(rho0.values < 1e-14, 0.0, rho0.values) ** ((gamma - 1.0) / 2.0)
    sup_s = float(np.max(s))
    hess_sq = _hessian_hm_norm_sq(s, grid, m, method)
    hess_u_sq = sum(
        _hessian_hm_norm_sq(u0.values[..., i], grid, m, method) for i in range(d)
    )
    value = (math.sqrt(hess_sq) + math.sqrt(hess_u_sq)) * sup_s
    if lambda_max is None:
        return HmResult(value, None, None, m)
    threshold = lambda_max**2 / (5.0 * (gamma - 1.0))
    return HmResult(value, threshold, bool(value < threshold), m)


def prop23_epsilon(lambda0, lambda_max, r, M):
    """Closed-form lifespan epsilon: (lambda0 r / 2) / (r M / lambda_max + 2 e^(M/lambda_max) / M)."""
    if min(lambda0, lambda_max, r, M) <= 0:
        raise ValueError("all arguments must be positive")
    denom = r * M / lambda_max + 2.0 * math.exp(M / lambda_max) / M
    return 0.5 * lambda0 * r / denom


def riccati_bound(nu0, t):
    """Lower bound 2 nu0 / (2 - nu0 t) for the gradient growth; pole at 2/nu0."""
    if nu0 <= 0:
        raise ValueError("nu0 must be positive")
    if t < 0 or t >= 2.0 / nu0:
        raise ValueError(f"t must lie in [0, 2/nu0) = [0, {2.0 / nu0})")
    return 2.0 * nu0 / (2.0 - nu0 * t)


# ---------------------------------------------------------------------------
# trajectory-based checks
# ---------------------------------------------------------------------------


@dataclass
class FunctionalSeries:
    times: np.ndarray
    F: np.ndarray
    M: np.ndarray
    kinetic: np.ndarray  # int rho |u|^2 per snapshot
    F_rate_ok: bool
    M_const_ok: bool
    support_ok: bool


def sideris_functionals(trajectory, rho_bar, rate_tol=1e-6, m_rel_tol=1e-10) -> FunctionalSeries:
    """Moment functionals F(t) = int x . rho u and M(t) = int (rho - rho_bar).

    ``F_rate_ok`` checks the discrete rate inequality
    (F(t2)-F(t1))/(t2-t1) >= midpoint of int rho |u|^2 - rate_tol between
    consecutive snapshots; ``M_const_ok`` checks relative constancy of M.
    A support excursion to the box edge invalidates the moment integral and
    is flagged via ``support_ok=False``.
    """
    grid = trajectory.grid
    vol = grid.cell_volume
    centers = grid.centers()
    times = trajectory.times_array
    F, M, kin = [], [], []
    support_ok = True
    box_radius = 0.5 * min(grid.lengths) - max(grid.spacing)
    for state in trajectory.states:
        rho = state.rho.values
        m = rho[..., None] * state.u.values
        F.append(vol * float(np.sum(centers * m)))
        M.append(vol * float(np.sum(rho - rho_bar)))
        kin.append(vol * float(np.sum(np.sum(m * state.u.values, axis=-1))))
        if _exterior_deviation(state.rho, state.u, rho_bar, box_radius) > 1e-8:
            support_ok = False
    F = np.asarray(F)
    M = np.asarray(M)
    kin = np.asarray(kin)
    dF = np.diff(F) / np.diff(times)
    mid_kin = 0.5 * (kin[1:] + kin[:-1])
    F_rate_ok = bool(np.all(dF >= mid_kin - rate_tol))
    mass_scale = max(abs(M[0]), vol * float(np.sum(trajectory.states[0].rho.values)))
    M_const_ok = bool(np.max(np.abs(M - M[0])) <= m_rel_tol * max(mass_scale, 1e-300))
    return FunctionalSeries(times, F, M, kin, F_rate_ok, M_const_ok, support_ok)


def cone_check(trajectory, rho_bar, R, pad=None):
    """Max deviation outside the padded sound cone |x| > R + sigma t + pad.

    ``pad`` defaults to the hard stencil bound (one cell per step), under
    which the exterior deviation is exactly zero; pass a tighter pad (a fixed
    number of dissipation lengths) to probe how sharply the scheme respects
    the cone.  Returns the per-snapshot deviation array.
    """
    grid = trajectory.grid
    sigma = _sigma(rho_bar, trajectory.gamma)
    h = max(grid.spacing)
    out = []
    for k, state in enumerate(trajectory.states):
        t = trajectory.times[k]
        if pad is None:
            steps = trajectory.step_indices[k] if k < len(trajectory.step_indices) else k
            pad_k = h * steps
        else:
            pad_k = pad
        out.append(_exterior_deviation(state.rho, state.u, rho_bar, R + sigma * t + pad_k))
    return np.asarray(out)


@dataclass
class RelativeEntropyPair:
    eta: ScalarField
    q: VectorField


def relative_entropy_values(rho, m, rho_bar, gamma, floor=1e-14):
    """Pointwise eta(rho, m) and Q(rho, m) relative to (rho_bar, 0).

    eta = |m|^2/(2 rho) + P(rho) - P'(rho_bar)(rho - rho_bar) - P(rho_bar)
    with P(rho) = rho^gamma/(gamma-1); vacuum cells take the rho -> 0 limit
    (momentum must vanish there).
    """
    if rho_bar <= 0:
        raise ValueError("rho_bar must be positive")
    rho = np.asarray(rho, dtype=float)
    m = np.asarray(m, dtype=float)
    vacuum = rho <= floor
    if np.any(vacuum & (np.sqrt(np.sum(m**2, axis=-1)) > 0)):
        raise ValueError("vacuum cell with nonzero momentum")
    P = rho ** gamma / (gamma - 1.0)
    dP_bar = gamma * rho_bar ** (gamma - 1.0) / (gamma - 1.0)
    P_bar = rho_bar**gamma / (gamma - 1.0)
    kinetic = np.where(vacuum, 0.0, 0.5 * np.sum(m**2, axis=-1) / np.maximum(rho, floor))
    bracket = kinetic + P - dP_bar * (rho - rho_bar) - P_bar
    u = m / np.maximum(rho, floor)[..., None]
    u = np.where(vacuum[..., None], 0.0, u)
    return bracket, u * bracket[..., None]


def relative_entropy(state: FluidState, rho_bar) -> RelativeEntropyPair:
    rho = state.rho.values
    m = rho[..., None] * state.u.values
    eta, q = relative_entropy_values(rho, m, rho_bar, state.gamma)
    return RelativeEntropyPair(ScalarField(state.grid, eta), VectorField(state.grid, q))


@dataclass
class GrassinHypotheses:
    g1: bool
    g2: bool
    g3: bool
    alpha: float
    min_quadratic_form: float
    hess_u_hm1: float
    grad_u_inf: float


def grassin_hypotheses(rho0: ScalarField, u0: VectorField, m, alpha,
                       support_tol=1e-10, method="central") -> GrassinHypotheses:
    """The three expansive-regime hypotheses on (rho0, u0).

    g1: grad^2 u0 in H^(m-1) and grad u0 in L-inf (finite on the box);
    g2: min over cells of the smallest symmetric-part eigenvalue >= -1e-10
        (the quadratic-form infimum over unit directions, evaluated exactly);
    g3: supp(rho0) inside the region where that eigenvalue is >= alpha.
    """
    grid = rho0.grid
    d = grid.dim
    if m <= 1 + d / 2:
        raise ValueError(f"need integer m > 1 + d/2 = {1 + d / 2}, got {m}")
    g = gradient(u0, method=method).values
    lam_min = eig.min_symmetric_eigenvalue(g)
    min_quad = float(np.min(lam_min))

    hess_sq = sum(
        _hessian_hm1_norm_sq(u0.values[..., i], grid, m, method) for i in range(d)
    )
    grad_inf = float(np.max(np.abs(g)))
    g1 = bool(np.isfinite(hess_sq) and np.isfinite(grad_inf))
    g2 = bool(min_quad >= -1e-10)
    support = rho0.values > support_tol
    g3 = bool(np.all(lam_min[support] >= alpha - 1e-10)) if np.any(support) else True
    return GrassinHypotheses(g1, g2, g3, alpha, min_quad, math.sqrt(hess_sq), grad_inf)


def _hessian_hm1_norm_sq(values, grid, m, method):
    """||grad^2 f||_{H^(m-1)}^2 = sum_{j=2..m+1} ||grad^j f||^2."""
    vol = grid.cell_volume
    total = 0.0
    for k, table in derivative_levels(values, grid, m + 1, method):
        if k >= 2:
            total += vol * float(np.sum(level_magnitude_sq(table)))
    return total


def decay_weight_b(gamma, d):
    """Exponent b of the weighted energy; the critical exponent is 1 + 2/d."""
    crit = 1.0 + 2.0 / d
    if gamma >= crit:
        return 1.0 - d / 2.0
    return (gamma - 1.0) * d / 2.0 - d / 2.0


def delta_k(k, d, gamma, s=0.0):
    """Weight exponent delta_k = k + b - a with a = 1 + s + d/2."""
    return k + decay_weight_b(gamma, d) - (1.0 + s + d / 2.0)


@dataclass
class WeightedEnergy:
    times: np.ndarray
    gamma_total: np.ndarray  # Gamma(t)
    gamma_k: np.ndarray  # (snapshots, m+1)
    a: float
    decay_exponent: float  # log-log slope of Gamma(t) against (1+t)
    compensated_slope: float  # log-log slope of Gamma(t) * (1+t)^a


def _block_average(values, q):
    """Conservative restriction by q per axis (cells must divide evenly)."""
    if q == 1:
        return values
    nd = values.ndim
    shape = []
    for n in values.shape:
        if n % q:
            raise ValueError(f"coarsening factor {q} does not divide {n}")
        shape += [n // q, q]
    out = values.reshape(shape)
    for ax in reversed(range(nd)):
        out = out.mean(axis=2 * ax + 1)
    return out


def _coarsen_grid(grid: Grid, q) -> Grid:
    if q == 1:
        return grid
    return Grid(grid.dim,
                tuple(n // q for n in grid.cells),
                tuple(h * q for h in grid.spacing),
                grid.origin, grid.periodic)


def weighted_energy(trajectory, burgers_u0, m, s=0.0, method="central",
                    coarsen=1) -> WeightedEnergy:
    """Weighted Sobolev energy of U = (pi, u - v) against the reference flow.

    Gamma_k(t) = ||grad^k U||_{L^2}; Gamma(t) = sum_k (1+t)^(delta_k) Gamma_k
    with delta_k = k + b - a, a = 1 + s + d/2.  The expansive-regime
    conclusion is Gamma(t) <= C (1+t)^(-a), i.e. a bounded compensated
    energy; both log-log slopes are returned.  Rejects trajectories that
    tripped the blow-up detector.

    ``coarsen`` block-averages U by that factor per axis before
    differentiating.  Raw cell differencing of a first-order solution does
    not converge in the k >= 2 levels (a localized O(h)-amplitude kink
    contributes O(h^(3/2-k)) to the k-th derivative norm, which grows under
    refinement for k >= 2), while restriction to a coarser grid is a
    consistent estimator of the continuum norms.
    """
    if trajectory.t_detect is not None:
        raise ValueError("weighted_energy expects a global-existence trajectory")
    grid = trajectory.grid
    d = grid.dim
    gam = trajectory.gamma
    a = 1.0 + s + d / 2.0
    deltas = [delta_k(k, d, gam, s) for k in range(m + 1)]
    pts = grid.centers().reshape(-1, d)
    cgrid = _coarsen_grid(grid, coarsen)
    vol = cgrid.cell_volume

    times = trajectory.times_array
    gamma_k = np.zeros((len(times), m + 1))
    for idx, state in enumerate(trajectory.states):
        t = times[idx]
        v = evaluate_burgers(burgers_u0, t, pts).reshape(grid.shape + (d,))
        comps = [pi_from_rho(state.rho.values, gam)]
        w = state.u.values - v
        comps.extend(w[..., i] for i in range(d))
        sq = np.zeros(m + 1)
        for c in comps:
            cc = _block_average(c, coarsen)
            for k, table in derivative_levels(cc, cgrid, m, method):
                sq[k] += vol * float(np.sum(level_magnitude_sq(table)))
        gamma_k[idx] = np.sqrt(sq)
    gamma_total = np.sum(
        [(1.0 + times) ** deltas[k] * gamma_k[:, k] for k in range(m + 1)], axis=0
    )

    def loglog_slope(y):
        mask = y > 0
        if np.count_nonzero(mask) < 2:
            return 0.0
        coeff = np.polyfit(np.log1p(times[mask]), np.log(y[mask]), 1)
        return float(coeff[0])

    return WeightedEnergy(
        times, gamma_total, gamma_k, a,
        loglog_slope(gamma_total),
        loglog_slope(gamma_total * (1.0 + times) ** a),
    )


# ---------------------------------------------------------------------------
# aggregated report
# ---------------------------------------------------------------------------

VERDICTS = ("blowup_sideris", "blowup_thm25", "global_prop27", "undetermined")


@dataclass
class CriteriaReport:
    sideris: dict
    support_ok: bool
    nd: dict
    hm_smallness: dict
    grassin: dict
    verdict: str
    params: dict

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        kwargs.setdefault("indent", 2)
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def default_m(d):
    """Smallest integer strictly above 1 + d/2."""
    return int(math.floor(1 + d / 2)) + 1


def evaluate_criteria(rho0: ScalarField, u0: VectorField, gamma, rho_bar, R,
                      m=None, alpha=0.5, pi_smallness_threshold=0.1,
                      nd_at_point=None, support_tol=1e-10,
                      method="central") -> CriteriaReport:
    """Run every initial-data condition and aggregate a verdict.

    Verdict precedence: breakdown via the integral+support conditions, then
    breakdown via negative gradient eigenvalue plus Sobolev smallness, then
    global existence via the expansive hypotheses plus small density, else
    undetermined.  Every numeric margin is kept in the report.
    """
    grid = rho0.grid
    d = grid.dim
    m = default_m(d) if m is None else int(m)

    try:
        sid = sideris_condition(rho0, u0, rho_bar, R, gamma)
        sid_dict = {"lhs": sid.lhs, "rhs": sid.rhs, "holds": sid.holds}
        sid_holds = sid.holds
    except SupportViolation as exc:
        sid_dict = {"lhs": None, "rhs": None, "holds": False, "error": str(exc)}
        sid_holds = False
    support_ok = support_condition(rho0, u0, rho_bar, R)

    nd = nd_condition(u0, at_point=nd_at_point, method=method)
    lam = nd.lambda_max if nd.found else None
    hm = hm_smallness(rho0, u0, m, gamma, lambda_max=lam, method=method)
    hm_dict = {"value": hm.value, "threshold": hm.threshold, "holds": hm.holds, "m": m}

    gr = grassin_hypotheses(rho0, u0, m, alpha, support_tol=support_tol, method=method)
    pi_field = ScalarField(grid, pi_from_rho(rho0.values, gamma))
    pi_hm = sobolev_norm(pi_field, m, method=method)
    pi_small = bool(pi_hm < pi_smallness_threshold)
    gr_dict = {
        "g1": gr.g1, "g2": gr.g2, "g3": gr.g3, "alpha": alpha,
        "min_quadratic_form": gr.min_quadratic_form,
        "pi_hm": pi_hm, "pi_smallness_threshold": pi_smallness_threshold,
        "density_small": pi_small,
    }

    if sid_holds and support_ok:
        verdict = "blowup_sideris"
    elif nd.found and bool(hm.holds):
        verdict = "blowup_thm25"
    elif gr.g1 and gr.g2 and gr.g3 and pi_small:
        verdict = "global_prop27"
    else:
        verdict = "undetermined"

    nd_dict = {
        "found": nd.found, "x0": nd.x0, "lambda_max": nd.lambda_max,
        "xi0": nd.xi0, "symmetric": nd.symmetric,
        "asymmetric_negative": nd.asymmetric_negative,
        "min_real_eigenvalue": nd.min_real_eigenvalue,
    }
    params = {"gamma": gamma, "rho_bar": rho_bar, "R": R, "m": m,
              "sigma": _sigma(rho_bar, gamma) if rho_bar > 0 else 0.0,
              "dim": d}
    return CriteriaReport(sid_dict, support_ok, nd_dict, hm_dict, gr_dict, verdict, params)
