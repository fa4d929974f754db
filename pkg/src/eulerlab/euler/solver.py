"""Conservative evolution of the gas-dynamics system with diagnostics.

SSP-RK2 (Heun) in time over the Rusanov flux divergence; the time step obeys
``dt <= cfl * h_min / (dim * sigma)`` with sigma the current max wave speed.
The driver records per-snapshot diagnostic series (gradient sup, conserved
totals, entropy production, moment functionals) and stops either at ``t_end``
or when the velocity-gradient threshold is crossed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..fields import FluidState, ScalarField, VectorField, gradient
from ..grid import Grid
from . import kernels


class CFLViolation(ValueError):
    pass


class SimulationAbort(RuntimeError):
    """Step failure (negative density / non-finite state); carries the time."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


@dataclass
class SolverConfig:
    t_end: float
    cfl: float = 0.45
    flux: str = "rusanov"
    time_integrator: str = "ssp_rk2"
    reconstruction: str = "constant"
    dissipation: str = "local"
    gradient_blowup_threshold: float | None = None  # None -> 1e3 * max|grad u0|
    snapshot_stride: int = 10
    rho_bar: float = 0.0
    vacuum_floor: float = 1e-14
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError("cfl must lie in (0, 1]")
        if self.flux != "rusanov":
            raise ValueError(f"unsupported flux {self.flux!r}")
        if self.time_integrator != "ssp_rk2":
            raise ValueError(f"unsupported time integrator {self.time_integrator!r}")
        if self.reconstruction not in ("constant", "muscl"):
            raise ValueError(f"unsupported reconstruction {self.reconstruction!r}")
        if self.dissipation not in ("local", "uniform"):
            raise ValueError(f"unsupported dissipation {self.dissipation!r}")
        if self.gradient_blowup_threshold is not None and self.gradient_blowup_threshold <= 0:
            raise ValueError("gradient_blowup_threshold must be positive")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


SERIES_KEYS = (
    "max_grad_u",
    "total_mass",
    "total_entropy",
    "F",
    "M",
    "entropy_production_max",
    "rho_u_sq",
)


@dataclass
class Trajectory:
    grid: Grid
    gamma: float
    rho_bar: float
    threshold: float
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    momentum: list = field(default_factory=list)
    step_indices: list = field(default_factory=list)
    t_detect: float | None = None
    floor_hits: int = 0

    def series_array(self, key):
        return np.asarray(self.series[key], dtype=float)

    @property
    def times_array(self):
        return np.asarray(self.times, dtype=float)

    def to_csv(self, path):
        d = self.grid.dim
        mom_cols = ",".join(f"momentum_{'xyz'[a]}" for a in range(d))
        header = f"t,max_grad_u,mass,{mom_cols},F,M,max_entropy_production"
        rows = [header]
        for k, t in enumerate(self.times):
            mom = ",".join(f"{self.momentum[k][a]:.17g}" for a in range(d))
            rows.append(
                f"{t:.17g},{self.series['max_grad_u'][k]:.17g},"
                f"{self.series['total_mass'][k]:.17g},{mom},"
                f"{self.series['F'][k]:.17g},{self.series['M'][k]:.17g},"
                f"{self.series['entropy_production_max'][k]:.17g}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def max_wave_speed(state: FluidState) -> float:
    """max over cells of |u| + sqrt(gamma) * rho**((gamma-1)/2)."""
    m = state.rho.values[..., None] * state.u.values
    return kernels.max_wave_speed(state.rho.values, m, state.gamma)


def _max_grad_entry(u_field: VectorField) -> float:
    g = gradient(u_field, method="central")
    return float(np.max(np.abs(g.values)))


def _stage(rho, m, dt, gamma, spacing, periodic, config):
    drho, dm = kernels.euler_rhs(
        rho, m, gamma, spacing, periodic,
        reconstruction=config.reconstruction, floor=config.vacuum_floor,
        dissipation=config.dissipation,
    )
    return rho + dt * drho, m + dt * dm


def _advance(rho, m, dt, gamma, spacing, periodic, config):
    """One SSP-RK2 step on conserved arrays; returns (rho, m, stage1, floor_hit)."""
    r1, m1 = _stage(rho, m, dt, gamma, spacing, periodic, config)
    if np.min(r1) < 0.0:
        raise SimulationAbort("negative density after stage (blow-up or under-resolution)")
    floor_hit = bool(np.any(r1 < config.vacuum_floor) and np.any(r1 > 0))
    r1 = np.maximum(r1, np.where(r1 > 0, config.vacuum_floor, 0.0))
    r2, m2 = _stage(r1, m1, dt, gamma, spacing, periodic, config)
    rho_new = 0.5 * rho + 0.5 * r2
    m_new = 0.5 * m + 0.5 * m2
    if np.min(rho_new) < 0.0:
        raise SimulationAbort("negative density after step (blow-up or under-resolution)")
    if not np.all(np.isfinite(rho_new)) or not np.all(np.isfinite(m_new)):
        raise SimulationAbort("non-finite state after step")
    floor_hit |= bool(np.any((rho_new > 0) & (rho_new < config.vacuum_floor)))
    rho_new = np.maximum(rho_new, np.where(rho_new > 0, config.vacuum_floor, 0.0))
    return rho_new, m_new, (r1, m1), floor_hit


def _to_state(rho, m, grid, gamma, floor):
    # velocity is meaningless below the floor: reconstruct as zero there
    u = m / np.maximum(rho, floor)[..., None]
    u = np.where(rho[..., None] > floor, u, 0.0)
    return FluidState(ScalarField(grid, rho.copy()), VectorField(grid, u), gamma)


def step(state: FluidState, dt: float, config: SolverConfig | None = None) -> FluidState:
    """Advance one SSP-RK2 / Rusanov step; rejects CFL-violating dt."""
    config = config or SolverConfig(t_end=dt)
    grid = state.grid
    sigma = max_wave_speed(state)
    h_min = min(grid.spacing)
    if sigma > 0 and dt > config.cfl * h_min / sigma * (1.0 + 1e-12):
        raise CFLViolation(
            f"dt={dt} exceeds cfl*spacing/max_wave_speed={config.cfl * h_min / sigma}"
        )
    rho = state.rho.values
    m = rho[..., None] * state.u.values
    rho_new, m_new, _, _ = _advance(
        rho, m, dt, state.gamma, grid.spacing, grid.periodic, config
    )
    return _to_state(rho_new, m_new, grid, state.gamma, config.vacuum_floor)


def entropy_production(state_before: FluidState, state_after: FluidState, dt: float,
                       config: SolverConfig | None = None) -> ScalarField:
    """Per-cell entropy residual of one accepted step; positive = violation.

    The residual is (e(after) - e(before))/dt + div(q_hat) with q_hat the
    time-averaged numerical entropy flux of the two RK stages, so an
    entropy-stable step yields nonpositive values up to roundoff.
    """
    config = config or SolverConfig(t_end=dt)
    grid = state_before.grid
    gamma = state_before.gamma
    rho0 = state_before.rho.values
    m0 = rho0[..., None] * state_before.u.values
    rho2 = state_after.rho.values
    m2 = rho2[..., None] * state_after.u.values
    r1, m1 = _stage(rho0, m0, dt, gamma, grid.spacing, grid.periodic, config)
    e0 = kernels.entropy(rho0, m0, gamma, config.vacuum_floor)
    e2 = kernels.entropy(rho2, m2, gamma, config.vacuum_floor)
    div0 = kernels.entropy_flux_divergence(
        rho0, m0, gamma, grid.spacing, grid.periodic, config.vacuum_floor,
        dissipation=config.dissipation,
    )
    div1 = kernels.entropy_flux_divergence(
        np.maximum(r1, 0.0), m1, gamma, grid.spacing, grid.periodic,
        config.vacuum_floor, dissipation=config.dissipation,
    )
    residual = (e2 - e0) / dt + 0.5 * (div0 + div1)
    return ScalarField(grid, residual)


def _diagnostics(grid, gamma, rho, m, rho_bar, floor):
    vol = grid.cell_volume
    rho_f = np.maximum(rho, floor)
    u = m / rho_f[..., None]
    u = np.where(rho[..., None] > floor, u, 0.0)
    ufield = VectorField(grid, u, blowup_snapshot=True)
    centers = grid.centers()
    e = kernels.entropy(rho, m, gamma, floor)
    return {
        "max_grad_u": _max_grad_entry(ufield),
        "total_mass": vol * float(np.sum(rho)),
        "total_entropy": vol * float(np.sum(e)),
        "F": vol * float(np.sum(centers * m)),
        "M": vol * float(np.sum(rho - rho_bar)),
        "rho_u_sq": vol * float(np.sum(np.sum(m * u, axis=-1))),
        "momentum": vol * np.sum(m.reshape(-1, grid.dim), axis=0),
    }


def run(state0: FluidState, config: SolverConfig) -> Trajectory:
    """Advance to t_end or the first gradient-threshold crossing."""
    grid = state0.grid
    gamma = state0.gamma
    rho = state0.rho.values.copy()
    m = rho[..., None] * state0.u.values

    if config.gradient_blowup_threshold is None:
        g0 = _max_grad_entry(state0.u)
        threshold = 1e3 * g0 if g0 > 0 else math.inf
    else:
        threshold = config.gradient_blowup_threshold

    traj = Trajectory(grid=grid, gamma=gamma, rho_bar=config.rho_bar,
                      threshold=threshold,
                      series={k: [] for k in SERIES_KEYS})

    def record(t, rho, m, production_max, n_step):
        diag = _diagnostics(grid, gamma, rho, m, config.rho_bar, config.vacuum_floor)
        traj.times.append(t)
        traj.states.append(_to_state(rho, m, grid, gamma, config.vacuum_floor))
        traj.momentum.append(diag.pop("momentum"))
        traj.step_indices.append(n_step)
        diag["entropy_production_max"] = production_max
        for k in SERIES_KEYS:
            traj.series[k].append(diag[k])
        return diag["max_grad_u"]

    record(0.0, rho, m, 0.0, 0)

    t = 0.0
    n_step = 0
    h_min = min(grid.spacing)
    prev = None
    while t < config.t_end - 1e-14 and n_step < config.max_steps:
        sigma = max_wave_speed_arrays(rho, m, gamma)
        dt_cfl = math.inf if sigma == 0 else config.cfl * h_min / (grid.dim * sigma)
        dt = min(dt_cfl, config.t_end - t)
        prev = (rho, m)
        try:
            rho, m, _, floor_hit = _advance(
                rho, m, dt, gamma, grid.spacing, grid.periodic, config
            )
        except SimulationAbort as exc:
            exc.t = t + dt
            raise
        traj.floor_hits += int(floor_hit)
        t += dt
        n_step += 1
        if n_step % config.snapshot_stride == 0 or t >= config.t_end - 1e-14:
            prod = entropy_production(
                _to_state(prev[0], prev[1], grid, gamma, config.vacuum_floor),
                _to_state(rho, m, grid, gamma, config.vacuum_floor),
                dt, config,
            )
            grad_now = record(t, rho, m, float(np.max(prod.values)), n_step)
            if grad_now >= threshold:
                traj.t_detect = t
                break
    return traj


def max_wave_speed_arrays(rho, m, gamma, floor=1e-14):
    return kernels.max_wave_speed(rho, m, gamma, floor)


@dataclass
class BlowupFit:
    t_detect: float | None
    fit_t: float | None


def detect_blowup(trajectory: Trajectory) -> BlowupFit:
    """Threshold crossing plus a pole fit of the gradient growth.

    The reciprocal of a Riccati-growing gradient is asymptotically linear in
    t, so 1/max_grad is least-squares fitted over the last decade of growth
    and the pole a/b of the fitted line a - b*t is reported as ``fit_t``.
    Returns both fields None when the series never grows.
    """
    t = trajectory.times_array
    nu = trajectory.series_array("max_grad_u")
    t_detect = trajectory.t_detect
    if t_detect is None:
        crossed = np.where(nu >= trajectory.threshold)[0]
        if crossed.size:
            t_detect = float(t[crossed[0]])

    if nu.size < 3:
        return BlowupFit(t_detect, None)
    nu_pk = float(np.max(nu))
    if nu_pk <= 0 or nu_pk < 3.0 * max(nu[0], 1e-300):
        return BlowupFit(t_detect, None)
    # end the window at the half-peak crossing: past it a resolved run has
    # saturated into the viscous shock profile and no longer follows the pole
    i_end = int(np.argmax(nu >= 0.5 * nu_pk))
    window = np.where((np.arange(nu.size) <= i_end) & (nu >= nu[i_end] / 10.0) & (nu > 0))[0]
    if window.size < 3:
        return BlowupFit(t_detect, None)
    tw = t[window]
    yw = 1.0 / nu[window]
    coeffs = np.polyfit(tw, yw, 1)  # yw ~ coeffs[0]*t + coeffs[1]
    b = -coeffs[0]
    a = coeffs[1]
    if b <= 0:
        return BlowupFit(t_detect, None)
    return BlowupFit(t_detect, float(a / b))
