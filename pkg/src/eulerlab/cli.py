"""Command-line driver: reproducible experiments from flat config files.

Config format is INI-style key=value under section headers ([data], [grid],
[solver], [criteria], [verify]); all defaults are echoed into every report
for provenance.  Subcommands: gen-data, check, burgers, simulate,
verify-theorem.

Exit codes: 0 ok (and verdict pass), 1 config error, 2 hypothesis refusal,
3 simulation abort, 4 verdict fail.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import criteria, initial_data, snapshot
from .burgers import burgers_blowup_time
from .euler import SimulationAbort, SolverConfig, detect_blowup, run
from .fields import FluidState, ScalarField, gradient, pi_from_rho, sobolev_norm
from .grid import Grid
from .sampling import CubicSampler

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_REFUSED = 2
EXIT_ABORT = 3
EXIT_FAIL = 4

THEOREMS = ("thm2.2", "prop2.3", "thm2.5", "prop2.7")


class ConfigError(ValueError):
    pass


class HypothesisRefused(RuntimeError):
    pass


class VerdictFail(RuntimeError):
    pass


def _load_config(path):
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    return cp


def _getfloat(cp, section, key, default=None):
    try:
        if cp.has_option(section, key):
            return cp.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}")
    if default is None:
        raise ConfigError(f"missing required option [{section}] {key}")
    return default


def _build_grid(cp):
    dim = cp.getint("grid", "dim", fallback=1)
    cells_raw = cp.get("grid", "cells", fallback="1024").split()
    cells = [int(c) for c in cells_raw]
    if len(cells) == 1:
        cells = cells * dim
    half = _getfloat(cp, "grid", "half_width", 4.0)
    periodic = cp.getboolean("grid", "periodic", fallback=True)
    if dim != len(cells):
        raise ConfigError(f"[grid] cells has {len(cells)} entries for dim={dim}")
    return Grid.regular(cells, [2.0 * half] * dim, periodic=periodic)


def _build_data(cp, grid):
    kind = cp.get("data", "kind", fallback="constant")
    gamma = _getfloat(cp, "data", "gamma", 2.0)
    p = {}
    if kind == "constant":
        rho, u = initial_data.constant_state(grid, rho_bar=_getfloat(cp, "data", "rho_bar", 1.0))
    elif kind == "compressive_1d":
        rho, u = initial_data.compressive_1d(
            grid,
            lambda0=_getfloat(cp, "data", "lambda0", 1.0),
            core=_getfloat(cp, "data", "core", 1.0),
            rho_amp=_getfloat(cp, "data", "rho_amp", 1e-4),
            rho_width=_getfloat(cp, "data", "rho_width", 0.5),
            rho_floor=_getfloat(cp, "data", "rho_floor", 1e-12),
        )
    elif kind == "expansive_linear":
        rho, u = initial_data.expansive_linear(
            grid,
            lambda0=_getfloat(cp, "data", "lambda0", 1.0),
            core=_getfloat(cp, "data", "core", 1.0),
            rho_amp=_getfloat(cp, "data", "rho_amp", 3e-3),
            rho_width=_getfloat(cp, "data", "rho_width", 0.8),
            rho_floor=_getfloat(cp, "data", "rho_floor", 3e-4),
        )
    elif kind == "sideris_pulse":
        rho, u, R = initial_data.sideris_pulse(
            grid,
            rho_bar=_getfloat(cp, "data", "rho_bar", 1.0),
            rho_amp=_getfloat(cp, "data", "rho_amp", 0.5),
            r0=_getfloat(cp, "data", "r0", 1.0),
            margin=_getfloat(cp, "data", "margin", 1.5),
            gamma=gamma,
        )
        p["support_radius"] = R
    elif kind == "example1":
        u = initial_data.example1(grid, _getfloat(cp, "data", "R", 8.0),
                                  n=cp.getint("data", "n", fallback=6))
        rho = initial_data.gaussian_density(
            grid, _getfloat(cp, "data", "rho_amp", 1e-4),
            _getfloat(cp, "data", "rho_width", 1.0))
    elif kind == "example2":
        rho, u = initial_data.example2(
            grid, _getfloat(cp, "data", "R", 8.0), _getfloat(cp, "data", "lam", 24.0),
            _getfloat(cp, "data", "rho_bar", 1.0), n=cp.getint("data", "n", fallback=6))
    elif kind == "example3":
        u = initial_data.example3_radial(grid, _getfloat(cp, "data", "R", 8.0))
        rho = initial_data.gaussian_density(
            grid, _getfloat(cp, "data", "rho_amp", 1e-4),
            _getfloat(cp, "data", "rho_width", 1.0))
    else:
        raise ConfigError(f"unknown data kind {kind!r}")
    return rho, u, gamma


def _build_solver_config(cp):
    threshold = None
    if cp.has_option("solver", "threshold"):
        threshold = cp.getfloat("solver", "threshold")
    return SolverConfig(
        t_end=_getfloat(cp, "solver", "t_end", 1.0),
        cfl=_getfloat(cp, "solver", "cfl", 0.45),
        reconstruction=cp.get("solver", "reconstruction", fallback="constant"),
        dissipation=cp.get("solver", "dissipation", fallback="local"),
        gradient_blowup_threshold=threshold,
        snapshot_stride=cp.getint("solver", "snapshot_stride", fallback=10),
        rho_bar=_getfloat(cp, "solver", "rho_bar", 0.0),
    )


def _config_echo(cp):
    return {s: dict(cp.items(s)) for s in cp.sections()}


def _write_report(out_dir, payload):
    payload = dict(payload)
    payload["meta"] = {"created_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    path = Path(out_dir) / "report.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _snapshot_format(cp):
    fmt = cp.get("experiment", "snapshot_format", fallback="bin")
    if fmt not in ("bin", "csv"):
        raise ConfigError(f"snapshot_format must be bin or csv, got {fmt!r}")
    return fmt


def cmd_gen_data(cp, out_dir):
    grid = _build_grid(cp)
    rho, u, gamma = _build_data(cp, grid)
    fmt = _snapshot_format(cp)
    rpath = Path(out_dir) / f"snapshot_rho.{fmt}"
    upath = Path(out_dir) / f"snapshot_u.{fmt}"
    snapshot.write_snapshot(rpath, rho)
    snapshot.write_snapshot(upath, u)
    _write_report(out_dir, {
        "command": "gen-data",
        "config": _config_echo(cp),
        "result": {"rho_file": rpath.name, "u_file": upath.name, "gamma": gamma,
                   "cells": list(grid.cells)},
    })
    return EXIT_OK


def cmd_burgers(cp, out_dir):
    grid = _build_grid(cp)
    _, u, _ = _build_data(cp, grid)
    verdict = burgers_blowup_time(u)
    _write_report(out_dir, {
        "command": "burgers",
        "config": _config_echo(cp),
        "result": {
            "blows_up": verdict.blows_up,
            "t_star": verdict.t_star if math.isfinite(verdict.t_star) else "inf",
            "x_star": None if verdict.x_star is None else list(map(float, np.atleast_1d(verdict.x_star))),
            "lambda": verdict.lam,
        },
    })
    return EXIT_OK


def cmd_check(cp, out_dir):
    grid = _build_grid(cp)
    rho, u, gamma = _build_data(cp, grid)
    report = criteria.evaluate_criteria(
        rho, u, gamma,
        rho_bar=_getfloat(cp, "criteria", "rho_bar", 0.0),
        R=_getfloat(cp, "criteria", "R", 2.0),
        m=cp.getint("criteria", "m", fallback=None) if cp.has_option("criteria", "m") else None,
        alpha=_getfloat(cp, "criteria", "alpha", 0.5),
        pi_smallness_threshold=_getfloat(cp, "criteria", "pi_threshold", 0.1),
    )
    _write_report(out_dir, {
        "command": "check",
        "config": _config_echo(cp),
        "result": report.to_dict(),
    })
    _print_check_table(report)
    return EXIT_OK


def _print_check_table(report):
    d = report.to_dict()
    rows = [
        ("integral condition (lhs >= rhs)", d["sideris"].get("holds")),
        ("background support condition", d["support_ok"]),
        ("negative gradient eigenvalue", d["nd"]["found"]),
        ("Sobolev smallness", d["hm_smallness"]["holds"]),
        ("expansive hypotheses g1/g2/g3",
         all(d["grassin"][k] for k in ("g1", "g2", "g3"))),
        ("density smallness", d["grassin"]["density_small"]),
    ]
    width = max(len(r[0]) for r in rows)
    for name, ok in rows:
        print(f"{name:<{width}}  {'yes' if ok else 'no'}")
    print(f"{'verdict':<{width}}  {d['verdict']}")


def _simulate(cp, out_dir, fmt=None):
    grid = _build_grid(cp)
    rho, u, gamma = _build_data(cp, grid)
    cfg = _build_solver_config(cp)
    traj = run(FluidState(rho, u, gamma), cfg)
    traj.to_csv(Path(out_dir) / "series.csv")
    if fmt is None:
        fmt = _snapshot_format(cp)
    snapshot.write_snapshot(Path(out_dir) / f"snapshot_final_rho.{fmt}", traj.states[-1].rho)
    snapshot.write_snapshot(Path(out_dir) / f"snapshot_final_u.{fmt}", traj.states[-1].u)
    return traj, cfg


def cmd_simulate(cp, out_dir):
    traj, cfg = _simulate(cp, out_dir)
    fit = detect_blowup(traj)
    _write_report(out_dir, {
        "command": "simulate",
        "config": _config_echo(cp),
        "result": {
            "t_final": traj.times[-1],
            "steps": traj.step_indices[-1],
            "t_detect": fit.t_detect,
            "fit_t": fit.fit_t,
            "threshold": traj.threshold if math.isfinite(traj.threshold) else "inf",
            "mass_drift_rel": _mass_drift(traj),
            "max_entropy_production": max(traj.series["entropy_production_max"]),
        },
    })
    return EXIT_OK


def _mass_drift(traj):
    mass = traj.series_array("total_mass")
    return float(np.max(np.abs(mass - mass[0])) / max(abs(mass[0]), 1e-300))


def cmd_verify_theorem(cp, out_dir):
    theorem = cp.get("verify", "theorem", fallback=None)
    if theorem not in THEOREMS:
        raise ConfigError(f"[verify] theorem must be one of {THEOREMS}, got {theorem!r}")
    tol_factor = _getfloat(cp, "verify", "tolerance", 1.25)

    grid = _build_grid(cp)
    rho, u, gamma = _build_data(cp, grid)
    rho_bar = _getfloat(cp, "criteria", "rho_bar", 0.0)
    R = _getfloat(cp, "criteria", "R", 2.0)

    result = {"theorem": theorem, "tolerance_factor": tol_factor}
    if theorem == "thm2.2":
        passed = _verify_breakdown_integral(cp, out_dir, rho, u, gamma, rho_bar, R, result)
    elif theorem in ("prop2.3", "thm2.5"):
        passed = _verify_gradient_blowup(cp, out_dir, rho, u, gamma, theorem, tol_factor, result)
    else:
        passed = _verify_global_expansive(cp, out_dir, rho, u, gamma, result)

    result["pass"] = bool(passed)
    _write_report(out_dir, {
        "command": "verify-theorem",
        "config": _config_echo(cp),
        "result": result,
    })
    if not passed:
        raise VerdictFail(f"{theorem}: bound check failed (see report.json)")
    return EXIT_OK


def _verify_breakdown_integral(cp, out_dir, rho, u, gamma, rho_bar, R, result):
    """Moment-functional machinery of the breakdown-by-integral-condition claim.

    Pass requires: M(t) constant, the discrete rate inequality
    F' >= int rho |u|^2, F strictly increasing, and the cone-moment
    differential inequality F^2 <= omega_d (R + sigma t)^(d+2) ||rho0||_inf F'
    (the mechanism that forces super-linear growth of F and hence finite
    lifespan) at every mid-snapshot.
    """
    try:
        sid = criteria.sideris_condition(rho, u, rho_bar, R, gamma)
    except criteria.SupportViolation as exc:
        raise HypothesisRefused(f"thm2.2: support hypothesis fails: {exc}")
    if not sid.holds:
        raise HypothesisRefused(
            "thm2.2: the Sideris integral condition fails "
            f"(lhs={sid.lhs:.6g} < rhs={sid.rhs:.6g})"
        )
    if not criteria.support_condition(rho, u, rho_bar, R):
        raise HypothesisRefused("thm2.2: background support condition fails")
    traj, _ = _simulate(cp, out_dir)
    fn = criteria.sideris_functionals(traj, rho_bar)
    d = rho.grid.dim
    sigma = math.sqrt(gamma) * rho_bar ** ((gamma - 1.0) / 2.0)
    rho_inf = float(np.max(rho.values))
    rates = np.diff(fn.F) / np.diff(fn.times)
    t_mid = 0.5 * (fn.times[1:] + fn.times[:-1])
    f_mid = 0.5 * (fn.F[1:] + fn.F[:-1])
    cone_bound = criteria.SPHERE_AREA[d] * (R + sigma * t_mid) ** (d + 2) * rho_inf * rates
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = float(np.max(f_mid**2 / np.where(cone_bound > 0, cone_bound, np.inf)))
    growing = bool(np.all(np.diff(fn.F) > 0))
    result.update({
        "sideris_lhs": sid.lhs, "sideris_rhs": sid.rhs,
        "M_const_ok": fn.M_const_ok, "F_rate_ok": fn.F_rate_ok,
        "F_increasing": growing,
        "moment_inequality_ratio": ratio,
        "F_first_rate": float(rates[0]), "F_last_rate": float(rates[-1]),
    })
    return growing and fn.M_const_ok and fn.F_rate_ok and ratio <= 1.0 + 1e-6


def _verify_gradient_blowup(cp, out_dir, rho, u, gamma, theorem, tol_factor, result):
    nd = criteria.nd_condition(u)
    if not nd.found:
        raise HypothesisRefused(f"{theorem}: no symmetric negative gradient eigenvalue found")
    lam = nd.lambda_max
    m = cp.getint("criteria", "m", fallback=criteria.default_m(u.grid.dim))
    hm = criteria.hm_smallness(rho, u, m, gamma, lambda_max=lam, method="central")
    if theorem == "thm2.5" and not hm.holds:
        raise HypothesisRefused(
            f"thm2.5: Sobolev smallness fails (value={hm.value:.6g} "
            f">= threshold={hm.threshold:.6g})"
        )
    traj, _ = _simulate(cp, out_dir)
    fit = detect_blowup(traj)
    t_hat = fit.t_detect if fit.t_detect is not None else fit.fit_t
    bound = (1.0 if theorem == "prop2.3" else 2.0) / lam
    result.update({
        "lambda_max": lam, "hm_value": hm.value, "hm_threshold": hm.threshold,
        "t_detect": fit.t_detect, "fit_t": fit.fit_t, "bound": bound,
    })
    if theorem == "prop2.3":
        # epsilon formula evaluated with the run-measured gradient bound M
        times = traj.times_array
        window = times <= 1.0 / lam + 1e-12
        M = float(np.max(traj.series_array("max_grad_u")[window]))
        r = 2.0 * max(u.grid.spacing)
        x0 = np.asarray(nd.x0)
        xi0 = np.asarray(nd.xi0)
        samp = CubicSampler(u)
        du = samp(x0 + r * xi0) - samp(x0)
        lambda0 = float(-np.dot(du, xi0) / r)
        eps0 = criteria.prop23_epsilon(max(lambda0, 1e-12), lam, r, M)
        pi0 = pi_from_rho(rho.values, gamma)
        pi_grad = gradient(ScalarField(rho.grid, pi0), method="central")
        pi_dpi = float(np.max(np.abs(pi0[..., None] * pi_grad.values)))
        result.update({
            "measured_M": M, "lambda0": lambda0, "epsilon0": eps0,
            "pi_grad_pi_inf": pi_dpi,
            "smallness_holds": bool(abs(lam - lambda0) + pi_dpi <= eps0),
        })
    return t_hat is not None and t_hat <= bound * tol_factor


def _verify_global_expansive(cp, out_dir, rho, u, gamma, result):
    m = cp.getint("criteria", "m", fallback=criteria.default_m(u.grid.dim))
    alpha = _getfloat(cp, "criteria", "alpha", 0.5)
    support_tol = _getfloat(cp, "criteria", "support_tol", 1e-10)
    gr = criteria.grassin_hypotheses(rho, u, m, alpha, support_tol=support_tol)
    if not (gr.g1 and gr.g2 and gr.g3):
        raise HypothesisRefused(
            f"prop2.7: expansive hypotheses fail "
            f"(g1={gr.g1}, g2={gr.g2}, g3={gr.g3})"
        )
    pi_field = ScalarField(rho.grid, pi_from_rho(rho.values, gamma))
    pi_hm = sobolev_norm(pi_field, m, method="central")
    pi_threshold = _getfloat(cp, "criteria", "pi_threshold", 0.1)
    if pi_hm >= pi_threshold:
        raise HypothesisRefused(
            f"prop2.7: density not small (||pi||_Hm={pi_hm:.6g} >= {pi_threshold})"
        )
    u0 = u.copy()
    traj, _ = _simulate(cp, out_dir)
    no_blowup = traj.t_detect is None
    t = traj.times_array
    plateau = traj.series_array("max_grad_u") * (1.0 + t)
    plateau_dev = float(np.max(np.abs(plateau - plateau[0])) / plateau[0])
    coarsen = cp.getint("verify", "coarsen", fallback=1)
    we = criteria.weighted_energy(traj, CubicSampler(u0), m, coarsen=coarsen)
    result.update({
        "no_blowup": no_blowup, "plateau_deviation": plateau_dev,
        "pi_hm": pi_hm, "a": we.a,
        "compensated_slope": we.compensated_slope,
        "decay_exponent": we.decay_exponent,
    })
    slope_tol = _getfloat(cp, "verify", "slope_tol", 0.05)
    plateau_tol = _getfloat(cp, "verify", "plateau_tol", 0.10)
    return no_blowup and plateau_dev <= plateau_tol and we.compensated_slope <= slope_tol


COMMANDS = {
    "gen-data": cmd_gen_data,
    "check": cmd_check,
    "burgers": cmd_burgers,
    "simulate": cmd_simulate,
    "verify-theorem": cmd_verify_theorem,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="eulerlab",
        description="Gas-dynamics laboratory: generators, breakdown criteria, "
                    "solver runs and theorem-bound verification.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("config", help="experiment config file (INI key=value)")
    parser.add_argument("--out-dir", default=".", help="output directory")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        cp = _load_config(args.config)
        return COMMANDS[args.command](cp, out_dir)
    except (ConfigError, configparser.Error) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisRefused as exc:
        print(f"hypothesis refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except SimulationAbort as exc:
        print(f"simulation abort at t={exc.t}: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except VerdictFail as exc:
        print(f"verdict fail: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
