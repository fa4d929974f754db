import math

import numpy as np
import pytest

from eulerlab import criteria, euler, initial_data
from eulerlab.fields import FluidState, ScalarField, VectorField, constant_scalar, constant_vector
from eulerlab.grid import Grid


def constant_data(grid, rho_bar):
    return (constant_scalar(grid, rho_bar),
            constant_vector(grid, np.zeros(grid.dim)))


class TestSiderisCondition:
    def test_zero_velocity_fails(self):
        g = Grid.centered(4.0, 256, dim=1)
        rho, u = constant_data(g, 1.0)
        res = criteria.sideris_condition(rho, u, 1.0, 1.0, 2.0)
        assert res.lhs == 0.0 and res.rhs > 0 and not res.holds

    def test_support_violation_raises(self):
        g = Grid.centered(4.0, 256, dim=1)
        rho, _ = constant_data(g, 1.0)
        u = constant_vector(g, [0.5])  # nonzero everywhere
        with pytest.raises(criteria.SupportViolation):
            criteria.sideris_condition(rho, u, 1.0, 1.0, 2.0)

    def test_bounded_velocity_never_satisfies(self, rng):
        # |u0| <= sigma pointwise keeps the moment strictly below the bound
        from eulerlab.initial_data import BumpProfile, smooth_bump

        for _ in range(200):
            d = int(rng.integers(1, 3))
            n = 48 if d == 1 else 24
            g = Grid.centered(2.0, n, dim=d, periodic=False)
            rho_bar = float(rng.uniform(0.2, 3.0))
            gamma = float(rng.uniform(1.1, 3.0))
            sigma = math.sqrt(gamma) * rho_bar ** ((gamma - 1) / 2)
            R = float(rng.uniform(0.8, 1.6))
            cut = smooth_bump(BumpProfile(0.5 * R, R), g.radius())
            rho = ScalarField(g, rho_bar + rng.uniform(0, 2.0) * cut * rng.random(g.shape))
            uv = rng.uniform(-1, 1, g.shape + (d,)) * cut[..., None] * sigma
            mag = np.sqrt(np.sum(uv**2, axis=-1, keepdims=True))
            uv = np.where(mag > sigma, uv * sigma / np.maximum(mag, 1e-300), uv)
            res = criteria.sideris_condition(rho, VectorField(g, uv), rho_bar, R, gamma)
            assert not res.holds

    def test_rotation_invariance_of_moment(self):
        g = Grid.centered(4.0, 128, dim=2)
        rho, u, R = initial_data.sideris_pulse(g, rho_bar=1.0, rho_amp=0.4, r0=1.0,
                                               margin=1.2, gamma=2.0)
        # rotate the datum by 90 degrees: values rotate, components map
        # (u1, u2) -> (-u2, u1)
        rho_rot = ScalarField(g, np.rot90(rho.values).copy())
        u_rot = np.empty_like(u.values)
        u_rot[..., 0] = -np.rot90(u.values[..., 1])
        u_rot[..., 1] = np.rot90(u.values[..., 0])
        a = criteria.sideris_condition(rho, u, 1.0, R, 2.0)
        b = criteria.sideris_condition(rho_rot, VectorField(g, u_rot), 1.0, R, 2.0)
        assert a.lhs == pytest.approx(b.lhs, abs=1e-10)


class TestSupportCondition:
    def test_constant_background(self):
        g = Grid.centered(4.0, 128, dim=1)
        rho, u = constant_data(g, 1.0)
        assert criteria.support_condition(rho, u, 1.0, 0.5)

    def test_positive_excess_ok(self):
        g = Grid.centered(4.0, 256, dim=1)
        rho = initial_data.bump_density(g, 0.5, 0.3, 0.8, rho_bar=1.0)
        u = constant_vector(g, [0.0])
        assert criteria.support_condition(rho, u, 1.0, 1.0)

    def test_net_deficit_fails(self):
        g = Grid.centered(4.0, 256, dim=1)
        rho = initial_data.bump_density(g, -0.5, 0.3, 0.8, rho_bar=1.0)
        u = constant_vector(g, [0.0])
        assert not criteria.support_condition(rho, u, 1.0, 1.0)


class TestNDCondition:
    def test_uniform_expansion_has_none(self):
        g = Grid.centered(1.0, 33, dim=2, periodic=False)
        u = VectorField(g, g.centers().copy())
        nd = criteria.nd_condition(u)
        assert not nd.found

    def test_uniform_compression_found(self):
        g = Grid.centered(1.0, 33, dim=2, periodic=False)
        u = VectorField(g, -g.centers())
        nd = criteria.nd_condition(u)
        assert nd.found and nd.lambda_max == pytest.approx(1.0, abs=1e-10)
        assert nd.symmetric

    def test_translation_invariance(self):
        g1 = Grid.regular((65,), (4.0,), origin=(-2.0,), periodic=False)
        g2 = Grid.regular((65,), (4.0,), origin=(1.0,), periodic=False)
        u1 = VectorField(g1, -np.tanh(g1.centers()))
        u2 = VectorField(g2, -np.tanh(g2.centers() - 3.0))
        a = criteria.nd_condition(u1)
        b = criteria.nd_condition(u2)
        assert a.lambda_max == pytest.approx(b.lambda_max, rel=1e-12)

    def test_linear_velocity_scaling(self):
        g = Grid.centered(2.0, 129, dim=1, periodic=False)
        u = VectorField(g, -np.tanh(g.centers()))
        base = criteria.nd_condition(u).lambda_max
        for c in (2.0, 7.0):
            out = criteria.nd_condition(VectorField(g, c * u.values)).lambda_max
            assert out == pytest.approx(c * base, rel=1e-12)

    def test_asymmetric_rotation_flagged_not_certified(self):
        # shear flow: gradient [[0, 1], [0, 0]] is never symmetric and has no
        # negative real eigenvalue; add a compressive asymmetric block
        g = Grid.centered(1.0, 32, dim=2, periodic=False)
        c = g.centers()
        uv = np.zeros(g.shape + (2,))
        uv[..., 0] = -c[..., 0] + 0.5 * c[..., 1]
        uv[..., 1] = -c[..., 1]
        nd = criteria.nd_condition(VectorField(g, uv))
        # gradient is constant [[-1, .5], [0, -1]]: real negative eigenvalues
        # but not symmetric -> no certificate, asymmetric report instead
        assert not nd.found
        assert nd.asymmetric_negative
        assert nd.min_real_eigenvalue == pytest.approx(-1.0, abs=1e-8)


class TestHmSmallness:
    def test_vacuum_value_zero(self):
        g = Grid.centered(2.0, 64, dim=1)
        rho = constant_scalar(g, 0.0)
        u = VectorField(g, np.zeros((64, 1)))
        hm = criteria.hm_smallness(rho, u, 2, 2.0, lambda_max=0.5)
        assert hm.value == 0.0 and hm.holds

    def test_threshold_formula(self):
        g = Grid.centered(2.0, 64, dim=1)
        rho, u = constant_data(g, 0.0)
        hm = criteria.hm_smallness(rho, u, 2, 2.0, lambda_max=1.0)
        assert hm.threshold == pytest.approx(0.2, rel=1e-14)
        hm = criteria.hm_smallness(rho, u, 2, 3.0, lambda_max=2.0)
        assert hm.threshold == pytest.approx(4.0 / 10.0, rel=1e-14)

    def test_m_too_small_rejected(self):
        g = Grid.centered(2.0, 16, dim=2)
        rho, u = constant_data(g, 1.0)
        with pytest.raises(ValueError):
            criteria.hm_smallness(rho, u, 2, 2.0)  # need m > 2 in 2D

    def test_value_scales_with_sqrt_density(self):
        g = Grid.centered(4.0, 512, dim=1, periodic=False)
        vals = []
        for amp in (1e-4, 1e-6):
            rho, u = initial_data.compressive_1d(g, rho_amp=amp, rho_width=0.5)
            vals.append(criteria.hm_smallness(rho, u, 2, 2.0, lambda_max=1.0).value)
        assert vals[0] / vals[1] == pytest.approx(10.0, rel=0.05)


class TestLifespanEpsilon:
    def test_unit_arguments_closed_form(self):
        # 0.5 / (1 + 2e), evaluated independently
        expect = 0.5 / (1.0 + 2.0 * math.e)
        assert criteria.prop23_epsilon(1.0, 1.0, 1.0, 1.0) == pytest.approx(expect, rel=1e-14)
        assert expect == pytest.approx(0.0776813, abs=5e-7)

    def test_monotone_in_r(self):
        eps = [criteria.prop23_epsilon(1.0, 1.0, r, 1.0) for r in (0.5, 1.0, 2.0, 4.0)]
        assert all(b > a for a, b in zip(eps, eps[1:]))

    def test_vanishes_for_large_gradient_bound(self):
        assert criteria.prop23_epsilon(1.0, 1.0, 1.0, 50.0) < 1e-12

    def test_positive_arguments_required(self):
        with pytest.raises(ValueError):
            criteria.prop23_epsilon(0.0, 1.0, 1.0, 1.0)


class TestRiccatiBound:
    def test_initial_value(self):
        assert criteria.riccati_bound(1.0, 0.0) == 1.0

    def test_doubling_time(self):
        assert criteria.riccati_bound(1.0, 1.0) == pytest.approx(2.0)

    def test_pole_rejected(self):
        with pytest.raises(ValueError):
            criteria.riccati_bound(2.0, 1.0)
        # divergence approaching the pole
        assert criteria.riccati_bound(2.0, 1.0 - 1e-9) > 1e8

    def test_increasing_in_time(self, rng):
        for _ in range(50):
            nu0 = float(rng.uniform(0.1, 5.0))
            ts = np.sort(rng.uniform(0, 2.0 / nu0 * 0.999, 8))
            vals = [criteria.riccati_bound(nu0, t) for t in ts]
            assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestFunctionals:
    def test_static_state_all_zero(self):
        g = Grid.centered(2.0, 64, dim=1, periodic=True)
        rho, u = constant_data(g, 1.0)
        st = FluidState(rho, u, 2.0)
        traj = euler.run(st, euler.SolverConfig(t_end=0.2, snapshot_stride=10, rho_bar=1.0))
        fn = criteria.sideris_functionals(traj, 1.0)
        assert np.max(np.abs(fn.F)) < 1e-14
        assert np.max(np.abs(fn.M)) < 1e-12
        assert fn.M_const_ok and fn.F_rate_ok and fn.support_ok

    def test_mass_moment_constant_on_pulse_run(self):
        g = Grid.centered(12.0, 1024, dim=1, periodic=True)
        rho, u, R = initial_data.sideris_pulse(g, rho_bar=1e-3, rho_amp=5e-4,
                                               r0=1.0, margin=1.5, gamma=2.0)
        st = FluidState(rho, u, 2.0)
        traj = euler.run(st, euler.SolverConfig(t_end=0.5, snapshot_stride=5, rho_bar=1e-3))
        fn = criteria.sideris_functionals(traj, 1e-3)
        assert fn.M_const_ok
        assert np.all(np.diff(fn.F) > 0)  # convex increasing moment


class TestConeCheck:
    def test_constant_state_zero_deviation(self):
        g = Grid.centered(4.0, 128, dim=2, periodic=True)
        rho, u = constant_data(g, 1.0)
        st = FluidState(rho, u, 2.0)
        traj = euler.run(st, euler.SolverConfig(t_end=0.2, snapshot_stride=10, rho_bar=1.0))
        dev = criteria.cone_check(traj, 1.0, 1.0, pad=0.0)
        assert np.max(dev) == 0.0

    def test_background_sound_speed(self):
        assert criteria._sigma(1.0, 2.0) == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert criteria._sigma(4.0, 3.0) == pytest.approx(math.sqrt(3.0) * 4.0, rel=1e-14)


class TestRelativeEntropy:
    def test_background_is_zero(self):
        g = Grid.centered(2.0, 64, dim=1)
        rho, u = constant_data(g, 1.0)
        pair = criteria.relative_entropy(FluidState(rho, u, 2.0), 1.0)
        assert np.max(np.abs(pair.eta.values)) < 1e-14
        assert np.max(np.abs(pair.q.values)) < 1e-14

    def test_hand_value_gamma2(self):
        g = Grid.centered(2.0, 8, dim=1)
        rho = constant_scalar(g, 2.0)
        u = constant_vector(g, [0.0])
        pair = criteria.relative_entropy(FluidState(rho, u, 2.0), 1.0)
        # P(rho) = rho^2: eta = 4 - 2*(2-1) - 1 = 1
        assert np.allclose(pair.eta.values, 1.0)

    def test_strict_positivity_off_background(self, rng):
        g = Grid.centered(1.0, 16, dim=1)
        for _ in range(300):
            rho_bar = float(rng.uniform(0.2, 4.0))
            gamma = float(rng.uniform(1.1, 3.0))
            rho = rng.uniform(0.01, 5.0, 16)
            uv = rng.standard_normal((16, 1))
            st = FluidState(ScalarField(g, rho), VectorField(g, uv), gamma)
            eta = criteria.relative_entropy(st, rho_bar).eta.values
            off = (np.abs(rho - rho_bar) > 1e-9) | (np.abs(uv[:, 0]) > 1e-9)
            assert np.all(eta[off] > 0)
            assert np.all(eta >= -1e-14)

    def test_vacuum_uses_limit_and_rejects_momentum(self):
        eta, q = criteria.relative_entropy_values(
            np.array([0.0, 1.0]), np.array([[0.0], [0.0]]), 1.0, 2.0)
        assert eta[0] == pytest.approx(1.0)  # rho_bar^gamma for gamma=2, rho_bar=1
        with pytest.raises(ValueError, match="vacuum"):
            criteria.relative_entropy_values(
                np.array([0.0]), np.array([[0.5]]), 1.0, 2.0)


class TestGrassinHypotheses:
    def test_uniform_expansion_all_true(self):
        g = Grid.centered(2.0, 65, dim=2, periodic=False)
        u = VectorField(g, g.centers().copy())
        rho = initial_data.bump_density(g, 0.1, 0.2, 0.5)
        gr = criteria.grassin_hypotheses(rho, u, 3, 1.0)
        assert gr.g1 and gr.g2 and gr.g3
        assert gr.min_quadratic_form == pytest.approx(1.0, abs=1e-10)

    def test_negative_direction_breaks_g2(self):
        g = Grid.centered(2.0, 65, dim=2, periodic=False)
        c = g.centers()
        uv = np.stack([-c[..., 0], c[..., 1]], axis=-1)
        rho = initial_data.bump_density(g, 0.1, 0.2, 0.5)
        gr = criteria.grassin_hypotheses(rho, u0 := VectorField(g, uv), 3, 0.5)
        assert not gr.g2

    def test_density_on_flat_region_breaks_g3(self):
        # velocity vanishes identically where the density lives
        g = Grid.centered(4.0, 129, dim=1, periodic=False)
        x = g.centers()[..., 0]
        u = VectorField(g, initial_data.plateau_ramp(x - 3.0, core=0.3)[:, None])
        rho = initial_data.bump_density(g, 0.2, 0.2, 0.5)  # centered at 0
        gr = criteria.grassin_hypotheses(rho, u, 2, 0.5)
        assert not gr.g3


class TestWeightedEnergy:
    def test_delta_exponent_arithmetic(self):
        # gamma above the critical exponent: b = 1 - d/2 and delta_0 = -d
        for d in (1, 2, 3):
            gamma = 1.0 + 2.0 / d + 0.5
            assert criteria.delta_k(0, d, gamma) == pytest.approx(-d)

    def test_subcritical_weight(self):
        # gamma=2, d=1 sits below the critical exponent 3: b = 0
        assert criteria.decay_weight_b(2.0, 1) == pytest.approx(0.0)
        assert criteria.delta_k(2, 1, 2.0) == pytest.approx(0.5)

    def test_vacuum_with_exact_reference_is_zero(self):
        # rho = 0 and u equal to the reference flow: U vanishes identically
        from eulerlab.sampling import AnalyticSampler

        g = Grid.centered(2.0, 64, dim=1, periodic=False)
        samp = AnalyticSampler(lambda p: p.copy(),
                               lambda p: np.ones((p.shape[0], 1, 1)), dim=1)
        traj = euler.Trajectory(grid=g, gamma=2.0, rho_bar=0.0, threshold=np.inf)
        x = g.centers()
        for t in (0.0, 0.5, 1.0):
            rho = constant_scalar(g, 0.0)
            u = VectorField(g, x / (1.0 + t))
            traj.times.append(t)
            traj.states.append(FluidState(rho, u, 2.0))
        we = criteria.weighted_energy(traj, samp, m=2)
        assert np.max(we.gamma_total) < 1e-12

    def test_blowup_trajectory_rejected(self):
        g = Grid.centered(2.0, 16, dim=1)
        traj = euler.Trajectory(grid=g, gamma=2.0, rho_bar=0.0, threshold=1.0)
        traj.t_detect = 0.5
        with pytest.raises(ValueError):
            criteria.weighted_energy(traj, None, m=2)


class TestReportVerdicts:
    def test_breakdown_pulse_verdict(self):
        g = Grid.centered(8.0, 512, dim=1, periodic=True)
        rho, u, R = initial_data.sideris_pulse(g, rho_bar=1.0, rho_amp=0.5,
                                               r0=1.0, margin=1.5, gamma=2.0)
        rep = criteria.evaluate_criteria(rho, u, 2.0, rho_bar=1.0, R=R)
        assert rep.verdict == "blowup_sideris"
        assert rep.sideris["holds"] and rep.support_ok

    def test_compressive_smooth_small_density_verdict(self):
        g = Grid.centered(4.0, 1024, dim=1, periodic=False)
        rho, u = initial_data.compressive_1d(g, rho_amp=1e-6, rho_width=0.5)
        rep = criteria.evaluate_criteria(rho, u, 2.0, rho_bar=0.0, R=3.5)
        assert rep.verdict == "blowup_thm25"
        assert rep.nd["found"] and rep.hm_smallness["holds"]
        assert rep.nd["lambda_max"] == pytest.approx(1.0, abs=1e-9)

    def test_expansive_verdict(self):
        g = Grid.centered(32.0, 2048, dim=1, periodic=False)
        rho, u = initial_data.expansive_linear(g, rho_amp=1e-3, rho_width=0.3,
                                               rho_floor=1e-12)
        rep = criteria.evaluate_criteria(rho, u, 2.0, rho_bar=0.0, R=31.0,
                                         alpha=0.5)
        assert rep.grassin["pi_hm"] < 0.1
        assert rep.verdict == "global_prop27"

    def test_constant_state_undetermined(self):
        g = Grid.centered(4.0, 128, dim=1, periodic=True)
        rho, u = constant_data(g, 1.0)
        rep = criteria.evaluate_criteria(rho, u, 2.0, rho_bar=1.0, R=1.0,
                                         pi_smallness_threshold=0.1)
        assert rep.verdict == "undetermined"

    def test_verdict_consistency_invariant(self):
        # breakdown-by-integral verdict only ever comes with both checks true
        cases = []
        g = Grid.centered(8.0, 256, dim=1, periodic=True)
        rho, u, R = initial_data.sideris_pulse(g, rho_bar=1.0, rho_amp=0.5,
                                               r0=1.0, margin=1.2, gamma=2.0)
        cases.append(criteria.evaluate_criteria(rho, u, 2.0, 1.0, R))
        rho2, u2 = constant_data(g, 1.0)
        cases.append(criteria.evaluate_criteria(rho2, u2, 2.0, 1.0, 1.0))
        for rep in cases:
            if rep.verdict == "blowup_sideris":
                assert rep.sideris["holds"] and rep.support_ok
            if rep.verdict == "blowup_thm25":
                assert rep.nd["found"] and rep.hm_smallness["holds"]

    def test_report_json_round_trip(self):
        import json

        g = Grid.centered(4.0, 128, dim=1, periodic=True)
        rho, u = constant_data(g, 1.0)
        rep = criteria.evaluate_criteria(rho, u, 2.0, rho_bar=1.0, R=1.0)
        payload = json.loads(rep.to_json())
        for key in ("sideris", "support_ok", "nd", "hm_smallness", "grassin",
                    "verdict", "params"):
            assert key in payload
