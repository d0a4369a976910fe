"""Vertical bound state and WKB extraction lifetime."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levqsim.core import CONSTANTS
from levqsim.vertical import (
    VerticalPotential,
    ground_state_1d,
    lifetime_sweep,
    neon_lambda,
    stark_eps1,
    u_perp,
    wkb_lifetime,
)

POT = VerticalPotential()  # neon defaults: Lambda from eps = 1.244 eps0, b = 2.3 A


def hydrogenic_energy(lam):
    A = lam * CONSTANTS.e**2 / (16 * math.pi * CONSTANTS.eps0)
    return -CONSTANTS.m_e * A**2 / (2 * CONSTANTS.hbar**2) / CONSTANTS.e  # eV


def hydrogenic_mean_height(lam):
    A = lam * CONSTANTS.e**2 / (16 * math.pi * CONSTANTS.eps0)
    return 1.5 * CONSTANTS.hbar**2 / (CONSTANTS.m_e * A)


class TestPotential:
    def test_neon_lambda(self):
        assert neon_lambda() == pytest.approx(0.244 / 2.244, rel=1e-12)

    def test_pure_image_far_from_truncation(self):
        z = 5e-9
        assert u_perp(POT, z) == pytest.approx(-POT.A_eV / z, rel=1e-12)

    def test_continuity_at_truncation(self):
        lo = u_perp(POT, POT.b * (1 - 1e-12))
        hi = u_perp(POT, POT.b * (1 + 1e-12))
        assert lo == pytest.approx(hi, abs=1e-10)

    def test_plateau_below_truncation(self):
        tilted = POT.with_field(0.0)
        assert u_perp(tilted, POT.b / 4) == pytest.approx(
            u_perp(tilted, POT.b), rel=1e-12
        )

    def test_barrier_exists_at_published_field(self):
        pot = POT.with_field(0.35e6)
        z = np.linspace(1e-10, 6e-8, 20000)
        u = u_perp(pot, z)
        k = int(np.argmax(u))
        assert 0 < k < z.size - 1  # interior maximum: a barrier top

    def test_domain_error(self):
        with pytest.raises(ValueError):
            u_perp(POT, 0.0)

    @settings(max_examples=30, derandomize=True, deadline=None)
    @given(st.floats(min_value=1e-11, max_value=1e-7))
    def test_tilt_lowers_potential_everywhere(self, z):
        assert u_perp(POT.with_field(3e5), z) < u_perp(POT, z)


class TestGroundState:
    def test_hydrogenic_oracle(self):
        pot = VerticalPotential(Lambda=0.1087, b=1e-12)
        gs = ground_state_1d(pot)
        assert gs.energy == pytest.approx(hydrogenic_energy(0.1087), rel=1e-3)
        assert gs.mean_height == pytest.approx(hydrogenic_mean_height(0.1087), rel=1e-3)

    def test_energy_scales_as_lambda_squared(self):
        e1 = ground_state_1d(VerticalPotential(Lambda=0.06, b=1e-12), z_max=2e-7).energy
        e2 = ground_state_1d(VerticalPotential(Lambda=0.12, b=1e-12)).energy
        assert e2 / e1 == pytest.approx(4.0, rel=2e-3)

    def test_normalized_and_bound(self):
        gs = ground_state_1d(POT)
        dz = gs.z_grid[1] - gs.z_grid[0]
        assert np.sum(gs.psi**2) * dz == pytest.approx(1.0, abs=1e-8)
        assert gs.energy < 0
        assert gs.mean_height > 0
        assert gs.eps1 == gs.energy

    def test_stark_shift_sign(self):
        gs = ground_state_1d(POT)
        assert stark_eps1(gs, 3e5) < gs.energy

    def test_tilted_requires_opt_in(self):
        with pytest.raises(ValueError):
            ground_state_1d(POT.with_field(1e5))
        gs = ground_state_1d(POT.with_field(1e5), tilted_ok=True)
        assert gs.energy < 0

    def test_grid_extent_guard(self):
        with pytest.raises(ValueError):
            ground_state_1d(POT, z_max=2e-8)

    def test_second_order_grid_convergence(self):
        pot = VerticalPotential(Lambda=0.1087, b=1e-12)
        exact = hydrogenic_energy(0.1087)
        errs = [
            abs(ground_state_1d(pot, dz=dz).energy - exact) for dz in (4e-11, 2e-11)
        ]
        assert 1.6 < math.log2(errs[0] / errs[1]) < 2.4


class TestWKB:
    def test_turning_points_solve_the_level_equation(self):
        gs = ground_state_1d(POT)
        for E in (0.25e6, 0.4e6):
            eps1 = stark_eps1(gs, E)
            r = wkb_lifetime(POT.with_field(E), eps1)
            assert r.barrier
            assert 0 < r.z1 < r.z2
            assert abs(u_perp(POT.with_field(E), r.z1) - eps1) < 1e-10
            assert abs(u_perp(POT.with_field(E), r.z2) - eps1) < 1e-10

    def test_tau_at_least_period(self):
        gs = ground_state_1d(POT)
        r = wkb_lifetime(POT.with_field(0.3e6), stark_eps1(gs, 0.3e6))
        assert r.tau >= r.T_el
        assert r.action >= 0

    def test_no_barrier_flag_at_top(self):
        pot = POT.with_field(0.4e6)
        zstar = math.sqrt(pot.A_eV / pot.E_field)
        top = u_perp(pot, zstar)
        r = wkb_lifetime(pot, top)
        assert not r.barrier
        assert r.action == 0.0
        assert r.tau == r.T_el

    def test_monotone_decreasing_in_field(self):
        sweep = lifetime_sweep(POT, np.linspace(0.2e6, 0.6e6, 9))
        taus = [r.tau for _, _, r in sweep]
        assert all(a > b for a, b in zip(taus, taus[1:]))

    def test_log_tau_smooth(self):
        sweep = lifetime_sweep(POT, np.linspace(0.25e6, 0.6e6, 36))
        logs = np.log10([r.tau for _, _, r in sweep])
        second = np.abs(np.diff(logs, 2))
        assert np.all(second < 0.05)

    def test_action_insensitive_to_quadrature_tolerance(self):
        # the transformed integrand is smooth; perturbing the interval
        # split must leave the action unchanged to well below 1e-4
        gs = ground_state_1d(POT)
        eps1 = stark_eps1(gs, 0.3e6)
        pot = POT.with_field(0.3e6)
        r = wkb_lifetime(pot, eps1)
        from scipy.integrate import quad

        mid, half = 0.5 * (r.z1 + r.z2), 0.5 * (r.z2 - r.z1)

        def integrand(t):
            z = mid - half * math.cos(t)
            val = max(u_perp(pot, z) - eps1, 0.0) * CONSTANTS.e
            return math.sqrt(2 * CONSTANTS.m_e * val) * half * math.sin(t)

        loose = quad(integrand, 0, math.pi, epsabs=1e-8, epsrel=1e-8)[0]
        tight = quad(integrand, 0, math.pi, epsabs=1e-13, epsrel=1e-13)[0]
        assert abs(loose / tight - 1) < 1e-4
        assert 2 * tight / CONSTANTS.hbar == pytest.approx(r.action, rel=1e-6)

    def test_requires_positive_field(self):
        with pytest.raises(ValueError):
            wkb_lifetime(POT, -0.01)
