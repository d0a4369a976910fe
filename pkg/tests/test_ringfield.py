"""Ring-electrode electrostatics: anchor, symmetry, restriction to the sphere."""

import math

import numpy as np
import pytest

from levqsim.core import CONSTANTS
from levqsim.ringfield import (
    GeometryError,
    RingElectrode,
    lateral_potential,
    pole_field,
    ring_potential,
    solve_Keff,
)

EL = RingElectrode(Rr=1.5e-6, H=1.0e-6, Vr=0.15)
RS = 0.5e-6


class TestAnchor:
    def test_anchor_value(self):
        u = ring_potential(EL, EL.Rr - EL.a_r, EL.H)
        assert u == pytest.approx(-CONSTANTS.e * EL.Vr, rel=1e-14)

    def test_keff_negative_and_vr_independent(self):
        assert EL.K_eff < 0
        el2 = RingElectrode(Rr=EL.Rr, H=EL.H, Vr=0.45, a_r=EL.a_r)
        assert el2.K_eff == EL.K_eff
        assert solve_Keff(EL) == EL.K_eff

    def test_solve_keff_rejects_zero_bias(self):
        el0 = RingElectrode(Rr=EL.Rr, H=EL.H, Vr=0.0)
        with pytest.raises(ValueError):
            solve_Keff(el0)

    def test_bad_geometry(self):
        with pytest.raises(GeometryError):
            RingElectrode(Rr=1e-7, H=0.0, Vr=0.1, a_r=2e-7)

    def test_linearity_in_vr(self):
        el2 = RingElectrode(Rr=EL.Rr, H=EL.H, Vr=2 * EL.Vr, a_r=EL.a_r)
        rho, z = 0.3e-6, 0.4e-6
        assert ring_potential(el2, rho, z) == pytest.approx(
            2 * ring_potential(EL, rho, z), rel=1e-14
        )


class TestRingPotential:
    def test_on_axis_inverse_distance_ratio(self):
        z1, z2 = 0.2e-6, 0.7e-6
        lhs = ring_potential(EL, 0.0, z1) / ring_potential(EL, 0.0, z2)
        rhs = math.hypot(EL.Rr, z2 - EL.H) / math.hypot(EL.Rr, z1 - EL.H)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_mirror_symmetry_about_ring_plane(self):
        rho, d = 0.4e-6, 0.35e-6
        assert ring_potential(EL, rho, EL.H + d) == pytest.approx(
            ring_potential(EL, rho, EL.H - d), rel=1e-13
        )

    def test_attractive_for_positive_bias(self):
        assert ring_potential(EL, 0.0, RS) < 0

    def test_on_ring_raises(self):
        with pytest.raises(GeometryError):
            ring_potential(EL, EL.Rr, EL.H)

    def test_negative_rho_rejected(self):
        with pytest.raises(ValueError):
            ring_potential(EL, -1e-7, 0.0)


class TestPoleField:
    def test_zero_bias(self):
        el0 = RingElectrode(Rr=EL.Rr, H=EL.H, Vr=0.0)
        assert pole_field(el0, RS) == 0.0

    def test_linear_in_vr(self):
        el2 = RingElectrode(Rr=EL.Rr, H=EL.H, Vr=2 * EL.Vr, a_r=EL.a_r)
        assert pole_field(el2, RS) == pytest.approx(2 * pole_field(EL, RS), rel=1e-14)

    def test_positive_when_confining(self):
        assert pole_field(EL, RS) > 0

    def test_matches_finite_difference(self):
        d = 1e-11
        fd = (
            ring_potential(EL, 0.0, RS + d) - ring_potential(EL, 0.0, RS - d)
        ) / (2 * d)
        analytic = -CONSTANTS.e * pole_field(EL, RS)
        assert analytic == pytest.approx(fd, rel=1e-6)


class TestLateralPotential:
    def _argmin_theta(self, H):
        el = RingElectrode(Rr=1.5e-6, H=H, Vr=0.15)
        th = np.linspace(0, math.pi, 6001)
        lat = lateral_potential(el, RS, th)
        return th[int(np.argmin(lat.U))], lat

    def test_high_ring_minimum_at_pole(self):
        t_min, _ = self._argmin_theta(1.0e-6)
        assert t_min == 0.0

    def test_low_ring_minimum_off_pole(self):
        t_min, _ = self._argmin_theta(0.6e-6)
        assert t_min > 0.3

    def test_flat_bottom_near_transition(self):
        def curv(H):
            el = RingElectrode(Rr=1.5e-6, H=H, Vr=0.15)
            d = 2e-3
            th = np.array([0.0, d, 2 * d])
            u = ring_potential(el, RS * np.sin(th), RS * np.cos(th))
            return (u[2] - 2 * u[1] + u[0]) / d**2

        assert abs(curv(0.72e-6)) < 0.1 * abs(curv(1.0e-6))

    def test_no_spurious_mirror_symmetry(self):
        _, lat = self._argmin_theta(1.0e-6)
        assert abs(lat.U[100] - lat.U[-101]) > 0

    def test_minimum_declines_continuously_with_H(self):
        mins = [self._argmin_theta(H * 1e-6)[0] for H in np.linspace(1.0, 0.6, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(mins, mins[1:]))

    def test_off_pole_argmin_tracks_closest_approach(self):
        # the potential minimum approaches the point of closest approach to
        # the ring wire as the ring nears the sphere; at micron-scale gaps
        # the two can differ by ~0.2 rad, so test in the near-ring limit
        el = RingElectrode(Rr=0.56e-6, H=0.1e-6, Vr=0.15, a_r=1e-8)
        th = np.linspace(0, math.pi, 12001)
        lat = lateral_potential(el, RS, th)
        t_min = th[int(np.argmin(lat.U))]
        t_close = math.atan2(el.Rr, el.H)
        assert abs(t_min - t_close) < 0.01

    def test_intersecting_sphere_rejected(self):
        el = RingElectrode(Rr=0.3e-6, H=0.2e-6, Vr=0.15, a_r=1e-8)
        with pytest.raises(GeometryError):
            lateral_potential(el, RS, np.linspace(0, math.pi, 101))

    def test_finite_everywhere(self):
        _, lat = self._argmin_theta(0.72e-6)
        assert np.all(np.isfinite(lat.U))
