"""Dipole matrix element, coupling strength, and exchange coupling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levqsim.core import CONSTANTS, theta_cell_weights
from levqsim.coupling import (
    ResonatorSpec,
    coupling_g,
    dipole_matrix_element,
    exchange_J,
)
from levqsim.eigensolver import AngularEigenstate, make_theta_grid


def _state(psi, m, n=0, tag="tag", theta=None):
    return AngularEigenstate(
        n=n, m=m, psi=psi, theta=theta, energy=0.0,
        converged=True, iterations=1, fingerprint=tag,
    )


def harmonic_pair(beta, theta, dtheta):
    """2D-oscillator ground and m=1 states written in the polar angle.

    beta = m_e * omega * Rs^2 / hbar (dimensionless inverse width^2).
    """
    wq = theta_cell_weights(theta, dtheta)
    g = np.exp(-beta * theta**2 / 2.0)
    e = theta * np.exp(-beta * theta**2 / 2.0)
    g /= math.sqrt(np.sum(wq * g * g))
    e /= math.sqrt(np.sum(wq * e * e))
    return g, e


class TestDipoleElement:
    def setup_method(self):
        self.theta, self.dtheta = make_theta_grid(2e-3)

    def test_harmonic_oracle(self):
        Rs = 0.5e-6
        omega = 1e11
        beta = CONSTANTS.m_e * omega * Rs**2 / CONSTANTS.hbar
        g, e = harmonic_pair(beta, self.theta, self.dtheta)
        d = dipole_matrix_element(
            _state(g, 0, theta=self.theta), _state(e, 1, theta=self.theta), Rs
        )
        oracle = CONSTANTS.e * math.sqrt(CONSTANTS.hbar / (2 * CONSTANTS.m_e * omega))
        assert d == pytest.approx(oracle, rel=5e-3)

    def test_selection_rule_same_m(self):
        g, e = harmonic_pair(1e4, self.theta, self.dtheta)
        assert dipole_matrix_element(
            _state(g, 0, theta=self.theta), _state(e, 0, theta=self.theta), 1e-6
        ) == 0.0

    def test_selection_rule_delta_m_2(self):
        g, e = harmonic_pair(1e4, self.theta, self.dtheta)
        assert dipole_matrix_element(
            _state(g, 0, theta=self.theta), _state(e, 2, theta=self.theta), 1e-6
        ) == 0.0

    def test_phase_invariance(self):
        g, e = harmonic_pair(1e4, self.theta, self.dtheta)
        d1 = dipole_matrix_element(
            _state(g, 0, theta=self.theta), _state(e, 1, theta=self.theta), 1e-6
        )
        d2 = dipole_matrix_element(
            _state(-g, 0, theta=self.theta), _state(e, 1, theta=self.theta), 1e-6
        )
        assert d1 == d2 >= 0

    def test_fingerprint_mismatch(self):
        g, e = harmonic_pair(1e4, self.theta, self.dtheta)
        with pytest.raises(ValueError):
            dipole_matrix_element(
                _state(g, 0, tag="a", theta=self.theta),
                _state(e, 1, tag="b", theta=self.theta),
                1e-6,
            )


class TestCouplingG:
    SPEC = ResonatorSpec.from_frequency(5e9, 100.0, 2e5)

    def test_vzpf_derived(self):
        expect = 2 * math.pi * 5e9 * math.sqrt(CONSTANTS.hbar * 100.0 / 2)
        assert self.SPEC.V_zpf == pytest.approx(expect, rel=1e-14)
        assert self.SPEC.f_r == pytest.approx(5e9, rel=1e-14)

    def test_impedance_scaling_is_sqrt(self):
        d = 5e-27
        g_lo = coupling_g(d, ResonatorSpec.from_frequency(5e9, 100.0, 2e5))
        g_hi = coupling_g(d, ResonatorSpec.from_frequency(5e9, 2500.0, 2e5))
        assert g_hi / g_lo == pytest.approx(5.0, rel=1e-14)

    def test_linear_in_EV_and_element(self):
        d = 5e-27
        base = coupling_g(d, self.SPEC)
        assert coupling_g(2 * d, self.SPEC) == pytest.approx(2 * base, rel=1e-14)
        doubled = ResonatorSpec.from_frequency(5e9, 100.0, 4e5)
        assert coupling_g(d, doubled) == pytest.approx(2 * base, rel=1e-14)

    def test_zero_EV_gives_zero(self):
        assert coupling_g(5e-27, ResonatorSpec.from_frequency(5e9, 100.0, 0.0)) == 0.0

    def test_proportional_to_frequency(self):
        d = 5e-27
        g1 = coupling_g(d, ResonatorSpec.from_frequency(5e9, 100.0, 2e5))
        g2 = coupling_g(d, ResonatorSpec.from_frequency(10e9, 100.0, 2e5))
        assert g2 / g1 == pytest.approx(2.0, rel=1e-14)

    def test_sqrt2_convention_flag(self):
        d = 5e-27
        assert coupling_g(d, self.SPEC, include_sqrt2=True) == pytest.approx(
            coupling_g(d, self.SPEC) / math.sqrt(2), rel=1e-14
        )

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            ResonatorSpec.from_frequency(5e9, -1.0, 2e5)
        with pytest.raises(ValueError):
            ResonatorSpec.from_frequency(5e9, 100.0, -2e5)


class TestExchange:
    def test_published_values(self):
        assert exchange_J(30e6, 30e6, 150e6).J_over_2pi == pytest.approx(6e6, rel=1e-12)
        assert exchange_J(10e6, 10e6, 50e6).J_over_2pi == pytest.approx(2e6, rel=1e-12)

    def test_decoupling_limit(self):
        assert exchange_J(30e6, 30e6, 1e24).J_over_2pi == pytest.approx(0.0, abs=1e-8)

    def test_zero_detuning_rejected(self):
        with pytest.raises(ValueError):
            exchange_J(30e6, 30e6, 0.0)

    def test_dispersive_flag(self):
        assert exchange_J(10e6, 10e6, 100e6).dispersive
        assert not exchange_J(30e6, 30e6, 150e6).dispersive

    @settings(max_examples=40, derandomize=True, deadline=None)
    @given(
        st.floats(min_value=1e5, max_value=1e8),
        st.floats(min_value=1e5, max_value=1e8),
        st.floats(min_value=1e6, max_value=1e9),
    )
    def test_symmetry_and_scaling(self, g1, g2, delta):
        a = exchange_J(g1, g2, delta)
        b = exchange_J(g2, g1, delta)
        assert a.J_over_2pi == b.J_over_2pi
        assert exchange_J(g1, g2, -delta).J_over_2pi == -a.J_over_2pi
