"""Qubit-resonator coupling: dipole matrix element, g, and two-qubit J.

All frequencies exposed here are /2pi quantities in Hz; angular
frequencies appear only inside formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS, theta_cell_weights
from .eigensolver import AngularEigenstate

__all__ = [
    "ResonatorSpec",
    "CouplingReport",
    "ExchangeResult",
    "dipole_matrix_element",
    "coupling_g",
    "exchange_J",
]


@dataclass(frozen=True)
class ResonatorSpec:
    """Resonator mode: angular frequency, differential impedance, drive factor.

    EV is the in-plane field at the qubit per volt of differential
    excitation (from the electrostatic solve). V_zpf is derived, never
    stored.
    """

    omega_r: float   # rad/s
    Z_diff: float    # Ohm
    EV: float        # 1/m

    def __post_init__(self):
        if self.Z_diff <= 0.0:
            raise ValueError("Z_diff must be positive")
        if self.EV < 0.0:
            raise ValueError("EV must be >= 0")

    @property
    def f_r(self) -> float:
        """Resonance frequency omega_r / 2pi, Hz."""
        return self.omega_r / (2.0 * math.pi)

    @property
    def V_zpf(self) -> float:
        """Zero-point voltage omega_r sqrt(hbar Z_diff / 2), V."""
        return self.omega_r * math.sqrt(CONSTANTS.hbar * self.Z_diff / 2.0)

    @classmethod
    def from_frequency(cls, f_r: float, Z_diff: float, EV: float) -> "ResonatorSpec":
        return cls(omega_r=2.0 * math.pi * f_r, Z_diff=Z_diff, EV=EV)


@dataclass(frozen=True)
class CouplingReport:
    """Dipole element and coupling strength, with the inputs echoed."""

    dipole_element: float  # C m
    g_over_2pi: float      # Hz
    inputs: dict


def dipole_matrix_element(
    ground: AngularEigenstate, excited: AngularEigenstate, Rs: float
) -> float:
    """|<e| d_{+1} |g>| in C m for states on the sphere of radius Rs.

    d_{+1} = -e Rs sqrt(4 pi / 3) Y_{1,+1}; with the azimuthal integral
    resolved by the Delta m = +1 selection rule this reduces to
    (e Rs / sqrt 2) |<psi_e| sin(theta) |psi_g>|. Returns 0 for any other
    Delta m. Rejects states solved on different systems.
    """
    if ground.fingerprint != excited.fingerprint:
        raise ValueError("states come from different sphere systems")
    if excited.m - ground.m != 1:
        return 0.0
    theta = ground.theta
    dtheta = theta[1] - theta[0]
    wq = theta_cell_weights(theta, dtheta)
    overlap = float(np.sum(wq * excited.psi * np.sin(theta) * ground.psi))
    return CONSTANTS.e * Rs / math.sqrt(2.0) * abs(overlap)


def coupling_g(
    element: float, spec: ResonatorSpec, include_sqrt2: bool = False
) -> float:
    """Jaynes-Cummings coupling g/2pi in Hz.

    g/2pi = (omega_r / 2 pi hbar) sqrt(hbar Z_diff / 2) EV |<e|d_{+1}|g>|,
    implemented as printed. include_sqrt2 divides by sqrt(2), the
    convention implied by E_{+-1} = -+ E_x / sqrt(2) in the derivation.
    """
    g = (
        spec.omega_r
        / (2.0 * math.pi * CONSTANTS.hbar)
        * math.sqrt(CONSTANTS.hbar * spec.Z_diff / 2.0)
        * spec.EV
        * abs(element)
    )
    if include_sqrt2:
        g /= math.sqrt(2.0)
    return g


@dataclass(frozen=True)
class ExchangeResult:
    """Resonator-mediated two-qubit exchange."""

    J_over_2pi: float   # Hz
    dispersive: bool    # |delta| >= 10 * max(g1, g2)


def exchange_J(g1: float, g2: float, delta: float) -> ExchangeResult:
    """Virtual-photon exchange J = g1 g2 / delta (all /2pi quantities, Hz).

    delta is the qubit-resonator detuning; zero detuning is the resonant
    regime, outside this model.
    """
    if delta == 0.0:
        raise ValueError("exchange_J is undefined at zero detuning")
    return ExchangeResult(
        J_over_2pi=g1 * g2 / delta,
        dispersive=abs(delta) >= 10.0 * max(abs(g1), abs(g2)),
    )
