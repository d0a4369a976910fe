"""Electrostatics of the biased ring electrode.

The resonator's DC-biased open end is modeled as a thin charged ring of
radius Rr at height H above the particle center. The electron potential
energy is a closed form in the complete elliptic integral K, normalized by
an anchor condition at the pin edge: U(rho = Rr - a_r, z = H) = -e*Vr.
The anchor fixes the overall scale *and* the attractive sign convention,
so K_eff < 0 for a positive bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CONSTANTS, elliptic_K

__all__ = [
    "GeometryError",
    "RingElectrode",
    "LateralPotential",
    "ring_potential",
    "solve_Keff",
    "lateral_potential",
    "pole_field",
]


class GeometryError(ValueError):
    """Electrode/sphere configuration is degenerate or intersecting."""


@dataclass(frozen=True)
class RingElectrode:
    """Biased ring: radius Rr, height H above sphere center, bias Vr.

    a_r is the effective radial half-width of the resonator center pin,
    used only by the normalization anchor. K_eff is derived from the
    geometry in __post_init__ and never mutated afterwards.
    """

    Rr: float            # m
    H: float             # m
    Vr: float            # V
    a_r: float = 1e-7    # m
    K_eff: float = field(init=False)

    def __post_init__(self):
        if not (self.Rr > self.a_r > 0.0):
            raise GeometryError("require Rr > a_r > 0")
        k2_edge = 4.0 * self.Rr * (self.Rr - self.a_r) / (2.0 * self.Rr - self.a_r) ** 2
        k_eff = -2.0 * elliptic_K(k2_edge) / (2.0 * self.Rr - self.a_r)
        object.__setattr__(self, "K_eff", k_eff)


@dataclass(frozen=True)
class LateralPotential:
    """Electron potential energy restricted to the sphere surface."""

    theta_grid: np.ndarray  # rad, uniform
    U: np.ndarray           # J
    Rs: float               # m


def solve_Keff(electrode: RingElectrode) -> float:
    """Normalization factor enforcing U(Rr - a_r, H) = -e*Vr.

    K_eff = -2 K(k_edge) / (2 Rr - a_r); negative for the attractive
    convention. Independent of Vr. RingElectrode computes this at
    construction; this function re-derives it for the stated contract.
    """
    if electrode.Vr == 0.0:
        raise ValueError("anchor is undefined at Vr = 0")
    return electrode.K_eff


def ring_potential(electrode: RingElectrode, rho, z):
    """Electron potential energy U(rho, z) in J.

    U = 2 e Vr K(k) / (K_eff sqrt((Rr+rho)^2 + (z-H)^2)), with elliptic
    modulus k^2 = 4 Rr rho / ((Rr+rho)^2 + (z-H)^2). Attractive (negative)
    for Vr > 0. Raises GeometryError on the ring circle itself.
    """
    rho_a = np.asarray(rho, dtype=float)
    z_a = np.asarray(z, dtype=float)
    if np.any(rho_a < 0.0):
        raise ValueError("rho must be >= 0")
    d2 = (electrode.Rr - rho_a) ** 2 + (z_a - electrode.H) ** 2
    if np.any(d2 == 0.0):
        raise GeometryError("field point lies on the ring electrode")
    den2 = (electrode.Rr + rho_a) ** 2 + (z_a - electrode.H) ** 2
    k2 = 4.0 * electrode.Rr * rho_a / den2
    out = (
        2.0
        * CONSTANTS.e
        * electrode.Vr
        * elliptic_K(k2)
        / (electrode.K_eff * np.sqrt(den2))
    )
    return float(out) if (np.isscalar(rho) and np.isscalar(z)) else out


def _on_axis_potential(electrode: RingElectrode, z):
    # k = 0 on the axis, so K(k) = pi/2 exactly; avoids the modulus entirely.
    s = np.sqrt(electrode.Rr**2 + (np.asarray(z, dtype=float) - electrode.H) ** 2)
    return math.pi * CONSTANTS.e * electrode.Vr / (electrode.K_eff * s)


def lateral_potential(electrode: RingElectrode, Rs: float, theta_grid) -> LateralPotential:
    """Angular confinement potential U(theta) on the sphere of radius Rs."""
    if Rs <= 0.0:
        raise GeometryError("Rs must be positive")
    if math.hypot(electrode.Rr, electrode.H) <= Rs:
        raise GeometryError("sphere intersects the ring electrode")
    th = np.asarray(theta_grid, dtype=float)
    U = ring_potential(electrode, Rs * np.sin(th), Rs * np.cos(th))
    return LateralPotential(theta_grid=th, U=np.asarray(U, dtype=float), Rs=Rs)


def pole_field(electrode: RingElectrode, Rs: float) -> float:
    """Extraction/confinement field magnitude E_r at the north pole, V/m.

    E_r = -(1/e) dU(0,z)/dz at z = Rs, evaluated from the on-axis closed
    form. Positive when the electron at the pole is attracted toward the
    ring (the confining case for Vr > 0, H > Rs).
    """
    if math.hypot(electrode.Rr, electrode.H) <= Rs:
        raise GeometryError("north pole inside ring region")
    s2 = electrode.Rr**2 + (Rs - electrode.H) ** 2
    dU_dz = (
        -math.pi
        * CONSTANTS.e
        * electrode.Vr
        * (Rs - electrode.H)
        / (electrode.K_eff * s2**1.5)
    )
    return -dU_dz / CONSTANTS.e
