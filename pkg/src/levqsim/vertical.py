"""Surface-normal electron physics: image binding, Stark shift, WKB escape.

Energies in this module are expressed in eV (z in meters, fields in V/m),
which keeps the Stark shift numerically equal to -E_field * <z>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .core import CONSTANTS

__all__ = [
    "VerticalPotential",
    "BoundState1D",
    "WKBResult",
    "neon_lambda",
    "u_perp",
    "ground_state_1d",
    "stark_eps1",
    "wkb_lifetime",
    "lifetime_sweep",
]

_DEFAULT_B = 2.3e-10  # truncation height, m


def neon_lambda(eps_rel: float = 1.244) -> float:
    """Dielectric factor (eps - eps0)/(eps + eps0) for relative permittivity."""
    return (eps_rel - 1.0) / (eps_rel + 1.0)


@dataclass(frozen=True)
class VerticalPotential:
    """Truncated image potential plus extraction-field tilt."""

    Lambda: float = neon_lambda()
    b: float = _DEFAULT_B      # m
    E_field: float = 0.0       # V/m, >= 0 pulls the electron off the surface

    def __post_init__(self):
        if not (0.0 < self.Lambda < 1.0):
            raise ValueError("Lambda must lie in (0, 1)")
        if self.b <= 0.0:
            raise ValueError("truncation height b must be positive")
        if self.E_field < 0.0:
            raise ValueError("E_field must be >= 0")

    @property
    def A_eV(self) -> float:
        """Image-potential strength Lambda*e/(16 pi eps0), in eV*m."""
        return self.Lambda * CONSTANTS.e / (16.0 * math.pi * CONSTANTS.eps0)

    def with_field(self, E_field: float) -> "VerticalPotential":
        return replace(self, E_field=E_field)


def u_perp(potential: VerticalPotential, z):
    """Vertical potential energy in eV; the image term is frozen below z = b."""
    z_a = np.asarray(z, dtype=float)
    if np.any(z_a <= 0.0):
        raise ValueError("u_perp is defined for z > 0 only")
    out = -potential.A_eV / np.maximum(z_a, potential.b) - potential.E_field * z_a
    return float(out) if np.isscalar(z) else out


@dataclass(frozen=True)
class BoundState1D:
    """Lowest bound level of the vertical potential."""

    energy: float          # eV, unperturbed level
    mean_height: float     # m
    psi: np.ndarray        # normalized so sum(psi^2) dz = 1
    z_grid: np.ndarray     # m
    eps1: float            # eV, Stark-shifted level (== energy at zero field)


def ground_state_1d(
    potential: VerticalPotential,
    z_max: float = 6e-8,
    dz: float = 1e-11,
    tilted_ok: bool = False,
) -> BoundState1D:
    """Ground state of the vertical potential with a hard wall at z = 0.

    Finite-difference diagonalization on a uniform grid (tridiagonal
    eigenproblem). The intended use is E_field = 0, with the Stark shift
    applied afterwards via stark_eps1; diagonalizing the tilted potential
    directly is a sensitivity study and must be enabled with tilted_ok
    (the box then truncates the downhill side of the barrier).
    """
    if potential.E_field != 0.0 and not tilted_ok:
        raise ValueError(
            "ground_state_1d expects E_field = 0; pass tilted_ok=True to "
            "diagonalize the tilted potential as a sensitivity check"
        )
    if z_max < 5e-8:
        raise ValueError("grid must extend to at least 50 nm")
    n = int(round(z_max / dz))
    z = dz * np.arange(1, n + 1)
    t = CONSTANTS.hbar**2 / (2.0 * CONSTANTS.m_e * dz**2) / CONSTANTS.e  # eV
    diag = 2.0 * t + u_perp(potential, z)
    off = np.full(n - 1, -t)
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    energy = float(w[0])
    if energy >= 0.0:
        raise ValueError("no bound state found on this grid")
    psi = v[:, 0] / math.sqrt(np.sum(v[:, 0] ** 2) * dz)
    mean = float(np.sum(z * psi**2) * dz)
    return BoundState1D(energy=energy, mean_height=mean, psi=psi, z_grid=z, eps1=energy)


def stark_eps1(state: BoundState1D, E_field: float) -> float:
    """First-order Stark-shifted level: energy - E_field * <z> (eV)."""
    return state.energy - E_field * state.mean_height


@dataclass(frozen=True)
class WKBResult:
    """Turning points, barrier action, classical period, and lifetime."""

    z1: float        # m
    z2: float        # m
    action: float    # dimensionless WKB exponent argument
    T_el: float      # s
    tau: float       # s
    barrier: bool    # False when eps1 is at/above the barrier top


def _barrier_top(potential: VerticalPotential) -> float:
    # d/dz (-A/z - E z) = 0  =>  z* = sqrt(A/E)
    return math.sqrt(potential.A_eV / potential.E_field)


def wkb_lifetime(potential: VerticalPotential, eps1: float) -> WKBResult:
    """Tunneling lifetime tau = T_el * exp[(2/hbar) Int sqrt(2 m (U - eps1)) dz].

    Turning points come from bracketed root finding; both integrals use
    substitutions that remove the inverse-square-root endpoint behavior
    before adaptive quadrature.
    """
    if potential.E_field <= 0.0:
        raise ValueError("wkb_lifetime requires a positive extraction field")
    zstar = _barrier_top(potential)
    u_top = u_perp(potential, zstar)
    m_e, hbar, e = CONSTANTS.m_e, CONSTANTS.hbar, CONSTANTS.e

    def f(z):
        return u_perp(potential, z) - eps1

    if eps1 >= u_top:
        # degenerate case: the period diverges logarithmically as the level
        # reaches the top, so evaluate it just below (1 ueV) for a finite
        # flagged result
        lvl = u_top - 1e-6
        z1_eff = brentq(
            lambda z: u_perp(potential, z) - lvl, 1e-13, zstar, xtol=1e-18, rtol=8.9e-16
        )
        tel = _classical_period(potential, lvl, z1_eff)
        return WKBResult(z1=zstar, z2=zstar, action=0.0, T_el=tel, tau=tel, barrier=False)

    z1 = brentq(f, 1e-13, zstar, xtol=1e-18, rtol=8.9e-16)
    z_hi = zstar
    while f(2.0 * z_hi) > 0.0:
        z_hi *= 2.0
    z2 = brentq(f, zstar, 2.0 * z_hi, xtol=1e-18, rtol=8.9e-16)

    # Barrier integral: substitute z = mid - half*cos(t). U - eps1 has
    # simple zeros at both endpoints, so the transformed integrand is
    # smooth and quad converges to near machine precision.
    mid, half = 0.5 * (z1 + z2), 0.5 * (z2 - z1)

    def act_integrand(t):
        z = mid - half * math.cos(t)
        val = max(u_perp(potential, z) - eps1, 0.0) * e
        return math.sqrt(2.0 * m_e * val) * half * math.sin(t)

    integral, _ = quad(act_integrand, 0.0, math.pi, limit=200)
    action = 2.0 * integral / hbar
    tel = _classical_period(potential, eps1, z1)
    tau = tel * math.exp(action) if action < 700.0 else math.inf
    return WKBResult(z1=z1, z2=z2, action=action, T_el=tel, tau=tau, barrier=True)


def _classical_period(potential: VerticalPotential, eps1: float, z1: float) -> float:
    """T_el = 2 Int_0^z1 sqrt(m / (2 (eps1 - U))) dz.

    Split at the truncation height b: below it the potential is linear and
    the integral closed-form; above it the z = z1 - u^2 substitution
    absorbs the turning-point singularity.
    """
    m_e, e, E = CONSTANTS.m_e, CONSTANTS.e, potential.E_field
    b = min(potential.b, z1)
    c_eV = eps1 + potential.A_eV / potential.b  # eps1 - U(0), > 0 for a bound level
    if c_eV <= 0.0:
        raise ValueError("eps1 lies below the truncated potential floor")
    if E > 0.0:
        part1 = (
            math.sqrt(m_e / 2.0)
            * 2.0
            * (math.sqrt((c_eV + E * b) * e) - math.sqrt(c_eV * e))
            / (E * e)
        )
    else:
        part1 = math.sqrt(m_e / 2.0) * b / math.sqrt(c_eV * e)

    # eps1 - U ~ U'(z1) (z1 - z) near the turning point, so with z = z1 - u^2
    # the integrand tends to the finite limit 2 / sqrt(U'(z1))
    dU_z1 = (potential.A_eV / z1**2 - E) * e if z1 > potential.b else E * e

    def integrand(u):
        z = z1 - u * u
        val = (eps1 - u_perp(potential, z)) * e
        if val <= 0.0:
            return 2.0 / math.sqrt(dU_z1) if dU_z1 > 0.0 else 0.0
        return 2.0 * u / math.sqrt(val)

    part2 = 0.0
    if z1 > b:
        integral, _ = quad(integrand, 0.0, math.sqrt(z1 - b), limit=200)
        part2 = math.sqrt(m_e / 2.0) * integral
    return 2.0 * (part1 + part2)


def lifetime_sweep(
    potential: VerticalPotential,
    E_fields,
    state: BoundState1D | None = None,
    z_max: float = 6e-8,
    dz: float = 1e-11,
):
    """WKB lifetimes over extraction-field values.

    Solves the zero-field ground state once and applies the first-order
    Stark shift per field point. Returns a list of (E_field, eps1,
    WKBResult) tuples in the order given.
    """
    if state is None:
        state = ground_state_1d(potential.with_field(0.0), z_max=z_max, dz=dz)
    out = []
    for E in E_fields:
        eps1 = stark_eps1(state, E)
        res = wkb_lifetime(potential.with_field(E), eps1)
        out.append((float(E), eps1, res))
    return out
