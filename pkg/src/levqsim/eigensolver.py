"""Lateral electron eigenstates on the biased sphere.

Two-stage solve, per azimuthal quantum number m:

1. Trial states from a simplified Hamiltonian whose potential is the
   near-pole form U(0) + e*Er*Rs*(1 - cos(theta)). Its matrix in the
   normalized spherical-harmonics basis is banded (kinetic diagonal,
   cos(theta) tridiagonal, sin^2(theta) pentadiagonal) and is
   diagonalized directly.
2. Refinement by forward-Euler imaginary-time evolution under the full
   Hamiltonian with the exact lateral potential, on a cell-centered
   theta grid, renormalizing every step and Gram-Schmidt projecting each
   state against the lower states of the same m.

The theta grid is half-offset (theta_j = (j + 1/2) dtheta) and the
Laplacian is assembled in flux form, which keeps the discrete operator
self-adjoint and needs no explicit pole boundary condition.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eig_banded

from .core import CONSTANTS, theta_cell_weights, ylm_cos_coupling, ylm_sin2_coupling
from .ringfield import LateralPotential, RingElectrode, lateral_potential, pole_field, ring_potential

__all__ = [
    "DTHETA_DEFAULT",
    "NMAX_DEFAULT",
    "RefineParams",
    "SphereSystem",
    "TrialBasis",
    "AngularEigenstate",
    "make_theta_grid",
    "build_simplified_H",
    "trial_states",
    "refine_imaginary_time",
    "spectrum",
]

DTHETA_DEFAULT = 3.1e-3   # rad
NMAX_DEFAULT = 800
DTAU_DEFAULT = 1e-6       # dimensionless imaginary-time step


def make_theta_grid(dtheta: float = DTHETA_DEFAULT):
    """Cell-centered grid tiling [0, pi]: theta_j = (j + 1/2) * (pi / n).

    Returns (theta, actual_dtheta); n is rounded so the cells tile [0, pi]
    exactly.
    """
    n = max(8, round(math.pi / dtheta))
    dt = math.pi / n
    return (np.arange(n) + 0.5) * dt, dt


@dataclass(frozen=True)
class RefineParams:
    """Imaginary-time refinement controls."""

    dtau: float = DTAU_DEFAULT
    energy_tol: float = 1e-10   # relative energy change per check block
    max_iters: int = 2_000_000
    check_every: int = 1000
    Nmax: int = NMAX_DEFAULT


@dataclass(frozen=True)
class SphereSystem:
    """Sphere + uniform field + lateral potential; the eigensolver input.

    u_pole is the lateral potential at the north pole and E_pole the
    extraction field there; both feed the simplified (trial) Hamiltonian.
    """

    Rs: float                     # m
    B0: float                     # T, signed
    lateral: LateralPotential
    u_pole: float                 # J
    E_pole: float                 # V/m
    dtheta: float
    fingerprint: str = field(init=False)

    def __post_init__(self):
        if abs(self.lateral.Rs - self.Rs) > 1e-12 * self.Rs:
            raise ValueError("lateral potential belongs to a different sphere")
        hsh = hashlib.sha256()
        hsh.update(np.asarray([self.Rs, self.B0, self.u_pole, self.E_pole]).tobytes())
        hsh.update(np.ascontiguousarray(self.lateral.U).tobytes())
        object.__setattr__(self, "fingerprint", hsh.hexdigest()[:16])

    @property
    def E0_scale(self) -> float:
        """Natural energy hbar^2 / (2 m_e Rs^2), J. Recomputed on access."""
        return CONSTANTS.hbar**2 / (2.0 * CONSTANTS.m_e * self.Rs**2)

    @classmethod
    def from_electrode(
        cls,
        electrode: RingElectrode,
        Rs: float,
        B0: float,
        dtheta: float = DTHETA_DEFAULT,
    ) -> "SphereSystem":
        theta, dt = make_theta_grid(dtheta)
        lat = lateral_potential(electrode, Rs, theta)
        return cls(
            Rs=Rs,
            B0=B0,
            lateral=lat,
            u_pole=ring_potential(electrode, 0.0, Rs),
            E_pole=pole_field(electrode, Rs),
            dtheta=dt,
        )

    @classmethod
    def free(cls, Rs: float, B0: float = 0.0, dtheta: float = DTHETA_DEFAULT) -> "SphereSystem":
        """Unbiased sphere (free rotor when B0 = 0)."""
        theta, dt = make_theta_grid(dtheta)
        lat = LateralPotential(theta_grid=theta, U=np.zeros_like(theta), Rs=Rs)
        return cls(Rs=Rs, B0=B0, lateral=lat, u_pole=0.0, E_pole=0.0, dtheta=dt)

    # dimensionless couplings (units of E0_scale)
    def _zeeman(self) -> float:
        return CONSTANTS.e * self.B0 * self.Rs**2 / CONSTANTS.hbar

    def _diamag(self) -> float:
        zb = self._zeeman()
        return zb * zb / 4.0


@dataclass(frozen=True)
class TrialBasis:
    """Lowest eigenpairs of the simplified Hamiltonian at fixed m."""

    m: int
    Nmax: int
    coefficients: np.ndarray    # (count, Nmax - |m| + 1)
    trial_energies: np.ndarray  # J, ascending
    psi0: np.ndarray            # (count, n_theta) grid synthesis
    fingerprint: str


@dataclass(frozen=True)
class AngularEigenstate:
    """Refined eigenstate psi_nm(theta); azimuthal phase factored out."""

    n: int
    m: int
    psi: np.ndarray       # real samples on the system grid
    theta: np.ndarray
    energy: float         # J
    converged: bool
    iterations: int
    fingerprint: str


def build_simplified_H(system: SphereSystem, m: int, Nmax: int = NMAX_DEFAULT) -> np.ndarray:
    """Simplified-Hamiltonian matrix (J) in the Y_{l,m} basis, l = |m|..Nmax.

    Diagonal: E0*l(l+1) + Zeeman constant + diamagnetic sin^2 diagonal +
    U(0) + e*Er*Rs. Off-diagonal: -e*Er*Rs times the cos(theta) couplings
    (first off-diagonal) and the diamagnetic sin^2 couplings (second).
    """
    bands = _simplified_bands(system, m, Nmax)
    n = bands.shape[1]
    H = np.zeros((n, n))
    H[np.arange(n), np.arange(n)] = bands[0]
    idx = np.arange(n - 1)
    H[idx + 1, idx] = bands[1, :-1]
    H[idx, idx + 1] = bands[1, :-1]
    idx = np.arange(n - 2)
    H[idx + 2, idx] = bands[2, :-2]
    H[idx, idx + 2] = bands[2, :-2]
    return H * system.E0_scale


def _simplified_bands(system: SphereSystem, m: int, Nmax: int) -> np.ndarray:
    """Lower-band representation (dimensionless, units of E0_scale)."""
    ma = abs(m)
    if Nmax < ma:
        raise ValueError("Nmax must be >= |m|")
    ls = np.arange(ma, Nmax + 1)
    n = ls.size
    zb = system._zeeman()
    db = system._diamag()
    er = CONSTANTS.e * system.E_pole * system.Rs / system.E0_scale
    u0 = system.u_pole / system.E0_scale

    a = np.array([ylm_cos_coupling(l, ma) for l in ls])          # a_{l,m}
    s2_diag = np.array([ylm_sin2_coupling(l, l, ma) for l in ls])
    s2_off = -a[:-2] * a[1:-1] if n >= 3 else np.empty(0)        # <l+2|sin^2|l>

    bands = np.zeros((3, n))
    bands[0] = ls * (ls + 1.0) + zb * m + db * s2_diag + u0 + er
    if n >= 2:
        bands[1, : n - 1] = -er * a[:-1]
    if n >= 3:
        bands[2, : n - 2] = db * s2_off
    return bands


def _legendre_rows(theta: np.ndarray, m_abs: int, Nmax: int) -> np.ndarray:
    """Normalized associated-Legendre theta parts, rows l = |m|..Nmax.

    Generated by the same cos(theta) recurrence that defines the matrix
    couplings, so synthesis is exactly consistent with the operator
    algebra. Normalized to Int P^2 sin(theta) dtheta = 1.
    """
    n = Nmax - m_abs + 1
    ct = np.cos(theta)
    P = np.zeros((n, theta.size))
    c0 = 0.5
    for j in range(1, m_abs + 1):
        c0 *= (2.0 * j + 1.0) / (2.0 * j)
    P[0] = math.sqrt(c0) * np.sin(theta) ** m_abs
    if n > 1:
        a_prev = ylm_cos_coupling(m_abs, m_abs)
        P[1] = ct * P[0] / a_prev
        for i in range(1, n - 1):
            a_cur = ylm_cos_coupling(m_abs + i, m_abs)
            P[i + 1] = (ct * P[i] - a_prev * P[i - 1]) / a_cur
            a_prev = a_cur
    return P


def trial_states(
    system: SphereSystem, m: int, count: int, Nmax: int = NMAX_DEFAULT
) -> TrialBasis:
    """Lowest `count` eigenpairs of the simplified Hamiltonian at fixed m."""
    ma = abs(m)
    if count < 1 or count > Nmax - ma + 1:
        raise ValueError("count must lie in [1, Nmax - |m| + 1]")
    bands = _simplified_bands(system, m, Nmax)
    w, v = eig_banded(bands, lower=True, select="i", select_range=(0, count - 1))
    theta = system.lateral.theta_grid
    P = _legendre_rows(theta, ma, Nmax)
    psi0 = v.T @ P
    wq = theta_cell_weights(theta, system.dtheta)
    psi0 /= np.sqrt(np.sum(wq * psi0**2, axis=1))[:, None]
    return TrialBasis(
        m=m,
        Nmax=Nmax,
        coefficients=v.T.copy(),
        trial_energies=w * system.E0_scale,
        psi0=psi0,
        fingerprint=system.fingerprint,
    )


def _grid_operator(system: SphereSystem, m: int):
    """Coefficients of the dimensionless Hamiltonian on the theta grid.

    Returns (vdiag, cE, cW): H psi = vdiag*psi - cE*psi_{j+1} - cW*psi_{j-1}
    with the flux-form Laplacian; sin(0) = sin(pi) = 0 at the cell edges
    closes the stencil at both poles.
    """
    theta = system.lateral.theta_grid
    dt = system.dtheta
    sin_t = np.sin(theta)
    edges = np.sin(np.arange(theta.size + 1) * dt)
    cE = edges[1:] / (sin_t * dt * dt)
    cW = edges[:-1] / (sin_t * dt * dt)
    vdiag = (
        cE
        + cW
        + (m * m) / sin_t**2
        + system._zeeman() * m
        + system._diamag() * sin_t**2
        + system.lateral.U / system.E0_scale
    )
    return vdiag, cE, cW


def _apply_H(S: np.ndarray, vdiag, cE, cW) -> np.ndarray:
    HS = S * vdiag
    HS[..., :-1] -= cE[:-1] * S[..., 1:]
    HS[..., 1:] -= cW[1:] * S[..., :-1]
    return HS


def refine_imaginary_time(
    system: SphereSystem, trial: TrialBasis, params: RefineParams = RefineParams()
) -> list[AngularEigenstate]:
    """Relax trial states under the full Hamiltonian by forward Euler.

    Every step: Euler update for all states of the m block, Gram-Schmidt
    projection of each state on the lower ones, renormalization. Stops
    when each state's energy changes by less than energy_tol (relative)
    per check block; aborts if any energy rises for 10 consecutive steps,
    which signals a time step too large for the grid.
    """
    if trial.fingerprint != system.fingerprint:
        raise ValueError("trial basis was built for a different system")
    theta = system.lateral.theta_grid
    wq = theta_cell_weights(theta, system.dtheta)
    vdiag, cE, cW = _grid_operator(system, trial.m)
    S = trial.psi0.copy()
    K = S.shape[0]
    dtau = params.dtau

    e_step = np.full(K, np.inf)
    e_prev_block = np.full(K, np.inf)
    rise_count = np.zeros(K, dtype=int)
    converged = np.zeros(K, dtype=bool)
    it = 0
    while it < params.max_iters and not converged.all():
        block = min(params.check_every, params.max_iters - it)
        for _ in range(block):
            HS = _apply_H(S, vdiag, cE, cW)
            e_now = np.sum(wq * S * HS, axis=1)
            rising = (e_now - e_step) > 1e-11 * np.maximum(np.abs(e_step), 1.0)
            rise_count = np.where(rising, rise_count + 1, 0)
            if np.any(rise_count >= 10):
                raise RuntimeError(
                    "imaginary-time energy rose for 10 consecutive steps; "
                    "reduce dtau or refine the grid"
                )
            e_step = e_now
            S = S - dtau * HS
            for k in range(K):
                for j in range(k):
                    S[k] -= np.sum(wq * S[j] * S[k]) * S[j]
                S[k] /= math.sqrt(np.sum(wq * S[k] ** 2))
            it += 1
        scale = np.maximum(np.abs(e_step), 1.0)
        converged = np.abs(e_step - e_prev_block) < params.energy_tol * scale
        e_prev_block = e_step.copy()

    energies = e_step * system.E0_scale
    return [
        AngularEigenstate(
            n=k,
            m=trial.m,
            psi=S[k].copy(),
            theta=theta,
            energy=float(energies[k]),
            converged=bool(converged[k]),
            iterations=it,
            fingerprint=system.fingerprint,
        )
        for k in range(K)
    ]


def spectrum(
    system: SphereSystem,
    levels,
    params: RefineParams = RefineParams(),
) -> list[AngularEigenstate]:
    """Refined eigenstates for the requested (n, m) pairs.

    Groups the requests by m, refines each block once, and returns states
    in the order requested.
    """
    wanted = [(int(n), int(m)) for n, m in levels]
    by_m: dict[int, int] = {}
    for n, m in wanted:
        if n < 0:
            raise ValueError("polar quantum number n must be >= 0")
        by_m[m] = max(by_m.get(m, 0), n)
    cache: dict[int, list[AngularEigenstate]] = {}
    for m, n_top in by_m.items():
        trial = trial_states(system, m, n_top + 1, params.Nmax)
        cache[m] = refine_imaginary_time(system, trial, params)
    return [cache[m][n] for n, m in wanted]
