"""Magnetic levitation of diamagnetic microparticles above a current disk.

The disk (inner radius R0, width W, total current I) is modeled as n_loops
concentric zero-thickness loops at radii R_i = R0 + (i - 1/2) W / n_loops,
each carrying I / n_loops. Field components at (x, z) come from the
azimuthal integrals

    Bx = sum_i mu0 I/(4 pi n) Int R_i z cos(phi) / D_i^3 dphi
    Bz = sum_i mu0 I/(4 pi n) Int (R_i^2 - R_i x cos(phi)) / D_i^3 dphi

with D_i^2 = x^2 + z^2 + R_i^2 - 2 x R_i cos(phi), discretized with a
fixed count of uniform phi panels (periodic trapezoid, spectrally
accurate for these smooth integrands).

Energy density for a diamagnet: E = rho g z + |chi| B^2 / (2 mu0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import CONSTANTS, Material

__all__ = [
    "LoopSpec",
    "GridSpec",
    "FieldGrid",
    "EnergyMap",
    "TrapReport",
    "loop_field",
    "energy_density",
    "critical_gradient",
    "find_trap",
    "current_density",
    "thermal_amplitude",
    "trap_scan",
]

PHI_PANELS_DEFAULT = 720


@dataclass(frozen=True)
class LoopSpec:
    """Current-disk geometry: inner radius, radial width, total current."""

    R0: float            # m
    W: float             # m
    I: float             # A
    n_loops: int = 30
    delta: float = 5e-6  # film thickness, m

    def __post_init__(self):
        if self.R0 <= 0 or self.W <= 0 or self.delta <= 0 or self.n_loops < 1:
            raise ValueError("LoopSpec requires R0, W, delta > 0 and n_loops >= 1")

    @property
    def radii(self) -> np.ndarray:
        i = np.arange(1, self.n_loops + 1)
        return self.R0 + (i - 0.5) * self.W / self.n_loops


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, z) grid request; x starts at the axis (x = 0)."""

    dx: float
    x_extent: float
    z_min: float
    z_max: float

    @classmethod
    def symmetric(cls, dx: float, x_extent: float, z_extent: float) -> "GridSpec":
        return cls(dx=dx, x_extent=x_extent, z_min=-z_extent, z_max=z_extent)

    def axes(self):
        nx = int(round(self.x_extent / self.dx)) + 1
        nz = int(round((self.z_max - self.z_min) / self.dx)) + 1
        x = self.dx * np.arange(nx)
        z = self.z_min + self.dx * np.arange(nz)
        return x, z


@dataclass(frozen=True)
class FieldGrid:
    """Axisymmetric field map in the (x, z) half-plane (x >= 0)."""

    x: np.ndarray        # m, (nx,)
    z: np.ndarray        # m, (nz,)
    Bx: np.ndarray       # T, (nz, nx)
    Bz: np.ndarray       # T, (nz, nx)
    clamped: np.ndarray  # bool (nz, nx): points within one cell of a conductor
    dx: float

    @property
    def x_extent(self) -> float:
        return float(self.x[-1])

    @property
    def z_extent(self) -> float:
        return float(max(abs(self.z[0]), abs(self.z[-1])))


@dataclass(frozen=True)
class EnergyMap:
    """Potential-energy density map E(x, z) for a given material."""

    x: np.ndarray
    z: np.ndarray
    E: np.ndarray        # J/m^3, (nz, nx)
    dx: float
    material: str


@dataclass(frozen=True)
class TrapReport:
    """Trap analysis: levitation point, escape level, trapped volume."""

    stable: bool
    z_L: float = math.nan       # m
    E_min: float = math.nan     # J/m^3
    E_saddle: float = math.nan  # J/m^3
    V_trap: float = math.nan    # m^3
    off_axis_min: bool = False


def loop_field(spec: LoopSpec, grid: GridSpec, panels: int = PHI_PANELS_DEFAULT) -> FieldGrid:
    """Magnetic field of the discretized disk on the requested grid.

    Points within one grid cell of a conductor circle are flagged and
    their field replaced by the nearest vertical neighbor's value (the
    panel quadrature is meaningless that close to a line current).
    Exploits the z -> -z mirror symmetry when the grid straddles z = 0.
    """
    x, z = grid.axes()
    mirror = grid.z_min < 0.0 < grid.z_max
    if mirror:
        # compute z >= 0 only; Bz is even in z, Bx odd
        i0 = int(np.argmin(np.abs(z)))
        z_calc = z[i0:]
    else:
        i0 = 0
        z_calc = z
    Bx_c, Bz_c = _field_halfplane(spec, x, z_calc, panels)
    nz, nx = z.size, x.size
    Bx = np.empty((nz, nx))
    Bz = np.empty((nz, nx))
    Bx[i0:] = Bx_c
    Bz[i0:] = Bz_c
    if mirror and i0 > 0:
        Bx[:i0] = -Bx_c[1 : i0 + 1][::-1]
        Bz[:i0] = Bz_c[1 : i0 + 1][::-1]

    clamped = _near_conductor(spec, x, z, grid.dx)
    _clamp(Bx, clamped)
    _clamp(Bz, clamped)
    return FieldGrid(x=x, z=z, Bx=Bx, Bz=Bz, clamped=clamped, dx=grid.dx)


def _field_halfplane(spec: LoopSpec, x, z, panels):
    half = panels // 2
    dphi = 2.0 * math.pi / panels
    # midpoint panels on [0, pi), doubled: integrand is even in phi
    cph = np.cos((np.arange(half) + 0.5) * dphi)
    w = CONSTANTS.mu0 * spec.I / (4.0 * math.pi * spec.n_loops) * dphi * 2.0
    X = x[None, :]
    Z = z[:, None]
    A0 = X * X + Z * Z
    Bx = np.zeros((z.size, x.size))
    Bz = np.zeros_like(Bx)
    chunk = max(1, int(4e6 // max(A0.size, 1)) or 1)
    for Ri in spec.radii:
        A_i = A0 + Ri * Ri
        b_i = np.broadcast_to(2.0 * X * Ri, A_i.shape)
        sx = np.zeros_like(A_i)
        sz = np.zeros_like(A_i)
        for s in range(0, half, chunk):
            c = cph[s : s + chunk]
            D2 = A_i[..., None] - b_i[..., None] * c
            D3inv = 1.0 / (D2 * np.sqrt(D2))
            sx += np.sum(c * D3inv, axis=-1)
            sz += np.sum((Ri * Ri - Ri * X[..., None] * c) * D3inv, axis=-1)
        Bx += w * Ri * Z * sx
        Bz += w * sz
    return Bx, Bz


def _near_conductor(spec: LoopSpec, x, z, dx):
    dist2 = np.full((z.size, x.size), np.inf)
    X = x[None, :]
    Z = z[:, None]
    for Ri in spec.radii:
        dist2 = np.minimum(dist2, (X - Ri) ** 2 + Z * Z)
    return dist2 < dx * dx


def _clamp(B, clamped):
    # replace flagged values with the nearest non-flagged value in the same column
    nz = B.shape[0]
    for iz, jx in zip(*np.nonzero(clamped)):
        for step in range(1, nz):
            for kz in (iz - step, iz + step):
                if 0 <= kz < nz and not clamped[kz, jx]:
                    B[iz, jx] = B[kz, jx]
                    break
            else:
                continue
            break


def energy_density(fieldgrid: FieldGrid, bias: float, material: Material) -> EnergyMap:
    """E(x, z) = rho g z + |chi| B^2 / (2 mu0), B^2 = Bx^2 + (Bz + B0)^2."""
    B2 = fieldgrid.Bx**2 + (fieldgrid.Bz + bias) ** 2
    E = (
        material.rho * CONSTANTS.g_acc * fieldgrid.z[:, None]
        + abs(material.chi) * B2 / (2.0 * CONSTANTS.mu0)
    )
    return EnergyMap(
        x=fieldgrid.x, z=fieldgrid.z, E=E, dx=fieldgrid.dx, material=material.name
    )


def critical_gradient(material: Material) -> float:
    """Critical vertical gradient of B^2 for levitation: mu0 g rho / |chi|, T^2/m.

    This is the expression and tabulated magnitude the source analysis
    states; note d(B^2)/dz at force balance from the energy density is
    twice this value. The discrepancy is documented, not resolved here.
    """
    if material.chi == 0.0:
        raise ValueError(f"{material.name} has chi = 0 and cannot be levitated")
    return CONSTANTS.mu0 * CONSTANTS.g_acc * material.rho / abs(material.chi)


def current_density(spec: LoopSpec) -> float:
    """Film current density J = I / (W delta), A/m^2."""
    return spec.I / (spec.W * spec.delta)


def find_trap(emap: EnergyMap, floor_z: float = 0.0) -> TrapReport:
    """Locate the on-axis energy minimum and its escape saddle.

    The particle domain is z >= floor_z (the chip surface; the region
    below is solid). Escape means the connected sub-level region around
    the minimum reaches the top row or the outer-x column of the map; the
    floor row itself is a wall, not an escape path. E_saddle is found by
    binary search over the sorted cell values (flood fill per threshold),
    V_trap by revolving the region's cells: sum 2 pi x dx dz.
    """
    if emap.x[0] != 0.0:
        raise ValueError("energy map must include the axis column x = 0")
    zsel = emap.z >= floor_z - 1e-15
    if not zsel.any():
        raise ValueError("energy map lies entirely below the floor")
    z = emap.z[zsel]
    E = emap.E[zsel]
    floor_is_wall = emap.z[0] <= floor_z + 1e-15

    col = E[:, 0]
    interior = [
        i
        for i in range(1, z.size - 1)
        if z[i] > floor_z and col[i] < col[i - 1] and col[i] < col[i + 1]
    ]
    if not interior:
        return TrapReport(stable=False)
    iz = min(interior, key=lambda i: col[i])
    E_min = float(col[iz])
    z_L = float(z[iz])

    vals = np.unique(E[np.isfinite(E)])

    def escapes(threshold: float) -> bool:
        labels, _ = ndimage.label(E < threshold)
        lab = labels[iz, 0]
        if lab == 0:
            return True
        esc = bool((labels[-1, :] == lab).any() or (labels[:, -1] == lab).any())
        if not floor_is_wall:
            esc = esc or bool((labels[0, :] == lab).any())
        return esc

    lo = int(np.searchsorted(vals, E_min, side="right"))
    hi = vals.size - 1
    if lo > hi or escapes(vals[lo]):
        return TrapReport(stable=False, z_L=z_L, E_min=E_min)
    if not escapes(vals[hi]):
        # barrier never opens inside the map: the saddle is the top level
        lo = hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if escapes(vals[mid]):
            hi = mid
        else:
            lo = mid
    E_saddle = float(vals[lo])

    labels, _ = ndimage.label(E < E_saddle)
    region = labels == labels[iz, 0]
    V_trap = float(np.sum(2.0 * math.pi * emap.x[None, :] * region) * emap.dx * emap.dx)
    ireg = np.unravel_index(np.argmin(np.where(region, E, np.inf)), E.shape)
    off_axis = bool(emap.x[ireg[1]] > 0.0 and E[ireg] < E_min - 1e-30)
    return TrapReport(
        stable=True,
        z_L=z_L,
        E_min=E_min,
        E_saddle=E_saddle,
        V_trap=V_trap,
        off_axis_min=off_axis,
    )


def thermal_amplitude(
    report: TrapReport,
    emap: EnergyMap,
    particle_radius: float,
    material: Material,
    T: float,
):
    """RMS thermal displacement (x_rms, z_rms) of a trapped particle.

    Particle potential U = E(r) * V_particle; stiffnesses from centered
    second differences at the minimum; amplitudes sqrt(k_B T / k).
    """
    if not report.stable:
        raise ValueError("thermal_amplitude requires a stable trap")
    if emap.material != material.name:
        raise ValueError("energy map was built for a different material")
    iz = int(np.argmin(np.abs(emap.z - report.z_L)))
    dx = emap.dx
    Vp = 4.0 / 3.0 * math.pi * particle_radius**3
    # E is even in x about the axis, so E(-dx) = E(+dx)
    kx = Vp * 2.0 * (emap.E[iz, 1] - emap.E[iz, 0]) / dx**2
    kz = Vp * (emap.E[iz + 1, 0] - 2.0 * emap.E[iz, 0] + emap.E[iz - 1, 0]) / dx**2
    if kx <= 0.0 or kz <= 0.0:
        raise ValueError("non-positive curvature at the minimum (grid too coarse?)")
    if report.stable and math.isfinite(report.V_trap):
        span = (3.0 * report.V_trap / (4.0 * math.pi)) ** (1.0 / 3.0)
        if particle_radius > span:
            raise ValueError("particle does not fit inside the trap region")
    kB_T = CONSTANTS.k_B * T
    return math.sqrt(kB_T / kx), math.sqrt(kB_T / kz)


def trap_scan(
    spec: LoopSpec,
    grid: GridSpec,
    material: Material,
    I_values,
    B0_values,
    floor_z: float = 0.0,
    panels: int = PHI_PANELS_DEFAULT,
):
    """TrapReports over an (I, B0) grid, reusing one unit-current field map.

    The loop field is linear in I, so a single map at 1 A serves every
    combination. Returns a dict keyed by (I, B0) in scan order.
    """
    unit = loop_field(LoopSpec(spec.R0, spec.W, 1.0, spec.n_loops, spec.delta), grid, panels)
    out = {}
    for I in I_values:
        for B0 in B0_values:
            scaled = FieldGrid(
                x=unit.x, z=unit.z, Bx=I * unit.Bx, Bz=I * unit.Bz,
                clamped=unit.clamped, dx=unit.dx,
            )
            emap = energy_density(scaled, B0, material)
            out[(float(I), float(B0))] = find_trap(emap, floor_z=floor_z)
    return out
