"""Qubit metrics from spectra, and (Vr, H) operating-region sweeps.

The qubit is encoded in the two lowest azimuthal states: |g> = psi_00 and
|e> = psi_01 (the m = +1 member of the Zeeman-split pair; which of m = +-1
lies lower depends on the sign of B0 and is recorded in the sweep
metadata rather than assumed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CONSTANTS
from .eigensolver import RefineParams, SphereSystem, refine_imaginary_time, trial_states
from .ringfield import RingElectrode

__all__ = [
    "QubitMetrics",
    "SweepConfig",
    "SweepMap",
    "metrics_from_spectrum",
    "solve_cell",
    "sweep",
    "operating_region",
]

QUBIT_LEVELS = ((0, 0), (0, 1), (0, -1), (0, 2))


@dataclass(frozen=True)
class QubitMetrics:
    """Transition energies and anharmonicity of the lowest ladder."""

    dE01: float          # J
    dE02: float          # J
    alpha: float         # J, dE02 - 2*dE01
    zeeman_split: float  # J, E(0,1) - E(0,-1), signed
    f01: float           # Hz


def metrics_from_spectrum(levels) -> QubitMetrics:
    """Metrics from (n, m, energy) records or AngularEigenstate objects.

    Requires levels (0,0), (0,1), (0,-1), (0,2).
    """
    table = {}
    for item in levels:
        if hasattr(item, "energy"):
            table[(item.n, item.m)] = float(item.energy)
        else:
            n, m, energy = item
            table[(int(n), int(m))] = float(energy)
    missing = [lvl for lvl in QUBIT_LEVELS if lvl not in table]
    if missing:
        raise ValueError(f"spectrum is missing levels {missing}")
    dE01 = table[(0, 1)] - table[(0, 0)]
    dE02 = table[(0, 2)] - table[(0, 0)]
    return QubitMetrics(
        dE01=dE01,
        dE02=dE02,
        alpha=dE02 - 2.0 * dE01,
        zeeman_split=table[(0, 1)] - table[(0, -1)],
        f01=dE01 / CONSTANTS.h,
    )


@dataclass(frozen=True)
class SweepConfig:
    """Fixed geometry for a (Vr, H) sweep."""

    Rr: float
    Rs: float
    B0: float
    a_r: float = 1e-7
    dtheta: float = 3.1e-3


@dataclass
class CellResult:
    """One sweep cell: metrics plus the qubit-pair states for coupling."""

    Vr: float
    H: float
    metrics: QubitMetrics | None
    converged: bool
    error: str | None = None
    ground: object = None
    excited: object = None


@dataclass(frozen=True)
class SweepMap:
    """Metric grids over the (Vr, H) plane; grids indexed [i_Vr, j_H]."""

    Vr_axis: np.ndarray
    H_axis: np.ndarray
    f01: np.ndarray          # Hz
    alpha_over_h: np.ndarray  # Hz
    zeeman_over_h: np.ndarray  # Hz, signed
    converged: np.ndarray    # bool
    g_over_2pi: np.ndarray | None = None  # Hz, filled by the coupling pipeline
    lower_azimuthal_state: str = "m=+1"   # which of m=+-1 is lower, from B0 sign

    def cells(self):
        for i, Vr in enumerate(self.Vr_axis):
            for j, H in enumerate(self.H_axis):
                yield i, j, float(Vr), float(H)


def solve_cell(
    config: SweepConfig,
    Vr: float,
    H: float,
    params: RefineParams,
    keep_states: bool = False,
) -> CellResult:
    """Solve the four qubit levels for one (Vr, H) cell."""
    try:
        electrode = RingElectrode(Rr=config.Rr, H=H, Vr=Vr, a_r=config.a_r)
        system = SphereSystem.from_electrode(electrode, config.Rs, config.B0, config.dtheta)
        states = {}
        for m in (0, 1, -1, 2):
            trial = trial_states(system, m, 1, params.Nmax)
            states[m] = refine_imaginary_time(system, trial, params)[0]
        metrics = metrics_from_spectrum(states.values())
        result = CellResult(
            Vr=Vr,
            H=H,
            metrics=metrics,
            converged=all(s.converged for s in states.values()),
        )
        if keep_states:
            result.ground = states[0]
            result.excited = states[1]
        return result
    except Exception as exc:  # per-cell failures mask the cell, never abort the sweep
        return CellResult(Vr=Vr, H=H, metrics=None, converged=False, error=str(exc))


def sweep(
    config: SweepConfig,
    Vr_values,
    H_values,
    params: RefineParams = RefineParams(),
    cell_solver=None,
) -> SweepMap:
    """Metrics over the (Vr, H) grid; failed cells are NaN-masked.

    cell_solver allows a parallel executor to inject precomputed cells
    keyed by (i, j); by default cells run sequentially in deterministic
    order.
    """
    Vr_axis = np.asarray(list(Vr_values), dtype=float)
    H_axis = np.asarray(list(H_values), dtype=float)
    shape = (Vr_axis.size, H_axis.size)
    f01 = np.full(shape, np.nan)
    alpha = np.full(shape, np.nan)
    zeeman = np.full(shape, np.nan)
    conv = np.zeros(shape, dtype=bool)
    for i, Vr in enumerate(Vr_axis):
        for j, H in enumerate(H_axis):
            if cell_solver is not None:
                cell = cell_solver(i, j, float(Vr), float(H))
            else:
                cell = solve_cell(config, float(Vr), float(H), params)
            if cell.metrics is not None:
                f01[i, j] = cell.metrics.f01
                alpha[i, j] = cell.metrics.alpha / CONSTANTS.h
                zeeman[i, j] = cell.metrics.zeeman_split / CONSTANTS.h
                conv[i, j] = cell.converged
    lower = "m=+1" if config.B0 < 0 else ("m=-1" if config.B0 > 0 else "degenerate")
    return SweepMap(
        Vr_axis=Vr_axis,
        H_axis=H_axis,
        f01=f01,
        alpha_over_h=alpha,
        zeeman_over_h=zeeman,
        converged=conv,
        lower_azimuthal_state=lower,
    )


def operating_region(swmap: SweepMap, f_window, alpha_min: float) -> np.ndarray:
    """Boolean mask of converged cells with f01 in the window and alpha/h >= floor."""
    lo, hi = float(f_window[0]), float(f_window[1])
    with np.errstate(invalid="ignore"):
        mask = (
            swmap.converged
            & np.isfinite(swmap.f01)
            & (swmap.f01 >= lo)
            & (swmap.f01 <= hi)
            & (swmap.alpha_over_h >= alpha_min)
        )
    return mask
