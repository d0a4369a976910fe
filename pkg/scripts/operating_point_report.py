#!/usr/bin/env python3
"""Sweep the (Vr, H) plane and report the qubit operating region.

Runs the anharmonicity/frequency sweep for the reference geometry, applies
the operating-region filter (f01 inside a frequency window, anharmonicity
above a floor), and reports the coupling strength over the region using
the default differential-mode electrostatics.

Usage:
    python scripts/operating_point_report.py [--n 8] [--nmax 400]
"""

import argparse

import numpy as np

from levqsim import coupling, laplace, qubit
from levqsim.eigensolver import RefineParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8, help="grid points per axis")
    ap.add_argument("--nmax", type=int, default=400)
    ap.add_argument("--f-window-ghz", nargs=2, type=float, default=(1.0, 10.0))
    ap.add_argument("--alpha-min-mhz", type=float, default=100.0)
    args = ap.parse_args()

    config = qubit.SweepConfig(Rr=1.5e-6, Rs=0.5e-6, B0=-0.02)
    params = RefineParams(Nmax=args.nmax)
    Vr = np.linspace(0.05, 0.25, args.n)
    H = np.linspace(0.6e-6, 1.1e-6, args.n)
    print(f"sweeping {args.n}x{args.n} cells (Nmax={args.nmax}) ...")
    swmap = qubit.sweep(config, Vr, H, params)

    window = (args.f_window_ghz[0] * 1e9, args.f_window_ghz[1] * 1e9)
    mask = qubit.operating_region(swmap, window, args.alpha_min_mhz * 1e6)
    print(f"converged cells: {int(swmap.converged.sum())}/{swmap.converged.size}")
    print(f"operating-region cells: {int(mask.sum())}  (lower state: {swmap.lower_azimuthal_state})")

    print("solving differential-mode electrostatics for the drive factor ...")
    sol = laplace.solve_differential_mode(laplace.PinGeometry(h=1e-7), tol=1e-7)
    EV = laplace.field_per_volt(sol, config.Rs)
    res = coupling.ResonatorSpec.from_frequency(5e9, 100.0, EV)
    print(f"EV = {EV:.4g} /m at the north pole")

    print(f"{'Vr[mV]':>8} {'H[um]':>7} {'f01[GHz]':>9} {'alpha[GHz]':>11} {'g/2pi[MHz]':>11}")
    for i, j in zip(*np.nonzero(mask)):
        cell = qubit.solve_cell(config, float(Vr[i]), float(H[j]), params, keep_states=True)
        d = coupling.dipole_matrix_element(cell.ground, cell.excited, config.Rs)
        g = coupling.coupling_g(d, res)
        print(
            f"{Vr[i] * 1e3:8.1f} {H[j] * 1e6:7.3f} {swmap.f01[i, j] / 1e9:9.3f} "
            f"{swmap.alpha_over_h[i, j] / 1e9:11.3f} {g / 1e6:11.2f}"
        )


if __name__ == "__main__":
    main()
