"""One-command reproduction of every figure-level dataset.

Each builder emits the data behind one published-figure computation, at
whichever resolution the chosen profile sets ("fast" keeps the full
pipeline but trims grids; "full" uses the publication-grade settings).
A manifest records the file-to-figure mapping and per-figure status.
Everything is single-threaded and seedless: reruns are byte-identical.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import coupling as coupling_mod
from . import eigensolver, laplace, maglev, output, qubit, ringfield, vertical
from .core import CONSTANTS, SOLID_NEON

__all__ = ["reproduce_figures", "PROFILES"]

PROFILES = {
    "fast": {
        "trap_dx": 0.25e-6,
        "trap4b_dx": 0.4e-6,
        "sweep_n": 5,
        "Nmax": 300,
        "dtheta": 4.0e-3,
        "laplace_h": 1.25e-7,
        "wkb_points": 25,
        "g_vr_points": 4,
    },
    "full": {
        "trap_dx": 0.1e-6,
        "trap4b_dx": 0.2e-6,
        "sweep_n": 20,
        "Nmax": 800,
        "dtheta": eigensolver.DTHETA_DEFAULT,
        "laplace_h": 5e-8,
        "wkb_points": 61,
        "g_vr_points": 9,
    },
}

RING_GEOM = {"Rr": 1.5e-6, "Rs": 0.5e-6, "B0": -0.02, "a_r": 1e-7}


def _params(p) -> eigensolver.RefineParams:
    return eigensolver.RefineParams(Nmax=p["Nmax"])


def _fig3b(out: Path, p) -> list[str]:
    spec = maglev.LoopSpec(R0=10e-6, W=20e-6, I=8.5)
    grid = maglev.GridSpec(dx=p["trap_dx"], x_extent=40e-6, z_min=0.0, z_max=40e-6)
    field = maglev.loop_field(spec, grid)
    emap = maglev.energy_density(field, -0.026, SOLID_NEON)
    report = maglev.find_trap(emap)
    cfg = {"R0_meters": 10e-6, "W_meters": 20e-6, "I_amps": 8.5, "B0_tesla": -0.026,
           "dx_meters": p["trap_dx"], "material": "SNe"}
    rows = (
        (x, z, emap.E[i, j])
        for i, z in enumerate(emap.z)
        for j, x in enumerate(emap.x)
    )
    output.write_csv(out / "fig3b_energy_map.csv", ["x[m]", "z[m]", "E[J/m^3]"], rows, cfg)
    output.write_json(
        out / "fig3b_trap_report.json",
        {
            "stable": report.stable, "z_L_meters": report.z_L,
            "E_min": report.E_min, "E_saddle": report.E_saddle,
            "V_trap_m3": report.V_trap,
        },
        cfg,
    )
    return ["fig3b_energy_map.csv", "fig3b_trap_report.json"]


def _fig4a(out: Path, p) -> list[str]:
    spec = maglev.LoopSpec(R0=10e-6, W=20e-6, I=1.0)
    grid = maglev.GridSpec(dx=p["trap_dx"], x_extent=40e-6, z_min=0.0, z_max=40e-6)
    I_values = [round(v, 3) for v in np.linspace(5.0, 16.0, 12)]
    reports = maglev.trap_scan(spec, grid, SOLID_NEON, I_values, [-0.026])
    cfg = {"R0_meters": 10e-6, "W_meters": 20e-6, "B0_tesla": -0.026,
           "dx_meters": p["trap_dx"], "I_amps": I_values}
    rows = [
        (I, reports[(I, -0.026)].z_L, 1 if reports[(I, -0.026)].stable else 0)
        for I in I_values
    ]
    output.write_csv(out / "fig4a_zL_vs_I.csv", ["I[A]", "z_L[m]", "stable{0,1}"], rows, cfg)
    return ["fig4a_zL_vs_I.csv"]


def _fig4b(out: Path, p) -> list[str]:
    files = []
    loops = {
        "loop_R0_10um": (maglev.LoopSpec(R0=10e-6, W=20e-6, I=1.0), 40e-6, np.linspace(5.0, 16.0, 8)),
        "loop_R0_25um": (maglev.LoopSpec(R0=25e-6, W=30e-6, I=1.0), 80e-6, np.linspace(8.0, 30.0, 8)),
    }
    B0s = [round(b, 4) for b in np.linspace(-0.04, -0.008, 8)]
    for tag, (spec, x_ext, I_values) in loops.items():
        grid = maglev.GridSpec(dx=p["trap4b_dx"], x_extent=x_ext, z_min=0.0, z_max=x_ext)
        I_values = [round(v, 3) for v in I_values]
        reports = maglev.trap_scan(spec, grid, SOLID_NEON, I_values, B0s)
        cfg = {"R0_meters": spec.R0, "W_meters": spec.W, "dx_meters": p["trap4b_dx"],
               "I_amps": I_values, "B0_tesla": B0s}
        rows = [
            (I, B0, r.V_trap if r.stable else 0.0, 1 if r.stable else 0)
            for (I, B0), r in reports.items()
        ]
        name = f"fig4b_Vtrap_{tag}.csv"
        output.write_csv(out / name, ["I[A]", "B0[T]", "V_trap[m^3]", "stable{0,1}"], rows, cfg)
        files.append(name)
    return files


def _fig6a(out: Path, p) -> list[str]:
    pot = vertical.VerticalPotential().with_field(0.35e6)
    z = np.linspace(1e-10, 6e-8, 1200)
    rows = ((zz, vertical.u_perp(pot, zz)) for zz in z)
    cfg = {"Er_volts_per_meter": 0.35e6, "b_meters": pot.b, "epsilon_rel": 1.244}
    output.write_csv(out / "fig6a_vertical_potential.csv", ["z[m]", "U[eV]"], rows, cfg)
    return ["fig6a_vertical_potential.csv"]


def _fig6b(out: Path, p) -> list[str]:
    pot = vertical.VerticalPotential()
    fields = np.linspace(0.1e6, 0.8e6, p["wkb_points"])
    files = []
    sweep = vertical.lifetime_sweep(pot, fields)
    cfg = {"eps1_model": "first_order", "epsilon_rel": 1.244, "b_meters": pot.b}
    rows = [(E, eps1, r.z1, r.z2, r.tau) for E, eps1, r in sweep]
    output.write_csv(
        out / "fig6b_wkb_lifetime.csv",
        ["Er[V/m]", "eps1[eV]", "z1[m]", "z2[m]", "tau[s]"], rows, cfg,
    )
    files.append("fig6b_wkb_lifetime.csv")
    # companion dataset with the reported vertical level, which places the
    # lifetime threshold near the published field range
    rows2 = []
    for E in fields:
        eps1 = -15.8e-3 - E * 1e-9
        r = vertical.wkb_lifetime(pot.with_field(E), eps1)
        rows2.append((float(E), eps1, r.z1, r.z2, r.tau))
    cfg2 = {"eps1_model": "reported", "reported_energy_ev": -15.8e-3,
            "reported_mean_height_meters": 1e-9}
    output.write_csv(
        out / "fig6b_wkb_lifetime_reported_eps1.csv",
        ["Er[V/m]", "eps1[eV]", "z1[m]", "z2[m]", "tau[s]"], rows2, cfg2,
    )
    files.append("fig6b_wkb_lifetime_reported_eps1.csv")
    return files


def _fig8a(out: Path, p) -> list[str]:
    params = _params(p)
    Vrs = [0.05, 0.10, 0.15, 0.20, 0.25]
    cols = ["theta[rad]"] + [f"abs_psi00_Vr{int(v * 1000)}mV" for v in Vrs]
    profiles = []
    theta = None
    for Vr in Vrs:
        el = ringfield.RingElectrode(Rr=RING_GEOM["Rr"], H=0.85e-6, Vr=Vr, a_r=RING_GEOM["a_r"])
        system = eigensolver.SphereSystem.from_electrode(
            el, RING_GEOM["Rs"], RING_GEOM["B0"], p["dtheta"]
        )
        state = eigensolver.spectrum(system, [(0, 0)], params)[0]
        theta = state.theta
        profiles.append(np.abs(state.psi))
    rows = zip(theta, *profiles)
    cfg = dict(RING_GEOM, H_meters=0.85e-6, Vr_volts=Vrs)
    output.write_csv(out / "fig8a_ground_profiles.csv", cols, rows, cfg)
    return ["fig8a_ground_profiles.csv"]


def _fig8b(out: Path, p) -> list[str]:
    params = _params(p)
    Vrs = np.linspace(0.05, 0.25, p["g_vr_points"] + 1)
    rows = []
    for Vr in Vrs:
        el = ringfield.RingElectrode(Rr=RING_GEOM["Rr"], H=0.85e-6, Vr=float(Vr), a_r=RING_GEOM["a_r"])
        system = eigensolver.SphereSystem.from_electrode(
            el, RING_GEOM["Rs"], RING_GEOM["B0"], p["dtheta"]
        )
        states = eigensolver.spectrum(system, [(0, 0), (0, 1), (0, 2), (1, 0)], params)
        e00 = states[0].energy
        rows.append(
            (
                float(Vr),
                (states[1].energy - e00) / CONSTANTS.h / 1e9,
                (states[2].energy - e00) / CONSTANTS.h / 1e9,
                (states[3].energy - e00) / CONSTANTS.h / 1e9,
            )
        )
    cfg = dict(RING_GEOM, H_meters=0.85e-6, Vr_volts=[float(v) for v in Vrs])
    output.write_csv(
        out / "fig8b_transition_energies.csv",
        ["Vr[V]", "dE01[GHz]", "dE02[GHz]", "dE10[GHz]"], rows, cfg,
    )
    return ["fig8b_transition_energies.csv"]


def _fig9(out: Path, p) -> list[str]:
    params = _params(p)
    rows = []
    for H in (1.0e-6, 0.72e-6, 0.6e-6):
        el = ringfield.RingElectrode(Rr=RING_GEOM["Rr"], H=H, Vr=0.15, a_r=RING_GEOM["a_r"])
        system = eigensolver.SphereSystem.from_electrode(
            el, RING_GEOM["Rs"], RING_GEOM["B0"], p["dtheta"]
        )
        state = eigensolver.spectrum(system, [(0, 0)], params)[0]
        U_eV = system.lateral.U / CONSTANTS.e
        dens = state.psi**2
        for t, u, d in zip(state.theta, U_eV, dens):
            rows.append((H, t, u, d))
    cfg = dict(RING_GEOM, Vr_volts=0.15, H_meters=[1.0e-6, 0.72e-6, 0.6e-6])
    output.write_csv(
        out / "fig9_lateral_potential_density.csv",
        ["H[m]", "theta[rad]", "U[eV]", "density"], rows, cfg,
    )
    return ["fig9_lateral_potential_density.csv"]


def _fig10(out: Path, p) -> list[str]:
    n = p["sweep_n"]
    config = qubit.SweepConfig(
        Rr=RING_GEOM["Rr"], Rs=RING_GEOM["Rs"], B0=RING_GEOM["B0"],
        a_r=RING_GEOM["a_r"], dtheta=p["dtheta"],
    )
    Vr_axis = np.linspace(0.05, 0.25, n)
    H_axis = np.linspace(0.6e-6, 1.1e-6, max(n, 6))
    swmap = qubit.sweep(config, Vr_axis, H_axis, _params(p))
    rows = []
    for i, j, Vr, H in swmap.cells():
        rows.append(
            (Vr, H, swmap.f01[i, j] / 1e9, swmap.alpha_over_h[i, j] / 1e9,
             1 if swmap.converged[i, j] else 0)
        )
    cfg = dict(RING_GEOM, Vr_volts=[float(v) for v in Vr_axis],
               H_meters=[float(v) for v in H_axis], Nmax=p["Nmax"])
    output.write_csv(
        out / "fig10_anharmonicity_map.csv",
        ["Vr[V]", "H[m]", "f01[GHz]", "alpha[GHz]", "converged{0,1}"], rows, cfg,
    )
    return ["fig10_anharmonicity_map.csv"]


def _fig13(out: Path, p) -> list[str]:
    geom = laplace.PinGeometry(h=p["laplace_h"])
    sol = laplace.solve_differential_mode(geom, tol=1e-7)
    EV = laplace.field_per_volt(sol, RING_GEOM["Rs"])
    cfg = {"h_meters": p["laplace_h"], "probe_height_meters": RING_GEOM["Rs"],
           "geometry_fingerprint": geom.fingerprint()}
    stride = max(1, int(round(2.5e-7 / p["laplace_h"])))
    rows = (
        (x, z, sol.V[i, j])
        for i, z in enumerate(sol.z)
        for j, x in enumerate(sol.x)
        if i % stride == 0 and j % stride == 0
    )
    output.write_csv(out / "fig13_differential_mode.csv", ["x[m]", "z[m]", "V[V]"], rows, cfg)
    output.write_json(
        out / "fig13_summary.json",
        {"EV_per_meter": EV, "residual_volts": sol.residual, "sweeps": sol.sweeps},
        cfg,
    )
    return ["fig13_differential_mode.csv", "fig13_summary.json"]


def _fig11(out: Path, p) -> list[str]:
    geom = laplace.PinGeometry(h=p["laplace_h"])
    sol = laplace.solve_differential_mode(geom, tol=1e-7)
    EV = laplace.field_per_volt(sol, RING_GEOM["Rs"])
    params = _params(p)
    config = qubit.SweepConfig(
        Rr=RING_GEOM["Rr"], Rs=RING_GEOM["Rs"], B0=RING_GEOM["B0"],
        a_r=RING_GEOM["a_r"], dtheta=p["dtheta"],
    )
    rows = []
    Vrs = np.linspace(0.05, 0.25, p["g_vr_points"])
    for H in (0.7e-6, 0.85e-6, 1.0e-6):
        for Vr in Vrs:
            cell = qubit.solve_cell(config, float(Vr), float(H), params, keep_states=True)
            if cell.metrics is None:
                rows.append((float(Vr), float(H), math.nan, math.nan, math.nan))
                continue
            d = coupling_mod.dipole_matrix_element(cell.ground, cell.excited, RING_GEOM["Rs"])
            for Z in (100.0, 2500.0):
                res = coupling_mod.ResonatorSpec.from_frequency(5e9, Z, EV)
                g = coupling_mod.coupling_g(d, res)
                rows.append((float(Vr), float(H), d, g / 1e6, Z))
    cfg = dict(RING_GEOM, fr_hertz=5e9, EV_per_meter=EV,
               Vr_volts=[float(v) for v in Vrs], H_meters=[0.7e-6, 0.85e-6, 1.0e-6])
    output.write_csv(
        out / "fig11_coupling_strength.csv",
        ["Vr[V]", "H[m]", "dipole[C*m]", "g_over_2pi[MHz]", "Zdiff[Ohm]"], rows, cfg,
    )
    return ["fig11_coupling_strength.csv"]


BUILDERS = {
    "fig3b": _fig3b,
    "fig4a": _fig4a,
    "fig4b": _fig4b,
    "fig6a": _fig6a,
    "fig6b": _fig6b,
    "fig8a": _fig8a,
    "fig8b": _fig8b,
    "fig9": _fig9,
    "fig10": _fig10,
    "fig11": _fig11,
    "fig13": _fig13,
}


def reproduce_figures(out_dir, profile: str = "fast", only=None) -> dict:
    """Build every figure dataset; returns (and writes) the manifest."""
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; have {sorted(PROFILES)}")
    p = PROFILES[profile]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    wanted = list(BUILDERS) if only is None else list(only)
    manifest = {"profile": profile, "figures": {}}
    for name in wanted:
        if name not in BUILDERS:
            raise ValueError(f"unknown figure {name!r}")
        try:
            files = BUILDERS[name](out, p)
            manifest["figures"][name] = {"status": "ok", "files": files}
        except Exception as exc:
            manifest["figures"][name] = {
                "status": f"error: {type(exc).__name__}: {exc}",
                "files": [],
            }
    output.write_json(out / "manifest.json", manifest, {"profile": profile})
    return manifest
