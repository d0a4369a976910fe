"""Command-line entry point.

    levqsim <command> --config <file.json> [--out DIR] [--format csv|json]
                      [--threads N]

Commands: trap, wkb, ring, eigen, sweep, couple, laplace, figures.

Configs are strict JSON: unknown keys are rejected, and every physical
quantity carries its unit in the key name (e.g. Vr_volts, H_meters).
Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O
failure. Failures emit a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import coupling as coupling_mod
from . import eigensolver, figures, laplace, maglev, output, qubit, ringfield, vertical
from .core import CONSTANTS, MATERIALS

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("this command requires --config")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or not cfg:
        raise ConfigError("config must be a non-empty JSON object")
    return cfg


def _validate(cfg: dict, schema: dict) -> dict:
    """schema: key -> (kind, default); default=REQUIRED marks mandatory keys."""
    unknown = set(cfg) - set(schema)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, (kind, default) in schema.items():
        if key in cfg:
            val = cfg[key]
        elif default is REQUIRED:
            raise ConfigError(f"missing required config key: {key}")
        else:
            val = default
        if val is not None:
            try:
                val = kind(val)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
        out[key] = val
    return out


REQUIRED = object()


def _linspace3(v) -> np.ndarray:
    start, stop, num = float(v[0]), float(v[1]), int(v[2])
    if num < 1:
        raise ValueError("range needs at least one point")
    return np.linspace(start, stop, num)


def _levels(v):
    return [(int(n), int(m)) for n, m in v]


# ----------------------------------------------------------------- trap

TRAP_SCHEMA = {
    "R0_meters": (float, REQUIRED),
    "W_meters": (float, REQUIRED),
    "I_amps": (float, REQUIRED),
    "B0_tesla": (float, REQUIRED),
    "n_loops": (int, 30),
    "delta_meters": (float, 5e-6),
    "material": (str, "SNe"),
    "dx_meters": (float, 1e-7),
    "x_extent_meters": (float, 4e-5),
    "z_min_meters": (float, 0.0),
    "z_max_meters": (float, 4e-5),
    "floor_z_meters": (float, 0.0),
    "phi_panels": (int, maglev.PHI_PANELS_DEFAULT),
    "particle_radius_meters": (float, None),
    "temperature_kelvin": (float, 0.1),
}


def _cmd_trap(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, TRAP_SCHEMA)
    if c["material"] not in MATERIALS:
        raise ConfigError(f"unknown material {c['material']!r}; have {sorted(MATERIALS)}")
    spec = maglev.LoopSpec(
        R0=c["R0_meters"], W=c["W_meters"], I=c["I_amps"],
        n_loops=c["n_loops"], delta=c["delta_meters"],
    )
    grid = maglev.GridSpec(
        dx=c["dx_meters"], x_extent=c["x_extent_meters"],
        z_min=c["z_min_meters"], z_max=c["z_max_meters"],
    )
    field = maglev.loop_field(spec, grid, panels=c["phi_panels"])
    emap = maglev.energy_density(field, c["B0_tesla"], MATERIALS[c["material"]])
    report = maglev.find_trap(emap, floor_z=c["floor_z_meters"])

    rows = (
        (x, z, field.Bx[i, j], field.Bz[i, j], emap.E[i, j])
        for i, z in enumerate(field.z)
        for j, x in enumerate(field.x)
    )
    _write_table(
        out_dir / "trap_map", fmt,
        ["x[m]", "z[m]", "Bx[T]", "Bz[T]", "E[J/m^3]"], rows, c,
    )
    payload = {
        "stable": report.stable,
        "z_L_meters": report.z_L,
        "E_min": report.E_min,
        "E_saddle": report.E_saddle,
        "V_trap_m3": report.V_trap,
        "off_axis_min": report.off_axis_min,
        "current_density_A_per_m2": maglev.current_density(spec),
    }
    if report.stable and c["particle_radius_meters"]:
        x_rms, z_rms = maglev.thermal_amplitude(
            report, emap, c["particle_radius_meters"],
            MATERIALS[c["material"]], c["temperature_kelvin"],
        )
        payload["x_rms_meters"] = x_rms
        payload["z_rms_meters"] = z_rms
    output.write_json(out_dir / "trap_report.json", payload, c)
    return 0


# ----------------------------------------------------------------- wkb

WKB_SCHEMA = {
    "epsilon_rel": (float, 1.244),
    "b_meters": (float, 2.3e-10),
    "Er_min_volts_per_meter": (float, REQUIRED),
    "Er_max_volts_per_meter": (float, REQUIRED),
    "Er_points": (int, 25),
    "z_max_meters": (float, 6e-8),
    "dz_meters": (float, 1e-11),
    "eps1_model": (str, "first_order"),   # first_order | reported
    "reported_energy_ev": (float, -15.8e-3),
    "reported_mean_height_meters": (float, 1e-9),
}


def _cmd_wkb(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, WKB_SCHEMA)
    if c["eps1_model"] not in ("first_order", "reported"):
        raise ConfigError("eps1_model must be 'first_order' or 'reported'")
    pot = vertical.VerticalPotential(
        Lambda=vertical.neon_lambda(c["epsilon_rel"]), b=c["b_meters"]
    )
    fields = np.linspace(
        c["Er_min_volts_per_meter"], c["Er_max_volts_per_meter"], c["Er_points"]
    )
    if c["eps1_model"] == "first_order":
        sweep = vertical.lifetime_sweep(
            pot, fields, z_max=c["z_max_meters"], dz=c["dz_meters"]
        )
    else:
        # the source analysis quotes a deeper level than the truncated
        # image potential yields; this mode reproduces that input
        sweep = []
        for E in fields:
            eps1 = c["reported_energy_ev"] - E * c["reported_mean_height_meters"]
            sweep.append((float(E), eps1, vertical.wkb_lifetime(pot.with_field(E), eps1)))
    rows = [(E, eps1, r.z1, r.z2, r.tau) for E, eps1, r in sweep]
    _write_table(
        out_dir / "wkb_sweep", fmt,
        ["Er[V/m]", "eps1[eV]", "z1[m]", "z2[m]", "tau[s]"], rows, c,
    )
    return 0


# ----------------------------------------------------------------- ring

RING_SCHEMA = {
    "Rr_meters": (float, REQUIRED),
    "H_meters": (float, REQUIRED),
    "Vr_volts": (float, REQUIRED),
    "a_r_meters": (float, 1e-7),
    "Rs_meters": (float, REQUIRED),
    "n_theta": (int, 2001),
}


def _cmd_ring(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, RING_SCHEMA)
    el = ringfield.RingElectrode(
        Rr=c["Rr_meters"], H=c["H_meters"], Vr=c["Vr_volts"], a_r=c["a_r_meters"]
    )
    theta = np.linspace(0.0, math.pi, c["n_theta"])
    lat = ringfield.lateral_potential(el, c["Rs_meters"], theta)
    meta = dict(c)
    meta["K_eff"] = el.K_eff
    meta["E_pole_volts_per_meter"] = ringfield.pole_field(el, c["Rs_meters"])
    rows = ((t, u / CONSTANTS.e) for t, u in zip(lat.theta_grid, lat.U))
    _write_table(out_dir / "ring_potential", fmt, ["theta[rad]", "U[eV]"], rows, meta)
    return 0


# ----------------------------------------------------------------- eigen

EIGEN_SCHEMA = {
    "Rr_meters": (float, REQUIRED),
    "H_meters": (float, REQUIRED),
    "Vr_volts": (float, REQUIRED),
    "a_r_meters": (float, 1e-7),
    "Rs_meters": (float, REQUIRED),
    "B0_tesla": (float, 0.0),
    "levels": (_levels, [(0, 0), (0, 1), (0, -1), (0, 2)]),
    "Nmax": (int, eigensolver.NMAX_DEFAULT),
    "dtheta_rad": (float, eigensolver.DTHETA_DEFAULT),
    "dtau": (float, eigensolver.DTAU_DEFAULT),
    "energy_tol": (float, 1e-10),
    "max_iters": (int, 2_000_000),
    "export_states": (bool, False),
}


def _system_from(c: dict) -> eigensolver.SphereSystem:
    el = ringfield.RingElectrode(
        Rr=c["Rr_meters"], H=c["H_meters"], Vr=c["Vr_volts"], a_r=c["a_r_meters"]
    )
    return eigensolver.SphereSystem.from_electrode(
        el, c["Rs_meters"], c["B0_tesla"], c["dtheta_rad"]
    )


def _refine_params(c: dict) -> eigensolver.RefineParams:
    return eigensolver.RefineParams(
        dtau=c["dtau"], energy_tol=c["energy_tol"],
        max_iters=c["max_iters"], Nmax=c["Nmax"],
    )


def _cmd_eigen(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, EIGEN_SCHEMA)
    system = _system_from(c)
    states = eigensolver.spectrum(system, c["levels"], _refine_params(c))
    meta = dict(c)
    meta["levels"] = [list(lv) for lv in c["levels"]]
    rows = ((s.n, s.m, s.energy, s.energy / CONSTANTS.h / 1e9) for s in states)
    _write_table(
        out_dir / "spectrum", fmt, ["n", "m", "E[J]", "E_over_h[GHz]"], rows, meta
    )
    if c["export_states"]:
        for s in states:
            rows = ((t, p, 0.0) for t, p in zip(s.theta, s.psi))
            _write_table(
                out_dir / f"state_n{s.n}_m{s.m}", fmt,
                ["theta[rad]", "psi_re", "psi_im"], rows, meta,
            )
    return 0


# ----------------------------------------------------------------- sweep

SWEEP_SCHEMA = {
    "Rr_meters": (float, REQUIRED),
    "Rs_meters": (float, REQUIRED),
    "B0_tesla": (float, REQUIRED),
    "a_r_meters": (float, 1e-7),
    "Vr_volts": (_linspace3, [0.05, 0.25, 20]),
    "H_meters": (_linspace3, [0.6e-6, 1.1e-6, 20]),
    "Nmax": (int, eigensolver.NMAX_DEFAULT),
    "dtheta_rad": (float, eigensolver.DTHETA_DEFAULT),
    "dtau": (float, eigensolver.DTAU_DEFAULT),
    "energy_tol": (float, 1e-10),
    "max_iters": (int, 2_000_000),
    "checkpoint": (bool, True),
}


def _sweep_cell_job(args):
    config, Vr, H, params, i, j = args
    cell = qubit.solve_cell(config, Vr, H, params)
    return i, j, cell


def _cmd_sweep(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, SWEEP_SCHEMA)
    config = qubit.SweepConfig(
        Rr=c["Rr_meters"], Rs=c["Rs_meters"], B0=c["B0_tesla"],
        a_r=c["a_r_meters"], dtheta=c["dtheta_rad"],
    )
    params = _refine_params(c)
    Vr_axis = c["Vr_volts"]
    H_axis = c["H_meters"]

    ckpt_path = out_dir / "sweep_checkpoint.jsonl"
    done: dict[tuple[int, int], dict] = {}
    if c["checkpoint"] and ckpt_path.exists():
        with open(ckpt_path) as fh:
            for line in fh:
                rec = json.loads(line)
                done[(rec["i"], rec["j"])] = rec

    pending = [
        (config, float(Vr), float(H), params, i, j)
        for i, Vr in enumerate(Vr_axis)
        for j, H in enumerate(H_axis)
        if (i, j) not in done
    ]
    results: dict[tuple[int, int], dict] = dict(done)
    ckpt = open(ckpt_path, "a") if c["checkpoint"] else None
    try:
        if threads > 1 and pending:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for i, j, cell in pool.map(_sweep_cell_job, pending, chunksize=1):
                    results[(i, j)] = _record_cell(ckpt, i, j, cell)
        else:
            for job in pending:
                i, j, cell = _sweep_cell_job(job)
                results[(i, j)] = _record_cell(ckpt, i, j, cell)
    finally:
        if ckpt:
            ckpt.close()

    h = CONSTANTS.h
    rows = []
    for i, Vr in enumerate(Vr_axis):
        for j, H in enumerate(H_axis):
            rec = results[(i, j)]
            rows.append(
                (
                    float(Vr), float(H),
                    rec["f01_ghz"], rec["alpha_ghz"], 1 if rec["converged"] else 0,
                )
            )
    meta = dict(c)
    meta["Vr_volts"] = [float(v) for v in Vr_axis]
    meta["H_meters"] = [float(v) for v in H_axis]
    meta["lower_azimuthal_state"] = "m=+1" if config.B0 < 0 else ("m=-1" if config.B0 > 0 else "degenerate")
    _write_table(
        out_dir / "sweep", fmt,
        ["Vr[V]", "H[m]", "f01[GHz]", "alpha[GHz]", "converged{0,1}"], rows, meta,
    )
    return 0


def _record_cell(ckpt, i: int, j: int, cell: qubit.CellResult) -> dict:
    h = CONSTANTS.h
    if cell.metrics is None:
        rec = {
            "i": i, "j": j, "Vr": cell.Vr, "H": cell.H,
            "f01_ghz": math.nan, "alpha_ghz": math.nan,
            "converged": False, "error": cell.error,
        }
    else:
        rec = {
            "i": i, "j": j, "Vr": cell.Vr, "H": cell.H,
            "f01_ghz": cell.metrics.f01 / 1e9,
            "alpha_ghz": cell.metrics.alpha / h / 1e9,
            "converged": bool(cell.converged), "error": None,
        }
    if ckpt:
        ckpt.write(json.dumps(rec, sort_keys=True) + "\n")
        ckpt.flush()
    return rec


# ----------------------------------------------------------------- couple

COUPLE_SCHEMA = {
    "Rr_meters": (float, REQUIRED),
    "Rs_meters": (float, REQUIRED),
    "B0_tesla": (float, REQUIRED),
    "a_r_meters": (float, 1e-7),
    "cells": (list, REQUIRED),          # [[Vr_volts, H_meters], ...]
    "fr_hertz": (float, 5e9),
    "Zdiff_ohms": (float, 100.0),
    "EV_per_meter": (float, None),
    "probe_height_meters": (float, None),
    "include_sqrt2": (bool, False),
    "Nmax": (int, eigensolver.NMAX_DEFAULT),
    "dtheta_rad": (float, eigensolver.DTHETA_DEFAULT),
    "dtau": (float, eigensolver.DTAU_DEFAULT),
    "energy_tol": (float, 1e-10),
    "max_iters": (int, 2_000_000),
    "laplace_h_meters": (float, 1e-7),
    "laplace_tol_volts": (float, 1e-7),
}


def _cmd_couple(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, COUPLE_SCHEMA)
    EV = c["EV_per_meter"]
    if EV is None:
        geom = laplace.PinGeometry(h=c["laplace_h_meters"])
        sol = laplace.solve_differential_mode(geom, tol=c["laplace_tol_volts"])
        probe = c["probe_height_meters"]
        if probe is None:
            probe = c["Rs_meters"]
        EV = laplace.field_per_volt(sol, probe)
    res = coupling_mod.ResonatorSpec.from_frequency(c["fr_hertz"], c["Zdiff_ohms"], EV)
    params = _refine_params(c)
    config = qubit.SweepConfig(
        Rr=c["Rr_meters"], Rs=c["Rs_meters"], B0=c["B0_tesla"],
        a_r=c["a_r_meters"], dtheta=c["dtheta_rad"],
    )
    rows = []
    for Vr, H in c["cells"]:
        cell = qubit.solve_cell(config, float(Vr), float(H), params, keep_states=True)
        if cell.metrics is None:
            raise RuntimeError(f"cell (Vr={Vr}, H={H}) failed: {cell.error}")
        d = coupling_mod.dipole_matrix_element(cell.ground, cell.excited, c["Rs_meters"])
        report = coupling_mod.CouplingReport(
            dipole_element=d,
            g_over_2pi=coupling_mod.coupling_g(d, res, include_sqrt2=c["include_sqrt2"]),
            inputs={"Vr_volts": float(Vr), "H_meters": float(H),
                    "Zdiff_ohms": c["Zdiff_ohms"], "EV_per_meter": EV,
                    "fr_hertz": c["fr_hertz"]},
        )
        rows.append(
            (float(Vr), float(H), report.dipole_element,
             report.g_over_2pi / 1e6, c["Zdiff_ohms"])
        )
    meta = dict(c)
    meta["EV_per_meter"] = EV
    meta["cells"] = [[float(a), float(b)] for a, b in c["cells"]]
    _write_table(
        out_dir / "couple", fmt,
        ["Vr[V]", "H[m]", "dipole[C*m]", "g_over_2pi[MHz]", "Zdiff[Ohm]"], rows, meta,
    )
    return 0


# ----------------------------------------------------------------- laplace

LAPLACE_SCHEMA = {
    "pin_width_meters": (float, 1e-6),
    "pin_gap_meters": (float, 3e-6),
    "pin_thickness_meters": (float, 0.2e-6),
    "ground_extent_meters": (float, 1e-5),
    "half_width_meters": (float, 2e-5),
    "height_meters": (float, 4e-5),
    "h_meters": (float, 5e-8),
    "well_depth_meters": (float, 0.0),
    "tol_volts": (float, 1e-7),
    "probe_height_meters": (float, 0.5e-6),
    "export_map": (bool, True),
}


def _cmd_laplace(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, LAPLACE_SCHEMA)
    geom = laplace.PinGeometry(
        pin_width=c["pin_width_meters"], pin_gap=c["pin_gap_meters"],
        pin_thickness=c["pin_thickness_meters"], ground_extent=c["ground_extent_meters"],
        half_width=c["half_width_meters"], height=c["height_meters"],
        h=c["h_meters"], well_depth=c["well_depth_meters"],
    )
    sol = laplace.solve_differential_mode(geom, tol=c["tol_volts"])
    EV = laplace.field_per_volt(sol, c["probe_height_meters"])
    print(f"EV = {EV!r} /m (geometry {geom.fingerprint()})")
    if c["export_map"]:
        rows = (
            (x, z, sol.V[i, j], sol.Ex[i, j], sol.Ez[i, j])
            for i, z in enumerate(sol.z)
            for j, x in enumerate(sol.x)
        )
        _write_table(
            out_dir / "laplace_map", fmt,
            ["x[m]", "z[m]", "V[V]", "Ex[V/m]", "Ez[V/m]"], rows, c,
        )
    output.write_json(
        out_dir / "laplace_summary.json",
        {
            "EV_per_meter": EV,
            "probe_height_meters": c["probe_height_meters"],
            "residual_volts": sol.residual,
            "sweeps": sol.sweeps,
            "geometry_fingerprint": geom.fingerprint(),
        },
        c,
    )
    return 0


# ----------------------------------------------------------------- figures

FIGURES_SCHEMA = {
    "profile": (str, "fast"),
    "only": (list, None),
}


def _cmd_figures(cfg: dict, out_dir: Path, fmt: str, threads: int) -> int:
    c = _validate(cfg, FIGURES_SCHEMA) if cfg else {"profile": "fast", "only": None}
    manifest = figures.reproduce_figures(out_dir, profile=c["profile"], only=c["only"])
    bad = [k for k, v in manifest["figures"].items() if v["status"] != "ok"]
    return 0 if not bad else EXIT_NUMERICAL


# ----------------------------------------------------------------- plumbing

def _write_table(stem: Path, fmt: str, columns, rows, config: dict):
    rows = list(rows)
    cfg = {k: _jsonable(v) for k, v in config.items()}
    if fmt == "csv":
        output.write_csv(stem.with_suffix(".csv"), columns, rows, cfg)
    else:
        payload = {"columns": list(columns), "rows": [[_jsonable(v) for v in r] for r in rows]}
        output.write_json(stem.with_suffix(".json"), payload, cfg)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


COMMANDS = {
    "trap": (_cmd_trap, True),
    "wkb": (_cmd_wkb, True),
    "ring": (_cmd_ring, True),
    "eigen": (_cmd_eigen, True),
    "sweep": (_cmd_sweep, True),
    "couple": (_cmd_couple, True),
    "laplace": (_cmd_laplace, True),
    "figures": (_cmd_figures, False),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="levqsim",
        description="Levitated solid-neon electron qubit simulation pipeline",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    handler, needs_config = COMMANDS[args.command]
    try:
        cfg = _load_config(args.config) if needs_config else (
            _load_config(args.config) if args.config else {}
        )
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        code = handler(cfg, out_dir, args.format, max(1, args.threads))
    except ConfigError as exc:
        _fail(args.command, str(exc), EXIT_VALIDATION)
        return EXIT_VALIDATION
    except OSError as exc:
        _fail(args.command, str(exc), EXIT_IO)
        return EXIT_IO
    except Exception as exc:
        _fail(args.command, f"{type(exc).__name__}: {exc}", EXIT_NUMERICAL)
        return EXIT_NUMERICAL
    return code


def _fail(command: str, message: str, code: int):
    print(
        json.dumps({"command": command, "error": message, "code": code}, sort_keys=True),
        file=sys.stderr,
    )


if __name__ == "__main__":
    sys.exit(main())
