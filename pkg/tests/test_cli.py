"""CLI contract: strict configs, exit codes, provenance round-trip."""

import json

import pytest

from levqsim import output
from levqsim.cli import main

FAST_EIGEN = {
    "Rr_meters": 1.5e-6,
    "H_meters": 0.85e-6,
    "Vr_volts": 0.15,
    "Rs_meters": 0.5e-6,
    "B0_tesla": -0.02,
    "Nmax": 200,
    "dtheta_rad": 6e-3,
}


def run(tmp_path, command, config, *extra):
    tmp_path.mkdir(parents=True, exist_ok=True)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "out"
    return main(
        [command, "--config", str(cfg_path), "--out", str(out), *extra]
    ), out


class TestValidation:
    def test_empty_config_exits_2(self, tmp_path, capsys):
        code, _ = run(tmp_path, "wkb", {})
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == 2 and "error" in err

    def test_unknown_key_rejected(self, tmp_path, capsys):
        code, _ = run(
            tmp_path,
            "wkb",
            {
                "Er_min_volts_per_meter": 2e5,
                "Er_max_volts_per_meter": 4e5,
                "bogus_key": 1,
            },
        )
        assert code == 2
        assert "bogus_key" in json.loads(capsys.readouterr().err)["error"]

    def test_missing_required_key(self, tmp_path, capsys):
        code, _ = run(tmp_path, "ring", {"Rr_meters": 1e-6})
        assert code == 2

    def test_missing_config_file(self, capsys):
        code = main(["wkb", "--config", "/nonexistent/cfg.json"])
        assert code == 2

    def test_numerical_failure_exits_3(self, tmp_path, capsys):
        # sphere swallowing the ring is a geometry (runtime) error
        code, _ = run(
            tmp_path,
            "ring",
            {
                "Rr_meters": 1e-7,
                "H_meters": 0.0,
                "Vr_volts": 0.1,
                "Rs_meters": 0.5e-6,
                "a_r_meters": 1e-8,
            },
        )
        assert code == 3
        assert json.loads(capsys.readouterr().err)["code"] == 3


class TestArtifacts:
    def test_wkb_csv_and_header_roundtrip(self, tmp_path):
        cfg = {
            "Er_min_volts_per_meter": 2e5,
            "Er_max_volts_per_meter": 6e5,
            "Er_points": 5,
        }
        code, out = run(tmp_path, "wkb", cfg)
        assert code == 0
        path = out / "wkb_sweep.csv"
        header = output.read_header(path)
        assert header["version"] == output.__version__
        assert header["constants"] == "codata2018"
        for key, val in cfg.items():
            assert header["config"][key] == val
        lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "Er[V/m],eps1[eV],z1[m],z2[m],tau[s]"
        assert len(lines) == 6
        taus = [float(l.split(",")[-1]) for l in lines[1:]]
        assert all(a > b for a, b in zip(taus, taus[1:]))

    def test_rerunning_reproduces_bytes(self, tmp_path):
        cfg = {
            "Er_min_volts_per_meter": 2e5,
            "Er_max_volts_per_meter": 6e5,
            "Er_points": 5,
        }
        _, out = run(tmp_path, "wkb", cfg)
        first = (out / "wkb_sweep.csv").read_bytes()
        _, out = run(tmp_path, "wkb", cfg)
        assert (out / "wkb_sweep.csv").read_bytes() == first

    def test_json_format(self, tmp_path):
        cfg = {
            "Er_min_volts_per_meter": 2e5,
            "Er_max_volts_per_meter": 6e5,
            "Er_points": 3,
        }
        code, out = run(tmp_path, "wkb", cfg, "--format", "json")
        assert code == 0
        doc = json.loads((out / "wkb_sweep.json").read_text())
        assert doc["data"]["columns"][0] == "Er[V/m]"
        assert len(doc["data"]["rows"]) == 3

    def test_eigen_spectrum(self, tmp_path):
        code, out = run(tmp_path, "eigen", FAST_EIGEN)
        assert code == 0
        rows = [
            l.split(",")
            for l in (out / "spectrum.csv").read_text().splitlines()
            if not l.startswith("#")
        ][1:]
        table = {(int(r[0]), int(r[1])): float(r[2]) for r in rows}
        f01 = (table[(0, 1)] - table[(0, 0)]) / 6.62607015e-34 / 1e9
        assert f01 == pytest.approx(6.92, rel=0.05)

    def test_eigen_state_export(self, tmp_path):
        cfg = dict(FAST_EIGEN, levels=[[0, 1]], export_states=True)
        code, out = run(tmp_path, "eigen", cfg)
        assert code == 0
        assert (out / "state_n0_m1.csv").exists()

    def test_trap_small_run(self, tmp_path):
        cfg = {
            "R0_meters": 10e-6,
            "W_meters": 20e-6,
            "I_amps": 8.5,
            "B0_tesla": -0.026,
            "dx_meters": 4e-7,
            "x_extent_meters": 4e-5,
            "z_min_meters": 0.0,
            "z_max_meters": 2e-5,
            "phi_panels": 360,
            "particle_radius_meters": 3e-6,
        }
        code, out = run(tmp_path, "trap", cfg)
        assert code == 0
        report = json.loads((out / "trap_report.json").read_text())["data"]
        assert report["stable"] is True
        assert report["z_L_meters"] > 0
        assert 0.5e-9 < report["x_rms_meters"] < 20e-9
        header = (out / "trap_map.csv").read_text().splitlines()[3]
        assert header == "x[m],z[m],Bx[T],Bz[T],E[J/m^3]"

    def test_laplace_summary_and_map(self, tmp_path):
        cfg = {
            "half_width_meters": 8e-6,
            "height_meters": 1.6e-5,
            "ground_extent_meters": 4e-6,
            "h_meters": 2e-7,
        }
        code, out = run(tmp_path, "laplace", cfg)
        assert code == 0
        doc = json.loads((out / "laplace_summary.json").read_text())["data"]
        assert doc["EV_per_meter"] > 1e4
        assert doc["residual_volts"] < 1e-7
        assert "geometry_fingerprint" in doc
        header = (out / "laplace_map.csv").read_text().splitlines()[3]
        assert header == "x[m],z[m],V[V],Ex[V/m],Ez[V/m]"

    def test_ring_artifact(self, tmp_path):
        cfg = {
            "Rr_meters": 1.5e-6,
            "H_meters": 1.0e-6,
            "Vr_volts": 0.15,
            "Rs_meters": 0.5e-6,
            "n_theta": 51,
        }
        code, out = run(tmp_path, "ring", cfg)
        assert code == 0
        lines = (out / "ring_potential.csv").read_text().splitlines()
        header = output.read_header(out / "ring_potential.csv")
        assert header["config"]["K_eff"] < 0
        assert header["config"]["E_pole_volts_per_meter"] > 0
        body = [l for l in lines if not l.startswith("#")]
        assert body[0] == "theta[rad],U[eV]"
        assert len(body) == 52

    def test_figures_subset(self, tmp_path):
        code, out = run(tmp_path, "figures", {"profile": "fast", "only": ["fig6a"]})
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())["data"]
        assert manifest["figures"]["fig6a"]["status"] == "ok"
        assert (out / "fig6a_vertical_potential.csv").exists()

    def test_couple_with_explicit_EV(self, tmp_path):
        cfg = {
            "Rr_meters": 1.5e-6,
            "Rs_meters": 0.5e-6,
            "B0_tesla": -0.02,
            "cells": [[0.15, 0.85e-6]],
            "EV_per_meter": 2.5e5,
            "Nmax": 200,
            "dtheta_rad": 6e-3,
        }
        code, out = run(tmp_path, "couple", cfg)
        assert code == 0
        lines = [
            l for l in (out / "couple.csv").read_text().splitlines() if not l.startswith("#")
        ]
        g_mhz = float(lines[1].split(",")[3])
        assert g_mhz > 0.5


class TestSweepCommand:
    CFG = {
        "Rr_meters": 1.5e-6,
        "Rs_meters": 0.5e-6,
        "B0_tesla": -0.02,
        "Vr_volts": [0.15, 0.25, 2],
        "H_meters": [0.8e-6, 0.9e-6, 2],
        "Nmax": 200,
        "dtheta_rad": 6e-3,
    }

    def test_sweep_csv_and_checkpoint_resume(self, tmp_path):
        code, out = run(tmp_path, "sweep", self.CFG)
        assert code == 0
        body = [
            l for l in (out / "sweep.csv").read_text().splitlines() if not l.startswith("#")
        ]
        assert body[0] == "Vr[V],H[m],f01[GHz],alpha[GHz],converged{0,1}"
        assert len(body) == 5
        ckpt = out / "sweep_checkpoint.jsonl"
        assert ckpt.exists()
        records = [json.loads(l) for l in ckpt.read_text().splitlines()]
        assert len(records) == 4
        # drop one cell and rerun: only the missing cell recomputes, and
        # the final table is unchanged
        first = (out / "sweep.csv").read_bytes()
        ckpt.write_text("\n".join(json.dumps(r) for r in records[:-1]) + "\n")
        code, out = run(tmp_path, "sweep", self.CFG)
        assert code == 0
        assert (out / "sweep.csv").read_bytes() == first

    def test_threads_match_serial(self, tmp_path):
        code, out = run(tmp_path, "sweep", self.CFG)
        serial = (out / "sweep.csv").read_bytes()
        code2, out2 = run(tmp_path / "p", "sweep", self.CFG, "--threads", "2")
        assert code2 == 0
        assert (out2 / "sweep.csv").read_bytes() == serial
