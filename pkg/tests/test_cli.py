"""Command-line pipeline: configs, artifacts, exit codes, reproducibility."""

import csv
import json
from fractions import Fraction

import numpy as np
import pytest

from thinporous.cli import cmd_regime, main
from thinporous.config import load_config
from thinporous.errors import ConfigError
from thinporous.params import LimitModelKind


def _write_config(path, **overrides):
    doc = {
        "fluid": {"eta0": 2.0, "eta_inf": 1.0, "lambda": 2.0, "r": 1.5, "gamma": 0.0},
        "regime": {"ell": 0.5},
        "cell": {"geometry": {"shape": "none"}, "n": 8},
        "macro": {
            "L1": 1.0,
            "L2": 1.0,
            "n1": 8,
            "n2": 8,
            "force": {"kind": "rotational"},
        },
        "solver": {"cell_tol": 1e-10, "macro_tol": 1e-8},
        "output": {"dir": str(path.parent / "out")},
    }
    for key, value in overrides.items():
        node = doc
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    path.write_text(json.dumps(doc))
    return path


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestCmdRegime:
    def _parse(self, lines):
        return dict(line.split(": ", 1) for line in lines)

    def test_carreau_case(self, capsys):
        report = self._parse(cmd_regime("0.5", "1", "1.5"))
        assert report["regime"] == "VTPM"
        assert report["limit_model"] == "carreau"
        assert Fraction(report["normalization_exponent"]) == Fraction(-1)

    def test_powerlaw_case(self):
        report = self._parse(cmd_regime("0.5", "2", "3"))
        assert report["regime"] == "VTPM"
        assert report["limit_model"] == "power_law"
        assert Fraction(report["normalization_exponent"]) == Fraction(-1, 2)

    def test_ptpm_note(self):
        lines = cmd_regime("1", "0", "1.5")
        report = self._parse(lines)
        assert report["regime"] == "PTPM"
        assert any(line.startswith("note:") for line in lines)

    def test_cli_entry(self, capsys):
        assert main(["regime", "1/2", "1", "3/2"]) == 0
        out = capsys.readouterr().out
        assert "regime: VTPM" in out
        assert "l2_thin_velocity: 3/2" in out

    def test_r_two_exits_nonzero(self, capsys):
        assert main(["regime", "0.5", "1", "2"]) != 0


class TestLoadConfig:
    def test_minimal_selects_newtonian(self, tmp_path):
        cfg = load_config(_write_config(tmp_path / "c.json"))
        assert cfg.limit_model is LimitModelKind.NEWTONIAN_ETA0

    def test_r_two_names_field(self, tmp_path):
        path = _write_config(tmp_path / "c.json", **{"fluid.r": 2.0})
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert err.value.field == "fluid.r"

    def test_missing_field(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"fluid": {"eta0": 2.0}}))
        with pytest.raises(ConfigError):
            load_config(path)

    def test_bad_geometry(self, tmp_path):
        path = _write_config(
            tmp_path / "c.json", **{"cell.geometry": {"shape": "disk", "radius": 0.7}}
        )
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert "cell.geometry" in str(err.value)

    def test_non_vtpm_regime_rejected_by_solvers(self, tmp_path, capsys):
        path = _write_config(tmp_path / "c.json", **{"regime.ell": 1.5})
        assert main(["cell", "--config", str(path)]) == 2
        assert "VTPM" in capsys.readouterr().err


class TestCmdCell:
    def test_linear_identity_permeability(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        assert main(["cell", "--config", str(path)]) == 0
        rows = _read_csv(tmp_path / "out" / "permeability.csv")
        assert len(rows) == 1
        a = rows[0]
        assert abs(float(a["a11"]) - 1.0) < 1e-8
        assert abs(float(a["a12"])) < 1e-8
        assert abs(float(a["a22"]) - 1.0) < 1e-8

    def test_powerlaw_table_with_homogeneity_column(self, tmp_path):
        path = _write_config(
            tmp_path / "c.json",
            **{
                "fluid.r": 3.0,
                "fluid.gamma": 2.0,
                "cell.geometry": {"shape": "disk", "radius": 0.25},
                "cell.n": 8,
                "cell.table": {"angles": 8, "radii": [0.5, 1.0, 2.0, 10.0]},
            },
        )
        assert main(["cell", "--config", str(path)]) == 0
        rows = _read_csv(tmp_path / "out" / "flux_table.csv")
        assert len(rows) == 32
        assert all(float(r["homogeneity_residual"]) <= 1e-6 for r in rows)

    def test_carreau_table_zero_row(self, tmp_path):
        path = _write_config(
            tmp_path / "c.json",
            **{
                "fluid.gamma": 1.0,
                "cell.table": {"angles": 4, "magnitudes": [0.0, 1.0, 10.0]},
            },
        )
        assert main(["cell", "--config", str(path)]) == 0
        rows = _read_csv(tmp_path / "out" / "flux_table.csv")
        assert len(rows) == 9  # magnitude 0 collapses to a single sample
        assert float(rows[0]["flux_x"]) == 0.0 and float(rows[0]["flux_y"]) == 0.0

    def test_mesh_vtk_written(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        main(["cell", "--config", str(path)])
        text = (tmp_path / "out" / "cell_mesh.vtk").read_text()
        assert text.startswith("# vtk DataFile Version 3.0")
        assert "POLYGONS" in text and "SCALARS fluid int 1" in text


class TestCmdDarcy:
    def test_gradient_forcing_summary(self, tmp_path):
        path = _write_config(
            tmp_path / "c.json",
            **{"macro.force": {"kind": "gradient_quadratic", "coeffs": [1, -1, 0, 0, 0]}},
        )
        assert main(["darcy", "--config", str(path)]) == 0
        summary = json.loads((tmp_path / "out" / "darcy_summary.json").read_text())
        assert summary["macro"]["v_max"] <= 1e-8
        assert summary["tolerances_met"] is True

    def test_rotational_forcing_artifacts(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        assert main(["darcy", "--config", str(path)]) == 0
        summary = json.loads((tmp_path / "out" / "darcy_summary.json").read_text())
        assert summary["macro"]["v_max"] > 1e-3
        assert summary["macro"]["div_residual"] <= 1e-8
        pressure = _read_csv(tmp_path / "out" / "pressure.csv")
        assert len(pressure) == 81
        velocity = _read_csv(tmp_path / "out" / "velocity.csv")
        assert len(velocity) == 128
        vtk = (tmp_path / "out" / "darcy.vtk").read_text()
        assert "DATASET UNSTRUCTURED_GRID" in vtk
        assert "VECTORS V double" in vtk

    def test_nonlinear_law_reaches_tolerance(self, tmp_path):
        # the quantized flux cache caps the attainable nonlinear residual, so
        # the configured tolerance must sit above the cache floor ...
        path = _write_config(
            tmp_path / "c.json",
            **{
                "fluid.gamma": 1.0,
                "macro.n1": 4,
                "macro.n2": 4,
                "cell.n": 8,
                "solver.macro_tol": 1e-6,
            },
        )
        assert main(["darcy", "--config", str(path)]) == 0

    def test_nonlinear_law_unattainable_tolerance_exits_nonzero(self, tmp_path, capsys):
        # ... and an unattainable tolerance exits nonzero, per the contract
        path = _write_config(
            tmp_path / "c.json",
            **{
                "fluid.gamma": 1.0,
                "macro.n1": 4,
                "macro.n2": 4,
                "cell.n": 8,
                "solver.macro_tol": 1e-13,
                "solver.max_iter": 25,
            },
        )
        assert main(["darcy", "--config", str(path)]) == 1

    def test_csv_force_roundtrip(self, tmp_path):
        from thinporous.macro import build_macro_mesh
        from thinporous.writers import write_csv

        mesh = build_macro_mesh(1.0, 1.0, 4, 4)
        rows = [[x, y, 1.0, 0.0] for x, y in mesh.nodes]
        force_path = tmp_path / "force.csv"
        write_csv(force_path, ["x", "y", "fx", "fy"], rows)
        path = _write_config(
            tmp_path / "c.json",
            **{
                "macro.n1": 4,
                "macro.n2": 4,
                "macro.force": {"kind": "csv", "path": str(force_path)},
            },
        )
        assert main(["darcy", "--config", str(path)]) == 0
        summary = json.loads((tmp_path / "out" / "darcy_summary.json").read_text())
        assert summary["macro"]["v_max"] <= 1e-8  # constant force fully absorbed


class TestCmdProfile:
    def test_profile_artifacts(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        assert main(["profile", "--config", str(path), "--x", "0.3", "0.4"]) == 0
        rows = _read_csv(tmp_path / "out" / "profile.csv")
        assert float(rows[0]["wx"]) == 0.0 and float(rows[0]["wy"]) == 0.0
        assert float(rows[-1]["wx"]) == 0.0 and float(rows[-1]["wy"]) == 0.0
        summary = json.loads((tmp_path / "out" / "profile_summary.json").read_text())
        assert summary["mean_flux_residual"] <= 1e-8

    def test_linear_profile_is_parabolic(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        main(["profile", "--config", str(path), "--x", "0.3", "0.4"])
        rows = _read_csv(tmp_path / "out" / "profile.csv")
        z = np.array([float(r["z3"]) for r in rows])
        wx = np.array([float(r["wx"]) for r in rows])
        shape = z * (1.0 - z)
        scale = wx[len(z) // 2] / shape[len(z) // 2]
        assert np.abs(wx - scale * shape).max() <= 1e-12 * max(1.0, np.abs(wx).max())

    def test_powerlaw_profile_mean_matches_flux(self, tmp_path):
        # the power-law profile has a midplane cusp; the in-run consistency
        # quadrature must still see the mean match the flux to 1e-8
        path = _write_config(
            tmp_path / "c.json",
            **{
                "fluid.r": 3.0,
                "fluid.gamma": 2.0,
                "cell.geometry": {"shape": "square", "half_width": 0.3},
                "solver.macro_tol": 1e-7,
            },
        )
        assert main(["profile", "--config", str(path), "--x", "0.25", "0.75"]) == 0
        summary = json.loads((tmp_path / "out" / "profile_summary.json").read_text())
        assert summary["mean_flux_residual"] <= 1e-8

    def test_point_outside_domain(self, tmp_path, capsys):
        path = _write_config(tmp_path / "c.json")
        assert main(["profile", "--config", str(path), "--x", "1.5", "0.4"]) == 2


class TestReproducibility:
    def test_darcy_runs_byte_identical(self, tmp_path):
        path_a = _write_config(tmp_path / "a.json")
        path_b = _write_config(tmp_path / "b.json")
        assert main(["darcy", "--config", str(path_a), "--out", str(tmp_path / "o1")]) == 0
        assert main(["darcy", "--config", str(path_b), "--out", str(tmp_path / "o2")]) == 0
        for name in ("pressure.csv", "velocity.csv"):
            assert (tmp_path / "o1" / name).read_bytes() == (
                tmp_path / "o2" / name
            ).read_bytes()

    def test_flag_overrides(self, tmp_path):
        path = _write_config(tmp_path / "c.json")
        out = tmp_path / "alt"
        assert main(["cell", "--config", str(path), "--out", str(out), "--n-cell", "16"]) == 0
        summary = json.loads((out / "cell_summary.json").read_text())
        assert summary["cell_n"] == 16

    def test_threaded_table_matches_sequential(self, tmp_path):
        # the disk obstacle makes the per-driving iteration counts differ, so
        # this also checks that threaded rows carry per-row diagnostics
        overrides = {
            "fluid.gamma": 1.0,
            "cell.geometry": {"shape": "disk", "radius": 0.25},
            "cell.n": 8,
            "cell.table": {"angles": 4, "magnitudes": [0.0, 1.0, 2.0]},
        }
        path = _write_config(tmp_path / "c.json", **overrides)
        assert main(["cell", "--config", str(path), "--out", str(tmp_path / "s1")]) == 0
        assert main(
            ["cell", "--config", str(path), "--out", str(tmp_path / "s2"), "--threads", "3"]
        ) == 0
        assert (tmp_path / "s1" / "flux_table.csv").read_bytes() == (
            tmp_path / "s2" / "flux_table.csv"
        ).read_bytes()
