"""Command-line behavior: documents, exit codes, determinism."""

import json
import math

import pytest

from radial4 import jsonio
from radial4.cli import main
from radial4.errors import ValidationError

B0_FLAGS = ["--n", "6", "--alpha", "0", "--p", "5"]
PEAK_B0 = 24.0 ** 0.25
TWO_C1 = 384.0 ** 0.25


def run_json(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


def run_text(capsys, argv):
    rc = main(argv)
    return rc, capsys.readouterr().out


class TestInfo:
    def test_reference_instance_document(self, capsys):
        rc, doc = run_json(capsys, ["info"] + B0_FLAGS)
        assert rc == 0
        assert doc["schema"] == "1"
        assert doc["K2"] == pytest.approx(10.0)
        assert doc["K0"] == pytest.approx(9.0)
        assert doc["l"] == pytest.approx(math.sqrt(3.0))
        assert doc["eigenvalues"] == pytest.approx([3.0, 1.0, -1.0, -3.0])
        assert doc["params"]["lambda"] == 0.0
        assert doc["params"]["beta"] == 0.0
        assert doc["conditions"]["c1"] is True

    def test_complex_eigenvalues_encoded_as_objects(self, capsys):
        rc, doc = run_json(
            capsys, ["info"] + B0_FLAGS + ["--lambda", "8", "--mu", "1"]
        )
        assert rc == 0
        assert all(set(e) == {"re", "im"} for e in doc["eigenvalues"])
        assert any(e["im"] != 0.0 for e in doc["eigenvalues"])


class TestExplicit:
    def test_reference_profile_document(self, capsys):
        rc, doc = run_json(capsys, ["explicit"] + B0_FLAGS)
        assert rc == 0
        assert doc["case"] == "Case1"
        assert doc["m"] == pytest.approx(-1.0)
        assert doc["nu"] == pytest.approx(1.0)
        assert 2.0 * doc["C"] == pytest.approx(TWO_C1, rel=1e-12)

    def test_conjugate_weight_profile(self, capsys):
        rc, doc = run_json(
            capsys, ["explicit", "--n", "6", "--alpha", "-4", "--p", "5"]
        )
        assert rc == 0
        assert doc["case"] == "Case2"
        assert doc["gamma_decay"] == pytest.approx(2.0)

    def test_reduced_curve_csv(self, capsys):
        rc, out = run_text(capsys, ["explicit"] + B0_FLAGS + ["--format", "csv"])
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "t,v,dv,d2v,d3v,residual"
        assert len(lines) > 100
        residuals = [abs(float(line.split(",")[5])) for line in lines[1:]]
        assert max(residuals) < 1e-10

    def test_radial_curve_csv_bounded_at_origin(self, capsys):
        rc, out = run_text(
            capsys, ["explicit"] + B0_FLAGS + ["--format", "csv", "--curve", "radial"]
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "r,u"
        rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
        r_min, u_at_min = min(rows)
        assert r_min < 1e-3
        assert u_at_min == pytest.approx(TWO_C1, rel=1e-4)


class TestOrbit:
    def test_orbit_document(self, capsys):
        rc, doc = run_json(capsys, ["orbit"] + B0_FLAGS + ["--a", "1.0"])
        assert rc == 0
        expected = {
            "a", "b", "period", "max_value", "energy",
            "residual_sup", "in_proven_regime", "energy_drift",
        }
        assert expected <= set(doc)
        assert doc["b"] == pytest.approx(0.7836654928917256, rel=1e-9)
        assert doc["period"] == pytest.approx(4.4371357547621058, rel=1e-8)
        assert doc["in_proven_regime"] is True


class TestHomoclinic:
    def test_profile_document_with_verdict(self, capsys):
        rc, doc = run_json(capsys, ["homoclinic"] + B0_FLAGS)
        assert rc == 0
        assert doc["peak"] == pytest.approx(PEAK_B0, abs=1e-6)
        assert doc["decay_rate"] == pytest.approx(1.0, abs=1e-3)
        assert doc["n_samples"] > 100
        assert doc["singularity"]["verdict"] == "Boundary"


class TestBestConstant:
    def test_closed_form_document(self, capsys):
        rc, doc = run_json(capsys, ["best-constant"] + B0_FLAGS)
        assert rc == 0
        phi = 24.0 * (16.0 / 15.0) ** (2.0 / 3.0)
        assert doc["phi"] == pytest.approx(phi, rel=1e-12)
        assert doc["S_rad"] == pytest.approx(math.pi ** 2 * phi, rel=1e-12)
        assert doc["source"] == "ClosedForm"

    def test_numerical_document(self, capsys):
        rc, doc = run_json(
            capsys,
            ["best-constant"] + B0_FLAGS
            + ["--method", "numerical", "--grid-L", "20", "--grid-h", "0.05"],
        )
        assert rc == 0
        phi = 24.0 * (16.0 / 15.0) ** (2.0 / 3.0)
        assert doc["phi"] == pytest.approx(phi, rel=1e-2)
        assert doc["source"] == "Numerical"
        assert doc["L"] == 20.0 and doc["h"] == 0.05
        assert doc["iterations"] >= 1


class TestVerify:
    def test_manifest_cases(self, capsys, tmp_path):
        manifest = tmp_path / "cases.json"
        manifest.write_text(json.dumps({"cases": [
            {"identity": "Rellich22", "function": "gaussian", "n": 6, "alpha": 0.0},
            {"identity": "Hardy31", "function": "gaussian", "n": 6, "alpha": 0.0},
            {"identity": "TauScaling", "function": "gaussian", "n": 8, "alpha": -1.0},
        ]}))
        rc, doc = run_json(capsys, ["verify", "--manifest", str(manifest)])
        assert rc == 0
        assert doc["n_ok"] == 3 and doc["n_skipped"] == 0
        hardy = next(r for r in doc["reports"] if r["identity"] == "Hardy31")
        assert hardy["ratio"] == pytest.approx(2.0, abs=1e-8)
        assert hardy["constant"] == pytest.approx(1.0)

    def test_manifest_must_hold_case_list(self, capsys, tmp_path):
        manifest = tmp_path / "bad.json"
        manifest.write_text('{"cases": 7}')
        assert main(["verify", "--manifest", str(manifest)]) == 1
        capsys.readouterr()

    def test_unknown_function_rejected(self, capsys, tmp_path):
        manifest = tmp_path / "bad_fn.json"
        manifest.write_text(json.dumps([
            {"identity": "Rellich22", "function": "sinc", "n": 6, "alpha": 0.0},
        ]))
        assert main(["verify", "--manifest", str(manifest)]) == 1
        capsys.readouterr()

    def test_full_suite_deterministic(self, tmp_path, capsys):
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(["verify", "--output", str(out_a)]) == 0
        assert main(["verify", "--output", str(out_b)]) == 0
        capsys.readouterr()
        assert out_a.read_bytes() == out_b.read_bytes()
        doc = json.loads(out_a.read_text())
        assert doc["n_ok"] > 200
        assert doc["worst_rel_err"] <= 1e-6


class TestSweep:
    def test_info_sweep_csv(self, capsys):
        rc, out = run_text(
            capsys,
            ["sweep", "info"] + B0_FLAGS + ["--vary", "lambda=0:8:5"],
        )
        assert rc == 0
        lines = out.splitlines()
        assert len(lines) == 6
        header = lines[0].split(",")
        assert header[0] == "lambda"
        assert header[-1] == "error"
        k2_col = header.index("K2")
        for line, lam in zip(lines[1:], (0.0, 2.0, 4.0, 6.0, 8.0)):
            cells = line.split(",")
            assert float(cells[0]) == pytest.approx(lam)
            assert float(cells[k2_col]) == pytest.approx(10.0 - lam)
            assert cells[-1] == ""

    def test_two_axis_sweep_json_deterministic(self, capsys):
        argv = [
            "sweep", "info", "--n", "6", "--p", "5",
            "--vary", "alpha=-1:1:3", "--vary", "lambda=0:4:2",
            "--format", "json",
        ]
        rc_a, out_a = run_text(capsys, argv)
        rc_b, out_b = run_text(capsys, argv)
        assert rc_a == 0 and rc_b == 0
        assert out_a == out_b
        doc = json.loads(out_a)
        assert doc["command"] == "info"
        assert len(doc["rows"]) == 6
        assert doc["columns"][:2] == ["alpha", "lambda"]

    def test_orbit_sweep_records_failures_as_data(self, capsys):
        rc, out = run_text(
            capsys,
            ["sweep", "orbit"] + B0_FLAGS + ["--vary", "a=1.2:2.4:2"],
        )
        assert rc == 0
        lines = out.splitlines()
        header = lines[0].split(",")
        err_col = header.index("error")
        first = lines[1].split(",")
        second = lines[2].split(",")
        assert first[err_col] == ""
        assert float(first[header.index("period")]) > 0.0
        # a=2.4 lies beyond the rest point, a validation failure (code 5)
        assert second[err_col] == "5"

    @pytest.mark.parametrize(
        "vary",
        [
            ["--vary", "a=0:1:2", "--vary", "p=2:3:2", "--vary", "mu=0:1:2"],
            ["--vary", "lambda=0:1:200", "--vary", "mu=0:1:200"],
            ["--vary", "q=0:1:3"],
            ["--vary", "n=5:6:3"],
            ["--vary", "lambda=0:1"],
        ],
    )
    def test_malformed_axes_are_usage_errors(self, capsys, vary):
        assert main(["sweep", "info"] + B0_FLAGS + vary) == 1
        capsys.readouterr()


class TestConfig:
    def test_config_file_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(
            {"n": 6, "alpha": 0.0, "p": 5.0, "lambda": 80.0 / 9.0}
        ))
        rc_cfg, out_cfg = run_text(capsys, ["info", "--config", str(cfg)])
        rc_flags, out_flags = run_text(
            capsys, ["info"] + B0_FLAGS + ["--lambda", str(80.0 / 9.0)]
        )
        assert rc_cfg == 0 and rc_flags == 0
        assert out_cfg == out_flags

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 6, "alpha": 0.0, "p": 5.0, "lambda": 3.0}))
        rc, doc = run_json(capsys, ["info", "--config", str(cfg), "--lambda", "0"])
        assert rc == 0
        assert doc["K2"] == pytest.approx(10.0)

    def test_unreadable_config_is_usage_error(self, capsys, tmp_path):
        assert main(["info", "--config", str(tmp_path / "absent.json")]) == 1
        capsys.readouterr()


class TestExitCodes:
    def test_missing_required_parameter(self, capsys):
        assert main(["info", "--n", "6", "--alpha", "0"]) == 1
        capsys.readouterr()

    def test_unknown_subcommand(self, capsys):
        assert main(["solve"]) == 1
        capsys.readouterr()

    def test_orbit_minimum_above_rest_point(self, capsys):
        assert main(["orbit"] + B0_FLAGS + ["--a", "2.5"]) == 5
        capsys.readouterr()

    def test_orbit_outside_oscillation_regime(self, capsys):
        assert main(["orbit"] + B0_FLAGS + ["--lambda", "12", "--a", "1.0"]) == 4
        capsys.readouterr()

    def test_homoclinic_complex_eigenvalues(self, capsys):
        assert main(["homoclinic"] + B0_FLAGS + ["--lambda", "8", "--mu", "1"]) == 4
        capsys.readouterr()

    def test_explicit_off_relation(self, capsys):
        assert main(["explicit", "--n", "6", "--alpha", "0", "--p", "4.9"]) == 4
        capsys.readouterr()

    def test_alpha_outside_admissible_range(self, capsys):
        assert main(["info", "--n", "6", "--alpha", "3", "--p", "5"]) == 5
        capsys.readouterr()


class TestJsonEmission:
    def test_floats_roundtrip_17_digits(self):
        assert jsonio.format_float(1.0 / 3.0) == "0.33333333333333331"
        assert float(jsonio.format_float(math.pi)) == math.pi

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            jsonio.format_float(math.inf)
        with pytest.raises(ValidationError):
            jsonio.format_float(math.nan)

    def test_dumps_preserves_field_order(self):
        assert jsonio.dumps({"b": 1, "a": [True, None]}) == '{"b":1,"a":[true,null]}'

    def test_csv_cell_conventions(self):
        assert jsonio.csv_cell(None) == ""
        assert jsonio.csv_cell(True) == "true"
        assert jsonio.csv_cell(False) == "false"
        assert jsonio.csv_cell(0.5) == "0.5"

    def test_write_csv_uses_lf_endings(self):
        text = jsonio.write_csv(["x", "y"], [[1, 2.0], [3, None]])
        assert text == "x,y\n1,2\n3,\n"
