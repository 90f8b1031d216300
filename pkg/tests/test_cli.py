import json
import math
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from rieszbounds.cli import run
from rieszbounds.report import REPORT_SCHEMA, dumps, grid_to_csv, records_to_csv, report_body


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT_SCHEMA)
    return code, rep


class TestCommands:
    def test_exact_roots(self, capsys):
        code, rep = invoke_json(capsys, "exact", "--nodes", "roots:8", "--format", "json")
        assert code == 0
        rec = rep["records"][0]
        assert abs(rec["A_exact"] - 1) < 1e-10 and abs(rec["B_exact"] - 1) < 1e-10

    def test_exact_file(self, capsys, tmp_path):
        p = tmp_path / "n.txt"
        p.write_text("0\n0.25\n")
        code, rep = invoke_json(capsys, "exact", "--nodes", f"file:{p}")
        assert rep["records"][0]["A_exact"] == pytest.approx((2 - math.sqrt(2)) / 2)

    def test_bound_kadec(self, capsys):
        code, rep = invoke_json(capsys, "bound", "kadec", "--mu", "0.125")
        assert code == 0
        assert rep["records"][0]["value"] == pytest.approx(2 * math.sin(math.pi / 8) ** 2, rel=1e-15)

    def test_bound_log_value_for_underflow(self, capsys):
        code, rep = invoke_json(capsys, "bound", "avdonin", "--delta", "1", "--L", "1", "--N", "1",
                                "--mu-star", "0")
        assert rep["records"][0]["log_value"] == pytest.approx(
            -math.log(7) - 960 * math.pi + math.log(0.5))

    def test_bound_missing_param(self, capsys):
        code, out, err = invoke(capsys, "bound", "sine-type", "--delta", "1")
        assert code == 2 and "--y" in err

    def test_bound_gautschi(self, capsys):
        code, rep = invoke_json(capsys, "bound", "gautschi", "--nodes", "roots:2")
        assert rep["records"][0]["value"] == pytest.approx(2 * math.sqrt(2) * math.pi)

    def test_verify_kadec(self, capsys):
        code, rep = invoke_json(capsys, "verify", "--suite", "kadec", "--trials", "100", "--dmax", "64",
                                "--mu-max", "0.24", "--seed", "7")
        assert code == 0
        assert rep["seed"] == 7
        assert rep["summary"]["fail_count"] == 0 and rep["summary"]["pass_count"] == 6400
        for r in rep["records"][:50]:
            assert "bound_value" in r and "bound_value_log" in r and isinstance(r["pass"], bool)

    @pytest.mark.parametrize("suite,extra", [
        ("avdonin", ["--trials", "5"]), ("sine-type", ["--trials", "5"]),
        ("gautschi", ["--trials", "20", "--dmax", "24"]), ("phi-decay", []),
        ("general-kadec", ["--trials", "3", "--dmax", "16", "--mu", "0.005"]),
    ])
    def test_other_suites(self, capsys, suite, extra):
        code, rep = invoke_json(capsys, "verify", "--suite", suite, *extra)
        assert code == 0 and rep["summary"]["fail_count"] == 0

    def test_verify_failure_exit(self, capsys, monkeypatch):
        from rieszbounds import bounds
        monkeypatch.setattr(bounds, "log_mz_kadec_bound", lambda mu: 1.0)
        code, rep = invoke_json(capsys, "verify", "--suite", "kadec", "--trials", "1", "--dmax", "3")
        assert code == 1 and rep["summary"]["fail_count"] > 0

    def test_sweep_csv(self, capsys):
        code, out, _ = invoke(capsys, "sweep", "--family", "kadec_perturbed", "--mu-max", "0.2",
                              "--dmax", "6", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "d,delta_circ,A_exact,B_exact,bound_name,bound_value_log,margin_log,pass"
        assert len(lines) == 1 + 6 * 2

    def test_sweep_json_aggregates(self, capsys):
        code, rep = invoke_json(capsys, "sweep", "--family", "counterexample", "--dmin", "3", "--dmax", "9")
        agg = rep["params"]["aggregates"]
        assert "range-restricted" in agg["note"]

    def test_a2(self, capsys):
        code, rep = invoke_json(capsys, "a2", "--nodes", "roots:1", "--y", "0.5", "--grid", "512")
        q = math.exp(-math.pi)
        rec = rep["records"][0]
        assert rec["ratio"] == pytest.approx(((1 - q) / (1 + q)) ** 2, rel=1e-8)
        assert rec["a2_lower_estimate"] >= 1

    def test_phase_grid_csv(self, capsys):
        code, out, _ = invoke(capsys, "phase", "--nodes", "roots:1", "--grid", "256", "--format", "csv")
        lines = out.splitlines()
        meta = json.loads(lines[0][2:])
        assert meta["grid_size"] == 256 and meta["period"] == 1 and "Simpson" in meta["quadrature"]
        assert lines[1] == "x,value" and len(lines) == 2 + 256

    def test_phase_counting(self, capsys):
        code, rep = invoke_json(capsys, "phase", "--nodes", "roots:1", "--window", "16")
        assert rep["records"][0]["consistency_residual"] < 1e-2

    def test_check_poisson(self, capsys):
        code, rep = invoke_json(capsys, "check-poisson")
        assert code == 0 and rep["summary"]["fail_count"] == 0
        assert rep["summary"]["pass_count"] >= 32 * 8

    def test_phi_decay(self, capsys):
        code, rep = invoke_json(capsys, "phi-decay", "--L", "2", "3")
        assert [r["L"] for r in rep["records"]] == [2, 3]


class TestErrors:
    def test_bad_node_spec(self, capsys):
        code, _, err = invoke(capsys, "exact", "--nodes", "rootz:3")
        assert code == 2 and "rootz" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = invoke(capsys, "exact", "--nodes", f"file:{tmp_path}/none.txt")
        assert code in (2,)

    def test_bad_number_in_node_file(self, capsys, tmp_path):
        p = tmp_path / "n.txt"
        p.write_text("0.1\nzz\n")
        code, _, err = invoke(capsys, "exact", "--nodes", f"file:{p}")
        assert code == 2 and ":2:" in err

    def test_unknown_flag(self, capsys):
        code, _, _ = invoke(capsys, "exact", "--bogus")
        assert code == 2

    def test_precondition(self, capsys):
        code, _, err = invoke(capsys, "verify", "--suite", "kadec", "--mu-max", "0.3")
        assert code == 2 and "mu_max" in err

    def test_near_singular_exit_3(self, capsys, tmp_path, monkeypatch):
        from rieszbounds import cli
        from rieszbounds.errors import NearSingularError

        def boom(theta):
            raise NearSingularError(1e-16, 1e-13)
        monkeypatch.setattr(cli, "exact_bounds", boom)
        code, _, err = invoke(capsys, "exact", "--nodes", "roots:4")
        assert code == 3 and "roots:4" in err


class TestConfig:
    def test_config_mirrors_flags(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# kadec regression\nsuite = kadec\ntrials = 3\ndmax = 5\nmu_max = 0.1\nseed = 4\n")
        code, rep = invoke_json(capsys, "verify", "--config", str(cfg))
        direct = invoke_json(capsys, "verify", "--suite", "kadec", "--trials", "3", "--dmax", "5",
                             "--mu-max", "0.1", "--seed", "4")[1]
        assert report_body(rep) == report_body(direct)

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = kadec\ntrials = 3\ndmax = 5\n")
        code, rep = invoke_json(capsys, "verify", "--config", str(cfg), "--trials", "1")
        assert rep["params"]["trials"] == 1

    def test_bad_line(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = kadec\nthis is wrong\n")
        code, _, err = invoke(capsys, "verify", "--config", str(cfg))
        assert code == 2 and ":2:" in err

    def test_unknown_field(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("suite = kadec\ncolour = red\n")
        code, _, err = invoke(capsys, "verify", "--config", str(cfg))
        assert code == 2 and "colour" in err


class TestDeterminism:
    def test_byte_identical_bodies(self, capsys, tmp_path):
        outs = []
        for i in range(2):
            path = tmp_path / f"r{i}.json"
            assert run(["verify", "--suite", "avdonin", "--trials", "4", "--seed", "3",
                        "--output", str(path)]) == 0
            rep = json.loads(path.read_text())
            outs.append(dumps(report_body(rep)))
        assert outs[0] == outs[1]

    def test_csv_byte_identical(self, tmp_path):
        texts = []
        for i in range(2):
            path = tmp_path / f"r{i}.csv"
            run(["verify", "--suite", "kadec", "--trials", "2", "--dmax", "4", "--format", "csv",
                 "--output", str(path)])
            texts.append(path.read_bytes())
        assert texts[0] == texts[1]


class TestReportFormat:
    def test_seventeen_digits(self):
        assert dumps(0.1, indent=None) == "0.10000000000000001"
        assert json.loads(dumps([0.1, 1 / 3])) == [0.1, 1 / 3]

    def test_nonfinite_to_null(self):
        assert dumps({"a": math.inf, "b": math.nan}, indent=None) == '{"a": null, "b": null}'

    def test_numpy_values(self):
        assert json.loads(dumps({"x": np.float64(2.5), "n": np.int64(3), "v": np.arange(2)})) == {
            "x": 2.5, "n": 3, "v": [0, 1]}

    def test_csv(self):
        text = records_to_csv([{"a": 0.1, "b": True}, {"a": None, "b": False}])
        assert text == "a,b\n0.10000000000000001,true\n,false\n"

    def test_grid_csv(self):
        text = grid_to_csv([0.0, 0.5], [1.0, 2.0], {"period": 1})
        assert text.splitlines() == ['# {"period": 1}', "x,value", "0,1", "0.5,2"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rieszbounds", "exact", "--nodes", "roots:3"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["command"] == "exact"
