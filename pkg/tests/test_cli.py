import json
import shutil
import subprocess

import numpy as np
import pytest

import riskbounds.cli as cli
from riskbounds import __version__


def run(tmp_path, capsys, command, params=None, extra=(), fmt="json"):
    argv = [command]
    if params is not None:
        path = tmp_path / "params.json"
        path.write_text(json.dumps(params))
        argv += ["--params", str(path)]
    argv += ["--format", fmt, *extra]
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def envelope_of(out: str) -> dict:
    return json.loads(out)


class TestBoundCommand:
    def test_rademacher_ci_reference(self, tmp_path, capsys):
        params = {
            "formula": "rademacher_ci",
            "inputs": {"n": 100, "envelope_l2_sup": 10, "rad": 5, "delta": 0.05},
        }
        code, out, err = run(tmp_path, capsys, "bound", params)
        assert code == 0, err
        env = envelope_of(out)
        assert env["outputs"]["width"] == pytest.approx(64.32406062962478, abs=1e-9)
        assert env["outputs"]["formula"] == "rademacher_ci"
        assert env["inputs_echo"] == params
        assert env["version"] == __version__
        assert env["seed"] is None

    def test_echo_round_trip_reproduces_outputs(self, tmp_path, capsys):
        params = {
            "formula": "bounded_class_ci",
            "inputs": {
                "n": 2000, "B": 1.0, "delta": 0.1, "c": 2.0, "lam": 2.0,
                "inf_risk": 0.01, "log_a": 8.7376696182833684,
            },
        }
        code, out, _ = run(tmp_path, capsys, "bound", params)
        assert code == 0
        first = envelope_of(out)
        code, out, _ = run(tmp_path, capsys, "bound", first["inputs_echo"])
        assert code == 0
        assert envelope_of(out)["outputs"] == first["outputs"]

    def test_missing_fields_all_listed(self, tmp_path, capsys):
        params = {"formula": "rademacher_ci", "inputs": {"n": 100}}
        code, _, err = run(tmp_path, capsys, "bound", params)
        assert code == 2
        assert "missing required fields" in err
        for field in ("envelope_l2_sup", "rad", "delta"):
            assert field in err

    def test_unknown_formula(self, tmp_path, capsys):
        params = {"formula": "psi_ci", "inputs": {}}
        code, _, err = run(tmp_path, capsys, "bound", params)
        assert code == 2
        assert "known formulas" in err

    def test_formula_domain_error_is_validation(self, tmp_path, capsys):
        params = {
            "formula": "vc_entropy",
            "inputs": {"V": 1, "B": 1.0, "r": 0.9},  # outside (0, B/4]
        }
        code, _, err = run(tmp_path, capsys, "bound", params)
        assert code == 2
        assert "validity" in err

    def test_every_registered_formula_has_required_fields(self):
        assert set(cli._FORMULAS) == set(cli._REQUIRED_FIELDS)

    @pytest.mark.parametrize(
        "formula,inputs,key,expect",
        [
            (
                "deviation_tail",
                {"epsilon": 2.0, "envelope_l2_sup": 1.0},
                "tail",
                0.13533528323661276,
            ),
            (
                "single_hypothesis_tail",
                {"eta": 3.0, "h_l2_sup": 1.0},
                "tail",
                0.011108996538242316,
            ),
            (
                "nn_generalization_ci",
                {"n": 10000, "d": 2, "B": 1.0, "delta": 0.05},
                "width",
                0.3598347200737815,
            ),
            (
                "mixing_rademacher_ci",
                {
                    "n": 1000, "delta": 0.05, "rate_r": 2.718281828459045,
                    "max_block_env": 10.0, "max_block_rad": 3.0,
                },
                "width",
                903.4593456978654,
            ),
            (
                "vc_entropy",
                {"V": 1, "B": 1.0, "r": 0.25},
                "entropy",
                5.426495087914157,
            ),
            (
                "optimized_bound",
                {"n": 1000, "B": 1.0, "delta": 0.05, "log_cover": 0.0},
                "bound",
                13.153950644539739,
            ),
            (
                "small_lambda_bound",
                {
                    "n": 1000, "B": 1.0, "delta": 0.05,
                    "lam": 1.0833333333333333, "log_cover": 0.0,
                },
                "bound",
                5.171252652931097,
            ),
        ],
    )
    def test_formula_values(self, tmp_path, capsys, formula, inputs, key, expect):
        code, out, err = run(
            tmp_path, capsys, "bound", {"formula": formula, "inputs": inputs}
        )
        assert code == 0, err
        assert envelope_of(out)["outputs"][key] == pytest.approx(expect, rel=1e-9)

    def test_refined_bound_with_entropy_document(self, tmp_path, capsys):
        params = {
            "formula": "refined_bound",
            "inputs": {
                "n": 10000, "B_n": 1.0, "delta": 0.05, "c_n": 2.0,
                "entropy": {"kind": "vc", "V": 2, "B": 1.0},
            },
        }
        code, out, _ = run(tmp_path, capsys, "bound", params)
        assert code == 0
        assert envelope_of(out)["outputs"]["bound"] == pytest.approx(
            74.30904083847409, rel=1e-9
        )

    def test_csv_flattens_outputs(self, tmp_path, capsys):
        params = {
            "formula": "deviation_tail",
            "inputs": {"epsilon": 2.0, "envelope_l2_sup": 1.0},
        }
        code, out, _ = run(tmp_path, capsys, "bound", params, fmt="csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "field,value"
        assert any(line.startswith("tail,0.1353352832") for line in lines)


class TestTopLevel:
    def test_params_required(self, capsys):
        code = cli.main(["bound"])
        err = capsys.readouterr().err
        assert code == 2
        assert "--params is required" in err

    def test_optimize_constants_needs_no_params(self, capsys):
        code = cli.main(["optimize-constants"])
        out = capsys.readouterr().out
        assert code == 0
        outputs = envelope_of(out)["outputs"]
        assert 11.46 < outputs["c0"] < 11.47
        assert 1.29 < outputs["lambda0"] < 1.30
        assert 3291 < outputs["V0"] < 3292
        assert 0.0935 < outputs["radius_coeff"] < 0.0955

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code = cli.main(["bound", "--params", str(path)])
        assert code == 2

    def test_missing_file(self, tmp_path, capsys):
        code = cli.main(["bound", "--params", str(tmp_path / "absent.json")])
        assert code == 2

    def test_non_object_document(self, tmp_path, capsys):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        code = cli.main(["bound", "--params", str(path)])
        err = capsys.readouterr().err
        assert code == 2
        assert "JSON object" in err

    def test_internal_failure_exits_one(self, tmp_path, capsys, monkeypatch):
        def explode(doc, seed):
            raise RuntimeError("boom")

        monkeypatch.setitem(cli._COMMANDS, "optimize-constants", explode)
        code = cli.main(["optimize-constants"])
        err = capsys.readouterr().err
        assert code == 1
        assert "computation error: RuntimeError" in err

    def test_out_writes_file(self, tmp_path, capsys):
        params = {
            "formula": "deviation_tail",
            "inputs": {"epsilon": 1.0, "envelope_l2_sup": 1.0},
        }
        path = tmp_path / "p.json"
        path.write_text(json.dumps(params))
        dest = tmp_path / "result.json"
        code = cli.main(["bound", "--params", str(path), "--out", str(dest)])
        assert code == 0
        assert capsys.readouterr().out == ""
        doc = json.loads(dest.read_text())
        assert doc["outputs"]["tail"] == pytest.approx(0.6065306597126334)

    def test_threads_flag_accepted(self, tmp_path, capsys):
        params = {
            "formula": "deviation_tail",
            "inputs": {"epsilon": 1.0, "envelope_l2_sup": 1.0},
        }
        code, out, _ = run(tmp_path, capsys, "bound", params, extra=["--threads", "8"])
        assert code == 0

    def test_seed_echoed(self, tmp_path, capsys):
        params = {"values": [[1.0, 0.0], [0.0, 1.0]], "mode": "monte_carlo"}
        code, out, _ = run(tmp_path, capsys, "rademacher", params, extra=["--seed", "9"])
        assert code == 0
        assert envelope_of(out)["seed"] == 9

    def test_installed_entry_point(self):
        exe = shutil.which("riskbounds")
        assert exe is not None, "console script not installed"
        proc = subprocess.run([exe, "--version"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip() == __version__


class TestRademacherCommand:
    def test_exact_auto(self, tmp_path, capsys):
        params = {"values": [[1.0, 0.0], [0.0, 1.0]]}
        code, out, _ = run(tmp_path, capsys, "rademacher", params)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["mode"] == "exact"
        assert o["value"] == pytest.approx(0.5)
        assert o["massart_bound"] == pytest.approx(1.1774100225154747)
        assert o["rows"] == 2 and o["columns"] == 2

    def test_auto_switches_to_monte_carlo(self, tmp_path, capsys):
        params = {"values": [[0.0] * 25]}
        code, out, _ = run(tmp_path, capsys, "rademacher", params)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["mode"] == "monte_carlo"
        assert o["draws"] == 1000
        assert o["value"] == 0.0

    def test_monte_carlo_deterministic(self, tmp_path, capsys):
        params = {"values": [[1.0, 0.0], [0.0, 1.0]], "mode": "monte_carlo", "draws": 300}
        _, out1, _ = run(tmp_path, capsys, "rademacher", params, extra=["--seed", "4"])
        _, out2, _ = run(tmp_path, capsys, "rademacher", params, extra=["--seed", "4"])
        assert envelope_of(out1)["outputs"] == envelope_of(out2)["outputs"]

    def test_csv_table_source(self, tmp_path, capsys):
        csv_path = tmp_path / "table.csv"
        np.savetxt(csv_path, np.array([[1.0, 0.0], [0.0, 1.0]]), delimiter=",")
        code, out, _ = run(tmp_path, capsys, "rademacher", {"csv": str(csv_path)})
        assert code == 0
        assert envelope_of(out)["outputs"]["value"] == pytest.approx(0.5)

    def test_table_required(self, tmp_path, capsys):
        code, _, err = run(tmp_path, capsys, "rademacher", {})
        assert code == 2
        assert "values" in err and "csv" in err

    def test_bad_mode(self, tmp_path, capsys):
        code, _, err = run(
            tmp_path, capsys, "rademacher", {"values": [[1.0]], "mode": "psychic"}
        )
        assert code == 2
        assert "mode" in err


class TestCoverCommand:
    CHAIN = {"values": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], "radius": 1.0}

    def test_greedy_default(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "cover", self.CHAIN)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["method"] == "greedy"
        assert o["size"] == 2
        assert o["indices"] == [0, 2]

    def test_exact_beats_greedy_here(self, tmp_path, capsys):
        params = dict(self.CHAIN, method="exact")
        code, out, _ = run(tmp_path, capsys, "cover", params)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["size"] == 1
        assert o["log_size"] == pytest.approx(0.0)

    def test_bad_method(self, tmp_path, capsys):
        code, _, err = run(tmp_path, capsys, "cover", dict(self.CHAIN, method="magic"))
        assert code == 2
        assert "method" in err


class TestEntropyCommand:
    def test_single_radius(self, tmp_path, capsys):
        params = {"kind": "vc", "V": 1, "B": 1.0, "r": 0.25}
        code, out, _ = run(tmp_path, capsys, "entropy", params)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["kind"] == "vc"
        assert o["values"][0]["entropy"] == pytest.approx(5.426495087914157)

    def test_radius_list_and_classification(self, tmp_path, capsys):
        params = {
            "kind": "neural_net", "d": 1, "N": 1, "B": 1.0,
            "radii": [0.25, 0.125], "classify": True,
        }
        code, out, _ = run(tmp_path, capsys, "entropy", params)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert len(o["values"]) == 2
        assert o["values"][0]["entropy"] == pytest.approx(44.51478553174269)
        assert o["tag"]["kind"] == "subeuclidean"

    def test_csv_rows(self, tmp_path, capsys):
        params = {"kind": "vc", "V": 1, "B": 1.0, "radii": [0.25, 0.2, 0.1]}
        code, out, _ = run(tmp_path, capsys, "entropy", params, fmt="csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "r,entropy"
        assert len(lines) == 4

    def test_unknown_kind(self, tmp_path, capsys):
        code, _, err = run(tmp_path, capsys, "entropy", {"kind": "fractal", "r": 0.1})
        assert code == 2
        assert "kind" in err


class TestMixingDemoCommand:
    PARAMS = {
        "transition": [[0.9, 0.1], [0.1, 0.9]],
        "n": 60,
        "delta": 0.1,
        "rate_r": 1.25,
        "trials": 100,
    }

    def test_structure(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "mixing-demo", self.PARAMS)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["block_count"] >= 1
        assert 0.0 <= o["beta_m"] <= 1.0
        assert len(o["thresholds"]) == 4
        for row in o["thresholds"]:
            assert row["total_threshold"] == pytest.approx(
                o["block_count"] * row["per_block_threshold"]
            )
            assert 0.0 <= row["bound_probability"] <= 1.0
            assert 0.0 <= row["empirical_frequency"] <= 1.0

    def test_csv_rows(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "mixing-demo", self.PARAMS, fmt="csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("per_block_threshold,")
        assert len(lines) == 5

    def test_h_values_length_checked(self, tmp_path, capsys):
        params = dict(self.PARAMS, h_values=[1.0, -1.0, 1.0])
        code, _, err = run(tmp_path, capsys, "mixing-demo", params)
        assert code == 2
        assert "h_values" in err

    def test_deterministic_given_seed(self, tmp_path, capsys):
        _, out1, _ = run(tmp_path, capsys, "mixing-demo", self.PARAMS, extra=["--seed", "2"])
        _, out2, _ = run(tmp_path, capsys, "mixing-demo", self.PARAMS, extra=["--seed", "2"])
        assert envelope_of(out1)["outputs"] == envelope_of(out2)["outputs"]


COVERAGE_PARAMS = {
    "bound": "rademacher_ci",
    "model": {
        "kind": "iid",
        "B": 1.0,
        "covariates": {
            "kind": "discrete",
            "support": [[0.0], [1.0]],
            "probs": [0.5, 0.5],
        },
        "mean": {"kind": "atom_table", "values": [0.0, 1.0]},
        "noise": {"kind": "discrete", "values": [0.3, -0.3], "probs": [0.5, 0.5]},
    },
    "values": [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]],
    "n": 10,
    "delta": 0.1,
    "trials": 100,
    "base_seed": 5,
}


class TestCoverageCommand:
    def test_report_envelope(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "coverage", COVERAGE_PARAMS)
        assert code == 0
        o = envelope_of(out)["outputs"]
        assert o["trials"] == 100
        assert o["base_seed"] == 5
        assert 0.0 <= o["empirical_coverage"] <= 1.0
        assert o["bound_value"] > 0

    def test_seed_overrides_base_seed(self, tmp_path, capsys):
        code, out, _ = run(
            tmp_path, capsys, "coverage", COVERAGE_PARAMS, extra=["--seed", "99"]
        )
        assert code == 0
        assert envelope_of(out)["outputs"]["base_seed"] == 99

    def test_csv_per_trial_rows(self, tmp_path, capsys):
        code, out, _ = run(tmp_path, capsys, "coverage", COVERAGE_PARAMS, fmt="csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "trial,statistic,bound,failed"
        assert len(lines) == 101
        first = lines[1].split(",")
        assert first[0] == "0" and first[3] in ("0", "1")

    def test_invalid_config_is_validation_error(self, tmp_path, capsys):
        params = dict(COVERAGE_PARAMS, trials=10)
        code, _, err = run(tmp_path, capsys, "coverage", params)
        assert code == 2
        assert "trials" in err
