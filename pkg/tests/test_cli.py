import csv
import io
import json
import math

import pytest

from ceord.cli import main

M0 = ["--gamma-x", "1", "--gamma-z", "1", "--ell", "3"]


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


class TestPoint:
    def test_m0_fields(self, capsys):
        code, doc, _ = run_json(capsys, "point", *M0, "--k", "2", "--dk", "0.75")
        assert code == 0
        assert doc["schema_version"] == 1
        assert doc["lambda_q"] == pytest.approx(2.0, rel=1e-12)
        assert doc["rate"] == pytest.approx(0.25 * math.log(4), rel=1e-12)
        assert doc["rate_units"] == "nats"
        assert doc["profile"]["2"] == pytest.approx(0.75)
        assert doc["profile"]["3"] == pytest.approx(0.75)
        assert doc["conditions"]["regime"] == "always"

    def test_bits_flag(self, capsys):
        _, doc, _ = run_json(
            capsys, "point", *M0, "--k", "2", "--dk", "0.75", "--bits"
        )
        assert doc["rate"] == pytest.approx(0.5)
        assert doc["rate_units"] == "bits"

    def test_domain_error_cites_dmin(self, capsys):
        code, out, err = run(capsys, "point", *M0, "--k", "2", "--dk", "0.3")
        assert code == 2
        assert out == ""
        assert "d_min" in err

    def test_psd_failure_exit2(self, capsys):
        code, _, err = run(
            capsys,
            "point",
            "--gamma-x",
            "1",
            "--rho-x",
            "-0.9",
            "--gamma-z",
            "1",
            "--ell",
            "3",
            "--k",
            "2",
            "--dk",
            "0.75",
        )
        assert code == 2
        assert "eigenvalue" in err

    def test_params_json(self, capsys):
        blob = json.dumps(
            {"gamma_x": 1, "gamma_z": 1, "ell": 3, "k": 2, "dk": 0.75}
        )
        code, doc, _ = run_json(capsys, "point", "--params-json", blob)
        assert code == 0 and doc["lambda_q"] == pytest.approx(2.0)


class TestSweep:
    def test_rate_monotone(self, capsys):
        code, doc, _ = run_json(
            capsys,
            "sweep",
            *M0,
            "--k",
            "2",
            "--dk-min",
            "0.55",
            "--dk-max",
            "0.95",
            "--steps",
            "9",
        )
        assert code == 0
        rates = [r["rate"] for r in doc["rows"]]
        assert len(rates) == 9
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_single_point(self, capsys):
        code, doc, _ = run_json(
            capsys,
            "sweep",
            *M0,
            "--k",
            "2",
            "--dk-min",
            "0.75",
            "--dk-max",
            "0.9",
            "--steps",
            "1",
        )
        assert code == 0
        assert len(doc["rows"]) == 1
        assert doc["rows"][0]["d_k"] == pytest.approx(0.75)

    def test_out_of_range_points_skipped(self, capsys):
        code, doc, err = run_json(
            capsys,
            "sweep",
            *M0,
            "--k",
            "2",
            "--dk-min",
            "0.3",
            "--dk-max",
            "0.9",
            "--steps",
            "4",
        )
        assert code == 0
        assert len(doc["rows"]) < 4
        assert "skipping" in err

    def test_csv_round_trip(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys,
            "sweep",
            *M0,
            "--k",
            "2",
            "--dk-min",
            "0.6",
            "--dk-max",
            "0.9",
            "--steps",
            "4",
            "--format",
            "csv",
            "--out",
            str(out),
        )
        assert code == 0
        raw = out.read_bytes()
        assert b"\r\n" in raw
        rows = list(csv.reader(io.StringIO(raw.decode())))
        assert rows[0][:3] == ["d_k", "lambda_q", "rate"]
        assert len(rows) == 5
        # values survive a parse at 12 significant digits
        d = float(rows[1][0])
        assert d == pytest.approx(0.6, rel=1e-11)


class TestConditionsAndRegion:
    def test_conditions_m0(self, capsys):
        code, doc, _ = run_json(capsys, "conditions", *M0, "--k", "2", "--dk", "0.75")
        assert code == 0
        c = doc["conditions"]
        assert c["mu"] == pytest.approx(1.0)
        assert c["cond1"] is True and c["regime"] == "always"

    def test_region_rows(self, capsys):
        code, doc, _ = run_json(capsys, "region", *M0, "--k", "2", "--dk", "0.75")
        assert code == 0
        assert [r["j"] for r in doc["rows"]] == [2, 3]


class TestVerify:
    def test_valid_m0(self, capsys):
        code, doc, _ = run_json(capsys, "verify", *M0, "--k", "2", "--dk", "0.75")
        assert code == 0
        assert doc["status"] == "valid"
        assert doc["case"] == "P"
        assert doc["multipliers"]["c"] == pytest.approx(1.0)
        assert abs(doc["numeric_gap"]) < 1e-6

    def test_conditions_fail_status(self, capsys):
        code, doc, _ = run_json(
            capsys,
            "verify",
            "--gamma-x",
            "1",
            "--rho-x",
            "0.99",
            "--gamma-z",
            "100",
            "--rho-z",
            "0.999",
            "--ell",
            "2",
            "--k",
            "2",
            "--dk",
            "0.98984051",
        )
        assert code == 0
        assert doc["status"] == "conditions-fail"
        assert doc["multipliers"]["b1"] < 0

    def test_j_defaults_to_k(self, capsys):
        _, doc, _ = run_json(capsys, "verify", *M0, "--k", "2", "--dk", "0.75")
        assert doc["j"] == 2


class TestBTCheck:
    def test_m0(self, capsys):
        code, doc, _ = run_json(capsys, "bt-check", *M0, "--k", "2", "--dk", "0.75")
        assert code == 0
        assert doc["all_satisfied"] is True
        last = doc["rows"][-1]
        assert last["subset_size"] == 2
        assert last["required_sum_rate"] == pytest.approx(2 * doc["rate"], abs=1e-10)


class TestSimulate:
    def test_pass_and_deterministic(self, capsys):
        argv = [
            "simulate",
            *M0,
            "--k",
            "2",
            "--dk",
            "0.75",
            "--n",
            "50000",
            "--seed",
            "3",
        ]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == 0 and code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["all_pass"] is True
        assert {r["j"] for r in doc["rows"]} == {2, 3}

    def test_seed_env_default(self, capsys, monkeypatch):
        monkeypatch.setenv("CEO_RD_SEED", "3")
        argv = ["simulate", *M0, "--k", "2", "--dk", "0.75", "--n", "50000"]
        _, out_env, _ = run(capsys, *argv)
        monkeypatch.delenv("CEO_RD_SEED")
        _, out_seeded, _ = run(capsys, *argv, "--seed", "3")
        assert json.loads(out_env)["rows"] == json.loads(out_seeded)["rows"]


class TestDecompCheck:
    def test_default_lambda_w(self, capsys):
        code, doc, _ = run_json(
            capsys,
            "decomp-check",
            *M0,
            "--lambda-q",
            "2.0",
            "--n",
            "50000",
            "--seed",
            "1",
        )
        assert code == 0
        assert doc["j"] == 3
        assert doc["lambda_w"] == pytest.approx(1.0)
        assert doc["all_pass"] is True

    def test_bad_lambda_w_exit2(self, capsys):
        code, _, err = run(
            capsys,
            "decomp-check",
            *M0,
            "--lambda-q",
            "2.0",
            "--lambda-w",
            "5.0",
            "--n",
            "100",
        )
        assert code == 2
        assert "lambda_w" in err
