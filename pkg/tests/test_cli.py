"""Command-line surface: exit codes, JSON output, bench CSV shape."""
from __future__ import annotations

import csv
import json

import pytest

from divrank.cli import (ALG_BISECTION, ALG_SCREENING, EXIT_INFEASIBLE,
                         EXIT_INVALID, EXIT_OK, REFERENCE_SCREENING_MS,
                         main, run_benchmark)


def write_instance(path, b1=-0.5, b2=0.5):
    doc = {"m": 3, "n": 1, "c": [3.0, 2.0, 0.0], "a": [1.0, -1.0, 0.0],
           "w": [1.0], "b1": b1, "b2": b2}
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestSolveCommand:
    def test_solves_to_stdout(self, tmp_path, capsys):
        inp = write_instance(tmp_path / "inst.json")
        assert main(["solve", "--input", inp]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "UpperActive"
        assert doc["lambda_star"] == pytest.approx(0.5, abs=1e-12)
        assert doc["objective"] == pytest.approx(2.75, abs=1e-12)
        assert doc["rho"] == pytest.approx(0.25, abs=1e-12)

    def test_output_file(self, tmp_path):
        inp = write_instance(tmp_path / "inst.json")
        out = tmp_path / "sol.json"
        assert main(["solve", "--input", inp, "--output", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["objective"] == pytest.approx(2.75, abs=1e-12)

    def test_no_screening_same_answer(self, tmp_path, capsys):
        inp = write_instance(tmp_path / "inst.json")
        main(["solve", "--input", inp])
        with_screen = json.loads(capsys.readouterr().out)
        main(["solve", "--input", inp, "--no-screening"])
        without = json.loads(capsys.readouterr().out)
        for key in ("status", "lambda_star", "objective", "diversity", "rho"):
            assert with_screen[key] == without[key]

    def test_malformed_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{oops", encoding="utf-8")
        assert main(["solve", "--input", str(path)]) == EXIT_INVALID
        err = json.loads(capsys.readouterr().err)
        assert err["status"] == "Invalid" and err["errors"]

    def test_invalid_instance_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"m": 3, "n": 2, "c": [1, 2, 3],
                                    "a": [0, 0, 0], "w": [1.0, 1.0],
                                    "b1": 0, "b2": 1}), encoding="utf-8")
        assert main(["solve", "--input", str(path)]) == EXIT_INVALID
        err = json.loads(capsys.readouterr().err)
        assert "NonDecreasingWeights" in err["errors"]

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert main(["solve", "--input", str(tmp_path / "nope.json")]) == EXIT_INVALID
        capsys.readouterr()

    def test_infeasible_exits_3(self, tmp_path, capsys):
        inp = write_instance(tmp_path / "inst.json", b1=2.0, b2=3.0)
        assert main(["solve", "--input", inp]) == EXIT_INFEASIBLE
        err = json.loads(capsys.readouterr().err)
        assert err["status"] == "Infeasible"


class TestGenCommand:
    def test_gen_then_solve(self, tmp_path, capsys):
        out = tmp_path / "gen.json"
        rc = main(["gen", "--m", "40", "--n", "5", "--seed", "12",
                   "--output", str(out)])
        assert rc == EXIT_OK
        assert main(["solve", "--input", str(out)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] in ("UpperActive", "LowerActive")

    def test_gen_deterministic(self, tmp_path):
        one = tmp_path / "a.json"
        two = tmp_path / "b.json"
        main(["gen", "--m", "40", "--n", "5", "--seed", "12", "--output", str(one)])
        main(["gen", "--m", "40", "--n", "5", "--seed", "12", "--output", str(two)])
        assert one.read_text(encoding="utf-8") == two.read_text(encoding="utf-8")


class TestVerifyCommand:
    def test_tiny_four_way_agreement(self, capsys):
        assert main(["verify", "--count", "8", "--m", "7", "--n", "2",
                     "--seed", "5"]) == EXIT_OK
        assert "match" in capsys.readouterr().out

    def test_medium_oracle_agreement(self, capsys):
        assert main(["verify", "--count", "5", "--m", "60", "--n", "6",
                     "--seed", "5"]) == EXIT_OK
        capsys.readouterr()

    def test_zero_count_vacuous_pass(self, capsys):
        assert main(["verify", "--count", "0"]) == EXIT_OK
        capsys.readouterr()


class TestBenchCommand:
    def test_csv_shape_and_determinism(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        rc = main(["bench", "--m-list", "30,60", "--n-list", "3",
                   "--reps", "3", "--seed", "2", "--csv", str(out)])
        assert rc == EXIT_OK
        capsys.readouterr()
        with open(out, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["m", "n", "algorithm", "mean_ms", "std_ms", "reps"]
        body = rows[1:]
        assert len(body) == 4  # two sizes x two algorithms
        assert [r[:3] for r in body] == [
            ["30", "3", ALG_BISECTION], ["30", "3", ALG_SCREENING],
            ["60", "3", ALG_BISECTION], ["60", "3", ALG_SCREENING]]
        assert all(r[5] == "3" for r in body)

    def test_reference_timing_printed_for_known_sizes(self, capsys):
        assert (100, 10) in REFERENCE_SCREENING_MS
        main(["bench", "--m-list", "100", "--n-list", "10", "--reps", "2"])
        out = capsys.readouterr().out
        assert "reference" in out and "for comparison" in out

    def test_run_benchmark_rows(self):
        rows = run_benchmark([30], [3], reps=4, seed=1)
        assert [r.algorithm for r in rows] == [ALG_BISECTION, ALG_SCREENING]
        for row in rows:
            assert len(row.times_ms) == 4
            assert row.median_ms > 0.0 and row.mean_ms > 0.0


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            main([])

    def test_bad_m_list_rejected(self):
        with pytest.raises(SystemExit):
            main(["bench", "--m-list", "abc"])
