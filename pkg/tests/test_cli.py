import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from misseat.cli import main
from misseat.distribution import distribution_full


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestDist:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "dist", "--n", "3", "--k", "1", "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["m", "num", "den", "approx"]
        assert [r[:3] for r in rows[1:]] == [["0", "1", "3"], ["1", "0", "1"], ["2", "1", "2"], ["3", "1", "6"]]
        assert float(rows[1][3]) == pytest.approx(1 / 3, rel=0, abs=1e-16)

    def test_single_seat(self, capsys):
        code, out, _ = run(capsys, "dist", "--n", "1", "--k", "1")
        doc = json.loads(out)
        assert code == 0
        nonzero = [row for row in doc["pmf"] if row["num"] != "0"]
        assert nonzero == [{"m": 0, "num": "1", "den": "1", "approx": 1.0}]

    def test_json_round_trip_and_sum(self, capsys):
        code, out, _ = run(capsys, "dist", "--n", "100", "--k", "3")
        doc = json.loads(out)
        assert code == 0
        assert (doc["n"], doc["k"], doc["method"]) == (100, 3, "theorem1")
        assert len(doc["pmf"]) == 101
        probs = tuple(Fraction(int(r["num"]), int(r["den"])) for r in doc["pmf"])
        assert sum(probs) == 1
        assert probs == distribution_full(100, 3).probs
        assert doc["manifest"]["command"] == "dist"

    def test_theorem2_method(self, capsys):
        _, a, _ = run(capsys, "dist", "--n", "9", "--k", "4", "--method", "theorem2")
        _, b, _ = run(capsys, "dist", "--n", "9", "--k", "4")
        assert json.loads(a)["pmf"] == json.loads(b)["pmf"]

    @pytest.mark.parametrize("argv", [("--n", "3", "--k", "4"), ("--n", "0", "--k", "0"), ("--n", "2001", "--k", "1")])
    def test_invalid(self, capsys, argv):
        code, out, err = run(capsys, "dist", *argv)
        assert code == 2
        assert out == ""
        assert "error" in err

    def test_file_output_with_manifest(self, capsys, tmp_path):
        target = tmp_path / "pmf.csv"
        code, out, _ = run(capsys, "dist", "--n", "5", "--k", "2", "--format", "csv", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("m,num,den,approx\n")
        manifest = json.loads((tmp_path / "pmf.csv.manifest.json").read_text())
        assert manifest["params"] == {"n": 5, "k": 2, "method": "theorem1", "format": "csv"}
        assert "timestamp" in manifest

    def test_consistency_failure_exit_code(self, capsys, monkeypatch):
        from misseat import cli
        from misseat.distribution import ConsistencyError

        def broken(n, k, method):
            raise ConsistencyError("masses do not sum to 1")

        monkeypatch.setattr(cli, "distribution_full", broken)
        code, out, _ = run(capsys, "dist", "--n", "4", "--k", "2")
        assert code == 3 and out == ""


class TestSimulate:
    def test_byte_identical(self, capsys):
        argv = ("simulate", "--n", "2", "--k", "2", "--trials", "1000", "--seed", "7")
        _, a, _ = run(capsys, *argv)
        _, b, _ = run(capsys, *argv)
        assert a == b
        doc = json.loads(a)
        assert sum(doc["counts"]) == 1000
        assert doc["manifest"]["seed"] == 7

    def test_threads_report(self, capsys):
        code, out, _ = run(capsys, "simulate", "--n", "3", "--k", "1", "--trials", "10", "--seed", "5", "--report-threads")
        doc = json.loads(out)
        assert code == 0
        assert sum(row["count"] for row in doc["threads"]) == 10
        assert all(row["t"] <= row["r"] <= row["s"] for row in doc["threads"])

    def test_invalid(self, capsys):
        assert run(capsys, "simulate", "--n", "3", "--k", "1", "--trials", "0")[0] == 2
        assert run(capsys, "simulate", "--n", "3", "--k", "1", "--seed", "-1")[0] == 2

    def test_failure_exit_code(self, capsys):
        code, out, _ = run(
            capsys, "simulate", "--n", "3", "--k", "1", "--trials", "2000", "--seed", "1", "--z-threshold", "0"
        )
        assert code == 4
        assert json.loads(out)["comparison"]["passed"] is False


class TestOracle:
    def test_agreement(self, capsys):
        code, out, _ = run(capsys, "oracle", "--n", "6", "--k", "4")
        doc = json.loads(out)
        assert code == 0 and doc["agree"]
        assert len(doc["verdicts"]) == 7

    def test_single(self, capsys):
        code, out, _ = run(capsys, "oracle", "--n", "1", "--k", "1")
        doc = json.loads(out)
        assert code == 0
        assert [(r["num"], r["den"]) for r in doc["oracle"]] == [("1", "1"), ("0", "1")]

    def test_two(self, capsys):
        code, out, _ = run(capsys, "oracle", "--n", "2", "--k", "2")
        doc = json.loads(out)
        assert code == 0 and doc["agree"]
        assert [(r["num"], r["den"]) for r in doc["oracle"]] == [("1", "2"), ("0", "1"), ("1", "2")]

    def test_bound(self, capsys):
        code, out, _ = run(capsys, "oracle", "--n", "10", "--k", "1")
        assert code == 2 and out == ""
        code, _, err = run(capsys, "oracle", "--n", "3", "--k", "1", "--bound", "10")
        assert code == 0 and "warning" in err

    def test_disagreement_exit_code(self, capsys, monkeypatch):
        from misseat import cli
        from misseat.distribution import ExactPmf

        real = cli.enumerate_process

        def skewed(n, k, bound):
            pmf = real(n, k, bound)
            probs = list(pmf.probs)
            probs[0], probs[-1] = probs[-1], probs[0]
            return ExactPmf(n, k, tuple(probs), "oracle")

        monkeypatch.setattr(cli, "enumerate_process", skewed)
        assert run(capsys, "oracle", "--n", "4", "--k", "2")[0] == 4


class TestCheck:
    def test_passes_and_repeats(self, capsys):
        code, a, _ = run(capsys, "check", "--max-n", "8")
        assert code == 0
        assert "12/12 suites passed" in a
        _, b, _ = run(capsys, "check", "--max-n", "8")
        assert a == b

    def test_degenerate(self, capsys):
        code, out, _ = run(capsys, "check", "--max-n", "1")
        assert code == 2 and out == ""

    def test_failure_named(self, capsys, monkeypatch):
        from misseat import checks

        monkeypatch.setitem(checks.SUITES, "alternating-binomial-delta", lambda max_n: (False, "L=1, K=1"))
        code, out, err = run(capsys, "check", "--max-n", "3")
        assert code == 4
        assert "FAIL alternating-binomial-delta" in out
        assert "alternating-binomial-delta" in err


def read_dat(text):
    rows = [line.split() for line in text.splitlines() if not line.startswith("#")]
    return {int(r[0]): [float(x) for x in r[1:]] for r in rows}


class TestPlot:
    def test_dat_columns(self, capsys):
        code, out, _ = run(capsys, "plot", "--n", "100", "--k", "1,2,3", "--format", "dat")
        assert code == 0
        table = read_dat(out)
        assert sorted(table) == list(range(101))
        for j in range(3):
            assert abs(sum(table[m][j] for m in table) - 1) <= 1e-12
        assert table[1] == [0.0, 0.0, 0.0]

    def test_heights_at_zero(self, capsys):
        _, out, _ = run(capsys, "plot", "--n", "100", "--k", "1")
        table = read_dat(out)
        assert table[0] == [0.01]
        assert table[1] == [0.0]

    def test_svg(self, capsys, tmp_path):
        target = tmp_path / "fig.svg"
        code, _, _ = run(capsys, "plot", "--n", "30", "--k", "1,2", "--format", "svg", "--out", str(target))
        text = target.read_text()
        assert code == 0
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
        assert "n=30, k=1" in text and "n=30, k=2" in text
        import xml.etree.ElementTree as ET

        ET.fromstring(text)

    @pytest.mark.parametrize("ks", ["0", "1,101", "a,b", ""])
    def test_invalid_k(self, capsys, ks):
        assert run(capsys, "plot", "--n", "100", "--k", ks)[0] == 2

    def test_unwritable(self, capsys, tmp_path):
        code, out, _ = run(capsys, "plot", "--n", "10", "--k", "1", "--out", str(tmp_path / "missing" / "x.dat"))
        assert code == 5 and out == ""


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--n", "3", "--k", "1")
    doc = json.loads(out)
    assert code == 0
    assert (doc["mean"]["num"], doc["mean"]["den"]) == ("3", "2")


def test_usage_error_exit_code(capsys):
    assert main(["frobnicate"]) == 2
    assert main(["dist", "--n", "3"]) == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "misseat", "dist", "--n", "2", "--k", "2", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1:] == ["0,1,2,0.5", "1,0,1,0.0", "2,1,2,0.5"]
