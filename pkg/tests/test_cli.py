import json
import re
import subprocess
import sys

import pytest

from ps_toolkit.cli import EXIT_BUDGET, EXIT_MISMATCH, EXIT_PARSE, main, run
import ps_toolkit.cli as cli


def result_of(argv):
    status, text, _ = run(argv)
    assert status == 0, text
    doc = json.loads(text)
    assert doc["schema"] == 1
    return doc["result"]


def strip_timing(text: str) -> str:
    return re.sub(r'"elapsed_seconds": [0-9.e-]+', "", text)


def test_coprime_pairs_both():
    res = result_of(["coprime-pairs", "--x", "4", "--c", "1", "--route", "both"])
    assert res["count"]["exact"] == "11"
    assert res["agreement"] is True


def test_floor():
    assert result_of(["floor", "--n", "4", "--c", "3/2"])["value"] == {"exact": "8", "decimal": "8"}


def test_pair_exponent_exact_and_decimal():
    res = result_of(["pair-exponent", "--k", "2", "--c", "3/2", "--r", "2"])
    assert res["exponent"]["exact"] == "11/6"
    assert float(res["exponent"]["decimal"]) == pytest.approx(11 / 6)


@pytest.mark.parametrize(
    "argv, key, want",
    [
        (["count-ap", "--x", "100", "--a", "1", "--q", "3", "--c", "1"], "count", "34"),
        (["divisor-count", "--x", "100", "--d", "7", "--c", "3/2"], "count", "19"),
        (["dd-count", "--x", "4", "--c", "1"], "count", "1"),
        (["tau-sum", "--x", "100", "--c", "3/2"], "value", "738"),
        (["coprime-tuples", "--x", "2", "--c", "1", "--c", "1", "--c", "1", "--route", "both"], "count", "7"),
        (["choose-k", "--c", "3/2"], "k", 3),
        (["best-k", "--c", "3/2", "--theta", "0"], "k", 3),
    ],
)
def test_subcommands(argv, key, want):
    got = result_of(argv)[key]
    assert (got["exact"] if isinstance(got, dict) else got) == want


def test_other_subcommands_run():
    for argv in (
        ["residue-profile", "--x", "20", "--q", "2", "--c", "3/2"],
        ["weyl-sum", "--M", "1", "--h", "2", "--c", "3/2"],
        ["vdc-bound", "--F", "1", "--N", "100", "--k", "3"],
        ["et-sides", "--M", "64", "--q", "3", "--c", "sqrt:2"],
        ["optimize", "--inc", "H=1/2,q=-1/2,M=3/4", "--dec", "M=1,H=-1"],
        ["optimize", "--ap-instance", "3", "3/2"],
        ["ap-exponent", "--k", "3", "--c", "3/2"],
        ["error-curve", "--c", "3/2", "--grid", "16:256", "--exponent", "11/6"],
        ["fit", "--kind", "ap", "--q", "5", "--c", "3/2", "--grid", "16:4096", "--exponent", "5/7"],
        ["zeta", "--r", "3"],
    ):
        result_of(argv)


def test_optimize_output():
    res = result_of(["optimize", "--ap-instance", "2", "3/2"])
    assert res["value"]["exponents"]["M"]["exact"] == "5/6"
    assert res["value"]["exponents"]["q"]["exact"] == "-1/3"


def test_residue_profile_counts():
    res = result_of(["residue-profile", "--x", "20", "--q", "2", "--c", "3/2"])
    assert res["counts"] == {"0": 13, "1": 7}


def test_parse_errors_exit_2(capsys):
    assert run(["floor", "--n", "x", "--c", "3/2"])[0] == EXIT_PARSE
    assert run(["floor", "--n", "4", "--c", "1/2"])[0] == EXIT_PARSE
    assert run(["floor", "--n", "4", "--c", "1.5e0"])[0] == EXIT_PARSE
    assert run(["nonsense"])[0] == EXIT_PARSE
    assert run(["count-ap", "--x", "10", "--q", "3", "--c", "2", "--workers", "0"])[0] == EXIT_PARSE
    assert run(["floor", "--n", "4", "--c", "3/2", "--max-bits", "8"])[0] == EXIT_PARSE
    assert "error" in capsys.readouterr().err


def test_budget_exit_3():
    status, text, _ = run(["coprime-pairs", "--x", "1000", "--c", "1", "--route", "brute", "--max-pairs", "10"])
    assert status == EXIT_BUDGET
    assert json.loads(text)["result"]["error"] == "budget_exceeded"
    assert run(["floor", "--n", str(10**40 + 1), "--c", "sqrt:2", "--max-bits", "64"])[0] == EXIT_BUDGET


def test_mismatch_exit_4(monkeypatch):
    monkeypatch.setattr(cli.coprime, "coprime_pairs_bruteforce", lambda *a, **k: -1)
    status, text, _ = run(["coprime-pairs", "--x", "10", "--c", "1", "--route", "both"])
    assert status == EXIT_MISMATCH
    assert json.loads(text)["result"]["agreement"] is False


def test_byte_identical_across_workers():
    # large enough that the worker pool actually splits the range
    base = ["coprime-pairs", "--x", "60000", "--c", "3/2", "--route", "mobius"]
    a = run(base + ["--workers", "1"])[1]
    b = run(base + ["--workers", "3"])[1]
    assert strip_timing(a) == strip_timing(b)


def test_csv_curve(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["error-curve", "--c", "1", "--grid", "16:128", "--exponent", "1", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,observed,theoretical,ratio"
    assert len(lines) == 5


def test_csv_scalar():
    status, text, _ = run(["floor", "--n", "5", "--c", "3/2", "--format", "csv"])
    assert status == 0
    assert "value,11" in text.splitlines()


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "ps_toolkit.cli", "floor", "--n", "5", "--c", "sqrt:2"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["result"]["value"]["exact"] == "9"


def test_max_bits_does_not_leak():
    import os
    from ps_toolkit.realpow import MAX_BITS_ENV

    before = os.environ.get(MAX_BITS_ENV)
    run(["floor", "--n", "5", "--c", "sqrt:2", "--max-bits", "128"])
    assert os.environ.get(MAX_BITS_ENV) == before
