import csv
import io
import json
import subprocess
import sys

import pytest

from relbrauer import cli
from relbrauer.cli import main
from relbrauer.errors import NoCertificate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_subgroups_json(capsys):
    code, out, _ = run(capsys, "subgroups", "--group", "2:[1,1,1]", "--format", "json")
    assert code == 0 and json.loads(out)["count"] == 16


def test_subgroups_dot(capsys):
    code, out, _ = run(capsys, "subgroups", "--group", "2:[2]", "--format", "dot")
    assert code == 0
    assert out.count("[label=") == 3 and out.count("->") == 2


def test_subgroups_csv_and_pretty(capsys):
    code, out, _ = run(capsys, "subgroups", "--group", "3:[1,1]", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["index", "order", "generators", "cyclic"] and len(rows) == 1 + 6
    code, out, _ = run(capsys, "subgroups", "--group", "2:[1]", "--format", "pretty")
    assert code == 0 and out.startswith("2:[1]: 2 subgroups")


@pytest.mark.parametrize("argv", [["subgroups", "--group", "9:[1]"],
                                  ["subgroups", "--group", "2:[1,"],
                                  ["verify", "--group", "2:[1,1,1,1,1,1,1]"],
                                  ["subgroups", "--group", "2:[1]", "--format", "xml"],
                                  ["kernel", "--group", "2:[1]", "--format", "dot"],
                                  ["sweep", "--prime", "4", "--max-order", "16"],
                                  ["sweep", "--prime", "2", "--max-order", "1000"],
                                  ["bogus"],
                                  []])
def test_input_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()


@pytest.mark.parametrize("group,relative,rank", [("2:[1,1]", True, 4), ("3:[1,1]", True, 9), ("2:[3]", False, 0),
                                                 ("2:[1,1]", False, 1), ("2:[1,1,1]", False, 8)])
def test_kernel_ranks(capsys, group, relative, rank):
    argv = ["kernel", "--group", group] + (["--relative"] if relative else [])
    code, out, _ = run(capsys, *argv)
    assert code == 0 and json.loads(out)["rank"] == rank


def test_kernel_pretty_uses_labels(capsys):
    code, out, _ = run(capsys, "kernel", "--group", "2:[1,1]", "--relative", "--format", "pretty")
    assert code == 0 and "rank 4" in out and "e12" in out
    code, out, _ = run(capsys, "kernel", "--group", "2:[1,1,1]", "--format", "pretty")
    assert code == 0 and "rank 8" in out and "e16" in out


def test_verify(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--group", "2:[1,1]", "--output", str(target))
    assert code == 0 and out == ""
    report = json.loads(target.read_text())
    assert report["ranks"]["kRel"] == 4 and all(c["ok"] for c in report["checks"])
    code, out, _ = run(capsys, "verify", "--group", "2:[1,1]", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == cli.CSV_COLUMNS
    assert rows[1] == ["2:[1,1]", "8", "16", "8", "8", "4", "true", "2^1"]


def test_verify_failure_exit_1(capsys, monkeypatch):
    from relbrauer import verify

    monkeypatch.setattr(verify, "_signature_ok", lambda ctx, basis: False)
    code, out, _ = run(capsys, "verify", "--group", "2:[2]")
    assert code == 1
    failed = [c["name"] for c in json.loads(out)["checks"] if not c["ok"]]
    assert failed == ["signature_kernel"]


def test_sweep_small(capsys):
    code, out, _ = run(capsys, "sweep", "--prime", "3", "--max-order", "9", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and [r[0] for r in rows[1:]] == ["3:[]", "3:[1]", "3:[2]", "3:[1,1]"]
    assert rows[-1][5] == "9" and rows[-1][7] == "3^3"
    code, out, _ = run(capsys, "sweep", "--prime", "2", "--max-order", "8")
    data = json.loads(out)
    assert data["groups"] == 1 + 1 + 2 + 3 and data["all_ok"]


def test_decompose(capsys, tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text("{}")
    code, out, _ = run(capsys, "decompose", "--group", "2:[1,1]", "--element", str(zero))
    assert code == 0 and json.loads(out)["terms"] == []
    e1 = tmp_path / "e1.json"
    e1.write_text('{"0": 1}')
    code, _, err = run(capsys, "decompose", "--group", "2:[1,1]", "--element", str(e1))
    assert code == 1 and "not a relation" in err
    code, _, _ = run(capsys, "decompose", "--group", "2:[1,1]", "--element", str(tmp_path / "missing.json"))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"999": 1}')
    assert run(capsys, "decompose", "--group", "2:[1,1]", "--element", str(bad))[0] == 2


def test_decompose_kernel_row(capsys, tmp_path):
    code, out, _ = run(capsys, "kernel", "--group", "2:[2,1]", "--relative", "--format", "json")
    row = json.loads(out)["basis"][0]
    src = tmp_path / "row.json"
    src.write_text(json.dumps({str(i): x for i, x in enumerate(row) if x}))
    code, out, _ = run(capsys, "decompose", "--group", "2:[2,1]", "--element", str(src))
    cert = json.loads(out)
    assert code == 0
    total = {}
    for t in cert["terms"]:
        for i, x in t["element"].items():
            total[int(i)] = total.get(int(i), 0) + t["coefficient"] * x
    assert [total.get(i, 0) for i in range(len(row))] == row
    code, out, _ = run(capsys, "decompose", "--group", "2:[2,1]", "--element", str(src), "--format", "pretty")
    assert code == 0 and out.startswith("target:")


def test_missing_certificate_exit_3(capsys, tmp_path, monkeypatch):
    def boom(G, x):
        raise NoCertificate("no certificate", {"group": str(G)})

    monkeypatch.setattr(cli, "decompose_relation", boom)
    zero = tmp_path / "zero.json"
    zero.write_text("{}")
    code, out, _ = run(capsys, "decompose", "--group", "2:[1,1]", "--element", str(zero))
    assert code == 3 and json.loads(out)["diagnostics"] == {"group": "2:[1,1]"}


def test_example_kahn(capsys):
    code, out, _ = run(capsys, "example-kahn")
    report = json.loads(out)
    assert code == 0 and len(report["labels"]) == 16 and all(c["ok"] for c in report["checks"])
    code, out, _ = run(capsys, "example-kahn", "--format", "pretty")
    assert code == 0 and "E15 = e1 − e4 − e6 − e7 + 2e15" in out


def test_output_is_deterministic(capsys):
    first = run(capsys, "verify", "--group", "3:[1,1]")[1]
    second = run(capsys, "verify", "--group", "3:[1,1]")[1]
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relbrauer", "kernel", "--group", "2:[1,1]", "--relative"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["rank"] == 4
