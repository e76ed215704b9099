import csv
import io
import json
import subprocess
import sys

import pytest

from stepchev.cli import COLUMNS, main, parse_degree_range


@pytest.fixture
def pair(tmp_path):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"intervals": [[-1.25, -1], [1, 1.25]], "values": [-1, 1]}))
    return str(p)


@pytest.fixture
def triple(tmp_path):
    p = tmp_path / "triple.json"
    p.write_text(json.dumps({"intervals": [[-1, -0.5], [-0.1, 0.3], [0.7, 1]], "values": [1, -1, 1]}))
    return str(p)


@pytest.fixture
def values(tmp_path):
    p = tmp_path / "vs.json"
    p.write_text(json.dumps({"value_set": [-1, 1], "delta": 0.1}))
    return str(p)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_degree_range():
    assert parse_degree_range("2:8:3") == [2, 5, 8]
    assert parse_degree_range("4:4") == [4]
    for bad in ("5:2", "1:2:0", "a:b", "3"):
        with pytest.raises(Exception):
            parse_degree_range(bad)


def test_stats(pair, values, capsys):
    assert main(["stats", "--input", pair]) == 0
    assert capsys.readouterr().out.strip() == "s=2 delta=0.125 sigma=2 D=2.5"
    assert main(["stats", "--input", values]) == 0
    out = capsys.readouterr().out
    assert "sigma_hat=2 D_hat=2" in out


def test_sweep_sandwich(pair, capsys):
    assert main(["sweep", "--input", pair, "--degree-range", "2:20"]) == 0
    table = rows(capsys.readouterr().out)
    assert list(table[0].keys()) == COLUMNS
    checked = 0
    for r in table:
        assert "VIOLATION" not in r["method"]
        if r["measured_error"] and r["certificate"]:
            assert float(r["measured_error"]) <= float(r["certificate"]) + 1e-12
        if r["method"] == "bernstein":
            assert float(r["oracle_error"]) <= float(r["measured_error"])
            checked += 1
    assert checked == 19


def test_sweep_deterministic(pair, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sweep", "--input", pair, "--degree-range", "3:9:3", "--out", str(a)])
    main(["sweep", "--input", pair, "--degree-range", "3:9:3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_eps_command(values, capsys):
    assert main(["eps", "--input", values, "--degree", "6"]) == 0
    table = rows(capsys.readouterr().out)
    best = [r for r in table if r["method"].startswith("min:")]
    assert best[0]["method"] == "min:eps_two"
    assert float(best[0]["certificate"]) == pytest.approx(0.0722526630468835, rel=1e-14)


def test_bernstein_json(pair, capsys):
    assert main(["bernstein", "--input", pair, "--degree", "10", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out[0]["method"] == "bernstein" and out[0]["polynomial"]["coeffs"]
    assert out[0]["measured_error"] <= out[0]["certificate"]


def test_seventeen_digits(pair, capsys):
    main(["bernstein", "--input", pair, "--degree", "20"])
    r = rows(capsys.readouterr().out)[0]
    assert r["certificate"] == "%.17g" % float(r["certificate"])
    assert len(r["certificate"].replace(".", "").split("e")[0].lstrip("0")) >= 15


def test_newton_and_pipeline(triple, capsys):
    assert main(["newton", "--input", triple, "--degree-range", "2:11:3"]) == 0
    assert len(rows(capsys.readouterr().out)) == 4
    assert main(["pipeline", "--input", triple, "--m", "3"]) == 0
    r = rows(capsys.readouterr().out)[0]
    assert r["m"] == "3" and r["degree"] == "93"


def test_oracle_bounded(pair, capsys):
    assert main(["oracle", "--input", pair, "--degree", "1", "--bounded"]) == 0
    r = rows(capsys.readouterr().out)[0]
    assert r["method"] == "oracle_bounded"
    assert float(r["oracle_error"]) == pytest.approx(0.2, rel=1e-6)


def test_exit_codes(tmp_path, pair, values, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"intervals": [[0, 1], [0.5, 2]], "values": [1, 2]}))
    assert main(["stats", "--input", str(bad)]) == 2
    assert main(["stats", "--input", str(tmp_path / "missing.json")]) == 2
    flipped = tmp_path / "flipped.json"
    flipped.write_text(json.dumps({"intervals": [[1, 0]], "values": [1]}))
    assert main(["stats", "--input", str(flipped)]) == 2
    assert main(["bernstein", "--input", pair]) == 3
    assert main(["eps", "--input", pair, "--degree", "3"]) == 3
    assert main(["bernstein", "--input", values, "--degree", "3"]) == 3
    with pytest.raises(SystemExit) as err:
        main(["sweep", "--input", pair, "--degree-range", "9:2"])
    assert err.value.code == 2


def test_construction_failure_exit(tmp_path, capsys):
    p = tmp_path / "narrow.json"
    # sigma/D tiny: base degree 4 pi / sigma times a 100-fold amplifier overflows the cap
    p.write_text(json.dumps({"intervals": [[-1, -0.001], [0.001, 1]], "values": [-1, 1]}))
    assert main(["pipeline", "--input", str(p), "--m", "100"]) == 4


def test_violation_flag(monkeypatch, pair, capsys):
    from stepchev import cli

    monkeypatch.setattr(cli, "SLACK", -1.0)
    assert main(["bernstein", "--input", pair, "--degree", "4"]) == 5
    assert rows(capsys.readouterr().out)[0]["method"] == "bernstein:VIOLATION"


def test_console_entry_point(pair):
    out = subprocess.run(
        [sys.executable, "-m", "stepchev.cli", "stats", "--input", pair],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.startswith("s=2 delta=0.125")
