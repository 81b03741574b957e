import csv
import io
import json
from fractions import Fraction as F

import pytest

from starcdc.cli import main
from starcdc.geometry import convex_envelope_curves
from starcdc.wire import parse_rational


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_toy(capsys):
    code, out, _ = run(capsys, "run", "--K", "3", "--N", "6", "--V", "2", "--i", "2")
    rec = json.loads(out)
    assert code == 0
    assert [parse_rational(rec[k]) for k in "rcLD"] == [2, F(4, 3), F(1, 6), F(1, 9)]
    assert rec["verdict"] == "pass" and rec["closed_form"] == "pass"


def test_run_full_storage(capsys):
    code, out, _ = run(capsys, "run", "--K", "4", "--N", "1", "--i", "4", "--format", "csv")
    (row,) = rows(out)
    assert code == 0 and (row["r"], row["c"], row["L"], row["D"]) == ("4/1", "1/1", "0/1", "0/1")


def test_run_validation_suggests_n(capsys):
    code, _, err = run(capsys, "run", "--K", "5", "--N", "5", "--i", "2")
    assert code == 2
    assert "C(5,2)=10 must divide N=5" in err and "smallest feasible N is 10" in err


def test_run_lists_every_problem(capsys):
    code, _, err = run(capsys, "run", "--K", "5", "--N", "5", "--V", "3", "--i", "2")
    assert code == 2 and "N is 10" in err and "V is 4" in err


def test_run_mixture_and_forwarding(capsys):
    code, out, err = run(capsys, "run", "--K", "4", "--i", "2", "--mode", "mixture", "--theta", "1/2,1/4,1/4", "--explain")
    assert code == 0 and "N defaulted" in err
    assert json.loads(out)["N"] == 24
    code, out, _ = run(capsys, "run", "--K", "4", "--i", "2", "--mode", "forwarding")
    rec = json.loads(out)
    assert code == 0 and rec["L"] == rec["D"] == "1/4"


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 3, "N": 6, "V": 2, "i": 1, "seed": 4}))
    code, out, _ = run(capsys, "run", "--config", str(cfg), "--i", "2")
    rec = json.loads(out)
    assert code == 0 and rec["i"] == 2 and rec["seed"] == 4 and rec["D"] == "1/9"


def test_output_env_dir_and_trace(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("STARCDC_OUTPUT_DIR", str(tmp_path))
    tr = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "run", "--K", "3", "--i", "2", "--trace", str(tr))
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "run.json").read_text())["L"] == "1/6"
    assert len(tr.read_text().splitlines()) == 4


def test_surface_k10(capsys):
    code, out, _ = run(capsys, "surface", "--K", "10", "--resolution", "10")
    data = rows(out)
    assert code == 0
    exact = {(r["r_exact"], r["c_exact"]): (r["L_star_exact"], r["D_star_exact"]) for r in data}
    assert exact[("3/1", "12/5")] == ("7/30", "7/40")
    up, down = convex_envelope_curves(10)
    for r in data:
        L, D = parse_rational(r["L_star_exact"]), parse_rational(r["D_star_exact"])
        assert D <= L
        if r["r_exact"] == r["c_exact"]:
            x = parse_rational(r["r_exact"])
            assert (L, D) == (up(x), down(x))


def test_surface_rejects_small_resolution(capsys):
    assert run(capsys, "surface", "--K", "3", "--resolution", "1")[0] == 2


def test_pareto_dump(capsys):
    code, out, _ = run(capsys, "pareto", "--K", "3")
    data = rows(out)
    assert code == 0 and len(data) == 6
    p2 = next(r for r in data if r["point"] == "P" and r["i"] == "2")
    assert (p2["r"], p2["c"], p2["L"], p2["D"]) == ("2/1", "4/3", "1/6", "1/9")


def test_bounds_command(capsys):
    code, out, _ = run(capsys, "bounds", "--K", "3", "--r", "2", "--c", "4/3")
    data = {r["space"]: r for r in rows(out)}
    assert code == 0 and data["downlink"]["bound"] == "1/9" and data["uplink"]["bound"] == "1/6"
    assert run(capsys, "bounds", "--K", "3", "--r", "1", "--c", "2")[0] == 2


def test_verify_small(capsys):
    code, out, err = run(capsys, "verify", "--k-max", "3")
    data = rows(out)
    assert code == 0
    assert [(r["K"], r["i"]) for r in data] == [("2", "1"), ("3", "1"), ("3", "2")]
    assert all(r["status"] == "pass" for r in data)


@pytest.mark.parametrize("kmax", ["1", "9"])
def test_verify_range(capsys, kmax):
    assert run(capsys, "verify", "--k-max", kmax)[0] == 2
