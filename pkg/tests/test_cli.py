import csv
import io
import json

import pytest

from contactroll import cli
from contactroll import suite as S
from contactroll.errors import ConfigError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("text,val", [("0.6", 0.6), ("0.5i", 0.5j), ("1-2i", 1 - 2j), ("i", 1j), ("-i", -1j), ("2+i", 2 + 1j)])
def test_parse_complex(text, val):
    assert S.parse_complex(text) == val


def test_parse_errors():
    with pytest.raises(ConfigError):
        S.parse_complex("abc")
    with pytest.raises(ConfigError):
        S.parse_grid("3x0x2")


def test_tolerance_lookup():
    assert S.tolerance_for("P1.interp") == 1e-10
    assert S.tolerance_for("P1.c1^3") == 1e-7
    assert S.tolerance_for("R1.5", {"R1": 1e-3}) == 1e-3


def test_report_keystone(capsys):
    code, out, _ = run(capsys, "report", "--grid", "2x2x2", "--checks", "eq4,eq5,eq6,R1")
    assert code == 0
    d = json.loads(out)
    assert set(d) == {"config_echo", "records", "summary"}
    keys = [(r["check_id"], r["point"]) for r in d["records"]]
    assert keys == sorted(keys)
    assert d["summary"]["passed"] == d["summary"]["total"]


def test_report_perturbed_fails(capsys):
    code, _, _ = run(capsys, "report", "--grid", "2x2x1", "--checks", "eq4", "--perturb", "1e-2")
    assert code == 1


def test_report_bad_input(capsys, tmp_path):
    code, _, err = run(capsys, "report", "--grid", "2x2")
    assert code == 2 and "grid" in err
    bad = tmp_path / "c.json"
    bad.write_text('{"scenario": "pseudosphere", "colour": 1}')
    code, _, err = run(capsys, "report", "--config", str(bad))
    assert code == 2 and "colour" in err
    code, _, _ = run(capsys, "report", "--checks", "eq9")
    assert code == 2


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": "sphere", "sigma": "0.5i", "grid": "2x1x1", "checks": ["eq4"]}))
    code, out, _ = run(capsys, "report", "--config", str(cfg), "--grid", "1x1x2")
    d = json.loads(out)
    assert code == 0
    assert d["config_echo"]["sigma"] == "0.5i"
    assert d["config_echo"]["grid"] == "1x1x2"


def test_report_is_deterministic_across_pool_sizes(capsys, monkeypatch):
    args = ("report", "--grid", "2x1x2", "--checks", "eq7,tiom")
    _, a, _ = run(capsys, *args)
    monkeypatch.setenv("CONTACTROLL_THREADS", "2")
    _, b, _ = run(capsys, *args)
    assert a == b


def test_identity_deterministic(capsys):
    code, a, _ = run(capsys, "identity", "--samples", "200", "--no-correspondence")
    _, b, _ = run(capsys, "identity", "--samples", "200", "--no-correspondence")
    assert code == 0 and a == b


def test_poly(capsys):
    code, out, _ = run(capsys, "poly", "--point", "0.8,1.1,0.4", "--which", "p2")
    d = json.loads(out)
    assert code == 0
    assert len(d["P1"]) == 15 and len(d["P2"]) == 15
    assert any(r["check_id"] == "P1.master.c2^2" for r in d["records"])


def test_leaf_csv(capsys, tmp_path):
    path = tmp_path / "leaf.csv"
    code, out, _ = run(capsys, "leaf", "--w0", "4.0", "--grid", "5x5", "--bounds", "0.8:1.0,-0.1:0.1", "--out", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["u", "v", "w", "Re(x)", "Im(x)", "Re(y)", "Im(y)", "Re(z)", "Im(z)"]
    assert len(rows) == 26
    assert json.loads(out)["path_gap"] < 1e-8


def test_grid_rolling_csv(capsys):
    code, out, _ = run(capsys, "grid", "--check", "eq2.flat", "--pair", "catenoid_helicoid", "--grid", "3x4")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["u", "v", "rel"] and len(rows) == 13


def test_grid_contact_csv(capsys):
    code, out, _ = run(capsys, "grid", "--check", "eq5.pawV", "--grid", "2x2x1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["u", "v", "w", "rel"] and len(rows) == 5


def test_grid_unknown_check(capsys):
    code, _, _ = run(capsys, "grid", "--check", "eq2.flat", "--grid", "2x2x1")
    assert code == 2
