import csv
import io
import json
import math

import pytest

from giantwg.errors import ParseError, ValidationError
from giantwg.model import chiral_phase
from giantwg.sweep import emit, parse_config, run_sweep, to_csv, to_json
from giantwg.sweep.cli import main
from giantwg.sweep.runner import worker_count

MINIMAL = "gamma = 1\nU = 0.5\nk_i = 0.2\n"


def test_minimal_config_defaults():
    b = parse_config(MINIMAL)
    assert b.params.U == 0.5 and b.params.phi == 0 and b.params.d == 0
    assert b.drive.k_i == 0.2 and b.drive.omega0 == 0
    assert b.controls.series_rel_tol == 1e-10
    assert b.sweep.target == "single_photon" and b.sweep.observable == "t"


def test_chiral_rule_matches_chiral_phase():
    b = parse_config("phi_rule = chiral\nd = 1.7\nphase_k0d = 0.4\nk_i = 0.3\n")
    assert b.params.phi == pytest.approx(chiral_phase(0.3, b.params))


def test_pi_notation_and_comments():
    b = parse_config("# comment\nphi = 0.015pi   # inline\nphase_k0d : pi/2\n")
    assert b.params.phi == pytest.approx(0.015 * math.pi)
    assert b.params.phase_k0d == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("text,field", [
    ("gamma = -1\n", "gamma"),
    ("axis = k_i 0 1 1\n", "axis"),
    ("axis = nonsense 0 1 3\n", "axis"),
    ("target = plot\n", "target"),
    ("phi_rule = magic\n", "phi_rule"),
    ("target = steady_curve\nobservable = t\n", "observable"),
])
def test_validation_errors(text, field):
    with pytest.raises(ValidationError) as e:
        parse_config(text)
    assert e.value.field == field


@pytest.mark.parametrize("text,line", [("U = 1\nfoo = 2\n", 2), ("U = abc\n", 1), ("U = 1\nU = 2\n", 2),
                                       ("gamma 1\n", 1)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as e:
        parse_config(text)
    assert e.value.line == line


def _sweep_text(extra=""):
    return ("U = 0.3\nphi = 0.4\nd = 1.0\n"
            "axis1 = k_i -1 1 10\naxis2 = phi 0.1 0.5 10\n" + extra)


def test_grid_order_and_csv_shape():
    spec = parse_config(_sweep_text()).sweep
    res = run_sweep(spec, workers=1)
    rows = list(csv.reader(io.StringIO(to_csv(res))))
    assert rows[0] == ["k_i", "phi", "observable", "value_re", "value_im", "flag"]
    assert len(rows) == 101
    assert [float(r[0]) for r in rows[1:11]] == [-1.0] * 10
    assert float(rows[2][1]) > float(rows[1][1])
    assert len({(r[0], r[1]) for r in rows[1:]}) == 100


def test_determinism_and_parallel_equivalence(tmp_path):
    spec = parse_config(_sweep_text()).sweep
    a = emit(run_sweep(spec, workers=1), "csv", path=str(tmp_path / "a.csv"))
    b = emit(run_sweep(spec, workers=3), "csv", path=str(tmp_path / "b.csv"))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert a == b
    ja, jb = to_json(run_sweep(spec, workers=1)), to_json(run_sweep(spec, workers=1))
    assert ja == jb


def test_json_echo_contains_defaults():
    res = run_sweep(parse_config(_sweep_text()).sweep, workers=1)
    doc = json.loads(to_json(res, include_timing=True))
    cfg = doc["metadata"]["config"]
    assert cfg["gamma"] == 1.0 and cfg["series_max_order"] == 2000 and cfg["fock_cutoff"] is None
    assert doc["metadata"]["version"].startswith("giantwg ")
    assert "wall_time_s" in doc["metadata"]
    assert len(doc["records"]) == 100


def test_failures_are_flagged_not_fatal():
    text = "phi = 0\nd = 1\nphase_k0d = pi\naxis = k_i -0.5 0.5 3\n"
    res = run_sweep(parse_config(text).sweep, workers=1)
    assert [r.flag for r in res.records] == ["ok", "singular_green", "ok"]
    rows = to_csv(res).splitlines()
    assert rows[2].endswith(",,,singular_green")


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("GIANTWG_THREADS", "2")
    assert worker_count(100) == 2
    assert worker_count(1) == 1


def test_cli_commands(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("U = 1\nk_i = 10\nphi_rule = chiral\nphase_k0d = pi/2\nd = 0.2pi\n"
                   "fock_cutoff = 30\naxis = omega0 0 2 3\n")
    assert main(["steady", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "omega0,observable,value_re,value_im,flag" and len(out) == 4
    out_file = tmp_path / "gap.json"
    assert main(["gap", "--config", str(cfg), "--out", str(out_file), "--format", "json"]) == 0
    doc = json.loads(out_file.read_text())
    assert doc["records"][0]["value"][0] == pytest.approx(2.0)
    assert main(["reflected", "--config", str(cfg)]) == 0
    assert main(["single", "--config", str(cfg)]) == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("gamma = -2\n")
    assert main(["single", "--config", str(bad)]) == 2
    assert main(["single", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_warns_on_frame_factor(tmp_path, caplog):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("U = 1\nk_i = 10\nphi_rule = chiral\nphase_k0d = pi/2\nd = 0.63\n"
                   "fock_cutoff = 20\nomega0 = 1\n")
    with caplog.at_level("WARNING", logger="giantwg"):
        assert main(["reflected", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 0
    assert any("multiple of 2 pi" in r.message for r in caplog.records)


def test_sweep_command_uses_config_target(tmp_path, capsys):
    cfg = tmp_path / "g2.cfg"
    cfg.write_text("target = g2_map\nU = 0.01\nphi = 0.015pi\nphi_rule = theta_lock\nd = 100\n"
                   "k_i = 0.09\n")
    assert main(["sweep", "--config", str(cfg)]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[0] == "g2" and float(row[1]) == pytest.approx(0.011962051576, rel=1e-8)
