import json
import subprocess
import sys

import pytest

from fkriesz.harness import REGISTRY, ConfigError, load, run, run_experiment
from fkriesz.harness import cli
from fkriesz.harness.report import NOT_EVALUATED, Report, csv_bytes, emit, plot_bytes


def test_registry_covers_claims():
    assert len(REGISTRY) == 13
    covered = sorted({c for e in REGISTRY.values() for c in e.criteria})
    assert covered == list(range(1, 13))
    for eid, exp in REGISTRY.items():
        cfg = load({"experiment": eid})
        assert cfg.experiment == eid and callable(exp.run)


@pytest.mark.parametrize("cfg,path", [
    ({"experiment": "nope"}, "experiment"),
    ({"experiment": "l2-contraction", "colour": 1}, "colour"),
    ({"experiment": "l2-contraction", "potential": {"kind": "constant", "c": 1}}, "potential"),
    ({"experiment": "linf-witness-power", "potential": {"kind": "power", "alpha": -1}}, "potential[0].params.alpha"),
    ({"experiment": "linf-witness-power", "mc": {"n_paths": 0}}, "mc.n_paths"),
    ({"experiment": "linf-witness-power", "mc": {"speed": 1}}, "mc.speed"),
    ({"experiment": "linf-witness-power", "quadrature": {"tail_rel": 2.0}}, "quadrature.tail_rel"),
    ({"experiment": "mehler-crosscheck", "params": {"gamma": "one"}}, "params.gamma"),
])
def test_config_errors_name_the_key(cfg, path):
    with pytest.raises(ConfigError) as exc:
        load(cfg)
    assert exc.value.path == path


def test_yaml_text_and_file(tmp_path):
    text = "experiment: l2-contraction\nparams:\n  n: 500\n"
    assert load(text).params["n"] == 500
    f = tmp_path / "c.yaml"
    f.write_text(text)
    assert load(str(f)).params["n"] == 500
    with pytest.raises(ConfigError):
        load("experiment: [unclosed")


def test_grid_points():
    cfg = load({"experiment": "linf-witness-power", "x_grid": {"max_norm": 4.0, "count_1d": 5, "count_radial": 3}})
    assert [p.tolist() for p in cfg.points(1)] == [[-4.0], [-2.0], [0.0], [2.0], [4.0]]
    assert [p.tolist() for p in cfg.points(2)] == [[0.0, 0.0], [2.0, 0.0], [4.0, 0.0]]


def test_csv_quoting_and_line_endings():
    data = csv_bytes(["name", "value"], [["a,b", 0.1], ['q"x', True], [None, 3]])
    assert data == b'name,value\r\n"a,b",0.1\r\n"q""x",true\r\n,3\r\n'
    assert plot_bytes("t", "m", [0.5], [1e-300]) == b"# t m\n0.5 1e-300\n"


def test_empty_report_is_valid(tmp_path):
    rep = Report("x", [1], {"seed": 0})
    assert rep.status == NOT_EVALUATED and rep.exit_code == 2
    path = emit(rep, tmp_path)
    doc = json.loads(path.read_text())
    assert doc["verdicts"] == [] and doc["manifest"] == []


def test_emit_manifest_and_nonfinite_numbers(tmp_path):
    import hashlib
    rep = Report("x", [1], {"seed": 0})
    rep.verdict("c", "r", True, value=float("inf"))
    rep.table("t", ["a"], [[1.0]])
    rep.plot("p", "x", "y", [0.0, 1.0], [1.0, 2.0])
    path = emit(rep, tmp_path)
    doc = json.loads(path.read_text())
    assert doc["verdicts"][0]["numbers"]["value"] == "inf"
    for m in doc["manifest"]:
        assert hashlib.sha256((tmp_path / m["path"]).read_bytes()).hexdigest() == m["sha256"]
    assert {m["path"] for m in doc["manifest"]} == {"tables/t.csv", "plots/p.dat"}


def test_budget_gives_not_evaluated():
    rep = run_experiment(load({"experiment": "mehler-crosscheck", "mc": {"budget_normals": 1.0}}))
    assert rep.status == NOT_EVALUATED and rep.exit_code == 2
    assert any(v.status == NOT_EVALUATED for v in rep.verdicts)
    # deterministic kernel checks still run
    assert any(v.status == "pass" for v in rep.verdicts)


def test_run_writes_report(tmp_path):
    rep = run({"experiment": "l2-contraction", "params": {"n": 400}}, tmp_path)
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["status"] == rep.status == "pass"
    assert doc["environment"]["seed"] == 0


def test_cli_list_and_validate(tmp_path, capsys):
    assert cli.main(["list-experiments"]) == 0
    out = capsys.readouterr().out
    assert all(eid in out for eid in REGISTRY)
    good = tmp_path / "g.yaml"
    good.write_text("experiment: geometry-profiles\n")
    assert cli.main(["validate", "--config", str(good)]) == 0
    bad = tmp_path / "b.yaml"
    bad.write_text("experiment: linf-witness-power\npotential: {kind: power, alpha: 0}\n")
    out_dir = tmp_path / "out"
    assert cli.main(["run", "--config", str(bad), "--out", str(out_dir)]) == 64
    assert not out_dir.exists()
    assert cli.main(["run", "--config", str(good)]) == 64
    assert cli.main(["validate", "--config", str(tmp_path / "missing.yaml")]) == 64


def test_cli_run_exit_code(tmp_path):
    cfgf = tmp_path / "c.yaml"
    cfgf.write_text(f"experiment: l2-contraction\nparams: {{n: 400}}\noutput: {tmp_path / 'o'}\n")
    r = subprocess.run([sys.executable, "-m", "fkriesz.harness.cli", "run", "--config", str(cfgf)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "[pass]" in r.stdout
    assert (tmp_path / "o" / "report.json").exists()


def test_yaml_reads_exponent_floats():
    cfg = load("experiment: linf-witness-power\nmc: {dt: 1e-3, budget_normals: 5e9}\n")
    assert cfg.mc["dt"] == 1e-3 and cfg.mc["budget_normals"] == 5e9
