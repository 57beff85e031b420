import csv
import json

import pytest
from click.testing import CliRunner

from caustics.cli import main
from caustics.net import sample_confocal_central

CONFOCAL = "confocal_elliptic:a=2,b=1"


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, code=0):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == code, result.output
    return result


def test_metric_eval(runner):
    result = invoke(runner, ["metric", "eval", "--chart", CONFOCAL,
                             "--point", "0.4,-1.5"])
    data = json.loads(result.output)
    assert data["g12"] == 0.0
    assert data["g11"] == pytest.approx(
        (0.4 + 1.5) / (4 * 2.4 * 1.4), rel=1e-12)


def test_metric_eval_bad_chart_exits_2(runner):
    result = runner.invoke(main, ["metric", "eval", "--chart", "nope",
                                  "--point", "0,0"])
    assert result.exit_code == 2


def test_geodesic_connect(runner):
    result = invoke(runner, ["geodesic", "connect", "--chart", CONFOCAL,
                             "--from", "0.2,-1.6", "--to", "0.5,-1.3"])
    data = json.loads(result.output)
    assert data["length"] == pytest.approx(0.42384586012029846, rel=1e-9)


def test_geodesic_shoot_csv(runner):
    result = invoke(runner, ["geodesic", "shoot", "--chart",
                             "euclidean_cartesian", "--point", "0,0",
                             "--direction", "1,0", "--length", "1",
                             "--samples", "3"])
    lines = result.output.strip().splitlines()
    assert lines[0] == "s,u,v,du,dv"
    assert len(lines) == 4


def test_billiard_orbit_deterministic(runner):
    args = ["billiard", "orbit", "--chart", "euclidean_cartesian",
            "--table", "circle:radius=1", "--p0", "0.5", "-n", "5"]
    out1 = invoke(runner, args).output
    out2 = invoke(runner, args).output
    assert out1 == out2
    rows = [line.split(",") for line in out1.strip().splitlines()[1:]]
    assert all(abs(float(r[2]) - 0.5) < 1e-9 for r in rows)


def test_phase_portrait(runner, tmp_path):
    out = tmp_path / "portrait.csv"
    invoke(runner, ["billiard", "phase-portrait", "--chart",
                    "euclidean_cartesian", "--table",
                    "ellipse:semi_axes=[2,1]", "--orbits", "3",
                    "-n", "10", "--out", str(out)])
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["orbit"] for r in rows} == {"0", "1", "2"}
    assert all(r["error"] == "" for r in rows)


def test_poncelet_not_found_exits_1(runner):
    result = runner.invoke(main, [
        "billiard", "poncelet", "--chart", "euclidean_cartesian",
        "--table", "ellipse:semi_axes=[2,1]",
        "--caustic", "confocal_ellipse:a=4,b=1,lam=-0.5", "-n", "3"])
    assert result.exit_code == 1


def test_string_diffeo(runner):
    result = invoke(runner, ["string", "diffeo", "--chart",
                             "euclidean_cartesian", "--caustic",
                             "circle:radius=1", "-p", "0.01",
                             "--a-param", "0.1"])
    data = json.loads(result.output)
    assert data["excess"] == pytest.approx(0.01, abs=1e-9)
    assert data["B_param"] > 0.1


def test_net_ivory_pass_and_fail(runner):
    result = invoke(runner, ["net", "ivory", "--chart", CONFOCAL,
                             "--quad", "0.2,0.6,-1.6,-1.3"])
    assert json.loads(result.output)["passed"] is True
    result = runner.invoke(main, ["net", "ivory", "--chart", "control",
                                  "--quad", "0.3,0.9,0.2,0.7"])
    assert result.exit_code == 1
    assert json.loads(result.output)["passed"] is False


def test_net_classify(runner, tmp_path):
    net = sample_confocal_central(2.0, 1.0)
    path = tmp_path / "net.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "x", "y"])
        for i, u in enumerate(net.u):
            for j, v in enumerate(net.v):
                writer.writerow([u, v, *net.xy[i, j]])
    result = invoke(runner, ["net", "classify", "--in", str(path)])
    data = json.loads(result.output)
    assert data["type"] == "confocal-central"
    assert data["params"]["focal_distance"] == pytest.approx(1.0, abs=1e-6)


def test_suite_run(runner, tmp_path):
    cfg = {"chart": {"builder": "confocal_elliptic",
                     "params": {"a": 2.0, "b": 1.0}},
           "name": "suite-test",
           "params": {"N": 20000, "p_ref": 0.04, "p_list": [0.02, 0.05],
                      "grid": 24, "tol_poritsky": 3e-4,
                      "tol_reconstruction": 3e-3},
           "seed": 7}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = invoke(runner, ["suite", "run", "--config", str(path)])
    report = json.loads(result.output)
    assert report["passed"] is True
    assert [c["check"] for c in report["checks"]] == [
        "graves", "poritsky", "ivory", "reconstruction"]


def test_suite_run_control_fails(runner, tmp_path):
    cfg = {"chart": {"builder": "control", "params": {}}, "seed": 1}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    result = runner.invoke(main, ["suite", "run", "--config", str(path)])
    assert result.exit_code == 1
    report = json.loads(result.output)
    ivory = next(c for c in report["checks"] if c["check"] == "ivory")
    assert ivory["passed"] is False
    assert ivory["residual"] > 1e-4


def test_suite_missing_config_exits_2(runner):
    result = runner.invoke(main, ["suite", "run", "--config", "missing.json"])
    assert result.exit_code == 2
