import json

import numpy as np
import pytest

from beambvp.cli import main
from beambvp.config import config_from_dict, load_config
from beambvp.errors import ConfigError
from beambvp.examples import fixture_path
from beambvp.kernel import DEFAULT_THETA, compute_k


def _base_config():
    return {
        "f": "t + abs(cos(u))",
        "alpha": 0.1,
        "beta": [0.05, 0.02],
        "eta": [0.25, 0.75],
    }


def test_config_roundtrip():
    data = _base_config()
    data.update({
        "theta": 0.2,
        "limits": {"f0": "inf", "fsupinf": "zero"},
        "solver": {"grid_n": 201, "tol": 1e-9, "max_iter": 50,
                   "damping": 0.5, "method": "picard", "seeds": [0.1, 1]},
    })
    cfg = config_from_dict(data)
    assert cfg.problem.alpha == 0.1
    assert cfg.problem.betas == (0.05, 0.02)
    assert cfg.problem.etas == (0.25, 0.75)
    assert cfg.theta == 0.2
    assert cfg.limits == {"f0": "inf", "fsupinf": "zero"}
    assert cfg.solver.grid_n == 201
    assert cfg.solver.method == "picard"
    assert cfg.solver.seeds == (0.1, 1.0)
    assert cfg.raw is data


def test_config_defaults():
    cfg = config_from_dict(_base_config())
    assert cfg.theta == DEFAULT_THETA
    assert cfg.limits == {}
    assert cfg.solver.grid_n == 401
    assert cfg.solver.method == "newton"
    assert cfg.solver.seeds is None


def _mutated(**changes):
    data = _base_config()
    data.update(changes)
    for key, value in list(changes.items()):
        if value is None:
            del data[key]
    return data


@pytest.mark.parametrize("data,needle", [
    (_mutated(gamma=1.0), "unknown key"),
    (_mutated(f=None), "missing required key"),
    (_mutated(f=3), "must be a string"),
    (_mutated(f="2 +"), "does not parse"),
    (_mutated(alpha="big"), "must be a number"),
    (_mutated(beta=0.5), "list of numbers"),
    (_mutated(beta=[0.05, True]), "must be a number"),
    (_mutated(beta=[0.05]), "equal length"),
    (_mutated(eta=[0.25, 1.5]), "(C2)"),
    (_mutated(alpha=0.9, beta=[0.2, 0.2]), "(C3)"),
    (_mutated(theta=0.5), "must lie in (0, 1/2)"),
    (_mutated(theta=True), "must be a number"),
    (_mutated(limits=["f0"]), "must be an object"),
    (_mutated(limits={"f9": "zero"}), "unknown limits key"),
    (_mutated(limits={"f0": "infinite"}), "must be one of"),
    (_mutated(solver={"style": "fast"}), "unknown solver key"),
    (_mutated(solver={"method": "broyden"}), "picard"),
    (_mutated(solver={"grid_n": 200.5}), "must be an integer"),
    (_mutated(solver={"grid_n": 200}), "invalid solver settings"),
    (_mutated(solver={"seeds": []}), "nonempty list"),
    ("not a dict", "JSON object"),
])
def test_config_rejections(data, needle):
    with pytest.raises(ConfigError) as info:
        config_from_dict(data)
    assert needle in str(info.value)


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "nope.json")
    assert "cannot read" in str(info.value)

    bad = tmp_path / "bad.json"
    bad.write_text('{"f": "u", ')
    with pytest.raises(ConfigError) as info:
        load_config(bad)
    assert "byte offset" in str(info.value)


@pytest.mark.parametrize("name,k", [
    ("ex51.json", 5.0 / 21.0), ("ex52.json", 0.5),
    ("ex53.json", 15.0 / 16.0), ("ex54.json", 17.0 / 20.0),
    ("zero.json", 17.0 / 20.0),
])
def test_bundled_fixtures_load(name, k):
    cfg = load_config(fixture_path(name))
    assert compute_k(cfg.problem) == pytest.approx(k, abs=1e-15)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve_writes_csv_and_report(tmp_path, capsys):
    out_csv = tmp_path / "sol.csv"
    code, out, _ = _run(capsys, [
        "solve", "--config", fixture_path("ex51.json"),
        "--method", "picard", "--out", str(out_csv)])
    assert code == 0
    payload = json.loads(out)
    assert payload["method"] == "picard"
    assert payload["cone"] == "holds"
    assert payload["iterations"] > 0
    assert payload["residual"] < 1e-10
    assert payload["csv"] == str(out_csv)
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "t,u"
    assert len(lines) == 402
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1)
    assert data.shape == (401, 2)
    assert abs(np.max(data[:, 1]) - payload["sup_norm"]) < 1e-15

    # a second run must reproduce the file bit for bit
    twin = tmp_path / "twin.csv"
    code, _, _ = _run(capsys, [
        "solve", "--config", fixture_path("ex51.json"),
        "--method", "picard", "--out", str(twin)])
    assert code == 0
    assert twin.read_bytes() == out_csv.read_bytes()


def test_cli_solve_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "heavy.json"
    path.write_text(json.dumps(_mutated(alpha=0.9, beta=[0.2, 0.2])))
    code, _, err = _run(capsys, ["solve", "--config", str(path)])
    assert code == 1
    assert "(C3)" in err


def test_cli_solve_reports_solver_failure(capsys):
    code, _, err = _run(capsys, [
        "solve", "--config", fixture_path("ex52.json"),
        "--method", "picard", "--seed-const", "4.0"])
    assert code == 2
    assert "solver failed" in err


def test_cli_check_unknown_hypothesis(capsys):
    code, _, err = _run(capsys, [
        "check", "--config", fixture_path("ex51.json"), "--hypothesis", "H9"])
    assert code == 1
    assert "unknown hypothesis" in err


def test_cli_check_verdicts(capsys):
    code, out, _ = _run(capsys, [
        "check", "--config", fixture_path("ex51.json"), "--hypothesis", "H1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["condition"] == "H1"
    assert payload["verdict"] == "holds"

    code, out, _ = _run(capsys, [
        "check", "--config", fixture_path("ex51.json"),
        "--hypothesis", "H1,H2"])
    assert code == 1
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["verdict"] == "fails"


def test_cli_check_radius_conditions(capsys):
    code, out, _ = _run(capsys, [
        "check", "--config", fixture_path("ex53.json"),
        "--hypothesis", "H4", "--rho", "1.0", "--M", "5.625"])
    assert code == 0
    assert json.loads(out)["verdict"] == "holds"

    code, out, _ = _run(capsys, [
        "check", "--config", fixture_path("ex54.json"),
        "--hypothesis", "H6", "--rho", "1.0"])
    assert code == 0
    assert json.loads(out)["verdict"] == "holds"


def test_cli_constants(capsys):
    code, out, _ = _run(capsys, [
        "constants", "--config", fixture_path("ex53.json")])
    assert code == 0
    payload = json.loads(out)
    assert payload["k"] == pytest.approx(0.9375, abs=1e-15)
    assert payload["lambda1"] == pytest.approx(5.625, abs=1e-12)
    assert payload["lambda2"] == pytest.approx(1.0 / payload["psi"], rel=1e-12)

    code, _, err = _run(capsys, [
        "constants", "--config", fixture_path("ex53.json"), "--theta", "0.7"])
    assert code == 1
    assert "theta" in err


def test_cli_multi_without_solutions(tmp_path, capsys):
    code, out, _ = _run(capsys, [
        "multi", "--config", fixture_path("zero.json"), "--out", str(tmp_path)])
    assert code == 0
    assert json.loads(out) == []


def test_cli_oracle(capsys):
    code, out, _ = _run(capsys, ["oracle"])
    assert code == 0
    checks = json.loads(out)
    assert len(checks) == 13
    assert all(c["pass"] for c in checks)


def test_cli_examples_smoke(capsys):
    code, out, _ = _run(capsys, ["examples", "--only", "5.2", "--json"])
    assert code == 0
    results = json.loads(out)
    assert results and all(r["passed"] for r in results)
    with pytest.raises(SystemExit):
        main(["examples", "--only", "9.9"])
