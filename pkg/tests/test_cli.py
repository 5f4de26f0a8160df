import json

import numpy as np
import pytest
import tomli
import tomli_w

from ssdkit.anchors import SCENARIO_ANCHORS
from ssdkit.cli import main
from ssdkit.errors import ConfigError, UnknownBuiltin
from ssdkit.scenario import bundled_names, bundled_path, describe, load_scenario, run_scenario, scenario_from_text

MINIMAL = """
name = "mini"
space = "pairing(1)"
suites = ["qpos", "distance"]

[[sets]]
id = "diag"
kind = "diagonal"
step = 0.05

[[functions]]
id = "half"
kind = "half-norm-sq"

[grids.probes]
lo = -1.0
hi = 1.0
step = 0.5
"""


def test_bundled_catalog():
    assert set(bundled_names()) == {"remark-5-12", "helix", "line-1-neg1-2", "pairing-diagonal",
                                    "hilbert-self-dual", "product-space", "biconjugation-grid"}


def test_unknown_suite_named():
    with pytest.raises(ConfigError) as e:
        scenario_from_text(MINIMAL.replace('"distance"]', '"foo"]'))
    assert "foo" in str(e.value)
    assert e.value.line == 4


@pytest.mark.parametrize("edit,key", [
    (lambda t: t.replace('step = 0.5', 'step = 0.5\n[tolerances]\nqpos = -1.0'), "qpos"),
    (lambda t: t.replace('suites = ["qpos", "distance"]', 'suites = ["qpos", "distance", "maximality"]'), "grid"),
    (lambda t: t.replace('kind = "half-norm-sq"', 'kind = "cubic"'), "kind"),
    (lambda t: t + '\n[params.bogus]\nx = 1\n', "bogus"),
])
def test_config_errors_name_key(edit, key):
    with pytest.raises(ConfigError) as e:
        scenario_from_text(edit(MINIMAL))
    assert e.value.key == key
    assert e.value.line is not None


def test_parse_error_has_line():
    with pytest.raises(ConfigError) as e:
        scenario_from_text('name = "x"\nspace = \n')
    assert e.value.line == 2


def test_round_trip_through_writer():
    for name in bundled_names():
        text = bundled_path(name).read_text(encoding="utf-8")
        data = tomli.loads(text)
        again = tomli.loads(tomli_w.dumps(data))
        assert again == data
        scenario_from_text(tomli_w.dumps(data))


def test_runner_turns_errors_into_rows():
    text = MINIMAL.replace('kind = "half-norm-sq"', 'kind = "quadratic"\nQ = [[0.0, 0.0], [0.0, 0.0]]')
    rep = run_scenario(scenario_from_text(text))
    row = rep["distance.error"]
    assert row.status == "fail" and "FBelowQ" in row.notes
    assert row.max_violation == float("inf")


def test_non_positive_set_becomes_failed_row():
    text = MINIMAL.replace('kind = "diagonal"\nstep = 0.05', 'kind = "custom"\npoints = [[0.0, 1.0], [1.0, 0.0]]')
    rep = run_scenario(scenario_from_text(text))
    assert rep["qpos.diag"].status == "fail"
    assert rep["distance.error"].status == "fail"


def test_seed_override_and_default():
    assert scenario_from_text(MINIMAL).seed == 42
    assert scenario_from_text(MINIMAL, seed=7).seed == 7


def test_workers_give_same_report():
    sc = load_scenario("hilbert-self-dual")
    a = run_scenario(sc, workers=1).to_json(include_wall_time=False)
    b = run_scenario(sc, workers=4).to_json(include_wall_time=False)
    assert a == b


def test_remark_scenario(capsys):
    assert main(["run", "remark-5-12"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["summary"]["fail"] == 0
    sharp = next(c for c in rep["checks"] if c["name"].endswith("sharpness"))
    assert sharp["data"]["normalized_ratio"] == pytest.approx(1.0, abs=1e-6)
    assert all(c["paper_ref"] for c in rep["checks"])


def test_helix_scenario(capsys, tmp_path):
    out = tmp_path / "helix.json"
    assert main(["run", "helix", "--out", str(out)]) == 1
    rep = json.loads(out.read_text(encoding="utf-8"))
    rows = {c["name"]: c for c in rep["checks"]}
    assert rows["qpos.lam_1"]["status"] == "pass"
    assert rows["qpos.lam_0_5"]["status"] == "fail"
    assert len(rows["qpos.lam_0_5"]["witness"]) == 2
    assert "fail" in capsys.readouterr().out


def test_exit_code_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL.replace('"distance"]', '"foo"]'), encoding="utf-8")
    assert main(["run", str(bad)]) == 2
    assert "foo" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.toml")]) == 2


def test_workers_env(monkeypatch, capsys):
    monkeypatch.setenv("SSDKIT_WORKERS", "many")
    assert main(["run", "helix"]) == 2
    monkeypatch.setenv("SSDKIT_WORKERS", "2")
    assert main(["run", "helix"]) == 1


def test_list_and_describe(capsys):
    assert main(["list"]) == 0
    text = capsys.readouterr().out
    for name in ("r3-swap", "pairing(m)", "diagonal", "helix", "remark-5-12"):
        assert name in text
    assert main(["describe", "remark-5-12"]) == 0
    text = capsys.readouterr().out
    assert all(anchor in text for anchor in SCENARIO_ANCHORS["remark-5-12"])
    assert "helix" in describe("helix")
    assert "pairing" in describe("pairing(3)")
    with pytest.raises(UnknownBuiltin):
        describe("unknown")
    assert main(["describe", "unknown"]) == 2


def test_check_q_positive(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("0,0\n1,1\n2,3\n", encoding="utf-8")
    assert main(["check", "q-positive", "--space", "pairing(1)", "--points", str(pts)]) == 0
    capsys.readouterr()
    pts.write_text("0,1\n1,0\n", encoding="utf-8")
    assert main(["check", "q-positive", "--space", "pairing(1)", "--points", str(pts)]) == 1
    row = json.loads(capsys.readouterr().out)["checks"][0]
    assert row["status"] == "fail" and row["max_violation"] == 1.0
    assert main(["check", "q-positive", "--space", "nope", "--points", str(pts)]) == 2


def test_report_json_is_strict():
    rep = run_scenario(load_scenario("pairing-diagonal"))
    text = rep.to_json()
    json.loads(text)  # no NaN or Infinity literals
    assert "NaN" not in text and "Infinity" not in text
    keys = set(json.loads(text))
    assert keys == {"scenario", "seed", "checks", "summary", "meta", "wall_time"}
    assert all(k == k.lower() for k in keys)
