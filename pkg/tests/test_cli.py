from __future__ import annotations

import json

import pytest
import yaml

from recurbench import cli
from recurbench.config import CAPS, ConfigError, SCHEMA, from_mapping
from recurbench.verdict import Verdict


def write(tmp_path, doc, name="run.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return str(p)


def analyze(capsys, path, *extra):
    code = cli.main(["analyze", "--config", path, *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


ODO = {"system": {"kind": "odometer", "base": 2}, "budget": {"level": 2, "radius": 32, "samples": 3}}
ONE = {"system": {"kind": "one-dot"}, "budget": {"level": 2, "radius": 32, "samples": 3}}


def test_odometer_full_suite_all_true(tmp_path, capsys):
    code, out, _ = analyze(capsys, write(tmp_path, ODO))
    report = json.loads(out)
    assert code == 0 and report["consistency"]["consistent"]
    conds = [v for v in report["verdicts"] if v["condition"].startswith("(")]
    assert len(conds) == 9 and all(v["outcome"] == "true" for v in conds)
    assert {"config", "verdicts", "consistency", "version", "timing"} <= set(report)
    assert all({"condition", "outcome", "exact", "witness", "budget"} <= set(v) for v in report["verdicts"])


def test_one_dot_consistent_false_or_unknown(tmp_path, capsys):
    code, out, _ = analyze(capsys, write(tmp_path, ONE))
    report = json.loads(out)
    assert code == 0 and report["consistency"]["consistent"]
    conds = [v for v in report["verdicts"] if v["condition"].startswith("(")]
    assert all(v["outcome"] in ("false", "unknown") for v in conds)
    assert all(v["witness"] for v in conds if v["outcome"] == "false")


def test_report_is_reproducible(tmp_path, capsys):
    path = write(tmp_path, {**ONE, "seed": 7})
    runs = []
    for _ in range(2):
        _, out, _ = analyze(capsys, path)
        report = json.loads(out)
        report.pop("timing")
        runs.append(json.dumps(report, sort_keys=True))
    assert runs[0] == runs[1]
    _, out, _ = analyze(capsys, path, "--seed", "8")
    assert json.loads(out)["config"]["seed"] == 8


def test_corrupted_analyzer_exits_4(tmp_path, capsys, monkeypatch):
    import recurbench.analyzers.crosscheck as cc
    monkeypatch.setattr(cc, "check_ap", lambda *a, **kw: Verdict.false({"kind": "injected"}, exact=True))
    code, out, _ = analyze(capsys, write(tmp_path, ODO))
    assert code == cli.EXIT_INCONSISTENT
    assert not json.loads(out)["consistency"]["consistent"]


@pytest.mark.parametrize("doc", [
    {"system": {"kind": "hyperbolic"}},
    {"system": {"kind": "odometer", "base": 1}},
    {"system": {"kind": "odometer"}, "budget": {"level": 0}},
    {"system": {"kind": "substitution"}},
    {"system": {"kind": "odometer"}, "battery": {"sequences": ["sideways"]}},
    {"system": {"kind": "odometer"}, "colour": "red"},
])
def test_schema_violations_exit_2(tmp_path, capsys, doc):
    code, _, err = analyze(capsys, write(tmp_path, doc))
    assert code == cli.EXIT_CONFIG and "error" in err


def test_unusable_parameters_exit_2(tmp_path, capsys):
    doc = {"system": {"kind": "substitution", "rules": {"0": "01", "1": "1"}}}
    assert analyze(capsys, write(tmp_path, doc))[0] == cli.EXIT_CONFIG
    assert analyze(capsys, str(tmp_path / "missing.yaml"))[0] == cli.EXIT_CONFIG


def test_resource_caps_exit_3(tmp_path, capsys):
    doc = {"system": {"kind": "odometer"}, "budget": {"radius": CAPS["radius"] + 1}}
    assert analyze(capsys, write(tmp_path, doc))[0] == cli.EXIT_RESOURCE
    doc = {"system": {"kind": "finite-action", "group": {"kind": "Z"}, "points": CAPS["points"] + 1}}
    assert analyze(capsys, write(tmp_path, doc))[0] == cli.EXIT_RESOURCE


def test_finite_action_and_product_configs(tmp_path, capsys):
    doc = {"system": {"kind": "finite-action", "group": {"kind": "free", "rank": 2}, "points": 4,
                      "permutations": [[1, 0, 2, 3], [0, 1, 3, 2]]},
           "analyzers": ["ap", "quotient", "equivalence"], "budget": {"level": 1, "radius": 8}}
    code, out, _ = analyze(capsys, write(tmp_path, doc), "--format", "text")
    assert code == 0 and out.strip().endswith("consistent")
    assert "quotient: true" in out
    doc = {"system": {"kind": "product", "factor": {"kind": "odometer"}},
           "analyzers": ["ap", "equivalence"], "budget": {"level": 1, "radius": 8, "samples": 2}}
    assert analyze(capsys, write(tmp_path, doc))[0] == 0


def test_config_defaults_and_errors():
    cfg = from_mapping({"system": {"kind": "one-dot"}}, seed=3)
    assert cfg.budget.seed == 3 and cfg.analyzers[0] == "ap" and cfg.format == "json"
    with pytest.raises(ConfigError):
        from_mapping({"budget": {}})
    assert SCHEMA["properties"]["system"]["$ref"] == "#/$defs/system"


def test_oracle_command(capsys):
    assert cli.main(["oracle", "ball-count", "Z2", "2"]) == 0
    assert capsys.readouterr().out.strip() == "12"
    assert cli.main(["oracle", "return-scan", "odometer", "3", "32"]) == 0
    assert capsys.readouterr().out.strip() == "0,±8,±16,±24,±32"
    assert cli.main(["oracle", "kset", "Z", "0"]) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit) as info:
        cli.main(["oracle", "bogus"])
    assert info.value.code == 2


def test_catalog_commands(capsys):
    assert cli.main(["catalog", "list"]) == 0
    names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
    assert {"odometer-2", "thue-morse", "one-dot", "finite-F2"} <= set(names)
    assert cli.main(["catalog", "export", "thue-morse", "--lo", "0", "--hi", "7"]) == 0
    assert capsys.readouterr().out.strip() == "01101001"
    assert cli.main(["catalog", "export", "odometer-2"]) == cli.EXIT_CONFIG
    assert cli.main(["catalog", "export", "nothing"]) == cli.EXIT_CONFIG
