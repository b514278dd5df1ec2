import json
from pathlib import Path

import numpy as np
import pytest

from exprgen import random_seminorm
from seminormkit import (AbsLinear, MatrixPrecompose, PNorm, Scale, SpaceDescriptor, SubspaceBoost, Subspace,
                         build_g_kappa, evaluate)
from seminormkit.cli import main
from seminormkit.config import ConfigError, config_from_dict, config_to_dict, expr_to_json, parse_expr

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
R2 = SpaceDescriptor(2)


def _strip(text):
    report = json.loads(text)
    report.pop("wall_time")
    return report


def test_shorthands():
    assert parse_expr("l1", R2) == PNorm(1)
    assert parse_expr("linf", R2) == PNorm(np.inf)
    e = parse_expr("abs(x1 - 2*x2)", R2)
    assert e == AbsLinear([1, -2])
    assert evaluate(e, [3, 1]) == 1


def test_expression_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        e = random_seminorm(rng, 3)
        space = SpaceDescriptor(3)
        assert parse_expr(json.loads(json.dumps(expr_to_json(e))), space) == e
    g = build_g_kappa(PNorm(2), [1, 0], 2, R2)
    assert parse_expr(expr_to_json(g), R2) == g
    boost = SubspaceBoost(Subspace.span(R2, [[1, 0]]), 3, Scale(2, PNorm(1)))
    assert parse_expr(expr_to_json(boost), R2) == boost


def test_complex_scalars_round_trip():
    c2 = SpaceDescriptor(2, field="complex")
    e = MatrixPrecompose([[1, 2j]], PNorm(2))
    back = parse_expr(json.loads(json.dumps(expr_to_json(e))), c2)
    assert back == e


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_config_round_trip(path):
    raw = json.loads(path.read_text())
    cfg = config_from_dict(raw)
    again = config_from_dict(json.loads(json.dumps(config_to_dict(cfg))))
    assert again.functionals == cfg.functionals
    assert [a.params for a in again.analyses] == [a.params for a in cfg.analyses]
    assert again.space == cfg.space


def test_missing_space_names_field(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"functionals": {"a": "l2"}, "analyses": []}))
    assert main([str(p)]) == 1
    assert "space" in capsys.readouterr().err


def test_unknown_functional_reference(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"space": {"dim": 2}, "functionals": {"a": "l2"},
                             "analyses": [{"kind": "Classify", "params": {"functional": "b"}}]}))
    assert main([str(p)]) == 1
    err = capsys.readouterr().err
    assert "analyses[0].params.functional" in err and "'b'" in err


def test_malformed_json_reports_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"space": {"dim": 2},\n  "functionals": }')
    assert main([str(p)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_bad_field_path():
    with pytest.raises(ConfigError) as exc:
        config_from_dict({"space": {"dim": 2}, "functionals": {"a": {"pnorm": "x"}}, "analyses": []})
    assert "functionals.a" in str(exc.value)


def test_unsupported_analysis_exits_1(tmp_path):
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"space": {"dim": 2},
                             "functionals": {"g": {"g_kappa": {"inner": "l2", "a0": [1, 0], "kappa": 2}}},
                             "analyses": [{"kind": "Kernel", "params": {"functional": "g"}}]}))
    out = tmp_path / "r.json"
    assert main([str(p), "--out", str(out), "--quiet"]) == 1
    assert "error" in json.loads(out.read_text())["analyses"][0]


def test_strict_exit_codes(tmp_path):
    out = tmp_path / "r.json"
    bad = str(CONFIGS / "g_kappa_violation.json")
    assert main([bad, "--quiet", "--out", str(out)]) == 0
    assert main([bad, "--quiet", "--strict", "--out", str(out)]) == 2
    assert main([str(CONFIGS / "quotient.json"), "--quiet", "--strict", "--out", str(out)]) == 0


def test_determinism_and_seed_override(tmp_path):
    cfg = str(CONFIGS / "equivalence.json")
    outs = []
    for name, extra in (("a", []), ("b", []), ("c", ["--seed", "7"])):
        p = tmp_path / f"{name}.json"
        assert main([cfg, "--quiet", "--out", str(p)] + extra) == 0
        outs.append(_strip(p.read_text()))
    assert outs[0] == outs[1]
    assert outs[2]["seed"] == 7


def test_trials_override(tmp_path):
    out = tmp_path / "r.json"
    assert main([str(CONFIGS / "quotient.json"), "--quiet", "--trials", "50", "--out", str(out)]) == 0
    audit = json.loads(out.read_text())["analyses"][1]["result"]["audit"]
    assert audit["trials"] == 50
