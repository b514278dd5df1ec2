"""Batch front end: read a JSON config, run the analyses, write a JSON report.

Exit codes: 0 when every analysis completed, 1 on config errors or an
analysis that could not run, 2 under ``--strict`` when some verdict is
Fail, Violated or Inconsistent.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Optional

from . import __version__
from .axioms import classify
from .bounds import Method, check_lipschitz, check_majorization, left_equivalence, two_sided_equivalence
from .config import AnalysisConfig, ConfigError, Kind, config_from_dict, parse_matrix, parse_vector, to_jsonable
from .errors import SeminormError, UnsupportedExpression
from .linalg import Subspace
from .pathology import continuity_probe
from .quotient import audit_quotient_norm, audit_well_definedness, kernel_basis

log = logging.getLogger("seminormkit")

_BAD = {"Fail", "Violated", "Inconsistent"}


def _run_one(cfg: AnalysisConfig, kind: Kind, params: dict, seed: int, trials: Optional[int]) -> dict:
    space = cfg.space
    expr = cfg.functionals[params["functional"]]
    n = trials or params.get("trials")
    if kind is Kind.CLASSIFY:
        c = classify(expr, trials=n or 10_000, seed=seed, space=space)
        return {"verdict": c.verdict, "reports": c.reports}
    if kind is Kind.KERNEL:
        k = kernel_basis(expr, space)
        return {"kernel": k, "quotient_dim": k.codim}
    if kind is Kind.QUOTIENT:
        if "kernel" in params:
            kernel = Subspace.span(space, parse_matrix(params["kernel"], "kernel"))
        else:
            kernel = kernel_basis(expr, space)
        audit = audit_well_definedness(expr, kernel, trials=n or 10_000, seed=seed)
        norm = audit_quotient_norm(expr, kernel, trials=n or 10_000, seed=seed)
        return {"kernel": kernel, "audit": audit, "verdict": audit.verdict,
                "quotient_norm": norm, "quotient_norm_verdict": "Pass" if norm.passed else "Fail"}
    if kind is Kind.LIPSCHITZ:
        out = {}
        if expr.is_seminorm_fragment():
            out["majorization"] = check_majorization(expr, trials=n or 100_000, seed=seed, space=space)
        lip = check_lipschitz(expr, trials=n or 100_000, seed=seed, space=space,
                              sequences=params.get("sequences", 16), steps=params.get("steps", 12))
        out["lipschitz"] = lip
        out["verdict"] = lip.verdict
        return out
    if kind is Kind.EQUIVALENCE:
        ref = cfg.functionals[params["reference"]]
        method = params.get("method", "SphereMax")
        if method == "TwoSided":
            eq = two_sided_equivalence(ref, expr, cfg.budget, space, seed)
        else:
            eq = left_equivalence(expr, ref, Method(method), cfg.budget, space, seed)
        return {"constants": eq, "validation": "Pass" if eq.validation_violations == 0 else "Fail"}
    if kind is Kind.PATHOLOGY:
        point = parse_vector(params["point"], "point")
        probe = continuity_probe(expr, point, directions=params.get("directions", 16),
                                 steps=params.get("steps", 8), seed=seed, space=space)
        return {"probe": probe}
    raise AssertionError(kind)


def _has_bad_verdict(result: dict) -> bool:
    return any(isinstance(v, str) and v in _BAD
               for k, v in result.items() if k == "verdict" or k.endswith("_verdict") or k == "validation")


def run_config(cfg: AnalysisConfig, seed: Optional[int] = None, trials: Optional[int] = None):
    """Run every analysis; returns (report dict, all_completed, any_bad_verdict)."""
    seed = cfg.seed if seed is None else seed
    entries, completed, bad = [], True, False
    for analysis in cfg.analyses:
        entry = {"kind": analysis.kind.value, "params": analysis.params}
        try:
            result = to_jsonable(_run_one(cfg, analysis.kind, analysis.params, seed, trials))
        except (SeminormError, UnsupportedExpression) as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            completed = False
            log.error("%s on %s failed: %s", analysis.kind.value, analysis.params.get("functional"), exc)
        else:
            entry["result"] = result
            bad = bad or _has_bad_verdict(result)
            log.info("%s %s: %s", analysis.kind.value, analysis.params.get("functional"),
                     result.get("verdict", result.get("validation", "done")))
        entries.append(entry)
    report = {"version": __version__, "seed": seed, "analyses": entries}
    return report, completed, bad


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="seminormkit", description=__doc__.splitlines()[0])
    parser.add_argument("config", help="path to a JSON analysis config")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--strict", action="store_true",
                        help="exit 2 if any verdict is Fail, Violated or Inconsistent")
    parser.add_argument("--trials", type=int, help="override trial counts of every analysis")
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc.strerror}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: {args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return 1
    try:
        cfg = config_from_dict(raw)
    except ConfigError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1
    if args.trials is not None and args.trials < 1:
        print("error: --trials must be positive", file=sys.stderr)
        return 1

    start = time.perf_counter()
    report, completed, bad = run_config(cfg, args.seed, args.trials)
    report["wall_time"] = round(time.perf_counter() - start, 6)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not completed:
        return 1
    if args.strict and bad:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
