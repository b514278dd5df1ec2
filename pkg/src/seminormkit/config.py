"""JSON config schema: spaces, functional expressions and requested analyses.

Functional grammar (one key per node)::

    {"pnorm": 2}            {"pnorm": "inf"}
    {"matrix": [[1, 0]], "inner": {...}}
    {"scale": [3, {...}]}
    {"sum": [{...}, ...]}   {"max": [{...}, ...]}
    {"abslinear": [1, -1]}
    {"boost": {"w": [[1, 0]], "kappa": 2, "inner": {...}}}
    {"g_kappa": {"inner": {...}, "a0": [1, 0], "kappa": 2}}
    {"onedim": {"gamma": 3, "a0": 1}}

and the string shorthands ``"l1"``, ``"l2"``, ``"linf"`` and
``"abs(x1 - 2*x2)"``. A complex scalar is written ``[re, im]``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any, Optional

import numpy as np

from .bounds import OptBudget
from .errors import InvalidInput, SeminormError
from .expr import (AbsLinear, FunctionalExpr, Max, MatrixPrecompose, OneDimWeight, PNorm, Scale, Sum,
                   SubspaceBoost)
from .linalg import Field, SpaceDescriptor, Subspace, TolerancePolicy


class ConfigError(SeminormError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class Kind(str, enum.Enum):
    CLASSIFY = "Classify"
    KERNEL = "Kernel"
    QUOTIENT = "Quotient"
    LIPSCHITZ = "Lipschitz"
    EQUIVALENCE = "Equivalence"
    PATHOLOGY = "Pathology"


# Allowed params per kind; the value is the set of functional-name params.
_PARAMS = {
    Kind.CLASSIFY: ({"functional", "trials"}, {"functional"}),
    Kind.KERNEL: ({"functional"}, {"functional"}),
    Kind.QUOTIENT: ({"functional", "trials", "kernel"}, {"functional"}),
    Kind.LIPSCHITZ: ({"functional", "trials", "sequences", "steps"}, {"functional"}),
    Kind.EQUIVALENCE: ({"functional", "reference", "method"}, {"functional", "reference"}),
    Kind.PATHOLOGY: ({"functional", "point", "directions", "steps"}, {"functional"}),
}
_REQUIRED = {
    Kind.EQUIVALENCE: {"functional", "reference"},
    Kind.PATHOLOGY: {"functional", "point"},
}


@dataclass
class Analysis:
    kind: Kind
    params: dict = field(default_factory=dict)


@dataclass
class AnalysisConfig:
    space: SpaceDescriptor
    functionals: dict
    analyses: list
    seed: int = 0
    budget: OptBudget = field(default_factory=OptBudget)


# -- scalars and arrays -----------------------------------------------------

def parse_scalar(obj, path):
    if isinstance(obj, bool):
        raise ConfigError(path, "expected a number")
    if isinstance(obj, (int, float)):
        return obj
    if isinstance(obj, list) and len(obj) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
        return complex(obj[0], obj[1])
    raise ConfigError(path, "expected a number or a [re, im] pair")


def parse_vector(obj, path):
    if not isinstance(obj, list) or not obj:
        raise ConfigError(path, "expected a non-empty list of scalars")
    vals = [parse_scalar(v, f"{path}[{i}]") for i, v in enumerate(obj)]
    return np.array(vals, dtype=complex if any(isinstance(v, complex) for v in vals) else float)


def parse_matrix(obj, path):
    if not isinstance(obj, list) or not obj:
        raise ConfigError(path, "expected a non-empty list of rows")
    rows = [parse_vector(r, f"{path}[{i}]") for i, r in enumerate(obj)]
    if len({r.shape[0] for r in rows}) != 1:
        raise ConfigError(path, "rows have different lengths")
    return np.array(rows)


def scalar_json(v):
    v = complex(v) if np.iscomplexobj(v) else float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def array_json(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return scalar_json(a.item())
    if np.iscomplexobj(a):
        return [array_json(r) for r in a] if a.ndim > 1 else [[float(z.real), float(z.imag)] for z in a]
    return a.tolist()


# -- expressions ------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(?:(\([^()]*\)|[0-9.]+(?:[eE][+-]?\d+)?j?)\s*\*?\s*)?x(\d+)\s*")


def _parse_linear(text, dim, path):
    phi = np.zeros(dim, dtype=complex)
    pos, first = 0, True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (not first and m.group(1) is None):
            raise ConfigError(path, f"cannot parse linear form {text!r} near position {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coef = complex(m.group(2).strip("()").replace(" ", "")) if m.group(2) else 1
        idx = int(m.group(3))
        if not 1 <= idx <= dim:
            raise ConfigError(path, f"variable x{idx} out of range for dimension {dim}")
        phi[idx - 1] += sign * coef
        pos, first = m.end(), False
    if np.all(phi.imag == 0):
        phi = phi.real.copy()
    return phi


def _parse_string(text, space, path):
    t = text.strip().lower()
    named = {"l1": 1.0, "l2": 2.0, "linf": math.inf}
    if t in named:
        return PNorm(named[t])
    m = re.fullmatch(r"abs\((.*)\)", t)
    if m:
        return AbsLinear(_parse_linear(m.group(1), space.dim, path))
    raise ConfigError(path, f"unknown functional shorthand {text!r}")


def _span(space, rows, path):
    rows = np.asarray(rows)
    if rows.shape[1] != space.dim:
        raise ConfigError(path, f"vectors have length {rows.shape[1]}, space has dimension {space.dim}")
    gram = rows.conj() @ rows.T
    if np.max(np.abs(gram - np.eye(rows.shape[0]))) <= 1e-14:
        return Subspace(space, rows)
    return Subspace.span(space, rows)


def parse_expr(obj, space: SpaceDescriptor, path: str = "functional") -> FunctionalExpr:
    try:
        return _parse_expr(obj, space, path)
    except ConfigError:
        raise
    except InvalidInput as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_expr(obj, space, path):
    if isinstance(obj, str):
        return _parse_string(obj, space, path)
    if not isinstance(obj, dict) or not obj:
        raise ConfigError(path, "expected an expression object or shorthand string")
    keys = set(obj)
    if "matrix" in keys:
        if keys != {"matrix", "inner"}:
            raise ConfigError(path, "matrix node needs exactly 'matrix' and 'inner'")
        a = parse_matrix(obj["matrix"], f"{path}.matrix")
        inner_space = space.with_dim(a.shape[0])
        return MatrixPrecompose(a, parse_expr(obj["inner"], inner_space, f"{path}.inner"))
    if len(keys) != 1:
        raise ConfigError(path, f"expected exactly one node key, got {sorted(keys)}")
    (key,) = keys
    val = obj[key]
    sub = f"{path}.{key}"
    if key == "pnorm":
        if val == "inf":
            return PNorm(math.inf)
        return PNorm(_real(val, sub))
    if key == "scale":
        if not isinstance(val, list) or len(val) != 2:
            raise ConfigError(sub, "expected [c, expression]")
        return Scale(_real(val[0], f"{sub}[0]"), parse_expr(val[1], space, f"{sub}[1]"))
    if key in ("sum", "max"):
        if not isinstance(val, list) or not val:
            raise ConfigError(sub, "expected a non-empty list of expressions")
        terms = [parse_expr(t, space, f"{sub}[{i}]") for i, t in enumerate(val)]
        return Sum(terms) if key == "sum" else Max(terms)
    if key == "abslinear":
        return AbsLinear(parse_vector(val, sub))
    if key == "boost":
        _need(val, {"w", "kappa", "inner"}, sub)
        w = _span(space, parse_matrix(val["w"], f"{sub}.w"), f"{sub}.w")
        return SubspaceBoost(w, _real(val["kappa"], f"{sub}.kappa"), parse_expr(val["inner"], space, f"{sub}.inner"))
    if key == "g_kappa":
        _need(val, {"inner", "a0", "kappa"}, sub)
        a0 = parse_vector(val["a0"], f"{sub}.a0")
        w = Subspace.span(space, a0)
        return SubspaceBoost(w, _real(val["kappa"], f"{sub}.kappa"), parse_expr(val["inner"], space, f"{sub}.inner"))
    if key == "onedim":
        _need(val, {"gamma", "a0"}, sub)
        return OneDimWeight(_real(val["gamma"], f"{sub}.gamma"), parse_scalar(val["a0"], f"{sub}.a0"))
    raise ConfigError(path, f"unknown expression node {key!r}")


def _real(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, "expected a real number")
    return float(v)


def _need(val, keys, path):
    if not isinstance(val, dict):
        raise ConfigError(path, "expected an object")
    missing = keys - set(val)
    if missing:
        raise ConfigError(f"{path}.{sorted(missing)[0]}", "missing field")
    extra = set(val) - keys
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown field")


def expr_to_json(expr: FunctionalExpr):
    if isinstance(expr, PNorm):
        return {"pnorm": "inf" if math.isinf(expr.p) else expr.p}
    if isinstance(expr, MatrixPrecompose):
        return {"matrix": array_json(expr.matrix), "inner": expr_to_json(expr.inner)}
    if isinstance(expr, Scale):
        return {"scale": [expr.c, expr_to_json(expr.inner)]}
    if isinstance(expr, Sum):
        return {"sum": [expr_to_json(t) for t in expr.terms]}
    if isinstance(expr, Max):
        return {"max": [expr_to_json(t) for t in expr.terms]}
    if isinstance(expr, AbsLinear):
        return {"abslinear": array_json(expr.phi)}
    if isinstance(expr, SubspaceBoost):
        return {"boost": {"w": array_json(expr.subspace.basis), "kappa": expr.kappa,
                          "inner": expr_to_json(expr.inner)}}
    if isinstance(expr, OneDimWeight):
        return {"onedim": {"gamma": expr.gamma, "a0": scalar_json(expr.a0)}}
    raise InvalidInput(f"{type(expr).__name__} has no JSON form")


# -- whole config -----------------------------------------------------------

def _parse_space(obj, tol, path="space"):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if "dim" not in obj:
        raise ConfigError(f"{path}.dim", "missing field")
    extra = set(obj) - {"dim", "field", "basis"}
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown field")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError(f"{path}.dim", "expected a positive integer")
    fld = obj.get("field", "real")
    if fld not in ("real", "complex"):
        raise ConfigError(f"{path}.field", "expected 'real' or 'complex'")
    basis = parse_matrix(obj["basis"], f"{path}.basis") if "basis" in obj else None
    try:
        return SpaceDescriptor(dim=dim, field=Field(fld), basis=basis, tol=tol)
    except InvalidInput as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_tol(obj):
    if obj is None:
        return TolerancePolicy()
    if not isinstance(obj, dict):
        raise ConfigError("tolerances", "expected an object")
    extra = set(obj) - {"abs_tol", "rel_tol", "rank_tol"}
    if extra:
        raise ConfigError(f"tolerances.{sorted(extra)[0]}", "unknown field")
    try:
        return TolerancePolicy(**{k: _real(v, f"tolerances.{k}") for k, v in obj.items()})
    except InvalidInput as exc:
        raise ConfigError("tolerances", str(exc)) from None


def _parse_budget(obj):
    if obj is None:
        return OptBudget()
    if not isinstance(obj, dict):
        raise ConfigError("budget", "expected an object")
    extra = set(obj) - {"starts", "max_iters", "validation_samples"}
    if extra:
        raise ConfigError(f"budget.{sorted(extra)[0]}", "unknown field")
    for k, v in obj.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"budget.{k}", "expected an integer")
    try:
        return OptBudget(**obj)
    except InvalidInput as exc:
        raise ConfigError("budget", str(exc)) from None


def _parse_analysis(obj, names, space, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if "kind" not in obj:
        raise ConfigError(f"{path}.kind", "missing field")
    extra = set(obj) - {"kind", "params"}
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown field")
    lookup = {k.value.lower(): k for k in Kind}
    kind = lookup.get(str(obj["kind"]).lower())
    if kind is None:
        raise ConfigError(f"{path}.kind", f"unknown analysis kind {obj['kind']!r}")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params", "expected an object")
    allowed, refs = _PARAMS[kind]
    for key in params:
        if key not in allowed:
            raise ConfigError(f"{path}.params.{key}", f"not a parameter of {kind.value}")
    for key in _REQUIRED.get(kind, {"functional"}) | {"functional"}:
        if key not in params:
            raise ConfigError(f"{path}.params.{key}", "missing field")
    for key in refs & set(params):
        if params[key] not in names:
            raise ConfigError(f"{path}.params.{key}", f"unknown functional {params[key]!r}")
    for key in ("trials", "sequences", "steps", "directions"):
        if key in params:
            v = params[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{path}.params.{key}", "expected a positive integer")
    if "point" in params:
        pt = parse_vector(params["point"], f"{path}.params.point")
        if pt.shape[0] != space.dim:
            raise ConfigError(f"{path}.params.point", f"expected {space.dim} entries")
    if "kernel" in params:
        _span(space, parse_matrix(params["kernel"], f"{path}.params.kernel"), f"{path}.params.kernel")
    if "method" in params and params["method"] not in ("SphereMax", "ViaN1", "TwoSided"):
        raise ConfigError(f"{path}.params.method", "expected SphereMax, ViaN1 or TwoSided")
    return Analysis(kind, dict(params))


def config_from_dict(obj: Any) -> AnalysisConfig:
    if not isinstance(obj, dict):
        raise ConfigError("", "config must be a JSON object")
    for key in ("space", "functionals", "analyses"):
        if key not in obj:
            raise ConfigError(key, "missing field")
    extra = set(obj) - {"space", "functionals", "analyses", "seed", "tolerances", "budget"}
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown field")
    tol = _parse_tol(obj.get("tolerances"))
    space = _parse_space(obj["space"], tol)
    if not isinstance(obj["functionals"], dict) or not obj["functionals"]:
        raise ConfigError("functionals", "expected a non-empty object of named expressions")
    functionals = {}
    for name, spec in obj["functionals"].items():
        expr = parse_expr(spec, space, f"functionals.{name}")
        if expr.dim is not None and expr.dim != space.dim:
            raise ConfigError(f"functionals.{name}", f"acts on dimension {expr.dim}, space has {space.dim}")
        functionals[name] = expr
    if not isinstance(obj["analyses"], list):
        raise ConfigError("analyses", "expected a list")
    analyses = [_parse_analysis(a, functionals, space, f"analyses[{i}]") for i, a in enumerate(obj["analyses"])]
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed", "expected an integer")
    return AnalysisConfig(space, functionals, analyses, seed, _parse_budget(obj.get("budget")))


def config_to_dict(cfg: AnalysisConfig) -> dict:
    space = {"dim": cfg.space.dim, "field": cfg.space.field.value}
    if not cfg.space.is_standard:
        space["basis"] = array_json(cfg.space.basis)
    tol = cfg.space.tol
    return {
        "space": space,
        "functionals": {k: expr_to_json(v) for k, v in cfg.functionals.items()},
        "analyses": [{"kind": a.kind.value, "params": a.params} for a in cfg.analyses],
        "seed": cfg.seed,
        "tolerances": {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol, "rank_tol": tol.rank_tol},
        "budget": {"starts": cfg.budget.starts, "max_iters": cfg.budget.max_iters,
                   "validation_samples": cfg.budget.validation_samples},
    }


def to_jsonable(obj):
    """Recursively convert results (dataclasses, enums, arrays) to JSON values."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Subspace):
        return {"dim": obj.dim, "basis": array_json(obj.basis)}
    if isinstance(obj, FunctionalExpr):
        return expr_to_json(obj)
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return array_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, complex, np.floating, np.complexfloating)):
        return scalar_json(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")
