"""Randomized checks of the norm axioms and classification of functionals.

Sampling can refute an axiom but never prove it. Positive definiteness is
the exception where the kernel is exactly computable: then the verdict is
exhaustive. Everything is vectorized over trials and seeded per stream, so
a report depends only on ``(expr, axiom, trials, seed, tol)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput, UnsupportedExpression
from .expr import FunctionalExpr, boost_subspaces, evaluate_many, resolve_space
from .linalg import SpaceDescriptor, TolerancePolicy, gaussian_vectors
from .quotient import kernel_basis
from .sampling import log_uniform, random_scalars, rng_for

SHRINK_ROUNDS = 20


class Axiom(str, enum.Enum):
    NONNEGATIVITY = "Nonnegativity"
    POSITIVE_DEFINITENESS = "PositiveDefiniteness"
    ABSOLUTE_HOMOGENEITY = "AbsoluteHomogeneity"
    SUBADDITIVITY = "Subadditivity"


class Verdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"


class ClassVerdict(str, enum.Enum):
    NORM = "Norm"
    SEMINORM_NOT_NORM = "SeminormNotNorm"
    SUBNORM_NOT_NORM = "SubnormNotNorm"
    HOMOGENEOUS_ONLY = "HomogeneousOnly"
    NOT_HOMOGENEOUS = "NotHomogeneous"


@dataclass
class Witness:
    """Inputs that break an axiom, with the two sides of the violated relation.

    ``vectors`` are the vector arguments; ``scalar`` is the multiplier for
    homogeneity witnesses.
    """

    vectors: tuple
    lhs: float
    rhs: float
    scalar: Optional[complex] = None


@dataclass
class AxiomReport:
    axiom: Axiom
    verdict: Verdict
    trials: int
    seed: int
    witness: Optional[Witness] = None
    exhaustive: bool = False
    max_violation: float = -np.inf

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


@dataclass
class Classification:
    verdict: ClassVerdict
    reports: list = field(default_factory=list)

    def report(self, axiom: Axiom) -> AxiomReport:
        return next(r for r in self.reports if r.axiom is Axiom(axiom))

    @property
    def kernel_witness(self) -> Optional[np.ndarray]:
        pd = self.report(Axiom.POSITIVE_DEFINITENESS)
        return pd.witness.vectors[0] if pd.witness else None


# Each violation function returns (excess, lhs, rhs); excess > 0 means violated.

def _nonneg_violation(expr, tol, x):
    (x,) = x
    v = evaluate_many(expr, x)
    return -v - (tol.abs_tol + tol.rel_tol * np.abs(v)), v, np.zeros_like(v)


def _pd_violation(expr, tol, x):
    (x,) = x
    v = evaluate_many(expr, x)
    nrm = np.linalg.norm(x, axis=1)
    threshold = tol.abs_tol + tol.rel_tol * nrm
    excess = np.where(nrm > 0, threshold - v, -np.inf)
    return excess, v, threshold


def _homog_violation(expr, tol, x, alpha):
    (x,) = x
    lhs = evaluate_many(expr, alpha[:, None] * x)
    rhs = np.abs(alpha) * evaluate_many(expr, x)
    return np.abs(lhs - rhs) - tol.margin(lhs, rhs), lhs, rhs


def _subadd_violation(expr, tol, x):
    a, b = x
    lhs = evaluate_many(expr, a + b)
    rhs = evaluate_many(expr, a) + evaluate_many(expr, b)
    return lhs - rhs - tol.margin(lhs, rhs), lhs, rhs


def _random_vectors(rng, n, space):
    return gaussian_vectors(rng, n, space) * log_uniform(rng, n, 1e-3, 1e3)[:, None]


def _structured_points(rng, n, space, expr):
    """Points aimed at places where a functional can misbehave.

    Half are scaled coordinate vectors, half lie in boost subspaces (if any).
    """
    if n == 0:
        return np.zeros((0, space.dim), dtype=space.field.dtype)
    axes = np.eye(space.dim, dtype=space.field.dtype)[rng.integers(0, space.dim, n)]
    pts = axes * random_scalars(rng, n, space.field)[:, None]
    subs = [w for w in boost_subspaces(expr) if w.dim]
    if subs:
        half = n // 2
        which = rng.integers(0, len(subs), half)
        for j, w in enumerate(subs):
            idx = np.flatnonzero(which == j)
            pts[idx] = w.random_element(rng, idx.size, log_uniform(rng, idx.size, 1e-3, 1e3))
    return pts


def _sample(axiom: Axiom, expr, space, rng, trials):
    """Draw ``trials`` argument tuples; a quarter of them structured."""
    n_struct = trials // 4 if trials >= 4 else 0
    n_rand = trials - n_struct
    if axiom in (Axiom.NONNEGATIVITY, Axiom.POSITIVE_DEFINITENESS):
        x = np.vstack([_random_vectors(rng, n_rand, space),
                       _structured_points(rng, n_struct, space, expr)])
        return (x,), None
    if axiom is Axiom.ABSOLUTE_HOMOGENEITY:
        x = np.vstack([_random_vectors(rng, n_rand, space),
                       _structured_points(rng, n_struct, space, expr)])
        return (x,), random_scalars(rng, trials, space.field)
    a = _random_vectors(rng, n_rand, space)
    b = _random_vectors(rng, n_rand, space)
    # Structured pairs: a = p + d, b = -d with d small, so a + b lands on a
    # structured point p while a and b stay off it.
    p = _structured_points(rng, n_struct, space, expr)
    eps = log_uniform(rng, n_struct, 1e-8, 1e-2) * np.linalg.norm(p, axis=1)
    d = gaussian_vectors(rng, n_struct, space) * eps[:, None]
    # Coordinate pairs: a and b on two (random) axes.
    q = _structured_points(rng, n_struct, space, expr)
    use_axes = rng.random(n_struct) < 0.5
    sa = np.where(use_axes[:, None], q, p + d)
    sb = np.where(use_axes[:, None], _structured_points(rng, n_struct, space, expr), -d)
    return (np.vstack([a, sa]), np.vstack([b, sb])), None


def _shrink(violation: Callable, vectors: list, scalar) -> list:
    """Coordinate-halving shrink that keeps the violation alive."""
    vectors = [v.copy() for v in vectors]
    for _ in range(SHRINK_ROUNDS):
        changed = False
        for i in range(len(vectors)):
            for j in range(vectors[i].shape[0]):
                if vectors[i][j] == 0:
                    continue
                trial = [v.copy() for v in vectors]
                trial[i][j] = trial[i][j] / 2
                if violation([t[None, :] for t in trial], scalar) > 0:
                    vectors = trial
                    changed = True
        if not changed:
            break
    return vectors


def _run_check(expr, axiom, space, tol, trials, seed) -> AxiomReport:
    rng = rng_for(seed, f"axiom:{axiom.value}")
    args, alpha = _sample(axiom, expr, space, rng, trials)
    fn = {
        Axiom.NONNEGATIVITY: _nonneg_violation,
        Axiom.POSITIVE_DEFINITENESS: _pd_violation,
        Axiom.SUBADDITIVITY: _subadd_violation,
    }.get(axiom)
    if axiom is Axiom.ABSOLUTE_HOMOGENEITY:
        excess, lhs, rhs = _homog_violation(expr, tol, args, alpha)

        def violation(vecs, scalar):
            return float(_homog_violation(expr, tol, vecs, np.array([scalar]))[0][0])
    else:
        excess, lhs, rhs = fn(expr, tol, args)

        def violation(vecs, scalar):
            return float(fn(expr, tol, vecs)[0][0])

    worst = float(np.max(excess))
    if worst <= 0:
        return AxiomReport(axiom, Verdict.PASS, trials, seed, max_violation=worst)
    i = int(np.argmax(excess))
    scalar = None if alpha is None else alpha[i].item()
    vectors = [arg[i] for arg in args]
    if axiom is not Axiom.POSITIVE_DEFINITENESS:
        vectors = _shrink(violation, vectors, scalar)
    batch = [v[None, :] for v in vectors]
    if alpha is None:
        _, lhs_w, rhs_w = fn(expr, tol, batch)
    else:
        _, lhs_w, rhs_w = _homog_violation(expr, tol, batch, np.array([scalar]))
    witness = Witness(tuple(vectors), float(lhs_w[0]), float(rhs_w[0]), scalar)
    return AxiomReport(axiom, Verdict.FAIL, trials, seed, witness=witness, max_violation=worst)


def check_axiom(expr: FunctionalExpr, axiom, trials: int = 10_000, seed: int = 0,
                tol: Optional[TolerancePolicy] = None,
                space: Optional[SpaceDescriptor] = None) -> AxiomReport:
    """Check one axiom on ``trials`` random inputs.

    For positive definiteness the exact kernel is used whenever the
    expression is in the seminorm fragment; the report is then marked
    ``exhaustive``. Otherwise a Pass only means "not refuted".
    """
    try:
        axiom = Axiom(axiom)
    except ValueError:
        raise InvalidInput(f"unknown axiom {axiom!r}") from None
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    space = resolve_space(expr, space)
    tol = tol or space.tol
    if axiom is Axiom.POSITIVE_DEFINITENESS:
        try:
            kernel = kernel_basis(expr, space)
        except UnsupportedExpression:
            pass
        else:
            if kernel.dim == 0:
                return AxiomReport(axiom, Verdict.PASS, trials, seed, exhaustive=True)
            k = kernel.basis[0].copy()
            _, lhs, rhs = _pd_violation(expr, tol, (k[None, :],))
            witness = Witness((k,), float(lhs[0]), float(rhs[0]))
            return AxiomReport(axiom, Verdict.FAIL, trials, seed, witness=witness, exhaustive=True,
                               max_violation=float(rhs[0] - lhs[0]))
    report = _run_check(expr, axiom, space, tol, trials, seed)
    # A sampled refutation is conclusive even without the kernel.
    report.exhaustive = report.verdict is Verdict.FAIL
    return report


def witness_violates(expr: FunctionalExpr, report: AxiomReport,
                     tol: Optional[TolerancePolicy] = None) -> bool:
    """Re-evaluate a Fail witness and confirm it still breaks the axiom."""
    if report.witness is None:
        return False
    tol = tol or TolerancePolicy()
    batch = [np.asarray(v)[None, :] for v in report.witness.vectors]
    if report.axiom is Axiom.ABSOLUTE_HOMOGENEITY:
        excess = _homog_violation(expr, tol, batch, np.array([report.witness.scalar]))[0]
    else:
        fn = {Axiom.NONNEGATIVITY: _nonneg_violation,
              Axiom.POSITIVE_DEFINITENESS: _pd_violation,
              Axiom.SUBADDITIVITY: _subadd_violation}[report.axiom]
        excess = fn(expr, tol, batch)[0]
    return bool(excess[0] > 0)


def classify(expr: FunctionalExpr, trials: int = 10_000, seed: int = 0,
             tol: Optional[TolerancePolicy] = None,
             space: Optional[SpaceDescriptor] = None) -> Classification:
    reports = [check_axiom(expr, ax, trials, seed, tol, space) for ax in Axiom]
    ok = {r.axiom: r.passed for r in reports}
    if not ok[Axiom.ABSOLUTE_HOMOGENEITY]:
        verdict = ClassVerdict.NOT_HOMOGENEOUS
    elif not ok[Axiom.NONNEGATIVITY]:
        verdict = ClassVerdict.HOMOGENEOUS_ONLY
    elif ok[Axiom.SUBADDITIVITY] and ok[Axiom.POSITIVE_DEFINITENESS]:
        verdict = ClassVerdict.NORM
    elif ok[Axiom.SUBADDITIVITY]:
        verdict = ClassVerdict.SEMINORM_NOT_NORM
    elif ok[Axiom.POSITIVE_DEFINITENESS]:
        verdict = ClassVerdict.SUBNORM_NOT_NORM
    else:
        verdict = ClassVerdict.HOMOGENEOUS_ONLY
    return Classification(verdict, reports)
