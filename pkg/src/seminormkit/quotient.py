"""Seminorm kernels, cosets of V/K and the induced quotient norm."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInput, UnsupportedExpression
from .expr import (AbsLinear, FunctionalExpr, Max, MatrixPrecompose, OneDimWeight, PNorm, Scale, Sum,
                   evaluate, evaluate_many, resolve_space)
from .linalg import SpaceDescriptor, Subspace, TolerancePolicy, as_vector, gaussian_vectors, intersect, nullspace
from .sampling import log_uniform, rng_for, random_scalars


def kernel_basis(expr: FunctionalExpr, space: Optional[SpaceDescriptor] = None) -> Subspace:
    """Exact kernel ``{x : S(x) = 0}`` computed from the structure of ``expr``.

    Only the seminorm fragment is handled. Boosted functionals and p < 1
    "norms" raise :class:`UnsupportedExpression`, since their zero sets are
    not guaranteed to be subspaces.
    """
    space = resolve_space(expr, space)
    return _kernel(expr, space)


def _kernel(expr: FunctionalExpr, space: SpaceDescriptor) -> Subspace:
    if isinstance(expr, PNorm):
        if expr.p < 1:
            raise UnsupportedExpression(f"PNorm(p={expr.p}) is not subadditive; its kernel is not computed")
        return Subspace.zero(space)
    if isinstance(expr, OneDimWeight):
        return Subspace.zero(space)
    if isinstance(expr, AbsLinear):
        return nullspace(expr.phi.reshape(1, -1), space.tol, space)
    if isinstance(expr, Scale):
        if expr.c == 0:
            return Subspace.whole(space)
        return _kernel(expr.inner, space)
    if isinstance(expr, (Sum, Max)):
        # Nonnegative terms: the combination vanishes iff every term does.
        return intersect([_kernel(t, space) for t in expr.terms])
    if isinstance(expr, MatrixPrecompose):
        a = expr.matrix
        inner = _kernel(expr.inner, space.with_dim(a.shape[0]))
        if inner.dim == 0:
            return nullspace(a, space.tol, space)
        # A x must land in the inner kernel: (I - P_inner) A x = 0.
        constraint = (np.eye(a.shape[0]) - inner.projector()) @ a
        if np.max(np.abs(constraint), initial=0.0) <= 1e-12 * max(1.0, np.max(np.abs(a))):
            return Subspace.whole(space)
        return nullspace(constraint, space.tol, space)
    raise UnsupportedExpression(f"no exact kernel rule for {type(expr).__name__}")


@dataclass(frozen=True, eq=False)
class Coset:
    """The element ``rep + K`` of ``V / K``."""

    rep: np.ndarray
    kernel: Subspace

    def __post_init__(self):
        rep = self.kernel.ambient.vector(self.rep)
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    def _same_quotient(self, other: "Coset"):
        if not self.kernel.same_as(other.kernel):
            raise InvalidInput("cosets belong to different quotient spaces")

    def __eq__(self, other):
        if not isinstance(other, Coset):
            return NotImplemented
        self._same_quotient(other)
        return self.kernel.contains(self.rep - other.rep)

    def __hash__(self):
        raise TypeError("Coset equality is tolerance based; cosets are unhashable")

    def __add__(self, other: "Coset") -> "Coset":
        self._same_quotient(other)
        return Coset(self.rep + other.rep, self.kernel)

    def scaled(self, alpha) -> "Coset":
        return Coset(alpha * self.rep, self.kernel)

    def is_zero(self) -> bool:
        return self.kernel.contains(self.rep)


def quotient_norm(expr: FunctionalExpr, kernel: Subspace, c: Coset) -> float:
    """Quotient norm of ``c``: the seminorm evaluated at any representative."""
    if not c.kernel.same_as(kernel):
        raise InvalidInput("coset was formed over a different kernel")
    return evaluate(expr, c.rep)


class AuditVerdict(str, enum.Enum):
    WELL_DEFINED = "WellDefined"
    INCONSISTENT = "Inconsistent"


@dataclass
class QuotientAudit:
    trials: int
    max_discrepancy: float
    max_distance_discrepancy: float
    verdict: AuditVerdict
    seed: int
    witness: Optional[dict] = None

    def replay(self, expr: FunctionalExpr, tol=None) -> bool:
        """True when the stored witness still shows a discrepancy beyond tolerance."""
        if self.witness is None:
            return False
        a = np.asarray(self.witness["a"])
        k = np.asarray(self.witness["k"])
        sa, sak = evaluate(expr, a), evaluate(expr, a + k)
        tol = tol or TolerancePolicy()
        return not tol.within(abs(sa - sak), sa)


def audit_well_definedness(expr: FunctionalExpr, kernel: Subspace, trials: int = 10_000,
                           seed: int = 0) -> QuotientAudit:
    """Check that the seminorm is constant on cosets of ``kernel``.

    Draws ``a`` in V and ``k`` in the kernel (kernel coefficients with
    log-uniform magnitudes up to 1e3) and compares ``S(a)`` with ``S(a + k)``
    and with ``S(a - k)``.
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    space = resolve_space(expr, kernel.ambient)
    tol = space.tol
    rng = rng_for(seed, "quotient-audit")
    a = gaussian_vectors(rng, trials, space) * log_uniform(rng, trials, 1e-3, 1e3)[:, None]
    if kernel.dim:
        coeffs = random_scalars(rng, (trials, kernel.dim), space.field, 1e-3, 1e3)
        k = coeffs @ kernel.basis
    else:
        k = np.zeros_like(a)
    sa = evaluate_many(expr, a)
    shift = np.abs(sa - evaluate_many(expr, a + k))
    dist = np.abs(evaluate_many(expr, a - k) - sa)
    bad = ~(tol.within(shift, sa) & tol.within(dist, sa))
    witness = None
    if bad.any():
        excess = np.maximum(shift, dist) - (tol.abs_tol + tol.rel_tol * sa)
        i = int(np.argmax(np.where(bad, excess, -np.inf)))
        witness = {"a": a[i], "k": k[i], "S(a)": float(sa[i]),
                   "S(a+k)": float(evaluate(expr, a[i] + k[i]))}
    return QuotientAudit(
        trials=trials,
        max_discrepancy=float(shift.max()),
        max_distance_discrepancy=float(dist.max()),
        verdict=AuditVerdict.INCONSISTENT if witness else AuditVerdict.WELL_DEFINED,
        seed=seed,
        witness=witness,
    )


@dataclass
class QuotientNormReport:
    """Sampled norm axioms of the quotient norm on random cosets."""

    trials: int
    homogeneity: bool
    subadditivity: bool
    positive_definiteness: bool
    max_homogeneity_error: float
    max_subadditivity_excess: float
    zero_cosets_checked: int

    @property
    def passed(self) -> bool:
        return self.homogeneity and self.subadditivity and self.positive_definiteness


def audit_quotient_norm(expr: FunctionalExpr, kernel: Subspace, trials: int = 10_000,
                        seed: int = 0) -> QuotientNormReport:
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    space = resolve_space(expr, kernel.ambient)
    tol = space.tol
    rng = rng_for(seed, "quotient-norm")
    a = gaussian_vectors(rng, trials, space) * log_uniform(rng, trials, 1e-3, 1e3)[:, None]
    b = gaussian_vectors(rng, trials, space) * log_uniform(rng, trials, 1e-3, 1e3)[:, None]
    # Different representatives of the same cosets, so the checks exercise V/K
    # rather than V.
    a_alt = a + kernel.random_element(rng, trials, log_uniform(rng, trials, 1e-3, 1e3))
    b_alt = b + kernel.random_element(rng, trials, log_uniform(rng, trials, 1e-3, 1e3))
    alpha = random_scalars(rng, trials, space.field, 1e-3, 1e3)

    na, nb = evaluate_many(expr, a), evaluate_many(expr, b)
    lhs = evaluate_many(expr, alpha[:, None] * a_alt)
    rhs = np.abs(alpha) * na
    hom_err = np.abs(lhs - rhs)
    hom_ok = bool(np.all(hom_err <= tol.margin(lhs, rhs)))

    nsum = evaluate_many(expr, a_alt + b_alt)
    excess = nsum - (na + nb)
    sub_ok = bool(np.all(excess <= tol.margin(nsum, na + nb)))

    # Positive definiteness on V/K: zero value exactly on the zero coset.
    zero_reps = kernel.random_element(rng, trials, log_uniform(rng, trials, 1e-3, 1e3))
    reps = np.vstack([a, zero_reps])
    values = evaluate_many(expr, reps)
    in_kernel = kernel.contains_many(reps)
    vanishes = values <= tol.abs_tol + tol.rel_tol * np.linalg.norm(reps, axis=1)
    pd_ok = bool(np.all(vanishes == in_kernel))
    return QuotientNormReport(
        trials=trials,
        homogeneity=hom_ok,
        subadditivity=sub_ok,
        positive_definiteness=pd_ok,
        max_homogeneity_error=float(hom_err.max()),
        max_subadditivity_excess=float(excess.max()),
        zero_cosets_checked=int(in_kernel.sum()),
    )


def coset(rep, kernel: Subspace) -> Coset:
    return Coset(as_vector(rep), kernel)
