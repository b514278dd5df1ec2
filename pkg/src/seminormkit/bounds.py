"""Majorizing l1-type norm, the Lipschitz bound, and equivalence constants.

For a seminorm ``S`` and working basis ``e_1..e_n`` let
``sigma = max_j S(e_j)`` and ``N1(a) = sigma * sum_j |alpha_j|`` where the
``alpha_j`` are the coordinates of ``a``. Then ``S <= N1`` and
``|S(a) - S(b)| <= N1(a - b)``; both are checked here by sampling.
Equivalence constants come from a derivative-free multi-start search on
the unit sphere of a reference norm.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput, UnsupportedExpression, ZeroOnBasis, ZeroSeminorm
from .expr import FunctionalExpr, boost_subspaces, contains_boost, evaluate_many, resolve_space
from .linalg import Field, SpaceDescriptor, gaussian_vectors, lexicographic_argmin
from .quotient import kernel_basis
from .sampling import log_uniform, rng_for


class BoundVerdict(str, enum.Enum):
    HOLDS = "Holds"
    VIOLATED = "Violated"


class Method(str, enum.Enum):
    SPHERE_MAX = "SphereMax"
    VIA_N1 = "ViaN1"


@dataclass(frozen=True)
class OptBudget:
    starts: int = 64
    max_iters: int = 10_000
    validation_samples: int = 100_000

    def __post_init__(self):
        if self.starts < 1 or self.max_iters < 1 or self.validation_samples < 0:
            raise InvalidInput("budget values must be positive")


@dataclass
class BoundsReport:
    sigma: float
    lipschitz_trials: int
    max_ratio: float
    max_excess: float
    verdict: BoundVerdict
    seed: int
    witness: Optional[tuple] = None
    sequence_steps: int = 0
    sequence_max_excess: Optional[float] = None


@dataclass
class EquivalenceConstants:
    tau: float
    argmax: np.ndarray
    mu: Optional[float] = None
    nu: Optional[float] = None
    argmin: Optional[np.ndarray] = None
    method: Optional[str] = None
    certified: bool = False
    zero_seminorm: bool = False
    validation_samples: int = 0
    validation_violations: int = 0


def _basis_values(expr, space):
    return evaluate_many(expr, space.basis)


def sigma(expr: FunctionalExpr, space: Optional[SpaceDescriptor] = None) -> float:
    """Largest value of ``expr`` on the working basis."""
    space = resolve_space(expr, space)
    values = _basis_values(expr, space)
    s = float(values.max())
    if s > space.tol.abs_tol:
        return s
    try:
        identically_zero = kernel_basis(expr, space).codim == 0
    except UnsupportedExpression:
        rng = rng_for(0, "sigma-zero-probe")
        probe = evaluate_many(expr, gaussian_vectors(rng, 1000, space))
        identically_zero = bool(np.all(probe <= space.tol.abs_tol))
    if identically_zero:
        raise ZeroSeminorm("the functional vanishes identically")
    raise ZeroOnBasis("the functional vanishes on the basis but not everywhere")


def n1_norm(a, sigma: float, space: Optional[SpaceDescriptor] = None) -> float:
    """``sigma * sum |alpha_j|`` over the working-basis coordinates of ``a``."""
    if not (sigma > 0):
        raise InvalidInput(f"sigma must be positive, got {sigma!r}")
    a = np.asarray(a)
    coords = space.coordinates(a) if space is not None else a
    return float(sigma * np.abs(coords).sum())


def _n1_many(x, sig, space):
    return sig * np.abs(space.coordinates(x)).sum(axis=-1)


def check_majorization(expr: FunctionalExpr, trials: int = 100_000, seed: int = 0,
                       space: Optional[SpaceDescriptor] = None) -> BoundsReport:
    """Sample ``S(a) <= N1(a)`` on random vectors plus the basis vectors and zero."""
    space = resolve_space(expr, space)
    if not expr.is_seminorm_fragment():
        raise InvalidInput("majorization needs a seminorm (expression outside the subadditive fragment)")
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    sig = sigma(expr, space)
    tol = space.tol
    rng = rng_for(seed, "majorization")
    a = gaussian_vectors(rng, trials, space) * log_uniform(rng, trials, 1e-3, 1e3)[:, None]
    a = np.vstack([a, space.basis, np.zeros((1, space.dim))])
    s = evaluate_many(expr, a)
    n1 = _n1_many(a, sig, space)
    excess = s - n1
    bad = excess > tol.margin(s, n1)
    positive = n1 > tol.abs_tol
    ratio = float(np.max(s[positive] / n1[positive]))
    witness = None
    if bad.any():
        i = int(np.argmax(np.where(bad, excess, -np.inf)))
        witness = (a[i], float(s[i]), float(n1[i]))
    return BoundsReport(sig, trials, ratio, float(excess.max()),
                        BoundVerdict.VIOLATED if witness else BoundVerdict.HOLDS, seed, witness)


def _lipschitz_pairs(expr, space, rng, trials):
    """Independent pairs, nearby pairs, and pairs anchored on boost subspaces."""
    n_near = trials // 4
    n_anchor = trials // 4 if boost_subspaces(expr) else 0
    n_free = trials - n_near - n_anchor
    a = gaussian_vectors(rng, n_free, space) * log_uniform(rng, n_free, 1e-2, 1e2)[:, None]
    b = gaussian_vectors(rng, n_free, space) * log_uniform(rng, n_free, 1e-2, 1e2)[:, None]
    c = gaussian_vectors(rng, n_near, space) * log_uniform(rng, n_near, 1e-2, 1e2)[:, None]
    d = gaussian_vectors(rng, n_near, space) * log_uniform(rng, n_near, 1e-8, 1.0)[:, None]
    pa, pb = [a, c], [b, c + d]
    if n_anchor:
        anchors = _anchor_points(expr, space, rng, n_anchor)
        step = gaussian_vectors(rng, n_anchor, space) * log_uniform(rng, n_anchor, 1e-8, 1e-1)[:, None]
        pa.append(anchors)
        pb.append(anchors + step)
    return np.vstack(pa), np.vstack(pb)


def _anchor_points(expr, space, rng, n):
    subs = [w for w in boost_subspaces(expr) if w.dim]
    if not subs:
        return gaussian_vectors(rng, n, space)
    out = np.zeros((n, space.dim), dtype=space.field.dtype)
    which = rng.integers(0, len(subs), n)
    for j, w in enumerate(subs):
        idx = np.flatnonzero(which == j)
        out[idx] = w.random_element(rng, idx.size)
    return out


def check_lipschitz(expr: FunctionalExpr, trials: int = 100_000, seed: int = 0,
                    space: Optional[SpaceDescriptor] = None, sequences: int = 16,
                    steps: int = 12) -> BoundsReport:
    """Sample ``|S(a) - S(b)| <= N1(a - b)`` and follow sequences ``a_j -> b``.

    Non-seminorms are accepted and are expected to come back Violated.
    Each driven sequence is ``a_j = b + 10**-j * d`` for ``j = 1..steps``.
    """
    space = resolve_space(expr, space)
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    sig = sigma(expr, space)
    tol = space.tol
    rng = rng_for(seed, "lipschitz")
    a, b = _lipschitz_pairs(expr, space, rng, trials)
    sa, sb = evaluate_many(expr, a), evaluate_many(expr, b)
    lhs = np.abs(sa - sb)
    rhs = _n1_many(a - b, sig, space)
    excess = lhs - rhs
    allowed = tol.abs_tol + tol.rel_tol * np.maximum(sa, sb)
    bad = excess > allowed
    positive = rhs > 0
    ratio = float(np.max(lhs[positive] / rhs[positive])) if positive.any() else 0.0

    # Driven sequences; the first few start on boost subspaces when present.
    n_anchor = sequences // 2 if boost_subspaces(expr) else 0
    limits = np.vstack([_anchor_points(expr, space, rng, n_anchor),
                        gaussian_vectors(rng, sequences - n_anchor, space)])
    dirs = gaussian_vectors(rng, sequences, space)
    t = 10.0 ** -np.arange(1, steps + 1)
    seq = limits[:, None, :] + t[None, :, None] * dirs[:, None, :]
    seq = seq.reshape(-1, space.dim)
    lim = np.repeat(limits, steps, axis=0)
    s_seq, s_lim = evaluate_many(expr, seq), evaluate_many(expr, lim)
    seq_lhs = np.abs(s_seq - s_lim)
    seq_rhs = _n1_many(seq - lim, sig, space)
    seq_excess = seq_lhs - seq_rhs
    seq_bad = seq_excess > tol.abs_tol + tol.rel_tol * np.maximum(s_seq, s_lim)

    witness = None
    if bad.any():
        i = int(np.argmax(np.where(bad, excess, -np.inf)))
        witness = (a[i], b[i], float(lhs[i]), float(rhs[i]))
    elif seq_bad.any():
        i = int(np.argmax(np.where(seq_bad, seq_excess, -np.inf)))
        witness = (seq[i], lim[i], float(seq_lhs[i]), float(seq_rhs[i]))
    return BoundsReport(
        sigma=sig,
        lipschitz_trials=trials,
        max_ratio=ratio,
        max_excess=float(excess.max()),
        verdict=BoundVerdict.VIOLATED if witness else BoundVerdict.HOLDS,
        seed=seed,
        witness=witness,
        sequence_steps=int(seq.shape[0]),
        sequence_max_excess=float(seq_excess.max()),
    )


def _real_directions(space: SpaceDescriptor) -> np.ndarray:
    eye = np.eye(space.dim)
    if space.field is Field.REAL:
        return eye
    return np.vstack([eye, 1j * eye])


def sphere_search(objective: Callable, norm: Callable, space: SpaceDescriptor, budget: OptBudget,
                  seed: int = 0, maximize: bool = True):
    """Multi-start projected coordinate search on ``{x : norm(x) = 1}``.

    Starts are Gaussian samples pushed onto the sphere. Each sweep tries
    ``x +- step * d`` for every real coordinate direction ``d`` (real and
    imaginary parts over C), renormalizes, and keeps improvements; a sweep
    without improvement halves that start's step. Steps start at 0.1 and
    stop at 1e-10, both relative to the start's Euclidean size.

    Returns ``(best_value, best_point)``. Ties between starts go to the
    lexicographically smallest point.
    """
    rng = rng_for(seed, "sphere-search")
    sign = 1.0 if maximize else -1.0
    x = gaussian_vectors(rng, budget.starts, space)
    nx = norm(x)
    keep = nx > 0
    x = x[keep] / nx[keep, None]
    vals = sign * objective(x)
    scale = np.linalg.norm(x, axis=1)
    step = 0.1 * scale
    floor = 1e-10 * scale
    dirs = _real_directions(space)
    for _ in range(budget.max_iters):
        active = step >= floor
        if not active.any():
            break
        improved = np.zeros(len(x), dtype=bool)
        for d in dirs:
            for s in (1.0, -1.0):
                y = x + (s * step)[:, None] * d
                ny = norm(y)
                ok = ny > 0
                y[ok] /= ny[ok, None]
                v = np.full(len(x), -np.inf)
                v[ok] = sign * objective(y[ok])
                better = active & ok & (v > vals)
                x[better] = y[better]
                vals[better] = v[better]
                improved |= better
        step = np.where(active & ~improved, step / 2, step)
    best = np.max(vals)
    tied = np.flatnonzero(vals == best)
    i = lexicographic_argmin(x, tied)
    return float(sign * vals[i]), x[i].copy()


def _validate(s_fn, n_fn, tau, space, samples, seed):
    if samples == 0:
        return 0
    rng = rng_for(seed, "equivalence-validation")
    a = gaussian_vectors(rng, samples, space) * log_uniform(rng, samples, 1e-3, 1e3)[:, None]
    s, n = s_fn(a), n_fn(a)
    limit = tau * n * (1 + 10 * space.tol.rel_tol)
    return int(np.sum(s > limit))


def _require_norm(n_expr: FunctionalExpr, space: SpaceDescriptor, role: str, allow_subnorm=False,
                  check_kernel=True):
    if contains_boost(n_expr):
        raise InvalidInput(f"{role} contains a boosted (discontinuous) subnorm")
    if not check_kernel:
        return
    try:
        k = kernel_basis(n_expr, space)
    except UnsupportedExpression:
        if allow_subnorm:
            return
        raise InvalidInput(f"{role} must be a norm") from None
    if k.dim:
        raise InvalidInput(f"{role} has a nontrivial kernel")


def left_equivalence(S: FunctionalExpr, N: FunctionalExpr, method=Method.SPHERE_MAX,
                     budget: OptBudget = OptBudget(), space: Optional[SpaceDescriptor] = None,
                     seed: int = 0) -> EquivalenceConstants:
    """A constant ``tau`` with ``S(a) <= tau * N(a)`` for all ``a``.

    ``SphereMax`` maximizes ``S`` on the ``N``-unit sphere. ``ViaN1``
    maximizes ``N1`` there instead, which bounds ``S`` from above but is
    usually looser. The value is the best one found, not a certified bound.
    """
    method = Method(method)
    if S.dim is None and N.dim is not None:
        space = resolve_space(N, space)
    space = resolve_space(S, space)
    resolve_space(N, space)
    _require_norm(N, space, "reference functional N")

    def n_fn(x):
        return evaluate_many(N, x)

    zero = False
    if method is Method.SPHERE_MAX:
        def s_fn(x):
            return evaluate_many(S, x)
    else:
        try:
            sig = sigma(S, space)
        except ZeroSeminorm:
            sig, zero = 0.0, True

        def s_fn(x):
            return _n1_many(x, sig, space)

    tau, argmax = sphere_search(s_fn, n_fn, space, budget, seed, maximize=True)
    if method is Method.SPHERE_MAX and tau <= space.tol.abs_tol:
        zero = True
        tau = 0.0
    violations = _validate(lambda x: evaluate_many(S, x), n_fn, tau, space,
                           budget.validation_samples, seed)
    return EquivalenceConstants(tau=tau, argmax=argmax, method=method.value, zero_seminorm=zero,
                                validation_samples=budget.validation_samples,
                                validation_violations=violations)


def two_sided_equivalence(f: FunctionalExpr, g: FunctionalExpr, budget: OptBudget = OptBudget(),
                          space: Optional[SpaceDescriptor] = None,
                          seed: int = 0) -> EquivalenceConstants:
    """Constants ``mu <= nu`` with ``mu f <= g <= nu f``: extremes of g on the f-sphere."""
    if f.dim is None and g.dim is not None:
        space = resolve_space(g, space)
    space = resolve_space(f, space)
    resolve_space(g, space)
    _require_norm(f, space, "f", allow_subnorm=True)
    _require_norm(g, space, "g", allow_subnorm=True, check_kernel=False)

    def f_fn(x):
        return evaluate_many(f, x)

    def g_fn(x):
        return evaluate_many(g, x)

    nu, argmax = sphere_search(g_fn, f_fn, space, budget, seed, maximize=True)
    mu, argmin = sphere_search(g_fn, f_fn, space, budget, seed, maximize=False)
    violations = 0
    if budget.validation_samples:
        rng = rng_for(seed, "two-sided-validation")
        n = budget.validation_samples
        a = gaussian_vectors(rng, n, space) * log_uniform(rng, n, 1e-3, 1e3)[:, None]
        fa, ga = f_fn(a), g_fn(a)
        slack = 10 * space.tol.rel_tol
        violations = int(np.sum(ga > nu * fa * (1 + slack)) + np.sum(ga < mu * fa * (1 - slack)))
    return EquivalenceConstants(tau=nu, argmax=argmax, mu=mu, nu=nu, argmin=argmin,
                                method="TwoSided", validation_samples=budget.validation_samples,
                                validation_violations=violations)
