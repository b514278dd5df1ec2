"""The boosted subnorm ``g_kappa`` and a sequence-based continuity probe."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInput
from .expr import FunctionalExpr, SubspaceBoost, boost_subspaces, contains_boost, evaluate, evaluate_many, resolve_space
from .linalg import SpaceDescriptor, Subspace, gaussian_vectors
from .sampling import rng_for

# Perturbation size for probe directions that would stay inside a boost subspace.
_ESCAPE = 1e-2


class ProbeVerdict(str, enum.Enum):
    CONTINUOUS = "ContinuousAtPoint"
    DISCONTINUITY = "DiscontinuityDetected"


@dataclass
class DirectionTrace:
    direction: np.ndarray
    values: np.ndarray
    limit: float
    gap: float
    extrapolated: bool


@dataclass
class ProbeResult:
    point: np.ndarray
    verdict: ProbeVerdict
    gap_estimate: float
    directions_tested: int
    step_schedule: list
    value_at_point: float
    threshold: float
    traces: list = field(default_factory=list)


def build_g_kappa(f: FunctionalExpr, a0, kappa: float,
                  space: Optional[SpaceDescriptor] = None) -> SubspaceBoost:
    """``kappa * f`` on the line through ``a0`` and ``f`` everywhere else."""
    if contains_boost(f):
        raise InvalidInput("f must be a continuous subnorm; it already contains a boost")
    if not (kappa > 1):
        raise InvalidInput(f"kappa must exceed 1, got {kappa!r}")
    a0 = np.asarray(a0)
    if space is None:
        space = resolve_space(f, SpaceDescriptor(dim=a0.shape[-1],
                                                 field="complex" if np.iscomplexobj(a0) else "real"))
    space = resolve_space(f, space)
    a0 = space.vector(a0)
    if not np.any(a0 != 0):
        raise InvalidInput("a0 must be nonzero")
    return SubspaceBoost(Subspace.span(space, a0), kappa, f)


def _limit(values: np.ndarray, ratio: float):
    """Limit of the last few samples along a geometric schedule.

    If the last three values settle linearly (successive differences shrink
    roughly by the step ratio) the last two are extrapolated to t = 0;
    otherwise the value at the smallest step is used as is.
    """
    v2, v1, v0 = values[-3], values[-2], values[-1]
    d_prev, d_last = v1 - v2, v0 - v1
    scale = max(abs(v0), 1.0)
    settled = abs(d_last) <= abs(d_prev) * 2.0 / ratio + 1e-15 * scale
    if settled:
        return v0 + d_last / (ratio - 1.0), True
    return v0, False


def continuity_probe(expr: FunctionalExpr, point, directions: int = 16, steps: int = 8, seed: int = 0,
                     space: Optional[SpaceDescriptor] = None) -> ProbeResult:
    """Approach ``point`` along random and basis directions and measure the jump.

    Along each unit direction ``d`` the expression is evaluated at
    ``point + t d`` for ``t = 10**-1 .. 10**-steps``. The gap estimate is the
    largest difference between an approach limit and the value at the point.
    A gap above ``100 * abs_tol`` is reported as a discontinuity.
    """
    if directions < 1 or steps < 3:
        raise InvalidInput("need directions >= 1 and steps >= 3")
    space = resolve_space(expr, space)
    point = space.vector(point)
    rng = rng_for(seed, "continuity-probe")
    dirs = np.vstack([space.basis, gaussian_vectors(rng, directions, space)])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]

    # Keep approaches off any boost subspace that contains the point.
    for w in boost_subspaces(expr):
        if w.codim == 0 or not w.contains(point):
            continue
        inside = w.contains_many(dirs)
        if inside.any():
            escape = gaussian_vectors(rng, int(inside.sum()), space)
            escape -= w.project(escape)
            escape /= np.linalg.norm(escape, axis=1)[:, None]
            dirs[inside] += _ESCAPE * escape
            dirs[inside] /= np.linalg.norm(dirs[inside], axis=1)[:, None]

    t = 10.0 ** -np.arange(1, steps + 1)
    pts = point[None, None, :] + t[None, :, None] * dirs[:, None, :]
    values = evaluate_many(expr, pts.reshape(-1, space.dim)).reshape(len(dirs), steps)
    at_point = evaluate(expr, point)
    traces = []
    for d, vals in zip(dirs, values):
        lim, extrapolated = _limit(vals, 10.0)
        traces.append(DirectionTrace(d, vals, float(lim), float(abs(lim - at_point)), extrapolated))
    gap = max(tr.gap for tr in traces)
    threshold = 100 * space.tol.abs_tol
    return ProbeResult(
        point=point,
        verdict=ProbeVerdict.DISCONTINUITY if gap > threshold else ProbeVerdict.CONTINUOUS,
        gap_estimate=float(gap),
        directions_tested=len(dirs),
        step_schedule=[float(x) for x in t],
        value_at_point=at_point,
        threshold=threshold,
        traces=traces,
    )
