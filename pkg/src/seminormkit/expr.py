"""Compositional descriptions of norm-like functionals.

Every node is absolutely homogeneous by construction. Nodes evaluate on
batches (one vector per row) so that samplers can push thousands of points
through a tree in a single numpy pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .errors import InvalidInput
from .linalg import Field, SpaceDescriptor, Subspace, as_matrix, as_vector


def _canon(value):
    """Hashable, comparable stand-in for a field value."""
    if isinstance(value, np.ndarray):
        return ("array", value.shape, tuple(complex(v) for v in value.ravel()))
    if isinstance(value, Subspace):
        return ("subspace", value.ambient.dim, value.ambient.field.value, value.ambient.tol,
                _canon(np.asarray(value.basis)))
    if isinstance(value, FunctionalExpr):
        return value._key()
    if isinstance(value, (list, tuple)):
        return tuple(_canon(v) for v in value)
    return value


def _common_dim(dims) -> Optional[int]:
    fixed = {d for d in dims if d is not None}
    if len(fixed) > 1:
        raise InvalidInput(f"terms act on spaces of different dimensions {sorted(fixed)}")
    return fixed.pop() if fixed else None


class FunctionalExpr:
    """Base class for expression nodes.

    Subclasses implement ``_eval`` on a 2-D batch and may fix their ambient
    dimension through ``dim``. ``None`` means the node accepts any length.
    """

    @property
    def dim(self) -> Optional[int]:
        return None

    def children(self) -> tuple["FunctionalExpr", ...]:
        return ()

    def is_seminorm_fragment(self) -> bool:
        """Structurally guaranteed to be subadditive (hence a seminorm)."""
        return False

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _key(self):
        return (type(self).__name__,) + tuple(_canon(getattr(self, f.name)) for f in fields(self))

    def __eq__(self, other):
        if not isinstance(other, FunctionalExpr):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def _check(self, x: np.ndarray) -> np.ndarray:
        if self.dim is not None and x.shape[1] != self.dim:
            raise InvalidInput(
                f"{type(self).__name__} acts on dimension {self.dim}, got vectors of length {x.shape[1]}")
        return x


@dataclass(frozen=True, eq=False)
class PNorm(FunctionalExpr):
    """``(sum |x_i|^p)^(1/p)``; ``p = inf`` is the max-modulus norm.

    For ``0 < p < 1`` this is homogeneous and positive but not subadditive.
    """

    p: float = 2.0

    def __post_init__(self):
        p = float(self.p)
        if not (p > 0):
            raise InvalidInput(f"p must be positive, got {self.p!r}")
        object.__setattr__(self, "p", p)

    def is_seminorm_fragment(self) -> bool:
        return self.p >= 1

    def _eval(self, x):
        a = np.abs(x)
        if math.isinf(self.p):
            return a.max(axis=1)
        if self.p == 1:
            return a.sum(axis=1)
        if self.p == 2:
            return np.sqrt((a * a).sum(axis=1))
        m = a.max(axis=1)
        safe = np.where(m > 0, m, 1.0)
        return m * ((a / safe[:, None]) ** self.p).sum(axis=1) ** (1.0 / self.p)


@dataclass(frozen=True, eq=False)
class MatrixPrecompose(FunctionalExpr):
    """``x -> inner(A x)`` for an m x n matrix ``A``."""

    matrix: np.ndarray
    inner: FunctionalExpr

    def __post_init__(self):
        a = as_matrix(self.matrix)
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        if self.inner.dim is not None and self.inner.dim != a.shape[0]:
            raise InvalidInput(
                f"matrix has {a.shape[0]} rows but the inner functional acts on dimension {self.inner.dim}")

    @property
    def dim(self):
        return self.matrix.shape[1]

    def children(self):
        return (self.inner,)

    def is_seminorm_fragment(self):
        return self.inner.is_seminorm_fragment()

    def _eval(self, x):
        return self.inner._eval(self.inner._check(self._check(x) @ self.matrix.T))


@dataclass(frozen=True, eq=False)
class Scale(FunctionalExpr):
    c: float
    inner: FunctionalExpr

    def __post_init__(self):
        c = float(self.c)
        if not (c >= 0) or math.isinf(c):
            raise InvalidInput(f"scale factor must be finite and >= 0, got {self.c!r}")
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return self.inner.dim

    def children(self):
        return (self.inner,)

    def is_seminorm_fragment(self):
        return self.inner.is_seminorm_fragment()

    def _eval(self, x):
        return self.c * self.inner._eval(self._check(x))


@dataclass(frozen=True, eq=False)
class Sum(FunctionalExpr):
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidInput("Sum needs at least one term")
        _common_dim(t.dim for t in terms)
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self):
        return _common_dim(t.dim for t in self.terms)

    def children(self):
        return self.terms

    def is_seminorm_fragment(self):
        return all(t.is_seminorm_fragment() for t in self.terms)

    def _eval(self, x):
        x = self._check(x)
        return np.sum([t._eval(x) for t in self.terms], axis=0)


@dataclass(frozen=True, eq=False)
class Max(FunctionalExpr):
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidInput("Max needs at least one term")
        _common_dim(t.dim for t in terms)
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self):
        return _common_dim(t.dim for t in self.terms)

    def children(self):
        return self.terms

    def is_seminorm_fragment(self):
        return all(t.is_seminorm_fragment() for t in self.terms)

    def _eval(self, x):
        x = self._check(x)
        return np.max([t._eval(x) for t in self.terms], axis=0)


@dataclass(frozen=True, eq=False)
class AbsLinear(FunctionalExpr):
    """``x -> |sum_j phi_j x_j|`` (no conjugation: phi is a linear functional)."""

    phi: np.ndarray

    def __post_init__(self):
        phi = as_vector(self.phi)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def dim(self):
        return self.phi.shape[0]

    def is_seminorm_fragment(self):
        return True

    def _eval(self, x):
        return np.abs(self._check(x) @ self.phi)


@dataclass(frozen=True, eq=False)
class SubspaceBoost(FunctionalExpr):
    """``kappa * inner(x)`` on the subspace ``W``, ``inner(x)`` off it.

    Membership uses the tolerance policy of ``W``'s ambient space, so points
    within tolerance of ``W`` take the boosted branch.
    """

    subspace: Subspace
    kappa: float
    inner: FunctionalExpr

    def __post_init__(self):
        kappa = float(self.kappa)
        if not (kappa > 1) or math.isinf(kappa):
            raise InvalidInput(f"kappa must be a finite number > 1, got {self.kappa!r}")
        object.__setattr__(self, "kappa", kappa)
        if self.inner.dim is not None and self.inner.dim != self.subspace.ambient.dim:
            raise InvalidInput("boost subspace and inner functional live in different dimensions")

    @property
    def dim(self):
        return self.subspace.ambient.dim

    def children(self):
        return (self.inner,)

    def _eval(self, x):
        x = self._check(x)
        values = self.inner._eval(x)
        return np.where(self.subspace.contains_many(x), self.kappa * values, values)


@dataclass(frozen=True, eq=False)
class OneDimWeight(FunctionalExpr):
    """``gamma * |alpha|`` at ``alpha * a0`` on a one-dimensional space."""

    gamma: float
    a0: complex = 1.0

    def __post_init__(self):
        gamma = float(self.gamma)
        if not (gamma > 0) or math.isinf(gamma):
            raise InvalidInput(f"gamma must be a finite positive number, got {self.gamma!r}")
        a0 = as_vector(self.a0)
        if a0.shape[0] != 1:
            raise InvalidInput("OneDimWeight lives on a one-dimensional space; a0 must be a single scalar")
        if a0[0] == 0:
            raise InvalidInput("a0 must be nonzero")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "a0", a0[0].item())

    @property
    def dim(self):
        return 1

    def is_seminorm_fragment(self):
        return True

    def _eval(self, x):
        return self.gamma * np.abs(self._check(x)[:, 0] / self.a0)


def one_dim_subnorm(gamma: float, a0) -> OneDimWeight:
    """The subnorm ``alpha * a0 -> gamma * |alpha|`` on the line spanned by ``a0``."""
    return OneDimWeight(gamma, a0)


def _batch(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or not np.issubdtype(arr.dtype, np.number):
        raise InvalidInput(f"expected a batch of vectors, got shape {arr.shape}")
    return arr


def evaluate(expr: FunctionalExpr, x) -> float:
    x = as_vector(x)
    if not np.all(np.isfinite(x)):
        raise InvalidInput("vector has non-finite entries")
    return float(expr._eval(expr._check(x.reshape(1, -1)))[0])


def evaluate_many(expr: FunctionalExpr, x) -> np.ndarray:
    """Evaluate at every row of ``x``."""
    x = _batch(x)
    return np.asarray(expr._eval(expr._check(x)), dtype=float)


def boost_subspaces(expr: FunctionalExpr) -> list[Subspace]:
    """Subspaces of boost nodes reachable without crossing a matrix precomposition.

    These are the places where a functional may jump, so samplers aim at them.
    """
    found: list[Subspace] = []
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, SubspaceBoost):
            found.append(node.subspace)
        if isinstance(node, MatrixPrecompose):
            continue
        stack.extend(reversed(node.children()))
    return found


def contains_boost(expr: FunctionalExpr) -> bool:
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, SubspaceBoost):
            return True
        stack.extend(node.children())
    return False


def is_complex_expr(expr: FunctionalExpr) -> bool:
    stack = [expr]
    while stack:
        node = stack.pop()
        for f in fields(node) if hasattr(node, "__dataclass_fields__") else ():
            v = getattr(node, f.name)
            if isinstance(v, (np.ndarray, complex)) and np.iscomplexobj(v):
                return True
            if isinstance(v, Subspace) and v.ambient.field is Field.COMPLEX:
                return True
        stack.extend(node.children())
    return False


def resolve_space(expr: FunctionalExpr, space: Optional[SpaceDescriptor] = None) -> SpaceDescriptor:
    """Check ``space`` against ``expr`` or infer a standard space from the expression."""
    if space is not None:
        if expr.dim is not None and expr.dim != space.dim:
            raise InvalidInput(f"expression acts on dimension {expr.dim}, space has dimension {space.dim}")
        if space.field is Field.REAL and is_complex_expr(expr):
            raise InvalidInput("expression has complex coefficients but the space is real")
        return space
    if expr.dim is None:
        raise InvalidInput("cannot infer the dimension from this expression; pass a SpaceDescriptor")
    return SpaceDescriptor(dim=expr.dim, field=Field.COMPLEX if is_complex_expr(expr) else Field.REAL)
