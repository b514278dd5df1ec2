"""Field-generic vectors, subspaces and tolerance-aware rank decisions.

Vectors are plain 1-D numpy arrays (``float64`` over the reals,
``complex128`` over the complexes). Batches of vectors are 2-D arrays with
one vector per row; every routine here that touches several vectors works
row-wise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidInput


class Field(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @property
    def dtype(self):
        return np.float64 if self is Field.REAL else np.complex128


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances used for every approximate comparison.

    ``rank_tol`` is relative: singular values at or below
    ``rank_tol * s_max`` count as zero.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    rank_tol: float = 1e-10

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "rank_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidInput(f"{name} must be a finite nonnegative number, got {value!r}")

    def within(self, residual, scale):
        """``residual <= abs_tol + rel_tol * scale``, elementwise."""
        return np.asarray(residual) <= self.abs_tol + self.rel_tol * np.asarray(scale)

    def margin(self, a, b):
        """Symmetric slack ``abs_tol + rel_tol * max(|a|, |b|)``."""
        return self.abs_tol + self.rel_tol * np.maximum(np.abs(a), np.abs(b))


def _is_complex(arr) -> bool:
    return np.iscomplexobj(arr)


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``x`` to a 1-D inexact array, optionally checking its length."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInput(f"expected a vector, got array of shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise InvalidInput("vector entries must be numeric")
    arr = arr.astype(np.complex128 if _is_complex(arr) else np.float64)
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInput(f"vector has length {arr.shape[0]}, expected {dim}")
    return arr


def as_matrix(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or not np.issubdtype(arr.dtype, np.number):
        raise InvalidInput(f"expected a numeric matrix, got shape {arr.shape}")
    return arr.astype(np.complex128 if _is_complex(arr) else np.float64)


@dataclass(frozen=True, eq=False)
class SpaceDescriptor:
    """A finite-dimensional space over R or C with a fixed working basis.

    Vectors are always given in ambient (standard) coordinates. The working
    basis only matters where a construction is stated relative to a basis;
    :meth:`coordinates` converts ambient vectors to basis coordinates.
    """

    dim: int
    field: Field = Field.REAL
    basis: Optional[np.ndarray] = None
    tol: TolerancePolicy = dc_field(default_factory=TolerancePolicy)

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidInput(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "field", Field(self.field))
        if self.basis is None:
            basis = np.eye(self.dim, dtype=self.field.dtype)
        else:
            basis = as_matrix(self.basis)
            if basis.shape != (self.dim, self.dim):
                raise InvalidInput(f"basis must be {self.dim}x{self.dim}, got {basis.shape}")
            if _is_complex(basis) and self.field is Field.REAL:
                raise InvalidInput("complex basis vectors in a real space")
            if numerical_rank(basis, self.tol) != self.dim:
                raise InvalidInput("basis vectors are linearly dependent")
            basis = basis.astype(self.field.dtype)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    def __eq__(self, other):
        if not isinstance(other, SpaceDescriptor):
            return NotImplemented
        return (self.dim == other.dim and self.field is other.field and self.tol == other.tol
                and np.array_equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.dim, self.field, self.tol))

    @property
    def is_standard(self) -> bool:
        return bool(np.array_equal(self.basis, np.eye(self.dim)))

    @cached_property
    def _inverse_basis(self) -> np.ndarray:
        return np.linalg.inv(self.basis)

    def coordinates(self, x) -> np.ndarray:
        """Coefficients ``alpha`` with ``x = sum_j alpha_j e_j`` (row-wise for batches)."""
        x = np.asarray(x)
        if x.shape[-1] != self.dim:
            raise InvalidInput(f"vector length {x.shape[-1]} does not match dim {self.dim}")
        if self.is_standard:
            return x
        return x @ self._inverse_basis

    def vector(self, x) -> np.ndarray:
        v = as_vector(x, self.dim)
        if self.field is Field.REAL and _is_complex(v):
            raise InvalidInput("complex vector given for a real space")
        return v.astype(self.field.dtype)

    def with_dim(self, dim: int) -> "SpaceDescriptor":
        """Same field and tolerances, different dimension, standard basis."""
        return SpaceDescriptor(dim=dim, field=self.field, tol=self.tol)


def numerical_rank(matrix, tol: TolerancePolicy = TolerancePolicy()) -> int:
    a = as_matrix(matrix)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def orthonormalize(vectors, tol: TolerancePolicy = TolerancePolicy()) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Rows that are (numerically) dependent on earlier rows are dropped. The
    cutoff is ``rank_tol`` relative to the largest input row norm.
    """
    v = as_matrix(vectors) if np.size(vectors) else np.zeros((0, 0))
    if v.shape[0] == 0:
        return v
    scale = max(float(np.max(np.linalg.norm(v, axis=1))), 0.0)
    out: list[np.ndarray] = []
    for row in v:
        w = row.copy()
        for _ in range(2):
            for q in out:
                w = w - np.vdot(q, w) * q
        nrm = np.linalg.norm(w)
        if scale == 0 or nrm <= max(tol.rank_tol, 1e-14) * scale:
            continue
        out.append(w / nrm)
    if not out:
        return np.zeros((0, v.shape[1]), dtype=v.dtype)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace stored as orthonormal rows ``basis`` (k x n, k may be 0)."""

    ambient: SpaceDescriptor
    basis: np.ndarray

    def __post_init__(self):
        n = self.ambient.dim
        b = np.asarray(self.basis)
        if b.size == 0:
            b = np.zeros((0, n), dtype=self.ambient.field.dtype)
        b = as_matrix(b) if b.shape[0] else b
        if b.shape[1] != n:
            raise InvalidInput(f"subspace basis vectors have length {b.shape[1]}, expected {n}")
        if b.shape[0] > n:
            raise InvalidInput("more basis vectors than the ambient dimension")
        if b.shape[0]:
            gram = b.conj() @ b.T
            slack = max(self.ambient.tol.abs_tol + self.ambient.tol.rel_tol, 1e-12)
            if np.max(np.abs(gram - np.eye(b.shape[0]))) > slack:
                raise InvalidInput("subspace basis is not orthonormal; use Subspace.span")
        if self.ambient.field is Field.REAL:
            if _is_complex(b):
                raise InvalidInput("complex basis for a subspace of a real space")
        b = b.astype(self.ambient.field.dtype)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, ambient: SpaceDescriptor, vectors) -> "Subspace":
        vecs = np.asarray(vectors)
        if vecs.size == 0:
            return cls.zero(ambient)
        if vecs.ndim == 1:
            vecs = vecs.reshape(1, -1)
        if vecs.shape[1] != ambient.dim:
            raise InvalidInput(f"spanning vectors have length {vecs.shape[1]}, expected {ambient.dim}")
        return cls(ambient, orthonormalize(vecs, ambient.tol))

    @classmethod
    def zero(cls, ambient: SpaceDescriptor) -> "Subspace":
        return cls(ambient, np.zeros((0, ambient.dim), dtype=ambient.field.dtype))

    @classmethod
    def whole(cls, ambient: SpaceDescriptor) -> "Subspace":
        return cls(ambient, np.eye(ambient.dim, dtype=ambient.field.dtype))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.dim

    def _rows(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.ambient.dim:
            raise InvalidInput(f"vector length {x.shape[-1]} does not match ambient dim {self.ambient.dim}")
        return x

    def project(self, x) -> np.ndarray:
        """Orthogonal projection; accepts a vector or a batch of row vectors."""
        x = self._rows(x)
        if self.dim == 0:
            return np.zeros_like(x, dtype=np.result_type(x, self.basis))
        return (x @ self.basis.conj().T) @ self.basis

    def residual(self, x) -> np.ndarray:
        x = self._rows(x)
        return np.linalg.norm(x - self.project(x), axis=-1)

    def contains_many(self, x, tol: Optional[TolerancePolicy] = None) -> np.ndarray:
        tol = tol or self.ambient.tol
        x = self._rows(x)
        return tol.within(self.residual(x), np.linalg.norm(x, axis=-1))

    def contains(self, x, tol: Optional[TolerancePolicy] = None) -> bool:
        return bool(self.contains_many(as_vector(x), tol))

    def projector(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((self.ambient.dim, self.ambient.dim), dtype=self.basis.dtype)
        return self.basis.T @ self.basis.conj()

    def same_as(self, other: "Subspace", tol: Optional[TolerancePolicy] = None) -> bool:
        """True when both subspaces have equal dimension and projectors agree within tol."""
        if other is self:
            return True
        if self.ambient.dim != other.ambient.dim or self.dim != other.dim:
            return False
        tol = tol or self.ambient.tol
        diff = np.max(np.abs(self.projector() - other.projector()), initial=0.0)
        return bool(diff <= tol.abs_tol + tol.rel_tol + 1e-12)

    def random_element(self, rng: np.random.Generator, size: int, scale=1.0) -> np.ndarray:
        """``size`` random elements (rows) with coefficient magnitudes of order ``scale``."""
        if self.dim == 0:
            return np.zeros((size, self.ambient.dim), dtype=self.ambient.field.dtype)
        coeffs = _gaussian(rng, (size, self.dim), self.ambient.field)
        coeffs *= np.asarray(scale).reshape(-1, 1) if np.ndim(scale) else scale
        return coeffs @ self.basis


def _gaussian(rng: np.random.Generator, shape, fld: Field) -> np.ndarray:
    if fld is Field.REAL:
        return rng.standard_normal(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def gaussian_vectors(rng: np.random.Generator, size: int, space: SpaceDescriptor) -> np.ndarray:
    """Rotation-invariant (standard Gaussian) random rows in ``space``."""
    return _gaussian(rng, (size, space.dim), space.field)


def nullspace(matrix, tol: TolerancePolicy = TolerancePolicy(),
              ambient: Optional[SpaceDescriptor] = None) -> Subspace:
    """Orthonormal basis of the numerical kernel of ``matrix``.

    Singular values at or below ``tol.rank_tol * s_max`` are treated as
    zero; the returned subspace has dimension ``n - numerical_rank``.
    """
    a = as_matrix(matrix)
    n = a.shape[1]
    if ambient is None:
        ambient = SpaceDescriptor(dim=n, field=Field.COMPLEX if _is_complex(a) else Field.REAL, tol=tol)
    elif ambient.dim != n:
        raise InvalidInput(f"matrix has {n} columns but the space has dimension {ambient.dim}")
    elif _is_complex(a) and ambient.field is Field.REAL:
        raise InvalidInput("complex matrix acting on a real space")
    if a.shape[0] == 0:
        return Subspace.whole(ambient)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = 0 if s.size == 0 or s[0] == 0 else int(np.sum(s > tol.rank_tol * s[0]))
    kernel = vh[rank:].conj()
    # SVD rows are orthonormal already; one more pass keeps the stored basis clean.
    return Subspace(ambient, orthonormalize(kernel, tol) if kernel.shape[0] else kernel)


def membership(sub: Subspace, x, tol: Optional[TolerancePolicy] = None) -> bool:
    return sub.contains(x, tol)


def intersect(subspaces: Sequence[Subspace]) -> Subspace:
    """Intersection of subspaces of a common ambient space."""
    if not subspaces:
        raise InvalidInput("intersection of an empty family")
    ambient = subspaces[0].ambient
    if any(s.ambient.dim != ambient.dim for s in subspaces):
        raise InvalidInput("subspaces live in different ambient spaces")
    if len(subspaces) == 1:
        return subspaces[0]
    eye = np.eye(ambient.dim)
    stacked = np.vstack([eye - s.projector() for s in subspaces])
    if np.max(np.abs(stacked)) <= 1e-12:
        return Subspace.whole(ambient)
    return nullspace(stacked, ambient.tol, ambient)


def lexicographic_argmin(rows: np.ndarray, candidates: Iterable[int]) -> int:
    """Index among ``candidates`` whose row is lexicographically smallest (re, im per entry)."""
    cands = list(candidates)
    keys = []
    for i in cands:
        r = np.asarray(rows[i])
        keys.append(tuple(v for z in r for v in (float(np.real(z)), float(np.imag(z)))))
    return cands[min(range(len(cands)), key=keys.__getitem__)]
