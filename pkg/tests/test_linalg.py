import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from seminormkit import InvalidInput, SpaceDescriptor, Subspace, TolerancePolicy, membership, nullspace
from seminormkit.linalg import Field, intersect, numerical_rank, orthonormalize


def _sympy_kernel(a):
    """Exact kernel basis (row reduction over the rationals), orthonormalized."""
    vecs = sympy.Matrix(a).nullspace()
    if not vecs:
        return np.zeros((0, len(a[0])))
    return orthonormalize(np.array([[float(v) for v in vec] for vec in vecs]))


def test_nullspace_single_row():
    k = nullspace([[1, -1]])
    assert k.dim == 1
    expected = _sympy_kernel([[1, -1]])
    # kernels agree up to sign
    assert abs(abs(np.vdot(k.basis[0], expected[0])) - 1) < 1e-12
    np.testing.assert_allclose(np.abs(k.basis[0]), [2 ** -0.5, 2 ** -0.5], atol=1e-12)


def test_nullspace_identity_and_zero():
    assert nullspace(np.eye(2)).dim == 0
    z = nullspace(np.zeros((2, 2)))
    assert z.dim == 2
    np.testing.assert_allclose(z.projector(), np.eye(2), atol=1e-12)


def test_nullspace_dimension_mismatch():
    with pytest.raises(InvalidInput):
        nullspace([[1, 2, 3]], ambient=SpaceDescriptor(2))


@pytest.mark.parametrize("a", [
    [[1, 2, 3], [2, 4, 6]],
    [[1, 0, 0, 1], [0, 1, 1, 0]],
    [[3, -1], [6, -2], [0, 0]],
])
def test_nullspace_matches_exact_row_reduction(a):
    k = nullspace(a)
    exact = _sympy_kernel(a)
    assert k.dim == exact.shape[0]
    other = Subspace(SpaceDescriptor(len(a[0])), exact)
    assert k.same_as(other)


def test_complex_nullspace():
    a = np.array([[1, 1j]])
    k = nullspace(a)
    assert k.ambient.field is Field.COMPLEX
    assert k.dim == 1
    assert np.linalg.norm(a @ k.basis[0]) < 1e-12


def test_membership_examples():
    w = Subspace.span(SpaceDescriptor(2), [[1, 1]])
    assert membership(w, [2, 2])
    assert not membership(w, [1, 0])
    np.testing.assert_allclose(w.residual(np.array([1.0, 0.0])), 2 ** 0.5 / 2)
    assert membership(w, [1, 1 + 1e-12])


def test_membership_dimension_mismatch():
    w = Subspace.span(SpaceDescriptor(2), [[1, 1]])
    with pytest.raises(InvalidInput):
        membership(w, [1, 1, 1])


def test_space_validation():
    with pytest.raises(InvalidInput):
        SpaceDescriptor(0)
    with pytest.raises(InvalidInput):
        SpaceDescriptor(2, basis=[[1, 1], [2, 2]])
    with pytest.raises(InvalidInput):
        TolerancePolicy(abs_tol=-1)


def test_nonstandard_basis_coordinates():
    space = SpaceDescriptor(2, basis=[[1, 1], [1, -1]])
    np.testing.assert_allclose(space.coordinates(np.array([3.0, 1.0])), [2.0, 1.0])


def test_subspace_requires_orthonormal_rows():
    with pytest.raises(InvalidInput):
        Subspace(SpaceDescriptor(2), [[1.0, 1.0]])


def test_intersection():
    s = SpaceDescriptor(3)
    a = Subspace.span(s, [[1, 0, 0], [0, 1, 0]])
    b = Subspace.span(s, [[0, 1, 0], [0, 0, 1]])
    c = intersect([a, b])
    assert c.dim == 1
    assert membership(c, [0, 5, 0])


matrices = arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
                  elements=st.floats(-10, 10, allow_nan=False, width=64))


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_nullspace_properties(a):
    tol = TolerancePolicy()
    k = nullspace(a, tol)
    n = a.shape[1]
    assert k.dim + numerical_rank(a, tol) == n
    gram = k.basis @ k.basis.T
    np.testing.assert_allclose(gram, np.eye(k.dim), atol=1e-9)
    smax = np.linalg.norm(a, 2)
    for v in k.basis:
        assert np.linalg.norm(a @ v) <= tol.rank_tol * smax + 1e-12
        assert membership(k, v)
    x = np.random.default_rng(0).standard_normal(n)
    np.testing.assert_allclose(k.project(k.project(x)), k.project(x), atol=1e-12)
