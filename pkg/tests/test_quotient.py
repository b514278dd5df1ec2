import numpy as np
import pytest

from exprgen import random_norm
from seminormkit import (AbsLinear, Coset, InvalidInput, Max, MatrixPrecompose, PNorm, Scale, SpaceDescriptor,
                         Subspace, SubspaceBoost, Sum, UnsupportedExpression, audit_quotient_norm,
                         audit_well_definedness, evaluate, kernel_basis, nullspace, quotient_norm)
from seminormkit.linalg import numerical_rank
from seminormkit.quotient import AuditVerdict

R2 = SpaceDescriptor(2)
ABS_X1 = MatrixPrecompose([[1, 0]], PNorm(2))


def test_kernel_of_abs_x1():
    k = kernel_basis(ABS_X1)
    assert k.same_as(nullspace([[1, 0]]))
    assert k.same_as(Subspace.span(R2, [[0, 1]]))


def test_kernel_of_norm_and_zero():
    assert kernel_basis(PNorm(2), R2).dim == 0
    assert kernel_basis(Scale(0, PNorm(2)), SpaceDescriptor(3)).dim == 3


def test_kernel_of_sum_and_max_is_intersection():
    s3 = SpaceDescriptor(3)
    a, b = AbsLinear([1, 0, 0]), AbsLinear([0, 1, 0])
    for e in (Sum([a, b]), Max([a, b])):
        k = kernel_basis(e, s3)
        assert k.same_as(Subspace.span(s3, [[0, 0, 1]]))


def test_kernel_through_nested_matrix():
    # inner seminorm kills the second row, so only the first row constrains x
    inner = MatrixPrecompose([[1, 0]], PNorm(1))
    e = MatrixPrecompose([[1, 1, 0], [0, 0, 1]], inner)
    k = kernel_basis(e)
    assert k.same_as(Subspace.span(SpaceDescriptor(3), [[1, -1, 0], [0, 0, 1]]))


def test_unsupported_kernels():
    with pytest.raises(UnsupportedExpression):
        kernel_basis(PNorm(0.5), R2)
    with pytest.raises(UnsupportedExpression):
        kernel_basis(SubspaceBoost(Subspace.span(R2, [[1, 0]]), 2, PNorm(2)))


def test_quotient_norm_examples():
    k = kernel_basis(ABS_X1)
    assert quotient_norm(ABS_X1, k, Coset([3, 5], k)) == 3
    assert quotient_norm(ABS_X1, k, Coset([0, 7], k)) == 0
    assert quotient_norm(ABS_X1, k, Coset([3, -100], k)) == 3
    assert Coset([3, 5], k) == Coset([3, -100], k)
    assert Coset([3, 5], k) != Coset([4, 5], k)
    assert Coset([0, 7], k).is_zero()


def test_quotient_norm_kernel_mismatch():
    k = kernel_basis(ABS_X1)
    wrong = Subspace.span(R2, [[1, 0]])
    with pytest.raises(InvalidInput):
        quotient_norm(ABS_X1, wrong, Coset([3, 5], k))


def test_coset_arithmetic():
    k = kernel_basis(ABS_X1)
    c = Coset([1, 2], k) + Coset([2, -9], k)
    assert c == Coset([3, 0], k)
    assert quotient_norm(ABS_X1, k, c.scaled(-2)) == 6


def test_audit_well_defined():
    k = kernel_basis(ABS_X1)
    audit = audit_well_definedness(ABS_X1, k, trials=10_000, seed=0)
    assert audit.verdict is AuditVerdict.WELL_DEFINED
    assert audit.max_discrepancy <= 1e-12


def test_audit_detects_wrong_kernel():
    wrong = Subspace.span(R2, [[1, 0]])
    audit = audit_well_definedness(ABS_X1, wrong, trials=1000, seed=0)
    assert audit.verdict is AuditVerdict.INCONSISTENT
    assert audit.replay(ABS_X1)
    # hand witness: a = (3, 0), k = (-3, 0)
    assert evaluate(ABS_X1, [3, 0]) == 3 and evaluate(ABS_X1, [0, 0]) == 0


def test_audit_zero_kernel_vacuous():
    audit = audit_well_definedness(PNorm(2), Subspace.zero(R2), trials=100, seed=0)
    assert audit.verdict is AuditVerdict.WELL_DEFINED
    assert audit.max_discrepancy == 0


def test_random_kernels_are_sound():
    rng = np.random.default_rng(21)
    for _ in range(40):
        dim = int(rng.integers(2, 6))
        # low-rank matrix so the kernel is nontrivial
        r = int(rng.integers(1, dim))
        a = rng.standard_normal((r, dim))
        e = Sum([MatrixPrecompose(a, random_norm(rng, r)), AbsLinear(a[0])])
        k = kernel_basis(e)
        coeffs = rng.uniform(-1e3, 1e3, (50, k.dim))
        for v in np.vstack([k.basis, coeffs @ k.basis]):
            assert evaluate(e, v) <= 1e-9 * max(1, np.linalg.norm(v))
        # with an injective inner norm, the quotient dimension is the rank of the matrix
        assert k.codim == numerical_rank(a)
        report = audit_quotient_norm(e, k, trials=2000, seed=1)
        assert report.passed, report
