import numpy as np
import pytest

from exprgen import random_seminorm
from seminormkit import (Axiom, ClassVerdict, FunctionalExpr, InvalidInput, MatrixPrecompose, PNorm, Scale,
                         SpaceDescriptor, Subspace, SubspaceBoost, Verdict, check_axiom, classify, evaluate,
                         witness_violates)
from seminormkit.expr import OneDimWeight

R2 = SpaceDescriptor(2)


def g_kappa():
    return SubspaceBoost(Subspace.span(R2, [[1, 0]]), 2, PNorm(2))


class _Affine(FunctionalExpr):
    """|x_1| + 1 off the origin: nonnegative but not homogeneous."""

    dim = 2

    def _eval(self, x):
        return np.where(np.any(x != 0, axis=1), np.abs(x[:, 0]) + 1.0, 0.0)


class _Negative(FunctionalExpr):
    dim = 2

    def _eval(self, x):
        return -np.linalg.norm(x, axis=1)


def test_euclidean_subadditive():
    r = check_axiom(PNorm(2), Axiom.SUBADDITIVITY, trials=10_000, seed=1, space=R2)
    assert r.verdict is Verdict.PASS
    assert r.witness is None


def test_g_kappa_subadditivity_fails_with_replayable_witness():
    g = g_kappa()
    r = check_axiom(g, "Subadditivity", trials=10_000, seed=0)
    assert r.verdict is Verdict.FAIL
    a, b = r.witness.vectors
    assert r.witness.lhs > r.witness.rhs
    assert witness_violates(g, r)
    # the witness lands a + b on W and keeps a, b off it
    assert Subspace.span(R2, [[1, 0]]).contains(a + b)
    assert evaluate(g, a + b) == pytest.approx(r.witness.lhs)


def test_hand_witness_for_g_kappa():
    g = g_kappa()
    eps = 1e-3
    a, b = np.array([1, -eps]), np.array([0, eps])
    assert evaluate(g, a + b) == 2
    assert evaluate(g, a) + evaluate(g, b) == pytest.approx(np.hypot(1, eps) + eps)


def test_g_kappa_is_homogeneous():
    assert check_axiom(g_kappa(), Axiom.ABSOLUTE_HOMOGENEITY, 10_000, 0).verdict is Verdict.PASS


def test_unknown_axiom():
    with pytest.raises(InvalidInput):
        check_axiom(PNorm(2), "Convexity", space=R2)
    with pytest.raises(InvalidInput):
        check_axiom(PNorm(2), Axiom.SUBADDITIVITY, trials=0, space=R2)


def test_classify_ground_truth():
    assert classify(PNorm(2), 2000, 0, space=R2).verdict is ClassVerdict.NORM
    semi = classify(MatrixPrecompose([[1, 0]], PNorm(2)), 2000, 0)
    assert semi.verdict is ClassVerdict.SEMINORM_NOT_NORM
    k = semi.kernel_witness
    assert abs(k[0]) < 1e-12 and abs(abs(k[1]) - 1) < 1e-12
    assert semi.report(Axiom.POSITIVE_DEFINITENESS).exhaustive
    assert classify(g_kappa(), 2000, 0).verdict is ClassVerdict.SUBNORM_NOT_NORM
    assert classify(PNorm(0.5), 2000, 0, space=R2).verdict is ClassVerdict.SUBNORM_NOT_NORM


def test_sampled_positive_definiteness_is_not_exhaustive():
    r = check_axiom(PNorm(0.5), Axiom.POSITIVE_DEFINITENESS, 1000, 0, space=R2)
    assert r.verdict is Verdict.PASS and not r.exhaustive


def test_non_homogeneous_and_negative_functionals():
    c = classify(_Affine(), 1000, 0)
    assert c.verdict is ClassVerdict.NOT_HOMOGENEOUS
    assert witness_violates(_Affine(), c.report(Axiom.ABSOLUTE_HOMOGENEITY))
    c = classify(_Negative(), 1000, 0)
    assert c.verdict is ClassVerdict.HOMOGENEOUS_ONLY
    assert witness_violates(_Negative(), c.report(Axiom.NONNEGATIVITY))


def test_one_dim_weight_is_norm():
    assert classify(OneDimWeight(3.0), 2000, 0).verdict is ClassVerdict.NORM


def test_deterministic_given_seed():
    a = check_axiom(g_kappa(), Axiom.SUBADDITIVITY, 5000, 7)
    b = check_axiom(g_kappa(), Axiom.SUBADDITIVITY, 5000, 7)
    for u, v in zip(a.witness.vectors, b.witness.vectors):
        np.testing.assert_array_equal(u, v)


@pytest.mark.parametrize("c", [0.25, 1.0, 7.5])
def test_verdict_invariant_under_positive_scaling(c):
    rng = np.random.default_rng(11)
    for e in [PNorm(2), MatrixPrecompose([[1, 0]], PNorm(2)), g_kappa(), random_seminorm(rng, 3)]:
        space = None if e.dim else R2
        assert classify(Scale(c, e), 1000, 3, space=space).verdict is classify(e, 1000, 3, space=space).verdict


def test_complex_space_norms_pass():
    c2 = SpaceDescriptor(2, field="complex")
    for p in (1, 2, np.inf):
        assert classify(PNorm(p), 2000, 0, space=c2).verdict is ClassVerdict.NORM
