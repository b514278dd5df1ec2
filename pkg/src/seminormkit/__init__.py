"""Numerical toolkit for norms, seminorms and subnorms on F^n (F = R or C)."""

__version__ = "0.1.0"

from .errors import InvalidInput, SeminormError, UnsupportedExpression, ZeroOnBasis, ZeroSeminorm
from .linalg import Field, SpaceDescriptor, Subspace, TolerancePolicy, membership, nullspace
from .expr import (AbsLinear, FunctionalExpr, Max, MatrixPrecompose, OneDimWeight, PNorm, Scale, Sum,
                   SubspaceBoost, evaluate, evaluate_many, one_dim_subnorm)
from .axioms import Axiom, ClassVerdict, Verdict, check_axiom, classify, witness_violates
from .quotient import Coset, audit_quotient_norm, audit_well_definedness, kernel_basis, quotient_norm
from .bounds import (Method, OptBudget, check_lipschitz, check_majorization, left_equivalence, n1_norm,
                     sigma, two_sided_equivalence)
from .pathology import build_g_kappa, continuity_probe

__all__ = [
    "AbsLinear", "Axiom", "ClassVerdict", "Coset", "Field", "FunctionalExpr", "InvalidInput", "Max",
    "MatrixPrecompose", "Method", "OneDimWeight", "OptBudget", "PNorm", "Scale", "SeminormError",
    "SpaceDescriptor", "Subspace", "SubspaceBoost", "Sum", "TolerancePolicy", "UnsupportedExpression",
    "Verdict", "ZeroOnBasis", "ZeroSeminorm", "audit_quotient_norm", "audit_well_definedness",
    "build_g_kappa", "check_axiom", "check_lipschitz", "check_majorization", "classify",
    "continuity_probe", "evaluate", "evaluate_many", "kernel_basis", "left_equivalence", "membership",
    "n1_norm", "nullspace", "one_dim_subnorm", "quotient_norm", "sigma", "two_sided_equivalence",
    "witness_violates",
]
