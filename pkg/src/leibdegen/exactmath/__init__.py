"""Exact arithmetic over Q(i): scalars, polynomials, matrices and ideals."""

from .gaussian import GaussianRational, I, format_coeff
from .poly import MultiPoly
from .scalar import ExceptionalValueError, Scalar, ScalarParseError, S, parse_scalar, parse_expression
from .matrix import ScalarMatrix, SingularMatrixError, SolveResult, mat_solve, rref
from .locus import constraint_factors, merge_constraints, univariate_roots, zero_set_bindings
from .groebner import (
    Budget,
    GroebnerResult,
    PolyIdeal,
    QueryResult,
    eliminate,
    find_point,
    groebner,
    ideal_query,
    normal_form,
)

__all__ = [
    "GaussianRational", "I", "format_coeff", "MultiPoly", "ExceptionalValueError", "Scalar",
    "ScalarParseError", "S", "parse_scalar", "parse_expression", "ScalarMatrix", "SingularMatrixError",
    "SolveResult", "mat_solve", "rref", "constraint_factors", "merge_constraints", "univariate_roots",
    "zero_set_bindings", "Budget", "GroebnerResult", "PolyIdeal", "QueryResult", "eliminate",
    "find_point", "groebner", "ideal_query", "normal_form",
]
