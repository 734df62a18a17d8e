"""Exact arithmetic: rationals, sparse polynomials, rational functions,
real quadratic fields and substitution endomorphisms."""

from gmpy2 import mpq as BigRational

from .endo import EndoError, FieldEndo, apply_endo, endo_power
from .gcd import cofactors, poly_gcd, poly_lcm, squarefree_factors
from .poly import MultiPoly, ParseError, as_q
from .quad import QuadExt, compare, quad_arith, sign_sqrt_combo
from .ratfunc import RatFunc, ratfunc_normalize

__all__ = [
    "BigRational", "EndoError", "FieldEndo", "MultiPoly", "ParseError", "QuadExt", "RatFunc",
    "apply_endo", "as_q", "cofactors", "compare", "endo_power", "poly_gcd",
    "poly_lcm", "quad_arith", "ratfunc_normalize", "sign_sqrt_combo",
    "squarefree_factors",
]
