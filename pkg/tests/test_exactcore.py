import random
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcert.exactcore import (
    BigRational, EndoError, FieldEndo, MultiPoly, QuadExt, RatFunc, apply_endo, compare, endo_power,
    poly_gcd, quad_arith, ratfunc_normalize, squarefree_factors,
)
from strategies import V, polys, ratfuncs

X, Y = sp.symbols("x y")


def P(s):
    return MultiPoly.parse(s, V)


def R(s):
    return RatFunc.parse(s, V)


def to_sympy(f):
    return sp.sympify(str(f).replace("^", "**"), locals={"x": X, "y": Y})


# -- BigRational ------------------------------------------------------------------

def test_bigrational_is_reduced():
    q = BigRational(6, -4)
    assert (q.numerator, q.denominator) == (-3, 2)
    assert BigRational(0, 7).denominator == 1


# -- normalization ------------------------------------------------------------------

@pytest.mark.parametrize("num,den,expected", [
    ("x^2*y", "x*y", "x"),
    ("0", "y^3", "0"),
    ("x^2 - y^2", "x - y", "x + y"),
])
def test_normalize_examples(num, den, expected):
    f = ratfunc_normalize(P(num), P(den))
    assert f == R(expected)
    assert f.den == MultiPoly.one(V)


def test_normalize_zero_denominator():
    with pytest.raises(ZeroDivisionError, match="division by zero in function field"):
        ratfunc_normalize(P("x"), P("0"))


def test_denominator_canonical_sign():
    f = R("x/(-2*y + 4)")
    assert f.den.leading_coefficient() > 0
    assert f.den.integer_content() == 1


@given(polys(), polys(nonzero=True), polys(max_terms=2, max_deg=1, nonzero=True))
@settings(max_examples=60)
def test_normalize_cancels_common_factor(p, q, r):
    assert ratfunc_normalize(p * r, q * r) == ratfunc_normalize(p, q)
    f = ratfunc_normalize(p, q)
    assert ratfunc_normalize(f.num, f.den) == f


# -- field axioms against sympy and evaluation ------------------------------------------

@given(ratfuncs(), ratfuncs(), ratfuncs())
@settings(max_examples=60)
def test_field_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    if f and g:
        assert (f / g) * (g / f) == RatFunc.one(V)


@given(ratfuncs(), ratfuncs(nonzero=True))
@settings(max_examples=40)
def test_arithmetic_matches_sympy(f, g):
    assert sp.simplify(to_sympy(f * g) - to_sympy(f) * to_sympy(g)) == 0
    assert sp.simplify(to_sympy(f / g) - to_sympy(f) / to_sympy(g)) == 0


@given(ratfuncs(), ratfuncs())
@settings(max_examples=40)
def test_evaluation_oracle(f, g):
    rng = random.Random(7)
    for _ in range(5):
        pt = (mpq(rng.randint(-50, 50), rng.randint(1, 9)), mpq(rng.randint(-50, 50), rng.randint(1, 9)))
        if f.den.evaluate(pt) == 0 or g.den.evaluate(pt) == 0:
            continue
        assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)
        assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)


# -- gcd ---------------------------------------------------------------------------

@given(polys(max_deg=3), polys(max_deg=3), polys(max_terms=3, max_deg=2, nonzero=True))
@settings(max_examples=60)
def test_gcd_matches_sympy(a, b, c):
    f, g = a * c, b * c
    ours = poly_gcd(f, g)
    theirs = sp.gcd(to_sympy(f), to_sympy(g))
    if ours.is_zero():
        assert theirs == 0
        return
    assert sp.simplify(to_sympy(ours) / theirs).is_number
    assert ours.divides(f) and ours.divides(g)


def test_squarefree_factors():
    fac = dict((str(f), k) for f, k in squarefree_factors(P("x^3*y^2*(x+y)")))
    assert fac == {"x": 3, "y": 2, "x + y": 1}


def test_parse_grammar():
    assert str(P("1 + y - 1/2*x^2")) == "-1/2*x^2 + y + 1"
    assert P("(x + y)^2") == P("x^2 + 2*x*y + y^2")
    with pytest.raises(ValueError):
        P("x + z")


# -- endomorphisms ---------------------------------------------------------------

def test_apply_endo_examples():
    henon = FieldEndo.from_strings(V, ["1 + y - x^2", "x"])
    assert apply_endo(henon, R("x")) == R("1 + y - x^2")
    mono = FieldEndo.from_strings(V, ["x", "x*y"])
    assert apply_endo(mono, apply_endo(mono, R("y"))) == R("x^2*y")
    crem = FieldEndo.from_strings(V, ["1/x", "1/y"])
    assert apply_endo(crem, R("x/y")) == R("y/x")


def test_apply_endo_undefined():
    sigma = FieldEndo.from_strings(V, ["x", "x"])
    with pytest.raises(EndoError, match="endomorphism undefined on this element"):
        apply_endo(sigma, R("1/(x - y)"))


def test_endo_power_examples():
    mono = FieldEndo.from_strings(V, ["x", "x*y"])
    for m in range(9):
        f = R("y")
        for _ in range(m):
            f = apply_endo(mono, f)
        assert endo_power(mono, m).images[1] == f == R(f"x^{m}*y")
    assert endo_power(mono, 0).images == (R("x"), R("y"))
    crem = FieldEndo.from_strings(V, ["1/x", "1/y"])
    assert endo_power(crem, 2).is_identity()


@given(ratfuncs(), ratfuncs())
@settings(max_examples=40)
def test_endo_homomorphism(f, g):
    sigma = FieldEndo.from_strings(V, ["y", "x + 1"])
    assert apply_endo(sigma, f + g) == apply_endo(sigma, f) + apply_endo(sigma, g)
    assert apply_endo(sigma, f * g) == apply_endo(sigma, f) * apply_endo(sigma, g)


@given(st.integers(0, 6), st.integers(0, 6), st.sampled_from([("x", "x*y"), ("1/x", "1/y"), ("y", "x + 1")]))
@settings(max_examples=40)
def test_power_cache_coherence(i, j, images):
    sigma = FieldEndo.from_strings(V, list(images))
    composed = endo_power(sigma, i).compose(endo_power(sigma, j))
    assert composed.images == endo_power(sigma, i + j).images


@given(st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=16)
def test_power_cache_coherence_henon(i, j):
    # degrees grow like 2^(i+j), so the window is kept small
    sigma = FieldEndo.from_strings(V, ["1 + y - x^2", "x"])
    composed = endo_power(sigma, i).compose(endo_power(sigma, j))
    assert composed.images == endo_power(sigma, i + j).images


def test_inverse_images_verified():
    sigma = FieldEndo.from_strings(V, ["1 + y - x^2", "x"], ["y", "x - 1 + y^2"])
    assert sigma.verify_inverse()
    assert sigma.apply_power(sigma.apply_power(R("x/y"), 3), -3) == R("x/y")


# -- quadratic fields ------------------------------------------------------------------

def test_quad_examples():
    a = QuadExt(2, 1, 3)
    assert quad_arith(a, QuadExt(2, -1, 3), "*") == 1
    assert a * a - 4 * a + 1 == 0
    assert quad_arith(QuadExt(5, 2, 6), QuadExt(16), "compare") == "less"
    with pytest.raises(ZeroDivisionError):
        quad_arith(a, QuadExt(0, 0, 3), "/")


@given(st.lists(st.tuples(st.integers(-10**6, 10**6), st.integers(1, 1000), st.integers(-10**6, 10**6),
                          st.integers(1, 1000), st.sampled_from([2, 3, 5, 6, 7])), min_size=1, max_size=1))
@settings(max_examples=1000)
def test_quad_compare_matches_float(data):
    an, ad, bn, bd, d = data[0]
    u = QuadExt(mpq(an, ad), mpq(bn, bd), d)
    with mpmath.workprec(200):
        exact = mpmath.mpf(an) / ad + mpmath.mpf(bn) / bd * mpmath.sqrt(d)
        want = (exact > 0) - (exact < 0)
    assert u.sign() == want
    assert compare(u, Fraction(0)) == want
