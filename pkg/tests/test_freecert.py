import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_map
from skewcert.exactcore import FieldEndo, RatFunc
from skewcert.freecert import (
    CertificationError, CurveError, CurveRestriction, certify_free, default_line, doubling_profile,
    graded_dimension, growth_profile, lemma63_check, power_lift_check,
    restrict_to_curve, span_rank, verify_witness,
)
from skewcert.skewring import enumerate_words
from strategies import V

S = ("s",)
LINE3 = "s,3"


def R(s):
    return RatFunc.parse(s, V)


def U(s):
    return RatFunc.parse(s, S)


def sympy_rank(values):
    """Rank of a list of functions in x, y by sympy: coefficient matrix of the numerators over a common denominator."""
    x, y = sp.symbols("x y")
    exprs = [sp.sympify(str(v).replace("^", "**"), locals={"x": x, "y": y}) for v in values]
    den = sp.lcm([sp.fraction(sp.together(e))[1] for e in exprs])
    polys = [sp.Poly(sp.cancel(e * den), x, y) for e in exprs]
    monos = sorted({m for p in polys for m in p.monoms()})
    M = sp.Matrix([[p.coeff_monomial(m) for m in monos] for p in polys])
    return M.rank()


# -- graded dimension ---------------------------------------------------------------

def test_graded_dimension_henon(henon):
    assert graded_dimension(henon, R("x"), R("y"), 1, 2, oracle=True) == 8


def test_graded_dimension_monomial(monomial):
    assert graded_dimension(monomial, R("x"), R("y"), 2, 3, oracle=True) == 15
    # combinatorial count: distinct (|S|, sum S) over subsets of {0,1,2,3}
    pairs = {(bin(m).count("1"), sum(i for i in range(4) if m >> i & 1)) for m in range(16)}
    assert len(pairs) == 15


@pytest.mark.parametrize("name", ["henon", "monomial", "cremona", "affine"])
def test_graded_dimension_depth0(name):
    assert graded_dimension(make_map(name), R("x + 1"), R("y/x"), 3, 0, oracle=True) == 2


@pytest.mark.parametrize("name,a,b,n,j", [
    ("henon", "x", "y", 1, 1),
    ("monomial", "x", "y", 2, 2),
    ("monomial", "x", "y", 1, 2),
    ("cremona", "x", "y", 1, 2),
    ("affine", "x", "x + y", 1, 2),
    ("affine", "x/y", "1 + y", 2, 2),
])
def test_rank_matches_sympy(name, a, b, n, j):
    sigma = make_map(name)
    words = [w.value for w in enumerate_words(R(a), R(b), sigma, n, j)]
    assert span_rank(words) == sympy_rank(words)
    for method in ("symbolic", "sample", "modular"):
        assert graded_dimension(sigma, R(a), R(b), n, j, method=method, oracle=True) == sympy_rank(words)


def test_proportional_generators(henon):
    cert = certify_free(henon, R("x"), R("3*x"), 1, 3)
    assert cert.dims == [1]
    assert cert.verdict == "NotFree(at_degree=1)"
    assert verify_witness(henon, R("x"), R("3*x"), 1, cert.witness)


def test_argument_errors(henon):
    with pytest.raises(ValueError, match="step"):
        graded_dimension(henon, R("x"), R("y"), 0, 1)
    with pytest.raises(CertificationError, match="nonzero"):
        graded_dimension(henon, R("0"), R("y"), 1, 1)
    with pytest.raises(ValueError, match="unknown method"):
        graded_dimension(henon, R("x"), R("y"), 1, 1, method="guess")


# -- certificates ----------------------------------------------------------------

def test_certificate_monomial_collision(monomial):
    cert = certify_free(monomial, R("x"), R("y"), 2, 3, oracle=True)
    assert not cert.free
    assert cert.dims == [2, 4, 8, 15]
    assert cert.verdict == "NotFree(at_degree=8)"
    assert sorted(w for w, _ in cert.witness) == ["ABBA", "BAAB"]
    assert sorted(int(c) for _, c in cert.witness) == [-1, 1]
    assert cert.witness_verified == "skew product expands to zero"
    assert verify_witness(monomial, R("x"), R("y"), 2, cert.witness)


def test_certificate_henon_step4(henon):
    cert = certify_free(henon, R("x"), R("y"), 4, 3)
    assert cert.free and cert.verdict == "FreeUpTo(3)"
    assert cert.dims == [2, 4, 8, 16]
    assert "no claim beyond" in cert.note()
    data = cert.to_json()
    assert set(data) >= {"map", "gens", "step", "dims", "verdict"}
    assert "witness" not in data


@given(st.sampled_from(["henon", "monomial", "cremona", "affine"]),
       st.sampled_from(["x", "y", "x + y", "x*y", "1/x", "x/(y + 1)", "2*x"]),
       st.sampled_from(["x", "y", "y - 1", "x^2", "1/y", "x*y/(x + 1)"]),
       st.integers(1, 2))
@settings(max_examples=40)
def test_certificate_invariants(name, a, b, n):
    sigma = make_map(name)
    a, b = R(a), R(b)
    depth = 2 if name != "henon" or n == 1 else 1
    cert = certify_free(sigma, a, b, n, depth, oracle=True)
    for j, d in enumerate(cert.dims):
        assert d <= 2 ** (j + 1)
        if j:
            assert d <= 2 * cert.dims[j - 1]
    assert cert.free == all(d == 2 ** (j + 1) for j, d in enumerate(cert.dims))
    if not cert.free:
        assert verify_witness(sigma, a, b, n, cert.witness)
    # monotone in depth: a shorter window reproduces the prefix
    short = certify_free(sigma, a, b, n, max(depth - 1, 0))
    assert short.dims == cert.dims[:len(short.dims)]


# -- curves ---------------------------------------------------------------------------

def test_restrict_examples(henon):
    C = CurveRestriction.parse(LINE3)
    assert restrict_to_curve(R("x/y"), C) == (U("s/3"), 1)
    assert restrict_to_curve(R("7"), C)[1] == 0
    g, d = restrict_to_curve(henon.apply(R("x/y")), C)
    assert g == U("(4 - s^2)/s") and d == 2


def test_restrict_errors():
    with pytest.raises(CurveError, match="curve inside polar locus"):
        restrict_to_curve(R("1/(y - 3)"), CurveRestriction.parse(LINE3))
    with pytest.raises(CurveError, match="parametrization is constant"):
        CurveRestriction.parse("1,2")
    with pytest.raises(CurveError, match="comma-separated"):
        CurveRestriction.parse("s")


def test_doubling_henon(henon):
    prof = doubling_profile(henon, R("x/y"), CurveRestriction.parse(LINE3), 1, 3)
    assert prof.degrees == [1, 2, 4, 8] and prof.holds
    assert any("non-constant" in m for m in prof.log)


def test_doubling_henon_cancellation(henon):
    # the orbit of (-2, 3) meets x = 0, so a factor cancels at j = 4
    prof = doubling_profile(henon, R("x/y"), CurveRestriction.parse(LINE3), 1, 5)
    assert prof.degrees == [1, 2, 4, 8, 15, 32] and not prof.holds
    assert any("cancellation" in m for m in prof.log)
    other = doubling_profile(henon, R("x/y"), CurveRestriction.parse("s,5"), 1, 5)
    assert other.degrees == [1, 2, 4, 8, 16, 32] and other.holds


def test_doubling_linear_growth(monomial):
    prof = doubling_profile(monomial, R("y"), CurveRestriction.parse(LINE3), 1, 3)
    assert prof.degrees == [0, 1, 2, 3] and not prof.holds


def test_doubling_constant(henon):
    prof = doubling_profile(henon, R("5"), CurveRestriction.parse(LINE3), 1, 2)
    assert prof.degrees == [0, 0, 0] and not prof.holds


def test_doubling_reports_failing_j(henon):
    # σ sends the line x = 0 into y = 0, where 1/y has its pole
    with pytest.raises(CurveError, match="j=1"):
        doubling_profile(henon, R("1/y"), CurveRestriction.parse("0,s"), 1, 2)


def test_default_line(henon):
    prof = default_line(henon, R("x/y"), 1, 3)
    assert "line y = 3" in prof.log
    assert prof.holds


@pytest.mark.parametrize("images,inverse,curve", [
    (["1 + y - x^2", "x"], ["y", "x - 1 + y^2"], "s,5"),
    (["y", "x + y^2"], ["y - x^2", "x"], "5,s"),
])
def test_doubling_implies_full_rank(images, inverse, curve):
    sigma = FieldEndo.from_strings(V, images, inverse)
    a, b = R("x"), R("y")
    prof = doubling_profile(sigma, a / b, CurveRestriction.parse(curve), 1, 3)
    assert prof.holds
    for j in range(4):
        imgs = [sigma.apply_power(a, j), sigma.apply_power(b, j)]
        assert span_rank(imgs) == 2
        assert graded_dimension(sigma, a, b, 1, j, oracle=True) == 2 ** (j + 1)


# -- lemma oracle ------------------------------------------------------------------

def test_lemma63_examples():
    r = lemma63_check([U("1")], U("s"))
    assert (r.dim_T, r.dim_TU, r.verdict, r.hypothesis) == (1, 2, True, "verified")
    r = lemma63_check([U("1"), U("s"), U("s^2")], U("s^7"))
    assert (r.dim_TU, r.verdict) == (6, True)
    r = lemma63_check([U("1"), U("s")], U("s"))
    assert (r.dim_TU, r.hypothesis) == (3, "hypothesis unverified")


# -- power lift and growth -------------------------------------------------------------

def test_power_lift_henon(henon):
    rep = power_lift_check(henon, R("x"), R("y"), 1, 2, 3)
    assert rep.status == "implication holds" and rep.holds
    assert rep.base.dims == rep.lifted.dims == [2, 4, 8, 16]


def test_power_lift_m1(henon):
    rep = power_lift_check(henon, R("x"), R("y"), 1, 1, 2)
    assert rep.base is rep.lifted


def test_power_lift_vacuous(monomial):
    rep = power_lift_check(monomial, R("x"), R("y"), 2, 2, 3)
    assert rep.status == "antecedent false" and rep.holds
    assert rep.base.verdict == "NotFree(at_degree=8)"


def test_growth_exponential(henon):
    g = growth_profile(henon, [R("x"), R("y")], 6, step=4)
    assert g.dims == [2, 4, 8, 16, 32, 64]
    assert all(r == 2 for r in g.ratios) and g.kind == "exponential"


def test_growth_polynomial(monomial):
    g = growth_profile(monomial, [R("x"), R("y")], 10)
    # V^m is spanned by x^(m + sum S) y^|S| t^m, so the count is combinatorial
    expected = [len({(len(S), sum(S)) for S in _subsets(m)}) for m in range(1, 11)]
    assert g.dims == expected
    assert g.kind == "polynomial" and g.fitted_degree <= 3


def _subsets(m):
    return [[i for i in range(m) if mask >> i & 1] for mask in range(1 << m)]


def test_growth_constant(henon):
    g = growth_profile(henon, [R("1")], 5)
    assert g.dims == [1] * 5 and g.kind == "polynomial" and g.fitted_degree == 0


def test_growth_rejects_zero(henon):
    with pytest.raises(CertificationError):
        growth_profile(henon, [R("0")], 3)


def test_henon_depth4(henon):
    cert = certify_free(henon, R("x"), R("y"), 1, 4)
    assert cert.dims == [2, 4, 8, 16, 32]
