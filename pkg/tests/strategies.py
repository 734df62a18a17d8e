"""Hypothesis strategies for small exact objects."""

from hypothesis import strategies as st

from skewcert.exactcore import MultiPoly, RatFunc
from skewcert.skewring import SkewElement

V = ("x", "y")

coeffs = st.integers(-5, 5)


@st.composite
def polys(draw, max_terms=3, max_deg=2, nonzero=False):
    n = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(n):
        e = (draw(st.integers(0, max_deg)), draw(st.integers(0, max_deg)))
        terms[e] = terms.get(e, 0) + draw(coeffs)
    p = MultiPoly.zero(V)
    for e, c in terms.items():
        if c:
            p = p + MultiPoly.monomial(V, e, c)
    if nonzero and p.is_zero():
        p = MultiPoly.one(V)
    return p


@st.composite
def ratfuncs(draw, nonzero=False, max_deg=2):
    num = draw(polys(max_deg=max_deg, nonzero=nonzero))
    den = draw(polys(max_terms=2, max_deg=1, nonzero=True))
    return RatFunc(num, den)


@st.composite
def elements(draw, sigma, degrees=(-1, 0, 1, 2), max_support=3):
    """Skew Laurent elements with nonzero coefficients on a random support."""
    k = draw(st.integers(1, max_support))
    support = draw(st.lists(st.sampled_from(degrees), min_size=k, max_size=k, unique=True))
    return SkewElement(sigma, {m: draw(ratfuncs(nonzero=True)) for m in support})
