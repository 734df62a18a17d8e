import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcert import linalg as la
from skewcert import nslattice as ns
from skewcert.exactcore import QuadExt

X = sp.Symbol("x")

WEHLER_G = [[2, 4], [4, 2]]
WEHLER_S1 = [[1, 4], [0, -1]]
WEHLER_S2 = [[-1, 0], [4, 1]]
WEHLER_M = la.mat_mul(WEHLER_S1, WEHLER_S2)

PIC3_G = [[0, 2, 2], [2, 0, 2], [2, 2, 0]]
PIC3_S = [
    [[-1, 0, 0], [2, 1, 0], [2, 0, 1]],
    [[1, 2, 0], [0, -1, 0], [0, 2, 1]],
    [[1, 0, 2], [0, 1, 2], [0, 0, -1]],
]
PIC3_M = la.mat_mul(la.mat_mul(PIC3_S[0], PIC3_S[1]), PIC3_S[2])

# Wehler block plus a negative definite A2 block rotated with order 3:
# w is not an eigenvector, so the Cauchy-Schwarz bound is strict for j not divisible by 3
ROT_G = [[2, 4, 0, 0], [4, 2, 0, 0], [0, 0, -2, 1], [0, 0, 1, -2]]
ROT_M = [[15, 4, 0, 0], [-4, -1, 0, 0], [0, 0, 0, -1], [0, 0, 1, -1]]

ALPHA = QuadExt(2, 1, 3)
ETA = QuadExt(mpq(1, 2), mpq(1, 2), 5)


def sympy_charpoly(M):
    return [int(c) for c in reversed(sp.Matrix(M).charpoly(X).all_coeffs())]


def proportional(u, v):
    return all(u[i] * v[k] == u[k] * v[i] for i in range(len(u)) for k in range(len(u)))


# -- products and charpolys ------------------------------------------------------------

def test_wehler_product_is_corrected_matrix():
    assert WEHLER_M == [[15, 4], [-4, -1]]
    assert la.charpoly(WEHLER_M) == [1, -14, 1]
    # the printed matrix has determinant 31 and cannot have eigenvalues 7 +- 4 sqrt 3
    assert la.determinant([[15, 4], [-4, 1]]) == 31


@pytest.mark.parametrize("M", [WEHLER_M, PIC3_M, ROT_M, la.mat_pow(PIC3_M, 2), [[1, 0], [0, 1]]])
def test_charpoly_matches_sympy(M):
    assert la.charpoly(M) == sympy_charpoly(M)


@given(st.integers(2, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=60)
def test_charpoly_property(M):
    assert la.charpoly(M) == sympy_charpoly(M)
    assert la.determinant(M) == sp.Matrix(M).det()


# -- signature and isometries -------------------------------------------------------------

@pytest.mark.parametrize("G,expected", [
    (WEHLER_G, (1, 1)),
    (PIC3_G, (1, 2)),
    ([[1]], (1, 0)),
    (ROT_G, (1, 3)),
    ([[0, 1], [1, 0]], (1, 1)),
])
def test_signature_examples(G, expected):
    assert ns.signature(G) == expected


def test_signature_degenerate():
    with pytest.raises(ns.DegenerateFormError) as info:
        ns.signature([[1, 1], [1, 1]])
    assert len(info.value.kernel) == 1
    assert "kernel basis" in str(info.value)


@st.composite
def symmetric(draw):
    n = draw(st.integers(1, 4))
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        for k in range(i, n):
            A[i][k] = A[k][i] = draw(st.integers(-6, 6))
    return A


@given(symmetric())
@settings(max_examples=80)
def test_signature_matches_eigenvalue_signs(G):
    S = sp.Matrix(G)
    if S.det() == 0:
        with pytest.raises(ns.DegenerateFormError):
            ns.signature(G)
        return
    # the charpoly of a symmetric matrix is real-rooted, so Descartes' rule is exact
    coeffs = S.charpoly(X).all_coeffs()
    flipped = [c * (-1) ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs)]
    assert ns.signature(G) == (_sign_changes(coeffs), _sign_changes(flipped))


def _sign_changes(cs):
    nz = [c for c in cs if c != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a * b < 0)


def test_isometry_examples():
    assert ns.is_isometry(WEHLER_S1, WEHLER_G)
    assert ns.is_isometry(WEHLER_S2, WEHLER_G)
    assert ns.is_isometry(WEHLER_M, WEHLER_G)
    assert ns.is_isometry([[1, 0, 0], [0, 1, 0], [0, 0, 1]], PIC3_G)
    assert not ns.is_isometry([[2]], [[1]])
    assert all(ns.is_isometry(S, PIC3_G) for S in PIC3_S)
    with pytest.raises(ns.LatticeError):
        ns.is_isometry([[1, 0]], WEHLER_G)


@pytest.mark.parametrize("G,M", [(WEHLER_G, WEHLER_M), (PIC3_G, PIC3_M), (ROT_G, ROT_M)])
def test_automorphism_fixtures(G, M):
    assert ns.is_isometry(M, G)
    assert ns.signature(G) == (1, len(G) - 1)


# -- spectral radius --------------------------------------------------------------------

def test_spectral_radius_wehler():
    sr = ns.spectral_radius(WEHLER_M)
    assert sr.exact == QuadExt(7, 4, 3)
    assert sr.exact == ALPHA ** 2


def test_spectral_radius_quartic():
    sr = ns.spectral_radius(la.companion([1, -1, -1, -1, 1]))
    assert sr.exact is None
    assert sr.width < mpq(1, 10**20)
    assert sr.contains(mpq(172208380, 10**8)) or abs(float(sr) - 1.72208380) < 1e-8
    root = max(abs(r) for r in sp.Poly(X**4 - X**3 - X**2 - X + 1, X).nroots(n=40))
    assert sr.lower <= mpq(str(root)) + mpq(1, 10**30) and mpq(str(root)) - mpq(1, 10**30) <= sr.upper


def test_spectral_radius_identity():
    sr = ns.spectral_radius([[1, 0], [0, 1]])
    assert float(sr) == 1


@pytest.mark.parametrize("M", [PIC3_M, ROT_M, la.mat_mul(la.mat_mul(PIC3_S[0], PIC3_S[1]), la.mat_mul(PIC3_S[0], PIC3_S[2]))])
def test_spectral_radius_matches_sympy(M):
    sr = ns.spectral_radius(M)
    roots = sp.Poly(sp.Matrix(M).charpoly(X).as_expr(), X).nroots(n=40)
    rho = max(abs(r) for r in roots)
    assert abs(float(sr) - float(rho)) < 1e-12


def test_pic3_dominant_root_simple():
    chi = la.charpoly(PIC3_M)
    assert chi == [1, -17, -17, 1]
    assert sp.factor_list(sp.Poly(list(reversed(chi)), X))[1] == [
        (sp.Poly(X + 1, X), 1), (sp.Poly(X**2 - 18 * X + 1, X), 1)]
    assert ns.spectral_radius(PIC3_M).exact == QuadExt(9, 4, 5)


# -- hyperbolic split -------------------------------------------------------------------

def test_split_wehler():
    s = ns.hyperbolic_split(WEHLER_M, WEHLER_G, [1, 1])
    a1 = ALPHA - 1
    assert s.e_plus == [ALPHA / a1, QuadExt(-1) / a1]
    assert s.e_minus == [QuadExt(-1) / a1, ALPHA / a1]
    assert all(c == 0 for c in s.w)
    assert all(s.checks.values())
    # the unscaled eigenvector alpha H_1 - H_2 has e_+ . H_1 = 2 alpha - 4 = alpha - alpha^-1
    unscaled = [a * a1 for a in s.e_plus]
    assert la.pairing(unscaled, WEHLER_G, [1, 0]) == ALPHA - ALPHA ** -1 == QuadExt(0, 2, 3)
    assert la.pairing(unscaled, WEHLER_G, [1, 0]) != ALPHA + ALPHA ** -1


def test_split_pic3():
    s = ns.hyperbolic_split(PIC3_M, PIC3_G, [3, 3, 3])
    assert proportional(s.e_plus, [-(ETA ** -1), QuadExt(1), ETA])
    assert proportional(s.e_minus, [ETA, QuadExt(1), -(ETA ** -1)])
    assert all(c == mpq(3, 5) * k for c, k in zip(s.w, [1, -3, 1]))
    # the printed e_- with middle entry -1 is not isotropic against e
    e = [1, -3, 1]
    assert la.pairing([ETA, QuadExt(-1), -(ETA ** -1)], PIC3_G, e) != 0
    assert la.pairing(s.e_minus, PIC3_G, e) == 0
    assert all(s.checks.values())


def test_split_hyperbolic_plane():
    G = [[0, 1], [1, 0]]
    M = [[2, 0], [0, mpq(1, 2)]]
    s = ns.hyperbolic_split(M, G, [1, 1])
    assert s.e_plus == [1, 0] and s.e_minus == [0, 1]
    assert all(c == 0 for c in s.w)


def test_split_errors():
    with pytest.raises(ns.NotHyperbolicError, match="not hyperbolic"):
        ns.hyperbolic_split([[1, 0], [0, 1]], WEHLER_G, [1, 1])
    with pytest.raises(ns.LatticeError, match="non-positive"):
        ns.hyperbolic_split(PIC3_M, PIC3_G, [1, 0, 0])
    with pytest.raises(ns.LatticeError, match="not an isometry"):
        ns.hyperbolic_split([[2, 0], [0, 1]], WEHLER_G, [1, 1])


@pytest.mark.parametrize("M,G,H", [(WEHLER_M, WEHLER_G, [1, 1]), (PIC3_M, PIC3_G, [3, 3, 3]),
                                   (ROT_M, ROT_G, [1, 1, 1, 0])])
def test_isotropic_subspaces_through_e_plus_are_lines(M, G, H):
    s = ns.hyperbolic_split(M, G, H)
    assert la.pairing(s.e_plus, G, s.e_plus) == 0
    # P = span(e_+, e_-) is the kernel of the rational quadratic factor of the charpoly
    trace = s.lam + s.lam ** -1
    assert trace.is_rational()
    t = int(trace.a)
    Ms, Gs = sp.Matrix(M), sp.Matrix(G)
    P = (Ms * Ms - t * Ms + sp.eye(len(G))).nullspace()
    assert len(P) == 2
    W = (sp.Matrix.hstack(*P).T * Gs).nullspace()
    # e_+^perp = R e_+ + W; if the form is negative definite on W, every isotropic
    # vector of e_+^perp is a multiple of e_+
    if W:
        B = sp.Matrix.hstack(*W)
        gram_w = [[int(x) for x in row] for row in (B.T * Gs * B * sp.lcm([x.q for x in B])**2).tolist()]
        assert ns.signature(gram_w) == (0, len(G) - 2)


# -- intersection sequences ----------------------------------------------------------------

def test_sequence_wehler():
    seq = ns.intersection_sequence(WEHLER_M, WEHLER_G, [1, 1], [1, 1], 10)
    assert seq.values[:3] == [12, 84, 1164]
    assert seq.verdict
    for j, v in enumerate(seq.values):
        assert v == 6 * la.trace(la.mat_pow(WEHLER_M, j))


def test_sequence_pic3():
    seq = ns.intersection_sequence(PIC3_M, PIC3_G, [3, 3, 3], [3, 3, 3], 20)
    assert seq.values[:2] == [108, 1044]
    assert seq.verdict
    lam = QuadExt(9, 4, 5)
    for n, v in enumerate(seq.values[:8]):
        closed = mpq(288, 5) * (lam ** n + lam ** -n) + mpq(36, 5) * (-1) ** (n + 1)
        assert closed == v
    # the printed closed form is off already at n = 0
    assert 96 * 2 + 20 * (-1) == 172 != seq.values[0]


def test_sequence_identity_fails():
    seq = ns.intersection_sequence([[1, 0], [0, 1]], WEHLER_G, [1, 1], [1, 1], 4)
    assert seq.values == [12] * 5
    assert not seq.verdict and seq.failures == [0, 1, 2, 3]


def test_sequence_strict_boundary():
    # s_{j+1} = 2 s_j exactly: the doubling test is strict, so it fails and logs the boundary
    seq = ns.intersection_sequence([[2]], [[1]], [1], [1], 3)
    assert seq.values == [1, 2, 4, 8]
    assert not seq.verdict and seq.boundary == [0, 1, 2]


@pytest.mark.parametrize("M,G,H", [(WEHLER_M, WEHLER_G, [1, 1]), (PIC3_M, PIC3_G, [3, 3, 3]),
                                   (ROT_M, ROT_G, [1, 1, 1, 0])])
def test_eigen_formula_cross_check(M, G, H):
    s = ns.hyperbolic_split(M, G, H)
    seq = ns.intersection_sequence(M, G, H, H, 10)
    for j in range(11):
        assert ns.eigen_formula(s, M, G, j) == seq.values[j]


@pytest.mark.parametrize("M", [WEHLER_M, [[2, 1], [1, 1]], [[0, 1], [-1, 3]]])
def test_trace_identity_rank2(M):
    lam = ns.spectral_radius(M).exact
    for j in range(8):
        assert lam ** j + lam ** -j == la.trace(la.mat_pow(M, j))


# -- Cauchy-Schwarz ----------------------------------------------------------------------

def test_cauchy_schwarz_wehler():
    s = ns.hyperbolic_split(WEHLER_M, WEHLER_G, [1, 1])
    rep = ns.cauchy_schwarz_check(WEHLER_M, WEHLER_G, s, 6)
    assert rep["holds"] and rep["w.w"] == 0
    assert all(r["equality"] for r in rep["rows"])


def test_cauchy_schwarz_pic3_equality():
    s = ns.hyperbolic_split(PIC3_M, PIC3_G, [3, 3, 3])
    rep = ns.cauchy_schwarz_check(PIC3_M, PIC3_G, s, 6)
    assert rep["holds"] and rep["w.w"] == mpq(-36, 5)
    assert all(r["equality"] for r in rep["rows"])


def test_cauchy_schwarz_strict():
    s = ns.hyperbolic_split(ROT_M, ROT_G, [1, 1, 1, 0])
    assert s.w == [0, 0, 1, 0]
    rep = ns.cauchy_schwarz_check(ROT_M, ROT_G, s, 6)
    assert rep["holds"] and rep["w.w"] == -2
    assert [r["equality"] for r in rep["rows"]] == [j % 3 == 0 for j in range(7)]


# -- thresholds -------------------------------------------------------------------------

def test_threshold_examples():
    assert ns.threshold_min_power(2).n == 4
    assert ns.threshold_min_power(QuadExt(7, 4, 3)).n == 1
    r = ns.threshold_min_power(1)
    assert r.n is None and "lambda = 1" in r.note
    with pytest.raises(ns.LatticeError, match="below 1"):
        ns.threshold_min_power(mpq(1, 2))


def test_threshold_boundary_is_inclusive():
    r = ns.threshold_min_power(ns.MAIN_THRESHOLD)
    assert r.n == 1 and r.boundary
    r = ns.threshold_min_power(ns.IMPROVED_THRESHOLD, ns.IMPROVED_THRESHOLD)
    assert r.n == 1 and r.boundary


def test_threshold_interval():
    sr = ns.spectral_radius(la.companion([1, -1, -1, -1, 1]))
    # 1.72208380^4 < 5 + 2 sqrt 6 < 1.72208380^5
    assert ns.threshold_min_power(sr).n == 5
    assert ns.threshold_min_power(sr, ns.IMPROVED_THRESHOLD).n == 3


@given(st.integers(2, 40), st.integers(1, 5))
@settings(max_examples=60)
def test_threshold_minimal(p, q):
    lam = mpq(p + q, q)
    n = ns.threshold_min_power(lam).n
    bound = float(ns.MAIN_THRESHOLD)
    assert float(lam) ** n >= bound * (1 - 1e-12)
    assert n == 1 or float(lam) ** (n - 1) < bound * (1 + 1e-12)


# -- cor_improve ------------------------------------------------------------------------

def test_cor_improve_examples():
    assert ns.cor_improve_applies(WEHLER_M, 1)["applies"]
    r = ns.cor_improve_applies(PIC3_M, 1)
    assert not r["applies"]
    r2 = ns.cor_improve_applies(PIC3_M, 2)
    assert r2["applies"] and r2["unit_multiplicity"] == 1
    assert r2["eigenvalue"] == QuadExt(9, 4, 5) ** 2
    assert r2["above_improved_threshold"]


# -- adjointness --------------------------------------------------------------------------

@given(st.lists(st.integers(-20, 20), min_size=3, max_size=3), st.lists(st.integers(-20, 20), min_size=3, max_size=3),
       st.integers(0, 4))
@settings(max_examples=60)
def test_adjointness(u, v, j):
    # for an automorphism the pushforward is the inverse pullback
    Minv = la.mat_mul(la.mat_mul(PIC3_S[2], PIC3_S[1]), PIC3_S[0])
    assert ns.is_adjoint(PIC3_M, PIC3_G, Minv)
    lhs = la.pairing(la.mat_vec(la.mat_pow(PIC3_M, j), u), PIC3_G, v)
    rhs = la.pairing(u, PIC3_G, la.mat_vec(la.mat_pow(Minv, j), v))
    assert lhs == rhs


def test_lattice_system_validation():
    spec = {"gram": WEHLER_G, "pullback": WEHLER_M, "classes": {"H": [1, 1]}}
    assert ns.LatticeSystem.from_spec(spec).validate() == []
    bad = ns.LatticeSystem.from_spec({"gram": WEHLER_G, "pullback": [[15, 4], [-4, 1]]})
    assert bad.validate() == ["pullback is not an isometry"]
    cremona = ns.LatticeSystem.from_spec({"gram": [[1]], "pullback": [[2]], "pushforward": [[2]],
                                          "automorphism": False})
    assert cremona.validate() == []
