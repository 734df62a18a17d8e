"""Neron-Severi lattice dynamics.

An integer Gram matrix ``G`` and a pullback matrix ``M`` (columns are the
images of the basis classes).  Everything quadratic is exact over
Q(sqrt d); higher-degree spectral radii come with certified rational
enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import gmpy2
import mpmath
from gmpy2 import mpq

from . import linalg as la
from .exactcore import upoly
from .exactcore.poly import as_q
from .exactcore.quad import QuadExt, compare

MAIN_THRESHOLD = QuadExt(5, 2, 6)
IMPROVED_THRESHOLD = QuadExt(2, 1, 3)
DEFAULT_WIDTH = mpq(1, 10**20)


class LatticeError(ValueError):
    pass


class DegenerateFormError(LatticeError):
    def __init__(self, kernel: list):
        self.kernel = kernel
        super().__init__(f"degenerate form; kernel basis {[[str(x) for x in v] for v in kernel]}")


class NotHyperbolicError(LatticeError):
    pass


class PrecisionExhausted(LatticeError):
    pass


# -- lattice container --------------------------------------------------------

@dataclass(frozen=True)
class LatticeSystem:
    gram: tuple
    pullback: tuple
    pushforward: tuple | None = None
    classes: Mapping = field(default_factory=dict)
    automorphism: bool = True

    @classmethod
    def from_spec(cls, spec: Mapping) -> "LatticeSystem":
        def mat(m):
            return tuple(tuple(int(x) for x in row) for row in m)

        push = spec.get("pushforward")
        return cls(
            gram=mat(spec["gram"]),
            pullback=mat(spec["pullback"]),
            pushforward=mat(push) if push is not None else None,
            classes={k: tuple(int(x) for x in v) for k, v in spec.get("classes", {}).items()},
            automorphism=bool(spec.get("automorphism", True)),
        )

    @property
    def rank(self) -> int:
        return len(self.gram)

    def G(self) -> list:
        return [list(r) for r in self.gram]

    def M(self) -> list:
        return [list(r) for r in self.pullback]

    def validate(self) -> list:
        """Structural checks; returns the list of violated invariants."""
        bad = []
        d = self.rank
        if any(len(r) != d for r in self.gram) or len(self.pullback) != d or any(
            len(r) != d for r in self.pullback
        ):
            bad.append("shape mismatch")
            return bad
        if not la.is_symmetric(self.G()):
            bad.append("gram not symmetric")
        if self.automorphism and not is_isometry(self.M(), self.G()):
            bad.append("pullback is not an isometry")
        if self.pushforward is not None and not is_adjoint(self.M(), self.G(), [list(r) for r in self.pushforward]):
            bad.append("pushforward not adjoint to pullback")
        for name, v in self.classes.items():
            if len(v) != d:
                bad.append(f"class {name} has wrong length")
        return bad


def is_isometry(M: Sequence, G: Sequence) -> bool:
    """Exact test of ``M^T G M = G``."""
    M, G = [list(r) for r in M], [list(r) for r in G]
    if len(M) != len(G) or any(len(r) != len(G) for r in M):
        raise LatticeError("shape mismatch")
    return la.mat_mul(la.mat_mul(la.transpose(M), G), M) == G


def is_adjoint(M: Sequence, G: Sequence, Mstar: Sequence) -> bool:
    """``(M u).v = u.(M_* v)`` for all u, v, i.e. ``M^T G = G M_*``."""
    return la.mat_mul(la.transpose(list(M)), list(G)) == la.mat_mul(list(G), list(Mstar))


def signature(G: Sequence) -> tuple:
    """Inertia ``(p, q)`` by rational congruence diagonalization."""
    A = [[as_q(x) for x in row] for row in G]
    n = len(A)
    if not la.is_symmetric(A):
        raise LatticeError("form is not symmetric")
    if la.rank(A) < n:
        raise DegenerateFormError(la.nullspace(A))
    diag = []
    for k in range(n):
        if A[k][k] == 0:
            i = next((i for i in range(k + 1, n) if A[i][i] != 0), None)
            if i is not None:
                A[k], A[i] = A[i], A[k]
                for row in A:
                    row[k], row[i] = row[i], row[k]
            else:
                i = next(i for i in range(k + 1, n) if A[k][i] != 0)
                # x_k -> x_k + x_i makes the new diagonal entry 2 A[k][i]
                A[k] = [a + b for a, b in zip(A[k], A[i])]
                for row in A:
                    row[k] += row[i]
        piv = A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / piv
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
                for row in A:
                    row[i] -= f * row[k]
        diag.append(piv)
    return sum(1 for x in diag if x > 0), sum(1 for x in diag if x < 0)


# -- spectral radius ----------------------------------------------------------

def _sqrt_bounds(q: mpq, bits: int) -> tuple:
    q = as_q(q)
    if q <= 0:
        return mpq(0), mpq(0) if q == 0 else None
    num, den = int(q.numerator), int(q.denominator)
    scale = 1 << bits
    r = int(gmpy2.isqrt(num * den * scale * scale))
    lo = mpq(r, den * scale)
    hi = lo if r * r == num * den * scale * scale else mpq(r + 1, den * scale)
    return lo, hi


def _quad_roots(core: list) -> list:
    """Exact roots of a monic squarefree real-rooted quadratic."""
    c, b = core[0], core[1]
    D = b * b - 4 * c
    if D < 0:
        return []
    num, den = int(D.numerator), int(D.denominator)
    rad = QuadExt(0, mpq(1, den), num * den)
    half = QuadExt.from_rational(-b / 2, rad.d)
    return [half + rad * mpq(1, 2), half - rad * mpq(1, 2)]


@dataclass
class SpectralRadius:
    charpoly: list
    exact: QuadExt | None
    lower: mpq
    upper: mpq
    method: str
    sign: int | None  # +1/-1 when +-rho is itself an eigenvalue
    core: list = field(default_factory=list)
    stripped: dict = field(default_factory=dict)
    _squared_poly: list | None = None
    _squared_interval: tuple | None = None

    def __float__(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return float((self.lower + self.upper) / 2)

    @property
    def width(self) -> mpq:
        return self.upper - self.lower

    def refine(self, width) -> "SpectralRadius":
        """Tighten the enclosure in place (no-op for exact values)."""
        width = as_q(width)
        if self.exact is not None or self.width < width:
            return self
        lo2, hi2 = self._squared_interval
        target = width
        while True:
            lo2, hi2 = upoly.refine_root(self._squared_poly, (lo2, hi2), target)
            bits = max(64, int(-math.log2(float(width))) + 16)
            a, _ = _sqrt_bounds(lo2, bits)
            _, b = _sqrt_bounds(hi2, bits)
            if b - a < width:
                break
            target /= 16
        self.lower, self.upper, self._squared_interval = a, b, (lo2, hi2)
        return self

    def contains(self, x) -> bool:
        if self.exact is not None:
            return compare(self.exact, x) == 0
        x = as_q(x)
        return self.lower <= x <= self.upper

    def eigenvalue(self):
        """The dominant real eigenvalue ``sign * rho`` when there is one."""
        if self.sign is None:
            raise NotHyperbolicError("dominant eigenvalue is not real")
        if self.exact is not None:
            return self.exact if self.sign > 0 else -self.exact
        return (self.lower, self.upper) if self.sign > 0 else (-self.upper, -self.lower)

    def describe(self) -> str:
        if self.exact is not None:
            return str(self.exact)
        return f"[{mpmath.nstr(_frac(self.lower), 25)}, {mpmath.nstr(_frac(self.upper), 25)}]"


def spectral_radius(M: Sequence, width=DEFAULT_WIDTH) -> SpectralRadius:
    # rational matrices: same roots after clearing denominators
    c, _ = la.faddeev_leverrier([[as_q(x) for x in r] for r in M])
    return spectral_radius_of_poly(upoly.primitive_integer(c), width)


def spectral_radius_of_poly(chi: Sequence, width=DEFAULT_WIDTH) -> SpectralRadius:
    """Largest root modulus of an integer polynomial, exact when possible."""
    chi = [int(c) for c in chi]
    width = as_q(width)
    rest, cyc = upoly.strip_cyclotomic(chi)
    rroots = upoly.rational_roots(rest)
    for r, k in rroots:
        for _ in range(k):
            rest = upoly.divmod_(rest, [-r, mpq(1)])[0]
    stripped = {"cyclotomic": cyc, "rational": [(r, k) for r, k in rroots]}
    # (modulus, sign of the root when real) for every stripped root
    moduli = [(mpq(1), {1: 1, 2: -1}.get(n)) for n, _ in cyc]
    moduli += [(abs(r), 1 if r > 0 else -1 if r < 0 else None) for r, _ in rroots]
    best_m = max((m for m, _ in moduli), default=mpq(0))
    signs = {sg for m, sg in moduli if m == best_m and sg is not None}
    best_sign = 1 if 1 in signs else -1 if -1 in signs else None
    core = upoly.squarefree(rest) if upoly.deg(rest) >= 1 else []

    def rational_result(method):
        m = best_m
        return SpectralRadius(chi, QuadExt.from_rational(m), m, m, method, best_sign, core, stripped)

    if upoly.deg(core) < 1:
        return rational_result("rational and cyclotomic factors")
    if upoly.deg(core) == 2:
        roots = _quad_roots(core)
        if roots:
            big = max(roots, key=lambda r: abs(r))
            rho = abs(big)
            sign = 1 if big.sign() > 0 else -1
        else:
            q = core[0]  # |root|^2 for a monic quadratic with complex roots
            num, den = int(q.numerator), int(q.denominator)
            rho = QuadExt(0, mpq(1, den), num * den)
            sign = None
        c = compare(rho, best_m)
        if c < 0:
            return rational_result("rational and cyclotomic factors")
        if c == 0 and best_sign is not None:
            sign = best_sign if sign is None else sign
        return SpectralRadius(chi, rho, None, None, "quadratic factor, exact", sign, core, stripped)
    return _radius_by_squares(chi, core, best_m, best_sign, width, stripped)


def _radius_by_squares(chi, core, best_m, best_sign, width, stripped) -> SpectralRadius:
    # eigenvalues of C (x) C are the products of root pairs, so rho^2 is the
    # largest real root of its characteristic polynomial
    C = la.companion(core)
    c2, _ = la.faddeev_leverrier(la.kron(C, C))
    P2 = upoly.squarefree(c2)
    roots = upoly.isolate_real_roots(P2)
    lo2, hi2 = roots[-1]
    sr = SpectralRadius(chi, None, mpq(0), mpq(0), "Sturm isolation of squared radius", None, core, stripped,
                        P2, (lo2, hi2))
    sr.lower, sr.upper = mpq(0), mpq(10) ** 9
    sr.refine(width)
    if best_m * best_m > sr._squared_interval[1]:
        return SpectralRadius(chi, QuadExt.from_rational(best_m), best_m, best_m,
                              "rational and cyclotomic factors", best_sign, core, stripped)
    # real dominant eigenvalue?
    seq = upoly.sturm_sequence(core)
    if upoly.count_roots(seq, sr.lower, sr.upper) >= 1:
        sr.sign = 1
    elif upoly.count_roots(seq, -sr.upper, -sr.lower) >= 1:
        sr.sign = -1
    return sr


# -- hyperbolic splitting -------------------------------------------------------

@dataclass
class HyperbolicSplit:
    lam: object
    e_plus: list
    e_minus: list
    w: list
    pairing: object
    exact: bool
    alpha: object = None
    beta: object = None
    checks: dict = field(default_factory=dict)
    radius: SpectralRadius | None = None


def _adj_column(N: list, x) -> list | None:
    d = len(N[0])
    A = None
    for k in range(len(N) - 1, -1, -1):
        term = [[c for c in row] for row in N[k]]
        if A is None:
            A = term
        else:
            A = [[a * x + b for a, b in zip(ra, rb)] for ra, rb in zip(A, term)]
    for j in range(d):
        col = [A[i][j] for i in range(d)]
        if any(_nonzero(c) for c in col):
            return col
    return None


def _nonzero(c) -> bool:
    if isinstance(c, mpmath.ctx_iv.ivmpf):
        return not (c.a <= 0 <= c.b)
    return bool(c != 0)


def hyperbolic_split(M: Sequence, G: Sequence, H: Sequence, bits: int = 256) -> HyperbolicSplit:
    """Write ``H = e_+ + e_- + w`` with ``M e_+- = lambda^{+-1} e_+-`` and
    ``w`` orthogonal to both."""
    M = [list(r) for r in M]
    G = [list(r) for r in G]
    H = [int(x) for x in H]
    if not is_isometry(M, G):
        raise LatticeError("pullback is not an isometry of the form")
    HH = la.pairing(H, G, H)
    if HH <= 0:
        raise LatticeError(f"class has non-positive self-intersection {HH}")
    sr = spectral_radius(M)
    if compare(sr.exact, 1) <= 0 if sr.exact is not None else sr.upper <= 1:
        raise NotHyperbolicError("not hyperbolic: spectral radius is at most 1")
    if sr.sign is None:
        raise NotHyperbolicError("not hyperbolic: dominant eigenvalue is not real")
    _, N = la.faddeev_leverrier([[mpq(x) for x in r] for r in M])
    if sr.exact is not None:
        return _split_exact(M, G, H, sr, N)
    return _split_interval(M, G, H, sr, N, bits)


def _split_exact(M, G, H, sr, N) -> HyperbolicSplit:
    lam = sr.eigenvalue()
    mu = lam.inverse()
    ep = _adj_column(N, lam)
    em = _adj_column(N, mu)
    p0 = la.pairing(ep, G, em)
    if p0 == 0:
        raise LatticeError("eigenvectors pair to zero")
    alpha = la.pairing(H, G, em) / p0
    beta = la.pairing(H, G, ep) / p0
    ep = [alpha * c for c in ep]
    em = [beta * c for c in em]
    p = la.pairing(ep, G, em)
    w = [h - a - b for h, a, b in zip(H, ep, em)]
    ww = la.pairing(w, G, w)
    checks = {
        "e+.e+ = 0": la.pairing(ep, G, ep) == 0,
        "e-.e- = 0": la.pairing(em, G, em) == 0,
        "e+.e- != 0": p != 0,
        "alpha*beta*(e+.e-) > 0": (alpha * beta * p0).sign() > 0 if isinstance(alpha * beta * p0, QuadExt) else alpha * beta * p0 > 0,
        "w.e+ = 0": la.pairing(w, G, ep) == 0,
        "w.e- = 0": la.pairing(w, G, em) == 0,
        "w.w <= 0": _sgn(ww) <= 0,
        "M e+ = lambda e+": la.mat_vec(M, ep) == [lam * c for c in ep],
        "M e- = lambda^-1 e-": la.mat_vec(M, em) == [mu * c for c in em],
        "simple dominant eigenvalue": _is_simple(sr),
    }
    return HyperbolicSplit(lam, ep, em, w, p, True, alpha, beta, checks, sr)


def _sgn(x) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    x = as_q(x)
    return (x > 0) - (x < 0)


def _is_simple(sr: SpectralRadius) -> bool:
    """The dominant eigenvalue is a simple root of the characteristic polynomial."""
    if sr.exact is None:
        core = sr.core
        return upoly.divmod_(sr.charpoly, upoly.mul(core, core))[1] != []
    lam = sr.exact
    minpoly = lam.minimal_polynomial()
    sq = upoly.mul(minpoly, minpoly)
    return bool(upoly.divmod_(sr.charpoly, sq)[1])


def _split_interval(M, G, H, sr, N, bits) -> HyperbolicSplit:
    iv = mpmath.iv
    sr.refine(mpq(1, 2 ** (bits // 2)))
    with mpmath.workprec(bits):
        iv.prec = bits
        lo, hi = sr.eigenvalue()
        lam = iv.mpf([mpmath.mpf(_frac(lo)), mpmath.mpf(_frac(hi))])
        mu = 1 / lam
        Niv = [[[iv.mpf(_frac(x)) for x in row] for row in Nk] for Nk in N]
        ep = _adj_column(Niv, lam)
        em = _adj_column(Niv, mu)
        if ep is None or em is None:
            raise PrecisionExhausted("precision exhausted: eigenvector not certified; retry with more bits")
        p0 = _ivpair(ep, G, em)
        if not _nonzero(p0):
            raise PrecisionExhausted("precision exhausted: cannot certify e+.e- != 0; retry with more bits")
        alpha = _ivpair(H, G, em) / p0
        beta = _ivpair(H, G, ep) / p0
        ep = [alpha * c for c in ep]
        em = [beta * c for c in em]
        p = _ivpair(ep, G, em)
        d = len(H)
        if d == 2:
            w = [iv.mpf(0)] * 2
        else:
            w = [h - a - b for h, a, b in zip(H, ep, em)]
        ww = _ivpair(w, G, w)
        if d > 2 and ww.b > 0:
            if ww.a > 0:
                raise LatticeError("w.w > 0 contradicts the signature")
            raise PrecisionExhausted("precision exhausted: sign of w.w not certified; retry with more bits")
        checks = {
            "e+.e+ = 0": _contains_zero(_ivpair(ep, G, ep)),
            "e-.e- = 0": _contains_zero(_ivpair(em, G, em)),
            "e+.e- != 0": _nonzero(p),
            "w.w <= 0": ww.b <= 0,
            "simple dominant eigenvalue": _is_simple(sr),
        }
    return HyperbolicSplit(lam, ep, em, w, p, False, alpha, beta, checks, sr)


def _frac(q):
    q = as_q(q)
    return mpmath.mpf(int(q.numerator)) / int(q.denominator)


def _contains_zero(x) -> bool:
    return x.a <= 0 <= x.b


def _ivpair(u, G, v):
    acc = mpmath.iv.mpf(0)
    for i in range(len(u)):
        for j in range(len(v)):
            if G[i][j]:
                acc += u[i] * G[i][j] * v[j]
    return acc


# -- intersection sequences and the doubling inequality -------------------------

@dataclass
class IntersectionSequence:
    values: list
    verdict: bool
    failures: list
    boundary: list


def intersection_sequence(M: Sequence, G: Sequence, H: Sequence, C: Sequence, j_max: int) -> IntersectionSequence:
    """``s_j = (M^j H).C`` by integer powering; verdict ``s_{j+1} > 2 s_j``."""
    M = [list(r) for r in M]
    G = [list(r) for r in G]
    v = [int(x) for x in H]
    C = [int(x) for x in C]
    values = []
    for _ in range(j_max + 1):
        values.append(la.pairing(v, G, C))
        v = la.mat_vec(M, v)
    failures = [j for j in range(j_max) if not values[j + 1] > 2 * values[j]]
    boundary = [j for j in range(j_max) if values[j + 1] == 2 * values[j]]
    return IntersectionSequence(values, not failures, failures, boundary)


def eigen_formula(split: HyperbolicSplit, M: Sequence, G: Sequence, j: int):
    """``(lambda^j + lambda^-j)(e+.e-) + (M^j w).w`` from an exact split."""
    if not split.exact:
        raise LatticeError("closed form needs an exact split")
    M = [list(r) for r in M]
    lam = split.lam
    wj = la.mat_vec(la.mat_pow(M, j), split.w)
    return (lam ** j + lam ** (-j)) * split.pairing + la.pairing(wj, [list(r) for r in G], split.w)


def cauchy_schwarz_check(M: Sequence, G: Sequence, split: HyperbolicSplit, j_max: int) -> dict:
    """Per-j checks of ``|(M^j w).w| <= |w.w|`` and of the doubling step
    ``lam^{j+1}+lam^{-j-1} + a_{j+1}/p > 2(lam^j + lam^-j + a_j/p)``."""
    M = [list(r) for r in M]
    G = [list(r) for r in G]
    lam, p, w = split.lam, split.pairing, split.w
    a = []
    v = list(w)
    for _ in range(j_max + 2):
        a.append(la.pairing(v, G, w))
        v = la.mat_vec(M, v)
    ww = a[0]
    rows = []
    ok = True
    for j in range(j_max + 1):
        lhs = lam ** (j + 1) + lam ** (-(j + 1)) + a[j + 1] / p
        rhs = 2 * (lam ** j + lam ** (-j) + a[j] / p)
        if split.exact:
            cs = _sgn(a[j] * a[j] - ww * ww) <= 0
            cs_eq = _sgn(a[j] * a[j] - ww * ww) == 0
            dbl = _sgn(lhs - rhs) > 0
            mid = (2 * a[j] - a[j + 1]) / p
            bound = _sgn(mid + 3 * ww / p) <= 0 and _sgn(-3 * ww / p - 6) < 0
        else:
            diff = a[j] * a[j] - ww * ww
            cs = diff.a <= 0 if diff.b > 0 else True
            cs_eq = _contains_zero(diff)
            dd = lhs - rhs
            dbl = dd.a > 0
            mid = (2 * a[j] - a[j + 1]) / p + 3 * ww / p
            bound = mid.a <= 0 or _contains_zero(mid)
        rows.append({"j": j, "cauchy_schwarz": cs, "equality": cs_eq, "doubling": dbl, "bound_below_6": bound})
        ok = ok and cs and dbl
    return {"holds": ok, "rows": rows, "w.w": ww}


# -- thresholds ---------------------------------------------------------------

@dataclass
class ThresholdResult:
    n: int | None
    boundary: bool
    note: str = ""


def _as_lambda(lam):
    if isinstance(lam, SpectralRadius):
        return lam.exact if lam.exact is not None else lam
    if isinstance(lam, QuadExt):
        return lam
    if isinstance(lam, tuple):
        return lam
    return QuadExt.from_rational(as_q(lam))


def threshold_min_power(lam, bound: QuadExt = MAIN_THRESHOLD, max_power: int = 100000) -> ThresholdResult:
    """Smallest ``n >= 1`` with ``lam^n >= bound`` (exact), else ``None``."""
    lam = _as_lambda(lam)
    if isinstance(lam, QuadExt):
        c = compare(lam, 1)
        if c < 0:
            raise LatticeError("lambda below 1")
        if c == 0:
            return ThresholdResult(None, False, "lambda = 1: no power reaches the bound")
        start = max(1, int(math.log(float(bound)) / math.log(float(lam))) - 1)
        for n in range(start, max_power + 1):
            c = compare(lam ** n, bound)
            if c >= 0:
                if n > 1 and compare(lam ** (n - 1), bound) >= 0:
                    return threshold_min_power(lam, bound, n - 1)
                return ThresholdResult(n, c == 0, "boundary equality" if c == 0 else "")
        return ThresholdResult(None, False, "search limit reached")
    # certified enclosure
    sr = lam if isinstance(lam, SpectralRadius) else None
    lo, hi = (lam.lower, lam.upper) if sr else (as_q(lam[0]), as_q(lam[1]))
    if hi < 1:
        raise LatticeError("lambda below 1")
    if lo <= 1:
        if sr is None:
            raise PrecisionExhausted("precision exhausted: enclosure touches 1")
        sr.refine(sr.width / 2**32)
        return threshold_min_power(sr, bound, max_power)
    n = 1
    while n <= max_power:
        if compare(QuadExt.from_rational(hi ** n), bound) < 0:
            n += 1
            continue
        if compare(QuadExt.from_rational(lo ** n), bound) >= 0:
            return ThresholdResult(n, False)
        if sr is None:
            raise PrecisionExhausted("precision exhausted: retry with a tighter enclosure")
        sr.refine(sr.width / 2**32)
        lo, hi = sr.lower, sr.upper
    return ThresholdResult(None, False, "search limit reached")


def cor_improve_applies(M: Sequence, n: int) -> dict:
    """Whether the eigenvalues of ``M^n`` lie in ``{1, rho^n, rho^-n}``."""
    Mn = la.mat_pow([list(r) for r in M], n)
    chi = la.charpoly(Mn)
    rest = upoly.to_q(chi)
    ones = 0
    while upoly.deg(rest) >= 1 and upoly.evaluate(rest, 1) == 0:
        rest = upoly.divmod_(rest, [mpq(-1), mpq(1)])[0]
        ones += 1
    report = {"charpoly": chi, "unit_multiplicity": ones, "applies": False,
              "eigenvalue": None, "above_improved_threshold": None}
    if upoly.deg(rest) == 2 and rest[0] == 1 and -rest[1] > 2:
        lam = max(_quad_roots(rest), key=float)
        report["applies"] = True
        report["eigenvalue"] = lam
        report["above_improved_threshold"] = compare(lam, IMPROVED_THRESHOLD) > 0
    return report
