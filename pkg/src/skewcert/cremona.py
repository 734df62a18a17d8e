"""Birational self-maps of the projective plane as primitive homogeneous triples.

Composition substitutes one triple into the other and cancels the common
factor of the three results, which is how the degree of an iterate can
drop below the product of degrees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
from gmpy2 import mpq

from .exactcore.gcd import poly_gcd, squarefree_factors
from .exactcore.poly import MultiPoly, as_q
from .exactcore.quad import QuadExt
from .exactcore.ratfunc import RatFunc
from . import linalg

PVARS = ("x", "y", "z")
AVARS = ("x", "y")
DEFAULT_DEGREE_BUDGET = 512


class CremonaError(ValueError):
    pass


def _normalize_triple(forms: Sequence[MultiPoly]) -> tuple:
    """Divide out the rational content shared by the three forms and fix the sign."""
    from math import gcd, lcm

    den = 1
    for f in forms:
        for c in f.terms.values():
            den = lcm(den, int(c.denominator))
    g = 0
    for f in forms:
        for c in f.terms.values():
            g = gcd(g, int(c * den))
    lead = next(f for f in reversed(forms) if f).leading_coefficient()
    scale = mpq(den, g if lead > 0 else -g)
    return tuple(f.scale(scale) for f in forms)


@dataclass(frozen=True)
class PlaneMap:
    forms: tuple
    _restr: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        forms = tuple(self.forms)
        if len(forms) != 3:
            raise CremonaError("a plane map needs three forms")
        if not any(forms):
            raise CremonaError("all three forms vanish")
        degs = {f.total_degree() for f in forms if f}
        if len(degs) != 1 or not all(f.is_homogeneous() for f in forms if f):
            raise CremonaError("forms must be homogeneous of one common degree")
        if any(f.vars != PVARS for f in forms):
            raise CremonaError("forms must be polynomials in x, y, z")
        object.__setattr__(self, "forms", forms)

    @classmethod
    def from_strings(cls, texts: Sequence[str]) -> "PlaneMap":
        return primitive_map([MultiPoly.parse(t, PVARS) for t in texts])

    @classmethod
    def identity(cls) -> "PlaneMap":
        return cls(tuple(MultiPoly.var(PVARS, v) for v in PVARS))

    @property
    def degree(self) -> int:
        return next(f for f in self.forms if f).total_degree()

    def is_identity(self) -> bool:
        return self == PlaneMap.identity()

    def to_strings(self) -> list:
        return [str(f) for f in self.forms]

    def __str__(self) -> str:
        return "(" + " : ".join(self.to_strings()) + ")"


def _monomial_gcd(forms: Sequence[MultiPoly]) -> tuple:
    mins = None
    for f in forms:
        if f:
            m = f.min_degrees()
            mins = m if mins is None else tuple(min(a, b) for a, b in zip(mins, m))
    return mins


def _strip_monomial(forms: Sequence[MultiPoly], mins: tuple) -> list:
    if not any(mins):
        return list(forms)
    return [MultiPoly._raw(PVARS, {tuple(a - b for a, b in zip(e, mins)): c for e, c in f.terms.items()})
            for f in forms]


# -- restrictions to random lines modulo primes ---------------------------------------
#
# A common factor of the three forms restricts to a common factor of their
# restrictions to a generic line.  Each map carries its restrictions to two
# fixed probe lines, updated through composition, so the coprimality screen
# never has to evaluate a large form.

def _make_probes(seed: int = 17, count: int = 2) -> tuple:
    rng = random.Random(seed)
    probes = []
    for _ in range(count):
        p = int(gmpy2.next_prime(rng.getrandbits(40) | (1 << 39)))
        line = tuple((rng.randrange(p), rng.randrange(1, p)) for _ in range(3))  # b + a s
        probes.append((p, line))
    return tuple(probes)


PROBES = _make_probes()


def _utrim(h: list) -> list:
    while h and h[-1] == 0:
        h.pop()
    return h


def _umul(f: list, g: list, p: int) -> list:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _utrim([c % p for c in out])


def _uadd(f: list, g: list, p: int) -> list:
    n = max(len(f), len(g))
    return _utrim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def _udivmod(f: list, g: list, p: int) -> tuple:
    g = _utrim(list(g))
    r = list(f)
    if len(r) < len(g):
        return [], _utrim(r)
    q = [0] * (len(r) - len(g) + 1)
    inv = pow(g[-1], -1, p)
    while len(r) >= len(g) and r:
        c = r[-1] * inv % p
        k = len(r) - len(g)
        q[k] = c
        for i, b in enumerate(g):
            r[i + k] = (r[i + k] - c * b) % p
        _utrim(r)
    return _utrim(q), r


def _ugcd(f: list, g: list, p: int) -> list:
    f, g = _utrim(list(f)), _utrim(list(g))
    while g:
        f, g = g, _udivmod(f, g, p)[1]
    return f


def _upow(f: list, k: int, p: int) -> list:
    out, base = [1], f
    while k:
        if k & 1:
            out = _umul(out, base, p)
        k >>= 1
        if k:
            base = _umul(base, base, p)
    return out


def _restrict_form(f: MultiPoly, images: Sequence[list], p: int) -> list:
    """``f`` evaluated on univariate polynomials modulo ``p``."""
    powers: dict = {}

    def pw(i, k):
        key = (i, k)
        if key not in powers:
            powers[key] = _upow(images[i], k, p)
        return powers[key]

    acc: list = []
    for e, c in f.terms.items():
        c = int(c.numerator) * pow(int(c.denominator), -1, p) % p
        term = [c]
        for i, k in enumerate(e):
            if k:
                term = _umul(term, pw(i, k), p)
        acc = _uadd(acc, term, p)
    return acc


def _line_images(probe) -> list:
    p, line = probe
    return [[b % p, a % p] for b, a in line]


def _restrictions(m: "PlaneMap") -> tuple:
    cached = m._restr
    if cached is None:
        cached = tuple(tuple(_restrict_form(f, _line_images(pr), pr[0]) for f in m.forms) for pr in PROBES)
        object.__setattr__(m, "_restr", cached)
    return cached


def primitive_map(forms: Sequence[MultiPoly], restr=None) -> PlaneMap:
    """Cancel the gcd of three forms and normalize the scalar.

    ``restr`` optionally holds (or lazily produces) the restrictions of
    ``forms`` to the probe lines; they are updated alongside the forms.
    """
    forms = [f.with_vars(PVARS) if f.vars != PVARS else f for f in forms]
    if not any(forms):
        raise CremonaError("all three forms vanish")
    mins = _monomial_gcd(forms)
    stripped = _strip_monomial(forms, mins)
    if all(f.is_monomial() for f in stripped if f):
        # monomials without a common monomial factor are coprime
        return PlaneMap(_normalize_triple(stripped))
    if callable(restr):
        restr = restr()
    if restr is None:
        restr = tuple(tuple(_restrict_form(f, _line_images(pr), pr[0]) for f in forms) for pr in PROBES)
    if any(mins):
        mono = MultiPoly.monomial(PVARS, mins)
        new = []
        for pr, rs in zip(PROBES, restr):
            mr = _restrict_form(mono, _line_images(pr), pr[0])
            new.append(tuple(_udivmod(r, mr, pr[0])[0] for r in rs))
        restr = tuple(new)
    forms = stripped
    coprime = False
    for (p, _), rs in zip(PROBES, restr):
        g = rs[0]
        for r in rs[1:]:
            g = _ugcd(g, r, p)
        if len(g) <= 1:
            coprime = True
            break
    if not coprime:
        nz = sorted((f for f in forms if f), key=lambda f: len(f.terms))
        g = nz[0]
        for f in nz[1:]:
            g = poly_gcd(g, f)
            if g.is_constant():
                break
        if not g.is_constant():
            forms = [f.divexact(g) if f else f for f in forms]
            restr = None
    m = PlaneMap(_normalize_triple(forms))
    if restr is not None:
        object.__setattr__(m, "_restr", restr)
    return m


def homogenize(images: Sequence[RatFunc]) -> PlaneMap:
    """Affine ``(x, y) -> (f, g)`` as a primitive triple in ``x, y, z``."""
    if len(images) != 2:
        raise CremonaError("need two affine images")
    imgs = [g if isinstance(g, RatFunc) else RatFunc.parse(str(g), AVARS) for g in images]
    from .exactcore.gcd import poly_lcm

    D = poly_lcm(imgs[0].den, imgs[1].den)
    nums = [g.num * D.divexact(g.den) for g in imgs] + [D]
    d = max(p.total_degree() for p in nums)
    forms = []
    for p in nums:
        terms = {}
        for e, c in p.terms.items():
            terms[(e[0], e[1], d - sum(e))] = c
        forms.append(MultiPoly(PVARS, terms))
    m = primitive_map(forms)
    if not jacobian_determinant(m):
        raise CremonaError("degenerate map: image is not two-dimensional")
    return m


def compose_primitive(sigma: PlaneMap, tau: PlaneMap) -> PlaneMap:
    """``sigma o tau``: substitute tau's forms into sigma's, then cancel."""
    raw = [f.substitute(list(tau.forms)) for f in sigma.forms]
    if not any(raw):
        raise CremonaError("composite is identically zero")

    def restr():
        tr = _restrictions(tau)
        return tuple(tuple(_restrict_form(f, rs, pr[0]) for f in sigma.forms) for pr, rs in zip(PROBES, tr))

    return primitive_map(raw, restr)


@dataclass
class DegreeSequence:
    degrees: list
    drops: list
    lambda_estimate: float
    lambda_root: float | None = None
    recurrence: list | None = None        # d_n = sum c_k d_{n-k}
    partial: bool = False
    note: str = ""
    radius: object = None

    def to_json(self) -> dict:
        out = {"degrees": self.degrees, "drops": self.drops,
               "lambda_estimate": self.lambda_estimate,
               "lambda_root_estimate": self.lambda_nth_root(), "partial": self.partial}
        if self.recurrence is not None:
            out["recurrence"] = self.recurrence
        if self.note:
            out["note"] = self.note
        return out

    def lambda_nth_root(self) -> float:
        N = len(self.degrees)
        return float(self.degrees[-1]) ** (1.0 / N)


def fit_recurrence(seq: Sequence[int], max_order: int = 4) -> list | None:
    """Shortest integer recurrence ``d_n = sum_k c_k d_(n-k)`` valid on all terms."""
    seq = list(seq)
    for k in range(1, max_order + 1):
        if len(seq) < 2 * k + 1:
            break
        rows = [[mpq(seq[i - r]) for r in range(1, k + 1)] for i in range(k, 2 * k)]
        rhs = [mpq(seq[i]) for i in range(k, 2 * k)]
        aug = [row + [v] for row, v in zip(rows, rhs)]
        R, piv = linalg.rref(aug)
        if k in piv or len(piv) < k:
            continue
        coeffs = [R[i][k] for i in range(k)]
        if any(c.denominator != 1 for c in coeffs):
            continue
        if all(seq[i] == sum(c * seq[i - r - 1] for r, c in enumerate(coeffs)) for i in range(k, len(seq))):
            return [int(c) for c in coeffs]
    return None


def degree_sequence(sigma: PlaneMap, N: int, budget: int = DEFAULT_DEGREE_BUDGET) -> DegreeSequence:
    if N < 1:
        raise ValueError("need at least one iterate")
    d1 = sigma.degree
    degrees = [d1]
    current = sigma
    partial = False
    note = ""
    for n in range(1, N):
        if d1 * current.degree > budget:
            partial = True
            note = f"stopped after {n} iterates: next degree bound {d1 * current.degree} exceeds budget {budget}"
            break
        current = compose_primitive(sigma, current)
        degrees.append(current.degree)
    drops = [n for n in range(1, len(degrees)) if degrees[n] < d1 * degrees[n - 1]]
    rec = fit_recurrence(degrees)
    est = float(degrees[-1]) ** (1.0 / len(degrees))
    root = None
    radius = None
    if rec is not None:
        from .nslattice import spectral_radius_of_poly

        chi = [-c for c in reversed(rec)] + [1]
        radius = spectral_radius_of_poly(chi)
        root = float(radius)
        est = root
    return DegreeSequence(degrees, drops, est, root, rec, partial, note, radius)


def conjugate_map(sigma: PlaneMap, pi: PlaneMap, pi_inverse: PlaneMap) -> PlaneMap:
    """Primitive triple of ``pi^-1 o sigma o pi`` after checking the inverse."""
    if not (compose_primitive(pi, pi_inverse).is_identity()
            and compose_primitive(pi_inverse, pi).is_identity()):
        raise CremonaError("supplied inverse does not invert π")
    return compose_primitive(pi_inverse, compose_primitive(sigma, pi))


def jacobian_determinant(sigma: PlaneMap) -> MultiPoly:
    J = [[f.derivative(v) for v in PVARS] for f in sigma.forms]
    return (J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1])
            - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0])
            + J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]))


@dataclass
class ContractedCurves:
    determinant: MultiPoly
    factors: list = field(default_factory=list)   # [(curve, multiplicity)]

    def curves(self) -> list:
        return [f for f, _ in self.factors]

    def to_json(self) -> dict:
        return {"determinant": str(self.determinant),
                "factors": [{"curve": str(f), "multiplicity": k} for f, k in self.factors]}


def contracted_curves(sigma: PlaneMap) -> ContractedCurves:
    det = jacobian_determinant(sigma)
    if not det:
        raise CremonaError("map not birational")
    return ContractedCurves(det, squarefree_factors(det))


@dataclass
class NonGeometricReport:
    lam: object
    obstruction: bool
    reason: str
    minimal_polynomial: list | None = None

    def to_json(self) -> dict:
        return {"lambda": str(self.lam), "obstruction": self.obstruction, "reason": self.reason,
                "minimal_polynomial": None if self.minimal_polynomial is None
                else [str(c) for c in self.minimal_polynomial]}


def henon_nongeometric_report(lam, tol: float = 1e-9) -> NonGeometricReport:
    """Whether ``lam`` can be the spectral radius of a lattice isometry.

    Such a radius is a root of a monic integer polynomial with constant
    term ``±1``; an integer above one never is.
    """
    if isinstance(lam, float):
        r = round(lam)
        if abs(lam - r) > tol:
            return NonGeometricReport(lam, False, "estimate is not recognizably an integer; no conclusion")
        lam = mpq(r)
    if not isinstance(lam, QuadExt):
        lam = QuadExt(as_q(lam))
    if lam.is_rational():
        q = lam.a
        if q <= 1:
            return NonGeometricReport(lam, False, "λ ≤ 1: no obstruction", [-q, mpq(1)])
        if q.denominator != 1:
            return NonGeometricReport(lam, True, "λ is not an algebraic integer", [-q, mpq(1)])
        return NonGeometricReport(
            lam, True,
            f"x − {int(q)} divides no monic integer polynomial with constant term ±1, "
            f"since {int(q)} does not divide 1", [-q, mpq(1)])
    mp = lam.minimal_polynomial()
    if any(c.denominator != 1 for c in mp):
        return NonGeometricReport(lam, True, "λ is not an algebraic integer", mp)
    if abs(mp[0]) == 1:
        return NonGeometricReport(lam, False,
                                  "minimal polynomial is reciprocal-compatible (unit constant term)", mp)
    return NonGeometricReport(lam, True, "λ is an algebraic integer but not a unit", mp)


def henon(a=1, b=1) -> PlaneMap:
    """The Hénon map ``(x, y) -> (1 + y - a x^2, b x)``."""
    a, b = as_q(a), as_q(b)
    return homogenize([RatFunc.parse(f"1 + y - ({a})*x^2", AVARS), RatFunc.parse(f"({b})*x", AVARS)])


def cremona_involution() -> PlaneMap:
    return homogenize([RatFunc.parse("1/x", AVARS), RatFunc.parse("1/y", AVARS)])
