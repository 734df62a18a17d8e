"""Multivariate polynomial GCD over the rationals.

Subresultant pseudo-remainder sequences on the last variable that occurs,
with content and primitive parts computed recursively in the remaining
variables.  Monomial factors are split off first; they are common in
Cremona-type maps and make the subresultant loop unnecessary.
"""

from __future__ import annotations

from .poly import MultiPoly

_TRIAL_DIVISION_TERMS = 4000


def _monomial_part(f: MultiPoly) -> tuple:
    return f.min_degrees()


def _strip_monomial(f: MultiPoly, exp: tuple) -> MultiPoly:
    if not any(exp):
        return f
    neg = tuple(-x for x in exp)
    return f.mul_monomial(neg)


def _to_univ(f: MultiPoly, v: int) -> list:
    parts = f.coefficients_in(v)
    deg = max(parts)
    zero = MultiPoly.zero(f.vars)
    return [parts.get(k, zero) for k in range(deg + 1)]


def _from_univ(coeffs: list, v: int) -> MultiPoly:
    out = MultiPoly.zero(coeffs[0].vars)
    n = coeffs[0].nvars
    for k, c in enumerate(coeffs):
        if c:
            e = [0] * n
            e[v] = k
            out = out + c.mul_monomial(e)
    return out


def _trim(coeffs: list) -> list:
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _prem(A: list, B: list) -> list:
    """Pseudo-remainder ``lc(B)^(deg A - deg B + 1) * A mod B``."""
    n = len(B) - 1
    lcB = B[-1]
    R = list(A)
    e = len(A) - len(B) + 1
    while R and len(R) - 1 >= n:
        lead = R[-1]
        s = len(R) - 1 - n
        R = [lcB * c for c in R]
        for i, b in enumerate(B):
            if b:
                R[i + s] = R[i + s] - lead * b
        _trim(R)
        e -= 1
    if e > 0 and R:
        f = lcB ** e
        R = [f * c for c in R]
    return R


def _content_univ(coeffs: list) -> MultiPoly:
    g = None
    for c in coeffs:
        if not c:
            continue
        g = c.primitive() if g is None else poly_gcd(g, c)
        if g.is_constant():
            return MultiPoly.one(c.vars)
    return g


def _divexact_univ(coeffs: list, c: MultiPoly) -> list:
    if c.is_constant():
        inv = 1 / c.constant_value()
        return [x.scale(inv) for x in coeffs]
    return [x.divexact(c) for x in coeffs]


def _subresultant_gcd(A: list, B: list) -> list:
    """GCD of two primitive univariate polynomials over a multivariate domain."""
    if len(B) > len(A):
        A, B = B, A
    one = MultiPoly.one(A[0].vars)
    g = one
    h = one
    while True:
        delta = len(A) - len(B)
        R = _prem(A, B)
        if not R:
            return B
        if len(R) == 1:
            return [one]
        A = B
        div = g * h ** delta
        B = _divexact_univ(R, div)
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = (g ** delta).divexact(h ** (delta - 1))


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Greatest common divisor, primitive with positive leading coefficient."""
    if f.vars != g.vars:
        raise ValueError("gcd of polynomials over different variables")
    if not f:
        return g.primitive() if g else MultiPoly.zero(f.vars)
    if not g:
        return f.primitive()
    if f.is_constant() or g.is_constant():
        return MultiPoly.one(f.vars)
    mf, mg = _monomial_part(f), _monomial_part(g)
    mono = tuple(min(a, b) for a, b in zip(mf, mg))
    if f.is_monomial() or g.is_monomial():
        return MultiPoly.monomial(f.vars, mono)
    f = _strip_monomial(f, mf).primitive()
    g = _strip_monomial(g, mg).primitive()
    core = _gcd_no_monomial(f, g)
    if any(mono):
        core = core.mul_monomial(mono)
    return core


def _gcd_no_monomial(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    if f.is_constant() or g.is_constant():
        return MultiPoly.one(f.vars)
    if f == g:
        return f.primitive()
    # cheap exact-division probe
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    if len(big.terms) <= _TRIAL_DIVISION_TERMS and all(
        a <= b for a, b in zip(small.degrees(), big.degrees())
    ):
        if not big.divmod(small)[1]:
            return small.primitive()
    n = f.nvars
    used = [i for i in range(n) if f.uses(i) or g.uses(i)]
    v = used[-1]
    fv, gv = f.uses(v), g.uses(v)
    if not (fv and gv):
        # the gcd cannot involve v: reduce to the content with respect to v
        with_v, without = (f, g) if fv else (g, f)
        acc = without
        for c in with_v.coefficients_in(v).values():
            acc = poly_gcd(acc, c)
            if acc.is_constant():
                return MultiPoly.one(f.vars)
        return acc.primitive()
    A, B = _to_univ(f, v), _to_univ(g, v)
    ca, cb = _content_univ(A), _content_univ(B)
    c = poly_gcd(ca, cb)
    A = _divexact_univ(A, ca)
    B = _divexact_univ(B, cb)
    G = _subresultant_gcd(A, B)
    G = _divexact_univ(G, _content_univ(G))
    result = _from_univ(G, v)
    if not c.is_constant():
        result = result * c
    return result.primitive()


def poly_lcm(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    if not f or not g:
        return MultiPoly.zero(f.vars)
    return (f * g.divexact(poly_gcd(f, g))).primitive()


def cofactors(f: MultiPoly, g: MultiPoly) -> tuple:
    """``(h, f/h, g/h)`` with ``h = gcd(f, g)``."""
    h = poly_gcd(f, g)
    if h.is_constant():
        c = h.constant_value() if h else 1
        return h, f.scale(1 / c) if h else f, g.scale(1 / c) if h else g
    return h, f.divexact(h), g.divexact(h)


def squarefree_factors(f: MultiPoly) -> list:
    """Square-free decomposition ``[(factor, multiplicity), ...]``.

    Coordinate-variable factors are reported individually; the constant
    factor is omitted.  The product of ``factor**multiplicity`` equals
    ``f`` up to a rational constant.
    """
    out: list = []
    if not f or f.is_constant():
        return out
    mono = f.min_degrees()
    for i, k in enumerate(mono):
        if k:
            out.append((MultiPoly.var(f.vars, f.vars[i]), k))
    rest = _strip_monomial(f, mono).primitive()
    out.extend(_squarefree_rec(rest))
    return _merge(out)


def _squarefree_rec(f: MultiPoly) -> list:
    if f.is_constant():
        return []
    used = [i for i in range(f.nvars) if f.uses(i)]
    v = used[-1]
    coeffs = _to_univ(f, v)
    cont = _content_univ(coeffs)
    pp = _from_univ(_divexact_univ(coeffs, cont), v).primitive()
    out = _squarefree_rec(cont.primitive()) if not cont.is_constant() else []
    # Yun's algorithm in v
    df = pp.derivative(v)
    a0 = poly_gcd(pp, df)
    b = pp.divexact(a0)
    c = df.divexact(a0)
    d = c - b.derivative(v)
    i = 1
    while not b.is_constant():
        a = poly_gcd(b, d)
        if not a.is_constant():
            out.append((a.primitive(), i))
        b = b.divexact(a)
        c = d.divexact(a)
        d = c - b.derivative(v)
        i += 1
    return out


def _merge(factors: list) -> list:
    merged: dict = {}
    order: list = []
    for p, k in factors:
        if p not in merged:
            order.append(p)
            merged[p] = 0
        merged[p] += k
    return [(p, merged[p]) for p in order]
