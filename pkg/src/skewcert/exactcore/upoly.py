"""Dense univariate polynomials over Q as coefficient lists, constant first.

Root isolation uses Sturm sequences with exact rational bisection.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .poly import as_q


def trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def to_q(p) -> list:
    return trim([as_q(c) for c in p])


def deg(p: list) -> int:
    return len(p) - 1


def add(p: list, q: list) -> list:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: list, q: list) -> list:
    return add(p, [-c for c in q])


def mul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [mpq(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p: list, c) -> list:
    return trim([c * a for a in p])


def divmod_(p: list, q: list) -> tuple:
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [as_q(c) for c in trim(p)]
    if len(r) < len(q):
        return [], r
    out = [mpq(0)] * (len(r) - len(q) + 1)
    lc = as_q(q[-1])
    while len(r) >= len(q):
        c = r[-1] / lc
        k = len(r) - len(q)
        out[k] = c
        for i, b in enumerate(q):
            r[i + k] -= c * b
        r = trim(r)
    return trim(out), r


def rem(p: list, q: list) -> list:
    return divmod_(p, q)[1]


def monic(p: list) -> list:
    p = to_q(p)
    return [c / p[-1] for c in p] if p else []


def gcd(p: list, q: list) -> list:
    a, b = to_q(p), to_q(q)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def derivative(p: list) -> list:
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p: list, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: list, x) -> int:
    v = evaluate(p, as_q(x))
    return (v > 0) - (v < 0)


def squarefree(p: list) -> list:
    p = to_q(p)
    if len(p) <= 1:
        return p
    g = gcd(p, derivative(p))
    return monic(divmod_(p, g)[0])


def primitive_integer(p: list) -> list:
    """Scale to coprime integer coefficients with positive leading term."""
    from math import gcd as igcd, lcm

    p = to_q(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = lcm(den, int(c.denominator))
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = igcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


# -- Sturm machinery ---------------------------------------------------------

def sturm_sequence(p: list) -> list:
    p = to_q(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        r = rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _variations(seq: list, x) -> int:
    signs = [s for s in (sign_at(p, x) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq: list, a, b) -> int:
    """Number of distinct real roots in the half-open interval ``(a, b]``."""
    return _variations(seq, a) - _variations(seq, b)


def cauchy_bound(p: list) -> mpq:
    """Every complex root has modulus strictly below this rational."""
    p = to_q(p)
    lc = abs(p[-1])
    return 1 + max((abs(c) / lc for c in p[:-1]), default=mpq(0))


def isolate_real_roots(p: list) -> list:
    """Disjoint intervals ``(a, b]`` each holding exactly one real root,
    in increasing order."""
    p = squarefree(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    B = cauchy_bound(p)
    out = []
    stack = [(-B, B)]
    while stack:
        a, b = stack.pop()
        n = count_roots(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))
    out.sort()
    return out


def refine_root(p: list, interval: tuple, width, seq: list | None = None) -> tuple:
    """Shrink an isolating interval ``(a, b]`` below ``width``."""
    p = squarefree(p)
    seq = seq or sturm_sequence(p)
    a, b = as_q(interval[0]), as_q(interval[1])
    width = as_q(width)
    while b - a >= width:
        m = (a + b) / 2
        if sign_at(p, m) == 0:
            return m, m
        if count_roots(seq, a, m) == 1:
            b = m
        else:
            a = m
    return a, b


def largest_real_root(p: list, width) -> tuple | None:
    roots = isolate_real_roots(p)
    if not roots:
        return None
    return refine_root(p, roots[-1], width)


# -- factors of modulus one and rational roots --------------------------------

def _divisors(n: int) -> list:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: list) -> list:
    """Rational roots with multiplicity, as ``[(root, multiplicity)]``."""
    p = primitive_integer(p)
    out = []
    zeros = 0
    while p and p[0] == 0:
        p = p[1:]
        zeros += 1
    if zeros:
        out.append((mpq(0), zeros))
    if len(p) <= 1:
        return out
    cands = set()
    for u in _divisors(p[0]):
        for v in _divisors(p[-1]):
            cands.add(mpq(u, v))
            cands.add(mpq(-u, v))
    q = to_q(p)
    for r in sorted(cands):
        k = 0
        while len(q) > 1 and evaluate(q, r) == 0:
            q = divmod_(q, [-r, mpq(1)])[0]
            k += 1
        if k:
            out.append((r, k))
    return out


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple:
    """Integer coefficients of the n-th cyclotomic polynomial."""
    p = [mpq(-1)] + [mpq(0)] * (n - 1) + [mpq(1)]
    for d in range(1, n):
        if n % d == 0:
            p = divmod_(p, list(cyclotomic(d)))[0]
    return tuple(int(c) for c in p)


def _totient(n: int) -> int:
    out, m, k = n, n, 2
    while k * k <= m:
        if m % k == 0:
            while m % k == 0:
                m //= k
            out -= out // k
        k += 1
    if m > 1:
        out -= out // m
    return out


def strip_cyclotomic(p: list) -> tuple:
    """Remove all cyclotomic factors: ``(rest, [(n, multiplicity), ...])``."""
    q = to_q(p)
    found = []
    # phi(n) >= sqrt(n/2), so larger n cannot divide
    limit = 2 * max(deg(q), 1) ** 2 + 2
    for n in range(1, limit + 1):
        if deg(q) < 1:
            break
        if _totient(n) > deg(q):
            continue
        phi = [mpq(c) for c in cyclotomic(n)]
        k = 0
        while deg(q) >= deg(phi):
            quo, r = divmod_(q, phi)
            if r:
                break
            q, k = quo, k + 1
        if k:
            found.append((n, k))
    return q, found


def is_reciprocal(p: list) -> bool:
    """Palindromic or anti-palindromic integer polynomial."""
    p = trim(p)
    r = p[::-1]
    return r == p or r == [-c for c in p]


def to_string(p: list, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = as_q(p[k])
        if not c:
            continue
        mag = abs(c)
        cs = "" if mag == 1 and k else (str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}")
        mon = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        body = cs + ("*" if cs and mon else "") + mon
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s
