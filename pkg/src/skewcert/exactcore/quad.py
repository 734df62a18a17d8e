"""Exact arithmetic in real quadratic fields Q(sqrt d)."""

from __future__ import annotations

import functools

import gmpy2
import mpmath
from gmpy2 import mpq

from .poly import as_q


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = s * k**2`` with ``s`` squarefree; returns ``(s, k)``."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, k = 1, 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1
    return s * m, k


def _is_squarefree(d: int) -> bool:
    return d > 0 and squarefree_part(d)[0] == d


def sign_sqrt_combo(r, b, d) -> int:
    """Exact sign of ``r + b*sqrt(d)`` with rationals ``r, b`` and ``d > 0``."""
    r, b = as_q(r), as_q(b)
    sr = (r > 0) - (r < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0 or d == 0:
        return sr
    if sr == 0 or sr == sb:
        return sb
    # opposite signs: compare r^2 with b^2 d
    diff = r * r - b * b * d
    if diff == 0:
        return 0
    return sr if diff > 0 else sb


@functools.total_ordering
class QuadExt:
    """``a + b*sqrt(d)`` with squarefree ``d >= 1``; ``d = 1`` means rational."""

    __slots__ = ("d", "a", "b")

    def __init__(self, a=0, b=0, d: int = 1):
        d = int(d)
        if d < 1:
            raise ValueError("only real quadratic fields are supported")
        a, b = as_q(a), as_q(b)
        if d != 1 and not _is_squarefree(d):
            s, k = squarefree_part(d)
            d, b = s, b * k
        if d == 1:
            a, b = a + b, mpq(0)
        self.d, self.a, self.b = d, a, b

    @classmethod
    def sqrt(cls, d: int) -> "QuadExt":
        return cls(0, 1, d)

    @classmethod
    def from_rational(cls, r, d: int = 1) -> "QuadExt":
        out = object.__new__(cls)
        out.d, out.a, out.b = d, as_q(r), mpq(0)
        return out

    def is_rational(self) -> bool:
        return self.b == 0

    def _co(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.d == self.d or other.is_rational():
                return other if other.d == self.d else QuadExt.from_rational(other.a, self.d)
            if self.is_rational():
                raise _Promote(other.d)
            raise ValueError(f"cannot mix Q(sqrt {self.d}) and Q(sqrt {other.d})")
        return QuadExt.from_rational(as_q(other), self.d)

    def _lift(self, other):
        try:
            return self, self._co(other)
        except _Promote as p:
            return QuadExt.from_rational(self.a, p.d), other

    def __add__(self, other):
        x, y = self._lift(other)
        return QuadExt._mk(x.a + y.a, x.b + y.b, x.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._mk(-self.a, -self.b, self.d)

    def __sub__(self, other):
        x, y = self._lift(other)
        return QuadExt._mk(x.a - y.a, x.b - y.b, x.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x, y = self._lift(other)
        return QuadExt._mk(x.a * y.a + x.b * y.b * x.d, x.a * y.b + x.b * y.a, x.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt._mk(self.a, -self.b, self.d)

    def norm(self) -> mpq:
        return self.a * self.a - self.b * self.b * self.d

    def trace(self) -> mpq:
        return 2 * self.a

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadExt._mk(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        x, y = self._lift(other)
        return x * y.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "QuadExt":
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadExt.from_rational(1, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    @staticmethod
    def _mk(a, b, d) -> "QuadExt":
        out = object.__new__(QuadExt)
        out.d, out.a, out.b = d, a, b
        return out

    # -- order ----------------------------------------------------------
    def sign(self) -> int:
        return sign_sqrt_combo(self.a, self.b, self.d)

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadExt):
            if other.is_rational() and self.is_rational():
                return self.a == other.a
            return self.d == other.d and self.a == other.a and self.b == other.b
        try:
            return self.is_rational() and self.a == as_q(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.a)
        return hash((self.d, self.a, self.b))

    def __lt__(self, other) -> bool:
        return compare(self, other) < 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversions ------------------------------------------------------
    def __float__(self) -> float:
        return float(self.to_mpf(80))

    def to_mpf(self, bits: int = 256):
        def f(q):
            return mpmath.mpf(int(q.numerator)) / int(q.denominator)

        with mpmath.workprec(bits + 20):
            return f(self.a) + f(self.b) * mpmath.sqrt(self.d)

    def minimal_polynomial(self) -> list:
        """Monic minimal polynomial over Q as coefficients, constant term first."""
        if self.is_rational():
            return [-self.a, mpq(1)]
        return [self.norm(), -self.trace(), mpq(1)]

    def __str__(self) -> str:
        def fmt(q):
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

        if self.is_rational():
            return fmt(self.a)
        rad = f"√{self.d}"
        bs = "" if abs(self.b) == 1 else fmt(abs(self.b))
        if self.a == 0:
            return ("-" if self.b < 0 else "") + bs + rad
        return f"{fmt(self.a)} {'-' if self.b < 0 else '+'} {bs}{rad}"

    def __repr__(self) -> str:
        return f"QuadExt({self})"


class _Promote(Exception):
    def __init__(self, d):
        self.d = d


def compare(u, v) -> int:
    """Exact three-way comparison of two quadratic irrationals, possibly in
    different fields: ``sign(u - v)``."""
    if not isinstance(u, QuadExt):
        u = QuadExt.from_rational(as_q(u))
    if not isinstance(v, QuadExt):
        v = QuadExt.from_rational(as_q(v))
    if u.is_rational() or v.is_rational() or u.d == v.d:
        if u.d == v.d or v.is_rational():
            return (u - QuadExt.from_rational(v.a, u.d) if v.is_rational() else u - v).sign()
        return -(v - QuadExt.from_rational(u.a, v.d)).sign()
    # r + b1 sqrt(d1) - b2 sqrt(d2)
    r = u.a - v.a
    b1, d1, b2, d2 = u.b, u.d, -v.b, v.d
    s1 = sign_sqrt_combo(0, b1, d1)
    s2 = sign_sqrt_combo(0, b2, d2)
    # sign of the irrational part t = b1 sqrt d1 + b2 sqrt d2
    if s1 == s2 or s2 == 0:
        st = s1
    elif s1 == 0:
        st = s2
    else:
        diff = b1 * b1 * d1 - b2 * b2 * d2
        st = 0 if diff == 0 else (s1 if diff > 0 else s2)
    sr = (r > 0) - (r < 0)
    if st == 0 or sr == 0 or sr == st:
        return sr if st == 0 else st if sr == 0 else sr
    # opposite signs: compare r^2 with t^2 = b1^2 d1 + b2^2 d2 + 2 b1 b2 sqrt(d1 d2)
    s, k = squarefree_part(d1 * d2)
    rest = r * r - b1 * b1 * d1 - b2 * b2 * d2
    sgn = sign_sqrt_combo(rest, -2 * b1 * b2 * k, s)
    if sgn == 0:
        return 0
    return sr if sgn > 0 else st


def quad_arith(u: QuadExt, v: QuadExt, op: str):
    """Field operation or exact comparison: ``op`` in ``+ - * / compare``."""
    if op == "+":
        return u + v
    if op in ("-", "−"):
        return u - v
    if op in ("*", "×"):
        return u * v
    if op in ("/", "÷"):
        return u / v
    if op == "compare":
        c = compare(u, v)
        return "less" if c < 0 else "greater" if c > 0 else "equal"
    raise ValueError(f"unknown operation {op!r}")


def isqrt_exact(n) -> int | None:
    n = int(n)
    if n < 0:
        return None
    r = gmpy2.isqrt(n)
    return int(r) if r * r == n else None
