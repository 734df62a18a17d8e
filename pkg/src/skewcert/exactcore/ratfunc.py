"""The rational function field k(x1, ..., xn) with k = Q."""

from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from .gcd import poly_gcd
from .poly import MultiPoly, ParseError, as_q, parse_expression


class RatFunc:
    """Reduced fraction ``num / den`` of polynomials over a shared variable tuple.

    ``den`` is a primitive integer polynomial with positive leading
    coefficient (graded lex) and ``gcd(num, den) = 1``; zero is ``0/1``.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, reduced: bool = False):
        if den is None:
            den = MultiPoly.one(num.vars)
        if reduced:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den)
        self._hash = None

    @classmethod
    def _make(cls, num: MultiPoly, den: MultiPoly) -> "RatFunc":
        r = object.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls._make(p, MultiPoly.one(p.vars))

    @classmethod
    def const(cls, vars: Sequence[str], c) -> "RatFunc":
        return cls.from_poly(MultiPoly.const(vars, c))

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "RatFunc":
        return cls.from_poly(MultiPoly.zero(vars))

    @classmethod
    def one(cls, vars: Sequence[str]) -> "RatFunc":
        return cls.const(vars, 1)

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "RatFunc":
        return cls.from_poly(MultiPoly.var(vars, name))

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "RatFunc":
        return parse_expression(text, _RatBuilder(tuple(vars)))

    # -- properties -----------------------------------------------------
    @property
    def vars(self) -> tuple:
        return self.num.vars

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> mpq:
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def degree(self) -> int:
        """``max(deg num, deg den)`` in total degree; the map degree for one variable."""
        return max(self.num.total_degree(), self.den.total_degree(), 0)

    def term_count(self) -> int:
        return len(self.num.terms) + len(self.den.terms)

    # -- equality -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, MultiPoly):
            return self.den.is_constant() and self.num == other
        try:
            c = as_q(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc.from_poly(other)
        return RatFunc.const(self.vars, other)

    def __add__(self, other) -> "RatFunc":
        other = self._coerce(other)
        if not other.num:
            return self
        if not self.num:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if b == d:
            if b.is_constant():
                return RatFunc._make(a + c, b)
            return RatFunc(a + c, b)
        if b.is_constant() and d.is_constant():
            return RatFunc(a.scale(d.constant_value()) + c.scale(b.constant_value()),
                           b * d)
        g = poly_gcd(b, d)
        if g.is_constant():
            return RatFunc(a * d + c * b, b * d)
        b1, d1 = b.divexact(g), d.divexact(g)
        return RatFunc(a * d1 + c * b1, b1 * d)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._make(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFunc":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        if not isinstance(other, (RatFunc, MultiPoly)):
            c = as_q(other)
            if not c:
                return RatFunc.zero(self.vars)
            return RatFunc._make(self.num.scale(c), self.den)
        other = self._coerce(other)
        if not self.num or not other.num:
            return RatFunc.zero(self.vars)
        a, b, c, d = self.num, self.den, other.num, other.den
        if b.is_constant() and d.is_constant():
            return RatFunc._make(a * c, b)
        # cross-cancel: gcd(a, d) and gcd(c, b)
        g1 = poly_gcd(a, d) if not d.is_constant() else None
        g2 = poly_gcd(c, b) if not b.is_constant() else None
        if g1 is not None and not g1.is_constant():
            a, d = a.divexact(g1), d.divexact(g1)
        if g2 is not None and not g2.is_constant():
            c, b = c.divexact(g2), b.divexact(g2)
        return _finish(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("division by zero in function field")
        return _finish(self.den, self.num)

    def __truediv__(self, other) -> "RatFunc":
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._make_reduced_pow(self, k)

    @staticmethod
    def _make_reduced_pow(f: "RatFunc", k: int) -> "RatFunc":
        # powers of coprime polynomials stay coprime
        return _finish(f.num ** k, f.den ** k)

    # -- evaluation and substitution --------------------------------------
    def evaluate(self, point: Sequence):
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def evaluate_mod(self, point: Sequence[int], p: int) -> int:
        d = self.den.evaluate_mod(point, p)
        if not d:
            raise ZeroDivisionError("denominator vanishes modulo p at the evaluation point")
        return self.num.evaluate_mod(point, p) * pow(d, -1, p) % p

    def substitute(self, images: Sequence["RatFunc"]) -> "RatFunc":
        """Replace each variable by the corresponding rational function.

        Raises ``ZeroDivisionError`` when the substituted denominator is
        identically zero.
        """
        if len(images) != len(self.vars):
            raise ValueError("need one image per variable")
        degs = tuple(max(a, b) for a, b in zip(self.num.degrees(), self.den.degrees()))
        n_num, n_den = substitute_poly(self.num, images, degs)
        d_num, d_den = substitute_poly(self.den, images, degs)
        if not d_num:
            raise ZeroDivisionError("endomorphism undefined on this element")
        # common factor prod(b_i^d_i) cancels between the two quotients
        return RatFunc(n_num * d_den, n_den * d_num)

    def to_vars(self, new_vars: Sequence[str]) -> "RatFunc":
        return RatFunc._make(self.num.with_vars(new_vars), self.den.with_vars(new_vars))

    # -- display ------------------------------------------------------------
    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        n = str(self.num)
        d = str(self.den)
        if len(self.num.terms) > 1:
            n = f"({n})"
        if len(self.den.terms) > 1 or "*" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self) -> str:
        return f"RatFunc({str(self)!r}, vars={self.vars})"


def _finish(num: MultiPoly, den: MultiPoly) -> RatFunc:
    """Scale an already-coprime pair into canonical form."""
    if not den:
        raise ZeroDivisionError("division by zero in function field")
    if not num:
        return RatFunc._make(MultiPoly.zero(num.vars), MultiPoly.one(num.vars))
    c = den.integer_content()
    if den.leading_coefficient() < 0:
        c = -c
    if c != 1:
        inv = 1 / c
        num, den = num.scale(inv), den.scale(inv)
    return RatFunc._make(num, den)


def _normalize(num: MultiPoly, den: MultiPoly) -> tuple:
    if num.vars != den.vars:
        raise ValueError("numerator and denominator over different variables")
    if not den:
        raise ZeroDivisionError("division by zero in function field")
    if not num:
        return MultiPoly.zero(num.vars), MultiPoly.one(num.vars)
    if not den.is_constant():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num, den = num.divexact(g), den.divexact(g)
    r = _finish(num, den)
    return r.num, r.den


def ratfunc_normalize(num: MultiPoly, den: MultiPoly) -> RatFunc:
    """Canonical reduced form of ``num / den``."""
    return RatFunc(num, den)


def substitute_poly(p: MultiPoly, images: Sequence[RatFunc], degs: Sequence[int]) -> tuple:
    """``p(images)`` as ``(numerator, denominator)`` without any gcd work.

    The denominator is ``prod(den_i ** degs[i])``.
    """
    target = images[0].vars
    nums = [img.num for img in images]
    dens = [img.den for img in images]
    poly_images = all(d == 1 for d in dens)
    num_pows = [_powers(a, k) for a, k in zip(nums, degs)]
    if poly_images:
        den_pows = None
    else:
        den_pows = [_powers(b, k) if b != 1 else None for b, k in zip(dens, degs)]
    out = MultiPoly.zero(target)
    cache: dict = {}
    for e, c in p.sorted_terms():
        t = None
        for i, k in enumerate(e):
            factor = num_pows[i][k] if k else None
            if den_pows is not None and den_pows[i] is not None and degs[i] - k:
                dp = den_pows[i][degs[i] - k]
                factor = dp if factor is None else _cached_mul(cache, (i, k), factor, dp)
            if factor is not None:
                t = factor if t is None else t * factor
        if t is None:
            out = out + MultiPoly.const(target, c)
        else:
            out = out + t.scale(c)
    if poly_images:
        den = MultiPoly.one(target)
    else:
        den = MultiPoly.one(target)
        for i, (b, k) in enumerate(zip(dens, degs)):
            if b != 1 and k:
                den = den * den_pows[i][k]
    return out, den


def _cached_mul(cache: dict, key, a: MultiPoly, b: MultiPoly) -> MultiPoly:
    v = cache.get(key)
    if v is None:
        v = a * b
        cache[key] = v
    return v


def _powers(p: MultiPoly, k: int) -> list:
    table = [MultiPoly.one(p.vars)]
    for _ in range(k):
        table.append(table[-1] * p)
    return table


class _RatBuilder:
    def __init__(self, vars: tuple):
        self.vars = vars

    def number(self, n):
        return RatFunc.const(self.vars, n)

    def symbol(self, name):
        if name not in self.vars:
            raise ParseError(f"unknown variable {name!r}; declared {self.vars}")
        return RatFunc.var(self.vars, name)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def power(self, a, k):
        return a ** k
