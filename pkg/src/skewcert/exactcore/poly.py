"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored as ``{exponent tuple: mpq}``; zero coefficients are never
stored.  The canonical term order is graded lexicographic.
"""

from __future__ import annotations

import heapq
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .. import kernels
from .kron import kronecker_mul

Q = mpq


def as_q(value) -> mpq:
    """Coerce ints, Fractions, mpq/mpz and ``"p/q"`` strings to ``mpq``."""
    if isinstance(value, mpq):
        return value
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


class ParseError(ValueError):
    """Malformed polynomial or rational-function text."""


def grlex_key(exp: tuple) -> tuple:
    return (sum(exp), exp)


class MultiPoly:
    """Polynomial in an ordered tuple of variables.

    Instances are treated as immutable; every operation returns a new
    polynomial.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.vars}")
                c = as_q(c)
                if c:
                    clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, vars: tuple, terms: dict) -> "MultiPoly":
        p = object.__new__(cls)
        p.vars = vars
        p.terms = terms
        p._hash = None
        return p

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, vars: Sequence[str]) -> "MultiPoly":
        return cls._raw(tuple(vars), {})

    @classmethod
    def const(cls, vars: Sequence[str], c) -> "MultiPoly":
        vars = tuple(vars)
        c = as_q(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def one(cls, vars: Sequence[str]) -> "MultiPoly":
        return cls.const(vars, 1)

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "MultiPoly":
        vars = tuple(vars)
        i = vars.index(name)
        e = [0] * len(vars)
        e[i] = 1
        return cls._raw(vars, {tuple(e): mpq(1)})

    @classmethod
    def monomial(cls, vars: Sequence[str], exp: Sequence[int], c=1) -> "MultiPoly":
        return cls(vars, {tuple(exp): c})

    @classmethod
    def parse(cls, text: str, vars: Sequence[str]) -> "MultiPoly":
        return parse_expression(text, _PolyBuilder(tuple(vars)))

    # -- basic properties -------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        return len(self.terms) == 1 and not any(next(iter(self.terms)))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, mpq(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var: int | str) -> int:
        i = self.vars.index(var) if isinstance(var, str) else var
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def degrees(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(max(col) for col in zip(*self.terms))

    def min_degrees(self) -> tuple:
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(col) for col in zip(*self.terms))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading_exponent(self) -> tuple:
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self) -> mpq:
        if not self.terms:
            return mpq(0)
        return self.terms[self.leading_exponent()]

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def uses(self, var: int) -> bool:
        return any(e[var] for e in self.terms)

    # -- equality / hashing ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, mpq, type(mpz(0)))):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        return MultiPoly.const(self.vars, other)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        c = as_q(c)
        if not c:
            return MultiPoly.zero(self.vars)
        return MultiPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def mul_monomial(self, exp: Sequence[int], c=1) -> "MultiPoly":
        c = as_q(c)
        if not c:
            return MultiPoly.zero(self.vars)
        return MultiPoly._raw(
            self.vars,
            {tuple(a + b for a, b in zip(e, exp)): v * c for e, v in self.terms.items()},
        )

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return MultiPoly.zero(self.vars)
        if len(self.terms) == 1:
            (e, c), = self.terms.items()
            return other.mul_monomial(e, c)
        if len(other.terms) == 1:
            (e, c), = other.terms.items()
            return self.mul_monomial(e, c)
        if self is other or self.terms == other.terms:
            return self._square()
        n = self.nvars
        da, db = self.degrees(), other.degrees()
        fast = self._kron(other, da, db)
        if fast is not None:
            return MultiPoly._raw(self.vars, fast)
        shift = max(max(a + b for a, b in zip(da, db)), 1).bit_length()
        pa = _pack(self.terms, shift)
        pb = _pack(other.terms, shift)
        return MultiPoly._raw(self.vars, _unpack(kernels.sparse_mul(pa, pb), shift, n))

    __rmul__ = __mul__

    def _kron(self, other: "MultiPoly", da: tuple, db: tuple):
        if len(self.terms) * len(other.terms) < 4000:
            return None
        if not (self.is_integral() and other.is_integral()):
            return None
        homog = None
        if self.is_homogeneous() and other.is_homogeneous():
            homog = (self.total_degree(), other.total_degree())
        tb = self.terms if other is self else other.terms
        return kronecker_mul(self.terms, tb, da, db, homog)

    def _square(self) -> "MultiPoly":
        n = self.nvars
        d = self.degrees()
        fast = self._kron(self, d, d)
        if fast is not None:
            return MultiPoly._raw(self.vars, fast)
        shift = max(2 * max(self.degrees()), 1).bit_length()
        out = kernels.sparse_square(_pack(self.terms, shift))
        return MultiPoly._raw(self.vars, _unpack(out, shift, n))

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base._square()
        return result

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises ``ArithmeticError`` if ``other`` does not divide."""
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def divmod(self, other: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by leading terms (graded lex).

        The remainder is zero whenever ``other`` divides ``self``.
        """
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value()), MultiPoly.zero(self.vars)
        if len(other.terms) == 1:
            (le, lc), = other.terms.items()
            q, r = {}, {}
            inv = 1 / lc
            for e, c in self.terms.items():
                if all(a >= b for a, b in zip(e, le)):
                    q[tuple(a - b for a, b in zip(e, le))] = c * inv
                else:
                    r[e] = c
            return MultiPoly._raw(self.vars, q), MultiPoly._raw(self.vars, r)
        le = other.leading_exponent()
        lc_inv = 1 / other.terms[le]
        rest = [(e, c) for e, c in other.terms.items() if e != le]
        rem = dict(self.terms)
        heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
        heapq.heapify(heap)
        quot: dict = {}
        out_rem: dict = {}
        while heap:
            _, ne = heapq.heappop(heap)
            e = tuple(-x for x in ne)
            c = rem.pop(e, None)
            if c is None:
                continue
            # drop duplicate heap entries of the same exponent
            while heap and heap[0][1] == ne:
                heapq.heappop(heap)
            if all(a >= b for a, b in zip(e, le)):
                qe = tuple(a - b for a, b in zip(e, le))
                qc = c * lc_inv
                quot[qe] = qc
                for re_, rc in rest:
                    te = tuple(a + b for a, b in zip(qe, re_))
                    v = rem.get(te)
                    if v is None:
                        rem[te] = -qc * rc
                        heapq.heappush(heap, (-sum(te), tuple(-x for x in te)))
                    else:
                        v = v - qc * rc
                        if v:
                            rem[te] = v
                        else:
                            del rem[te]
            else:
                out_rem[e] = c
        return MultiPoly._raw(self.vars, quot), MultiPoly._raw(self.vars, out_rem)

    def divides(self, other: "MultiPoly") -> bool:
        if not self.terms:
            return not other.terms
        return not other.divmod(self)[1]

    # -- content ----------------------------------------------------------
    def integer_content(self) -> mpq:
        """Positive rational c with ``self / c`` a primitive integer polynomial."""
        if not self.terms:
            return mpq(1)
        num = mpz(0)
        den = mpz(1)
        for c in self.terms.values():
            num = gmpy2.gcd(num, c.numerator)
            den = gmpy2.lcm(den, c.denominator)
        return mpq(num, den)

    def primitive(self) -> "MultiPoly":
        """Primitive integer polynomial with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.integer_content()
        if self.leading_coefficient() < 0:
            c = -c
        if c == 1:
            return self
        return self.scale(1 / c)

    def monic(self) -> "MultiPoly":
        return self.scale(1 / self.leading_coefficient())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    # -- calculus / evaluation -------------------------------------------
    def derivative(self, var: int | str) -> "MultiPoly":
        i = self.vars.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return MultiPoly._raw(self.vars, out)

    def evaluate(self, point: Sequence) -> mpq:
        """Value at a point of rationals (one per variable)."""
        pt = [as_q(v) for v in point]
        powers = [dict() for _ in pt]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    v = cache.get(k)
                    if v is None:
                        v = pt[i] ** k
                        cache[k] = v
                    t = t * v
            total += t
        return total

    def evaluate_mod(self, point: Sequence[int], p: int) -> int:
        """Value modulo a prime at an integer point; coefficients must be p-integral."""
        total = 0
        for e, c in self.terms.items():
            den = int(c.denominator) % p
            if den == 0:
                raise ZeroDivisionError("coefficient denominator divisible by modulus")
            t = int(c.numerator) * pow(den, -1, p)
            for v, k in zip(point, e):
                if k:
                    t = t * pow(v, k, p)
            total += t
        return total % p

    def partial_evaluate(self, var: int, value) -> "MultiPoly":
        value = as_q(value)
        out: dict = {}
        for e, c in self.terms.items():
            ne = e[:var] + (0,) + e[var + 1 :]
            v = c * value ** e[var] if e[var] else c
            out[ne] = out.get(ne, 0) + v
        return MultiPoly(self.vars, out)

    def coefficients_in(self, var: int) -> dict:
        """Split as ``sum c_k * var^k``; returns ``{k: c_k}`` with ``c_k`` free of ``var``."""
        parts: dict = {}
        for e, c in self.terms.items():
            k = e[var]
            ne = e[:var] + (0,) + e[var + 1 :]
            parts.setdefault(k, {})[ne] = c
        return {k: MultiPoly._raw(self.vars, t) for k, t in parts.items()}

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace each variable by a polynomial (all images share one variable set)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].vars if images else ()
        result = MultiPoly.zero(target)
        if not self.terms:
            return result
        degs = self.degrees()
        pows = [_power_table(img, d) for img, d in zip(images, degs)]
        # Horner-free sum over terms with cached powers; monomial products cached by prefix
        for e, c in self.sorted_terms():
            t = MultiPoly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    t = t * pows[i][k]
            result = result + t
        return result

    def with_vars(self, new_vars: Sequence[str]) -> "MultiPoly":
        """Re-express in a superset (or reordering) of the variables."""
        new_vars = tuple(new_vars)
        if new_vars == self.vars:
            return self
        idx = []
        for v in self.vars:
            if v not in new_vars:
                if any(e[self.vars.index(v)] for e in self.terms):
                    raise ValueError(f"variable {v} not in {new_vars}")
                idx.append(None)
            else:
                idx.append(new_vars.index(v))
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for k, j in zip(e, idx):
                if j is not None:
                    ne[j] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(new_vars, out)

    # -- display --------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(self.vars, e) if k
            )
            if not mono:
                s = _fmt_q(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{_fmt_q(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r}, vars={self.vars})"


def _fmt_q(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _pack(terms: dict, shift: int) -> dict:
    out = {}
    for e, c in terms.items():
        k = 0
        for i, x in enumerate(e):
            k |= x << (shift * i)
        out[k] = c
    return out


def _unpack(packed: dict, shift: int, n: int) -> dict:
    mask = (1 << shift) - 1
    out = {}
    for k, c in packed.items():
        out[tuple((k >> (shift * i)) & mask for i in range(n))] = c
    return out


def _power_table(p: MultiPoly, d: int) -> list:
    table = [MultiPoly.one(p.vars)]
    for _ in range(d):
        table.append(table[-1] * p)
    return table


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text: str) -> list:
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            tokens.append(("id", ident))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _PolyBuilder:
    def __init__(self, vars: tuple):
        self.vars = vars

    def number(self, n):
        return MultiPoly.const(self.vars, n)

    def symbol(self, name):
        if name not in self.vars:
            raise ParseError(f"unknown variable {name!r}; declared {self.vars}")
        return MultiPoly.var(self.vars, name)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if not b.is_constant():
            raise ParseError("division by a non-constant in a polynomial")
        if b.is_zero():
            raise ZeroDivisionError("division by zero")
        return a.scale(1 / b.constant_value())

    def neg(self, a):
        return -a

    def power(self, a, k):
        if k < 0:
            if a.is_constant() and not a.is_zero():
                return MultiPoly.const(self.vars, a.constant_value() ** k)
            raise ParseError("negative exponent in a polynomial")
        return a ** k


def parse_expression(text: str, builder):
    """Recursive-descent parser for ``+ - * / ^`` expressions over a builder."""
    tokens = tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None)

    def take(kind=None, value=None):
        nonlocal pos
        tok = peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"unexpected token {tok[1]!r} in {text!r}")
        pos += 1
        return tok

    def expr():
        left = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            right = term()
            left = builder.add(left, right) if op == "+" else builder.sub(left, right)
        return left

    def term():
        left = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            right = unary()
            left = builder.mul(left, right) if op == "*" else builder.div(left, right)
        return left

    def unary():
        if peek() == ("op", "-"):
            take()
            return builder.neg(unary())
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def exponent():
        sign = 1
        while peek() in (("op", "-"), ("op", "+")):
            if take()[1] == "-":
                sign = -sign
        if peek() == ("op", "("):
            take()
            k = exponent()
            take("op", ")")
            return sign * k
        return sign * take("num")[1]

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            return builder.power(base, exponent())
        return base

    def atom():
        kind, val = peek()
        if kind == "num":
            take()
            return builder.number(val)
        if kind == "id":
            take()
            return builder.symbol(val)
        if (kind, val) == ("op", "("):
            take()
            v = expr()
            take("op", ")")
            return v
        raise ParseError(f"unexpected token {val!r} in {text!r}")

    if not tokens:
        raise ParseError("empty expression")
    value = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input in {text!r}")
    return value


def poly_from_iterable(vars: Sequence[str], items: Iterable[tuple]) -> MultiPoly:
    out: dict = {}
    for e, c in items:
        out[tuple(e)] = out.get(tuple(e), 0) + as_q(c)
    return MultiPoly(vars, out)

