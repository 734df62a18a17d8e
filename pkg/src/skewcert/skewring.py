"""The skew Laurent ring K[t, t^-1; sigma] with K = Q(x1, ..., xn).

Multiplication follows ``(f t^m)(g t^n) = f sigma^m(g) t^(m+n)``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exactcore.endo import EndoError, FieldEndo
from .exactcore.ratfunc import RatFunc


class SkewError(ValueError):
    pass


class SkewElement:
    """Finitely supported ``sum_m f_m t^m`` over a fixed endomorphism."""

    __slots__ = ("sigma", "coeffs")

    def __init__(self, sigma: FieldEndo, coeffs: Mapping[int, RatFunc] | None = None):
        self.sigma = sigma
        clean = {}
        for m, f in (coeffs or {}).items():
            if not isinstance(f, RatFunc):
                f = RatFunc.const(sigma.vars, f)
            if f.vars != sigma.vars:
                raise SkewError("coefficient over the wrong variables")
            if f:
                clean[int(m)] = f
        self.coeffs = clean

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, sigma: FieldEndo) -> "SkewElement":
        return cls(sigma)

    @classmethod
    def monomial(cls, sigma: FieldEndo, f, m: int = 0) -> "SkewElement":
        if isinstance(f, str):
            f = RatFunc.parse(f, sigma.vars)
        return cls(sigma, {m: f})

    @classmethod
    def t(cls, sigma: FieldEndo, m: int = 1) -> "SkewElement":
        return cls.monomial(sigma, RatFunc.one(sigma.vars), m)

    @classmethod
    def parse(cls, sigma: FieldEndo, literal: Iterable) -> "SkewElement":
        """From ``[[degree, "rational function"], ...]``; repeated degrees add."""
        acc: dict = {}
        for deg, text in literal:
            f = RatFunc.parse(str(text), sigma.vars) if not isinstance(text, RatFunc) else text
            deg = int(deg)
            acc[deg] = acc[deg] + f if deg in acc else f
        return cls(sigma, acc)

    def to_literal(self) -> list:
        return [[m, str(f)] for m, f in sorted(self.coeffs.items())]

    # -- structure --------------------------------------------------------
    def support(self) -> list:
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coefficient(self, m: int) -> RatFunc:
        return self.coeffs.get(m, RatFunc.zero(self.sigma.vars))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewElement):
            return NotImplemented
        return self.sigma is other.sigma and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((id(self.sigma), frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "SkewElement(0)"
        parts = [f"({f})*t^{m}" for m, f in sorted(self.coeffs.items())]
        return "SkewElement(" + " + ".join(parts) + ")"

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "SkewElement") -> None:
        if not isinstance(other, SkewElement):
            raise TypeError("expected a SkewElement")
        if other.sigma is not self.sigma:
            raise SkewError("operands live over different σ")

    def __add__(self, other: "SkewElement") -> "SkewElement":
        self._check(other)
        out = dict(self.coeffs)
        for m, f in other.coeffs.items():
            out[m] = out[m] + f if m in out else f
        return SkewElement(self.sigma, out)

    def __neg__(self) -> "SkewElement":
        return SkewElement(self.sigma, {m: -f for m, f in self.coeffs.items()})

    def __sub__(self, other: "SkewElement") -> "SkewElement":
        return self + (-other)

    def scale(self, c) -> "SkewElement":
        """Left multiplication by an element of K (or a rational)."""
        if not isinstance(c, RatFunc):
            c = RatFunc.const(self.sigma.vars, c)
        return SkewElement(self.sigma, {m: c * f for m, f in self.coeffs.items()})

    def __mul__(self, other: "SkewElement") -> "SkewElement":
        return skew_mul(self, other)


def skew_mul(u: SkewElement, v: SkewElement) -> SkewElement:
    """``(f t^m)(g t^n) = f sigma^m(g) t^(m+n)``, extended bilinearly."""
    u._check(v)
    sigma = u.sigma
    out: dict = {}
    for m, f in u.coeffs.items():
        for n, g in v.coeffs.items():
            try:
                term = f * sigma.apply_power(g, m)
            except EndoError as exc:
                if m < 0 and not sigma.invertible:
                    raise SkewError("σ⁻¹ unavailable: supply inverse images in the map spec") from exc
                raise
            k = m + n
            out[k] = out[k] + term if k in out else term
    return SkewElement(sigma, out)


def skew_product(factors: Sequence[SkewElement]) -> SkewElement:
    it = iter(factors)
    acc = next(it)
    for f in it:
        acc = skew_mul(acc, f)
    return acc


# -- gauge equivalence ------------------------------------------------------------

class Gauge:
    """The isomorphism ``k{at, bt} -> k{ct, dt}`` for ``ad = bc``:
    ``g t^m -> v_m g t^m`` with ``v = c/a`` and ``v_m = v sigma(v) ... sigma^(m-1)(v)``."""

    def __init__(self, a: RatFunc, b: RatFunc, c: RatFunc, d: RatFunc, sigma: FieldEndo):
        if not (a and b and c and d):
            raise SkewError("gauge parameters must be nonzero")
        if a * d != b * c:
            raise SkewError("gauge condition ad=bc violated")
        self.a, self.b, self.c, self.d = a, b, c, d
        self.sigma = sigma
        self.v = c / a
        self._pos = [RatFunc.one(sigma.vars)]
        self._neg = [RatFunc.one(sigma.vars)]
        self._lock = threading.Lock()

    def factor(self, m: int) -> RatFunc:
        """``v_m``; negative ``m`` uses ``v_{-k} = prod_{i=1..k} sigma^{-i}(v)^{-1}``."""
        table = self._pos if m >= 0 else self._neg
        k = abs(m)
        if k < len(table):
            return table[k]
        with self._lock:
            while len(table) <= k:
                i = len(table)
                if m >= 0:
                    table.append(table[-1] * self.sigma.apply_power(self.v, i - 1))
                else:
                    try:
                        step = self.sigma.apply_power(self.v, -i)
                    except EndoError as exc:
                        raise SkewError("σ⁻¹ unavailable: supply inverse images in the map spec") from exc
                    table.append(table[-1] * step.inverse())
            return table[k]

    def __call__(self, w: SkewElement) -> SkewElement:
        if w.sigma is not self.sigma:
            raise SkewError("element lives over a different σ")
        return SkewElement(self.sigma, {m: self.factor(m) * g for m, g in w.coeffs.items()})

    def check_generators(self) -> bool:
        """``Psi(a t) = c t`` and ``Psi(b t) = d t``."""
        s = self.sigma
        return (self(SkewElement.monomial(s, self.a, 1)) == SkewElement.monomial(s, self.c, 1)
                and self(SkewElement.monomial(s, self.b, 1)) == SkewElement.monomial(s, self.d, 1))

    def is_multiplicative_on(self, w1: SkewElement, w2: SkewElement) -> bool:
        return self(skew_mul(w1, w2)) == skew_mul(self(w1), self(w2))


def gauge_transform(a: RatFunc, b: RatFunc, c: RatFunc, d: RatFunc, sigma: FieldEndo,
                    w: SkewElement) -> SkewElement:
    gauge = Gauge(a, b, c, d, sigma)
    return gauge(w)


# -- conjugation --------------------------------------------------------------------

class Conjugation:
    """``K[t; sigma] -> K[t; tau]`` with ``tau = pi^-1 sigma pi`` and
    ``a t^j -> pi^-1(a) t^j``."""

    def __init__(self, pi: FieldEndo, sigma: FieldEndo):
        if not pi.invertible:
            raise SkewError("π is not invertible: supply inverse images")
        if pi.vars != sigma.vars:
            raise SkewError("π and σ act on different variables")
        self.pi = pi
        self.pi_inv = pi.inverse()
        self.sigma = sigma
        # f -> pi^-1(sigma(pi(f)))
        self.tau = self.pi_inv.compose(sigma.compose(pi))

    def __call__(self, w: SkewElement) -> SkewElement:
        if w.sigma is not self.sigma:
            raise SkewError("element lives over a different σ")
        return SkewElement(self.tau, {m: self.pi_inv.apply(f) for m, f in w.coeffs.items()})

    def is_multiplicative_on(self, w1: SkewElement, w2: SkewElement) -> bool:
        return self(skew_mul(w1, w2)) == skew_mul(self(w1), self(w2))


_CONJ_CACHE: dict = {}
_CONJ_LOCK = threading.Lock()


def conjugation(pi: FieldEndo, sigma: FieldEndo) -> Conjugation:
    """Shared conjugation object so images over ``tau`` can be multiplied."""
    key = (id(pi), id(sigma))
    with _CONJ_LOCK:
        entry = _CONJ_CACHE.get(key)
        if entry is None or entry[0] is not pi or entry[1] is not sigma:
            entry = (pi, sigma, Conjugation(pi, sigma))
            _CONJ_CACHE[key] = entry
        return entry[2]


def conjugate_ring(pi: FieldEndo, w: SkewElement) -> SkewElement:
    return conjugation(pi, w.sigma)(w)


# -- words ---------------------------------------------------------------------

@dataclass(frozen=True)
class WordProduct:
    letters: str
    step: int
    value: RatFunc
    degree: int


def word_index(letters: str) -> int:
    """Position in the binary order (A = 0, B = 1, leftmost most significant)."""
    return int(letters.translate(str.maketrans("AB", "01")), 2)


def word_from_index(index: int, length: int) -> str:
    return format(index, f"0{length}b").translate(str.maketrans("01", "AB"))


def enumerate_words(a: RatFunc, b: RatFunc, sigma: FieldEndo, n: int, j: int) -> list:
    """All words of length ``j+1`` with value ``prod_i sigma^(n i)(u_i)``."""
    if n < 1:
        raise ValueError("step must be positive")
    if j < 0:
        raise ValueError("depth must be nonnegative")
    if not a or not b:
        raise SkewError("generators must be nonzero")
    level = [("A", a), ("B", b)]
    for i in range(1, j + 1):
        sa = sigma.apply_power(a, n * i)
        sb = sigma.apply_power(b, n * i)
        level = [(w + ch, v * s) for w, v in level for ch, s in (("A", sa), ("B", sb))]
    return [WordProduct(w, n, v, (j + 1) * n) for w, v in level]


def word_element(letters: str, a: RatFunc, b: RatFunc, sigma: FieldEndo, n: int) -> SkewElement:
    """The word as a product of ``a t^n`` and ``b t^n`` in the skew ring."""
    gens = {"A": SkewElement.monomial(sigma, a, n), "B": SkewElement.monomial(sigma, b, n)}
    return skew_product([gens[ch] for ch in letters])
