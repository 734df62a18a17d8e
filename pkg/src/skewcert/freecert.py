"""Freeness certificates for two-generated subalgebras ``k{a t^n, b t^n}``.

The degree-``(j+1)n`` component is spanned by the ``2^(j+1)`` word values
``u_0 sigma^n(u_1) ... sigma^(nj)(u_j)``; the subalgebra is free in that
window exactly when these values are linearly independent over Q.

Two rank routes are used.  When the iterates are small, the values are
expanded over a common denominator and the coefficient matrix is reduced
by fraction-free elimination.  Otherwise the values are sampled at exact
rational orbit points: full rank of a sample matrix proves independence,
since a nonzero minor of the sample is a nonzero minor of the functions.
For very deep windows the same sampling runs modulo a large prime, which
still proves full rank.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
from gmpy2 import mpq

from . import kernels, linalg
from .exactcore.endo import FieldEndo
from .exactcore.gcd import poly_lcm
from .exactcore.ratfunc import RatFunc
from .skewring import SkewElement, enumerate_words, word_element

SYMBOLIC_DEGREE = 64        # largest iterate degree expanded symbolically
SYMBOLIC_WORD_DEGREE = 96   # largest word degree expanded symbolically
EXACT_SAMPLE_BITS = 40_000  # orbit height budget for exact sampling
EXACT_SAMPLE_WORDS = 32     # larger windows are sampled modulo a prime
ORACLE_TRIALS = 3


class CertificationError(ValueError):
    pass


class RankOracleMismatch(CertificationError):
    pass


class CurveError(ValueError):
    pass


# -- helpers -------------------------------------------------------------------

def _random_prime(rng: random.Random) -> int:
    return int(gmpy2.next_prime(rng.getrandbits(61) | (1 << 60)))


def _proportional(a: RatFunc, b: RatFunc) -> bool:
    return (b / a).is_constant()


def _iterate_degrees_small(sigma: FieldEndo, steps: int) -> bool:
    """Build iterates up to ``steps`` unless their degree passes the limit."""
    for k in range(1, steps + 1):
        if k <= sigma.cached_powers():
            imgs = sigma.iterate_images(k)
        else:
            prev = sigma.iterate_images(k - 1)
            if max(g.degree() for g in prev) * max(g.degree() for g in sigma.images) > SYMBOLIC_DEGREE:
                return False
            imgs = sigma.iterate_images(k)
        if max(g.degree() for g in imgs) > SYMBOLIC_DEGREE:
            return False
    return True


def _common_numerators(values: Sequence[RatFunc]) -> list:
    """Numerators over the least common denominator (kept incremental)."""
    dens = []
    for v in values:
        if v.den not in dens:
            dens.append(v.den)
    L = dens[0]
    for d in dens[1:]:
        L = poly_lcm(L, d)
    cof = {d: L.divexact(d) for d in dens}
    return [v.num * cof[v.den] for v in values]


def coefficient_matrix(values: Sequence[RatFunc]) -> list:
    """Rows of monomial coefficients (integers after scaling) for ``values``."""
    nums = _common_numerators(values)
    cols = sorted({e for p in nums for e in p.terms})
    index = {e: i for i, e in enumerate(cols)}
    rows = []
    for p in nums:
        row = [mpq(0)] * len(cols)
        for e, c in p.terms.items():
            row[index[e]] = c
        rows.append(row)
    return rows


def span_rank(values: Sequence[RatFunc]) -> int:
    """Exact Q-dimension of the span of rational functions."""
    vals = [v for v in values if v]
    if not vals:
        return 0
    return linalg.rank(coefficient_matrix(vals))


def _primitive(vec: Sequence) -> list:
    from math import gcd, lcm

    den = 1
    for c in vec:
        den = lcm(den, int(mpq(c).denominator))
    ints = [int(mpq(c) * den) for c in vec]
    g = 0
    for c in ints:
        g = gcd(g, c)
    first = next(c for c in ints if c)
    if first < 0:
        g = -g
    return [mpq(c, g) for c in ints]


# -- sampling ------------------------------------------------------------------

def _orbit_samples(sigma: FieldEndo, gens: Sequence[RatFunc], n: int, depth: int,
                   count: int, rng: random.Random, bound: int = 4, max_bits: int | None = None):
    """Per sample point: ``[[g(phi^(n i)(p)) for g in gens] for i in 0..depth]``.

    Returns ``None`` if orbit heights exceed ``max_bits``.
    """
    out = []
    attempts = 0
    dim = len(sigma.vars)
    while (2 * bound + 1) ** dim < 4 * count:
        bound += 1
    seen = set()
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count + 100:
            raise CertificationError("could not find evaluation points avoiding the polar locus")
        start = tuple(rng.randint(-bound, bound) for _ in sigma.vars)
        if start in seen:
            continue
        seen.add(start)
        q = tuple(mpq(c) for c in start)
        try:
            rows = []
            for i in range(depth + 1):
                if i:
                    for _ in range(n):
                        q = tuple(img.evaluate(q) for img in sigma.images)
                    if max_bits is not None:
                        h = max(int(c.numerator).bit_length() + int(c.denominator).bit_length() for c in q)
                        if h > max_bits:
                            return None
                rows.append([g.evaluate(q) for g in gens])
        except ZeroDivisionError:
            continue
        out.append(rows)
    return out


def _orbit_samples_mod(sigma: FieldEndo, gens: Sequence[RatFunc], n: int, depth: int,
                       count: int, p: int, rng: random.Random):
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count + 100:
            raise CertificationError("could not find evaluation points avoiding the polar locus")
        q = tuple(rng.randrange(p) for _ in sigma.vars)
        try:
            rows = []
            for i in range(depth + 1):
                if i:
                    for _ in range(n):
                        q = tuple(img.evaluate_mod(q, p) for img in sigma.images)
                rows.append([g.evaluate_mod(q, p) for g in gens])
        except ZeroDivisionError:
            continue
        out.append(rows)
    return out


def _scale_columns(rows: list) -> list:
    """Clear denominators point by point; rank is unchanged."""
    from math import lcm

    cols = linalg.transpose(rows)
    out = []
    for col in cols:
        den = 1
        for v in col:
            den = lcm(den, int(v.denominator))
        out.append([int(v * den) for v in col])
    return linalg.transpose(out)


def _word_columns(samples, j: int, mod: int | None = None) -> list:
    """Word-value rows (one per word, binary order) from per-point samples."""
    words = [[1] * len(samples)]
    for i in range(j + 1):
        nxt = []
        for vec in words:
            for letter in (0, 1):
                if mod is None:
                    nxt.append([v * s[i][letter] for v, s in zip(vec, samples)])
                else:
                    nxt.append([v * s[i][letter] % mod for v, s in zip(vec, samples)])
        words = nxt
    return words


def evaluation_rank_oracle(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int, j: int,
                           trials: int = ORACLE_TRIALS, seed: int = 20240917) -> list:
    """Ranks of the word-value matrix at random points modulo random primes,
    one rank per independent trial."""
    rng = random.Random(seed * 1_000_003 + 7919 * n + j)
    W = 2 ** (j + 1)
    ranks = []
    for _ in range(trials):
        p = _random_prime(rng)
        samples = _orbit_samples_mod(sigma, (a, b), n, j, W + 4, p, rng)
        ranks.append(kernels.rank_mod(_word_columns(samples, j, p), p))
    return ranks


# -- graded dimension ----------------------------------------------------------------

@dataclass
class DimensionReport:
    dim: int
    words: int
    method: str
    exact: bool
    kernel: list | None = None
    oracle: list | None = None


def _symbolic_feasible(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int, j: int) -> bool:
    if j >= 7:
        return False
    if not _iterate_degrees_small(sigma, n * j):
        return False
    total = 0
    for i in range(j + 1):
        imgs = sigma.iterate_images(n * i)
        d = max(g.degree() for g in imgs) if i else 1
        total += d * max(a.degree(), b.degree(), 1)
    return total <= SYMBOLIC_WORD_DEGREE


def graded_dimension_report(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int, j: int,
                            method: str = "auto", oracle: bool = False,
                            want_kernel: bool = False, seed: int = 1) -> DimensionReport:
    if n < 1 or j < 0:
        raise ValueError("need step n >= 1 and depth j >= 0")
    if not a or not b:
        raise CertificationError("generators must be nonzero")
    W = 2 ** (j + 1)
    if _proportional(a, b):
        ratio = (b / a).constant_value()
        kern = None
        if want_kernel and j == 0:
            kern = _primitive([ratio, mpq(-1)])
        # every word is a rational multiple of one product
        return DimensionReport(1, W, "proportional", True, kern)
    if method == "auto":
        if _symbolic_feasible(sigma, a, b, n, j):
            method = "symbolic"
        else:
            method = "sample"
    if method == "symbolic":
        values = [w.value for w in enumerate_words(a, b, sigma, n, j)]
        rows = coefficient_matrix(values)
        dim = linalg.rank(rows)
        kern = linalg.left_kernel(rows) if want_kernel and dim < W else None
        report = DimensionReport(dim, W, "symbolic", True, kern)
    elif method == "sample":
        rng = random.Random(seed * 7_777 + 31 * n + j)
        samples = None
        if W <= EXACT_SAMPLE_WORDS:
            samples = _orbit_samples(sigma, (a, b), n, j, W + 4, rng, max_bits=EXACT_SAMPLE_BITS)
        if samples is None:
            report = _modular_report(sigma, a, b, n, j, rng)
        else:
            rows = _scale_columns(_word_columns(samples, j))
            dim = linalg.rank(rows)
            kern = linalg.left_kernel(rows) if want_kernel and dim < W else None
            report = DimensionReport(dim, W, "sample", dim == W, kern)
    elif method == "modular":
        report = _modular_report(sigma, a, b, n, j, random.Random(seed))
    else:
        raise ValueError(f"unknown method {method!r}")
    if oracle:
        ranks = evaluation_rank_oracle(sigma, a, b, n, j)
        report.oracle = ranks
        if any(r != report.dim for r in ranks):
            raise RankOracleMismatch(
                f"rank {report.dim} by {report.method} elimination disagrees with "
                f"evaluation ranks {ranks} at depth {j}")
    return report


def _modular_report(sigma, a, b, n, j, rng) -> DimensionReport:
    W = 2 ** (j + 1)
    best = 0
    for _ in range(2):
        p = _random_prime(rng)
        samples = _orbit_samples_mod(sigma, (a, b), n, j, W + 4, p, rng)
        best = max(best, kernels.rank_mod(_word_columns(samples, j, p), p))
        if best == W:
            break
    return DimensionReport(best, W, "modular", best == W)


def graded_dimension(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int, j: int,
                     method: str = "auto", oracle: bool = False) -> int:
    return graded_dimension_report(sigma, a, b, n, j, method=method, oracle=oracle).dim


# -- certificates ----------------------------------------------------------------

@dataclass
class FreenessCertificate:
    map_spec: dict
    generators: tuple
    step: int
    depth: int
    dims: list
    free: bool
    at_j: int | None = None
    witness: list | None = None      # [(word, coefficient)]
    witness_verified: str | None = None
    methods: list = field(default_factory=list)
    exact: bool = True
    curve_log: list | None = None

    @property
    def at_degree(self) -> int | None:
        return None if self.at_j is None else (self.at_j + 1) * self.step

    @property
    def verdict(self) -> str:
        if self.free:
            return f"FreeUpTo({self.depth})"
        return f"NotFree(at_degree={self.at_degree})"

    def note(self) -> str:
        if self.free:
            return (f"finite-window certificate: words of t-degree up to "
                    f"{(self.depth + 1) * self.step} are independent; no claim beyond")
        return f"explicit dependency among words of t-degree {self.at_degree}"

    def to_json(self) -> dict:
        out = {
            "map": self.map_spec,
            "gens": [str(g) for g in self.generators],
            "step": self.step,
            "depth": self.depth,
            "dims": list(self.dims),
            "verdict": self.verdict,
            "free": self.free,
            "methods": list(self.methods),
            "exact": self.exact,
            "note": self.note(),
        }
        if not self.free:
            out["at_degree"] = self.at_degree
        if self.witness is not None:
            out["witness"] = [{"word": w, "coeff": _qstr(c)} for w, c in self.witness]
            out["witness_verified"] = self.witness_verified
        if self.curve_log is not None:
            out["curve_log"] = list(self.curve_log)
        return out


def _qstr(c) -> str:
    c = mpq(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def verify_witness(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int,
                   witness: Sequence) -> bool:
    """Expand ``sum c_w w`` through the skew multiplication and test for zero."""
    acc = SkewElement.zero(sigma)
    for word, c in witness:
        acc = acc + word_element(word, a, b, sigma, n).scale(c)
    return acc.is_zero()


def _witness_holds_at_samples(sigma, a, b, n, j, witness, rng, count=6) -> bool:
    samples = _orbit_samples(sigma, (a, b), n, j, count, rng)
    cols = _word_columns(samples, j)
    from .skewring import word_index

    total = [0] * count
    for word, c in witness:
        row = cols[word_index(word)]
        total = [t + c * v for t, v in zip(total, row)]
    return all(t == 0 for t in total)


def certify_free(sigma: FieldEndo, a: RatFunc, b: RatFunc, n: int, j_max: int,
                 method: str = "auto", oracle: bool = False) -> FreenessCertificate:
    if not a or not b:
        raise CertificationError("generators must be nonzero")
    cert = FreenessCertificate(sigma.to_spec(), (a, b), n, j_max, [], True)
    from .skewring import word_from_index

    for j in range(j_max + 1):
        rep = graded_dimension_report(sigma, a, b, n, j, method=method, oracle=oracle,
                                      want_kernel=True)
        cert.dims.append(rep.dim)
        cert.methods.append(rep.method)
        cert.exact = cert.exact and rep.exact
        if rep.dim < 2 ** (j + 1):
            cert.free = False
            cert.at_j = j
            if rep.method == "proportional":
                ratio = (b / a).constant_value()
                vec = _primitive([ratio, mpq(-1)])
                cert.witness = [("A", vec[0]), ("B", vec[1])]
            elif rep.kernel:
                vec = _primitive(rep.kernel[0])
                cert.witness = [(word_from_index(i, j + 1), c) for i, c in enumerate(vec) if c]
            if cert.witness is not None:
                if rep.method in ("symbolic", "proportional"):
                    ok = verify_witness(sigma, a, b, n, cert.witness)
                    cert.witness_verified = "skew product expands to zero" if ok else "FAILED"
                else:
                    ok = _witness_holds_at_samples(sigma, a, b, n, j, cert.witness,
                                                   random.Random(991 + j))
                    cert.witness_verified = ("vanishes at fresh sample points" if ok else "FAILED")
                if not ok:
                    raise CertificationError("dependency witness failed verification")
            break
    return cert


# -- curves ----------------------------------------------------------------------

PARAM = ("s",)


@dataclass
class CurveRestriction:
    param: tuple                         # images of the variables as RatFuncs in s
    validity_log: list = field(default_factory=list)

    @classmethod
    def parse(cls, text: str, nvars: int = 2) -> "CurveRestriction":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != nvars:
            raise CurveError(f"curve needs {nvars} comma-separated coordinates")
        imgs = tuple(RatFunc.parse(p, PARAM) for p in parts)
        return cls.from_images(imgs)

    @classmethod
    def from_images(cls, imgs: Sequence[RatFunc]) -> "CurveRestriction":
        imgs = tuple(imgs)
        if all(g.is_constant() for g in imgs):
            raise CurveError("parametrization is constant")
        return cls(imgs, ["parametrization non-constant"])

    def __str__(self) -> str:
        return "s ↦ (" + ", ".join(str(g) for g in self.param) + ")"


def restrict_to_curve(f: RatFunc, C: CurveRestriction) -> tuple:
    """``(f|_C, degree)`` with degree ``max(deg num, deg den)`` in ``s``."""
    if len(C.param) != len(f.vars):
        raise CurveError("curve dimension does not match the function")
    try:
        g = f.substitute(C.param)
    except ZeroDivisionError:
        raise CurveError("curve inside polar locus") from None
    return g, g.degree()


def _apply_point_map(sigma: FieldEndo, pt: tuple) -> tuple:
    try:
        return tuple(img.substitute(pt) for img in sigma.images)
    except ZeroDivisionError:
        raise CurveError("curve inside polar locus") from None


@dataclass
class DoublingProfile:
    degrees: list
    holds: bool
    failures: list
    log: list
    curve: CurveRestriction
    restricted: list

    def to_json(self) -> dict:
        return {"curve": str(self.curve), "degrees": self.degrees, "verdict": self.holds,
                "failures": self.failures, "curve_log": self.log}


def doubling_profile(sigma: FieldEndo, h: RatFunc, C: CurveRestriction, n: int,
                     j_max: int) -> DoublingProfile:
    """Degrees of ``sigma^(nj)(h)`` along ``C`` and the doubling verdict."""
    log = list(C.validity_log)
    pt = C.param
    degrees, restricted = [], []
    k = 0
    for j in range(j_max + 1):
        while k < n * j:
            try:
                pt = _apply_point_map(sigma, pt)
            except CurveError as exc:
                raise CurveError(f"{exc} (at j={j}, iterate {k + 1})") from None
            k += 1
            if all(g.is_constant() for g in pt):
                raise CurveError(f"curve contracted to a point at j={j}")
        try:
            g = h.substitute(pt)
        except ZeroDivisionError:
            raise CurveError(f"curve inside polar locus of σ^{n * j}(h) (at j={j})") from None
        if not g:
            raise CurveError(f"σ^{n * j}(h) vanishes identically on the curve (at j={j})")
        log.append(f"j={j}: σ^{n * j}(h) and its inverse restrict (no identical zero or pole); "
                   f"image curve non-constant")
        naive = max(RatFunc.from_poly(h.num).substitute(pt).degree(),
                    RatFunc.from_poly(h.den).substitute(pt).degree())
        if g.degree() < naive:
            log.append(f"j={j}: degree drops from {naive} to {g.degree()} by cancellation; "
                       f"the curve meets the indeterminacy locus of σ^{n * j}(h)")
        degrees.append(g.degree())
        restricted.append(g)
    failures = []
    for j, d in enumerate(degrees):
        if d < 1:
            failures.append(f"j={j}: restriction is constant")
        if j + 1 < len(degrees) and degrees[j + 1] < 2 * d:
            failures.append(f"j={j + 1}: degree {degrees[j + 1]} < 2·{d}")
    return DoublingProfile(degrees, not failures, failures, log, C, restricted)


def default_line(sigma: FieldEndo, h: RatFunc, n: int, j_max: int,
                 seeds: Sequence = (3, 2, 5, 7, 11, 13, -1, -2, 17, 19)) -> DoublingProfile:
    """First line ``s -> (s, c)`` on which the validity checks pass."""
    if len(sigma.vars) != 2:
        raise CurveError("default lines are only defined for surfaces")
    errors = []
    for c in seeds:
        C = CurveRestriction.from_images((RatFunc.var(PARAM, "s"), RatFunc.const(PARAM, c)))
        C.validity_log.append(f"line y = {c}")
        try:
            return doubling_profile(sigma, h, C, n, j_max)
        except CurveError as exc:
            errors.append(f"y = {c}: {exc}")
    raise CurveError("no seed line passed: " + "; ".join(errors))


# -- proof-lemma oracles ---------------------------------------------------------------

@dataclass
class Lemma63Result:
    dim_T: int
    dim_TU: int
    verdict: bool
    hypothesis: str          # "verified", "checked" or "hypothesis unverified"


def lemma63_check(T: Sequence[RatFunc], f: RatFunc, samples: int = 20,
                  seed: int = 63) -> Lemma63Result:
    """Dimensions of ``T`` and ``T U`` with ``U = span{1, f}``."""
    T = [g for g in T if g]
    dim_T = span_rank(T)
    dim_TU = span_rank(T + [g * f for g in T])
    df = f.degree()
    if f.is_constant() or any(g.degree() >= df for g in T):
        status = "hypothesis unverified"
    elif all(g.is_polynomial() for g in T) and f.is_polynomial():
        status = "verified"
    elif sum(g.degree() for g in T) < df:
        status = "verified"
    else:
        rng = random.Random(seed)
        status = "checked"
        for _ in range(samples):
            combo = RatFunc.zero(f.vars)
            for g in T:
                combo = combo + g * rng.randint(-5, 5)
            if combo and combo.degree() >= df:
                status = "hypothesis unverified"
                break
    return Lemma63Result(dim_T, dim_TU, dim_TU == 2 * dim_T, status)


@dataclass
class PowerLiftReport:
    base: FreenessCertificate
    lifted: FreenessCertificate
    status: str

    @property
    def holds(self) -> bool:
        return self.status != "implication fails"

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "lifted": self.lifted.to_json(), "status": self.status}


def power_lift_check(sigma: FieldEndo, a: RatFunc, b: RatFunc, i: int, m: int,
                     j_max: int) -> PowerLiftReport:
    base = certify_free(sigma, a, b, i, j_max)
    lifted = base if m == 1 else certify_free(sigma, a, b, i * m, j_max)
    if not base.free:
        status = "antecedent false"
    elif lifted.free:
        status = "implication holds"
    else:
        status = "implication fails"
    return PowerLiftReport(base, lifted, status)


@dataclass
class GrowthProfile:
    dims: list
    ratios: list
    kind: str                 # "exponential", "polynomial" or "inconclusive"
    fitted_degree: int | None
    truncated: bool = False

    def to_json(self) -> dict:
        return {"dims": self.dims, "ratios": [float(r) for r in self.ratios], "kind": self.kind,
                "fitted_degree": self.fitted_degree, "truncated": self.truncated}


def growth_profile(sigma: FieldEndo, generators: Sequence[RatFunc], N: int, step: int = 1,
                   cap: int = 512, seed: int = 5) -> GrowthProfile:
    """Dimensions of ``V^m`` for ``V = span{g t^step}`` and ``m = 1..N``.

    Computed by basis propagation on sample vectors modulo a large prime;
    the values are lower bounds and exact whenever they equal the count
    of spanning products.
    """
    gens = [g for g in generators]
    if not gens or any(not g for g in gens):
        raise CertificationError("generators must be nonzero")
    rng = random.Random(seed)
    p = _random_prime(rng)
    K = cap + 16
    samples = _orbit_samples_mod(sigma, gens, step, N - 1, K, p, rng)
    basis = None
    dims = []
    truncated = False
    for m in range(N):
        g_rows = [[s[m][g] for s in samples] for g in range(len(gens))]
        if basis is None:
            cand = g_rows
        else:
            cand = [[x * y % p for x, y in zip(bv, gv)] for bv in basis for gv in g_rows]
        keep = kernels.independent_rows_mod(cand, p)
        basis = [cand[i] for i in keep]
        dims.append(len(basis))
        if len(basis) >= cap:
            truncated = True
            break
    ratios = [mpq(dims[i + 1], dims[i]) for i in range(len(dims) - 1)]
    kind, deg = _classify(dims, ratios, len(gens))
    return GrowthProfile(dims, ratios, kind, deg, truncated)


def _classify(dims: list, ratios: list, k: int) -> tuple:
    if len(dims) < 3:
        return "inconclusive", None
    if all(r == k for r in ratios) and k > 1:
        return "exponential", None
    # smallest order of vanishing finite differences on the tail
    for d in range(0, len(dims) - 2):
        diffs = list(dims)
        for _ in range(d + 1):
            diffs = [y - x for x, y in zip(diffs, diffs[1:])]
        if len(diffs) >= 2 and all(v == 0 for v in diffs[-2:]):
            return "polynomial", d
    return "inconclusive", None
