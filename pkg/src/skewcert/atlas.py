"""Curated fixtures with expected values, and the runner that checks them.

Each fixture is a versioned JSON file under ``fixtures/``.  An expectation
names an operation, its arguments, the expected value and a provenance tag
drawn from ``PROVENANCE``; derived values must name their oracle.  Errata
are data: the expectation asserts the corrected value while the erratum
record carries the printed value plus executable checks of both.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Any, Callable, Mapping

from gmpy2 import mpq

from . import cremona, freecert, nslattice as ns, linalg as la
from .exactcore import upoly
from .exactcore.endo import FieldEndo
from .exactcore.quad import QuadExt
from .exactcore.ratfunc import RatFunc
from .skewring import enumerate_words

SCHEMA_VERSION = 1
PROVENANCE = ("PAPER", "TRIVIAL", "DERIVED")


class FixtureError(ValueError):
    pass


# -- data model ----------------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    id: str
    op: str
    args: dict
    expected: Any
    provenance: str
    oracle: str | None = None
    erratum: dict | None = None

    @classmethod
    def from_json(cls, d: Mapping) -> "Expectation":
        return cls(d["id"], d["op"], dict(d.get("args", {})), d["expected"], d["provenance"],
                   d.get("oracle"), d.get("erratum"))


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    summary: str
    inputs: dict
    expectations: tuple
    schema: int = SCHEMA_VERSION

    @classmethod
    def from_json(cls, d: Mapping) -> "Fixture":
        if d.get("schema") != SCHEMA_VERSION:
            raise FixtureError(f"unsupported fixture schema {d.get('schema')!r}")
        fx = cls(d["name"], d["kind"], d["summary"], dict(d.get("inputs", {})),
                 tuple(Expectation.from_json(e) for e in d["expectations"]), d["schema"])
        problems = validate_fixture(fx)
        if problems:
            raise FixtureError(f"fixture {fx.name}: " + "; ".join(problems))
        return fx


def validate_fixture(fx: Fixture) -> list:
    bad = []
    if fx.kind not in ("lattice", "map", "combined"):
        bad.append(f"unknown kind {fx.kind}")
    seen = set()
    for e in fx.expectations:
        if e.id in seen:
            bad.append(f"duplicate expectation id {e.id}")
        seen.add(e.id)
        if e.provenance not in PROVENANCE:
            bad.append(f"{e.id}: bad provenance {e.provenance}")
        if e.provenance == "DERIVED" and not e.oracle:
            bad.append(f"{e.id}: DERIVED value without an oracle")
        if e.op not in OPS:
            bad.append(f"{e.id}: unknown operation {e.op}")
        if e.erratum is not None:
            er = e.erratum
            for key in ("id", "printed", "corrected", "note", "checks"):
                if key not in er:
                    bad.append(f"{e.id}: erratum lacks {key}")
            if e.provenance != "DERIVED":
                bad.append(f"{e.id}: an erratum must sit on a DERIVED correction")
            for chk in er.get("checks", []):
                if chk.get("op") not in OPS:
                    bad.append(f"{e.id}: erratum check uses unknown operation {chk.get('op')}")
    return bad


# -- loading -------------------------------------------------------------------

def _fixture_files():
    root = resources.files("skewcert") / "fixtures"
    return sorted((p for p in root.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


_CACHE: dict = {}


def load_fixtures() -> dict:
    if not _CACHE:
        for path in _fixture_files():
            fx = Fixture.from_json(json.loads(path.read_text(encoding="utf-8")))
            _CACHE[fx.name] = fx
    return _CACHE


def get_fixture(name: str) -> Fixture:
    fixtures = load_fixtures()
    if name not in fixtures:
        raise FixtureError(f"unknown fixture {name!r}; known: {', '.join(sorted(fixtures))}")
    return fixtures[name]


def list_fixtures() -> list:
    """``[(name, summary)]`` in alphabetical order."""
    return [(name, fx.summary) for name, fx in sorted(load_fixtures().items())]


# -- execution context -----------------------------------------------------------

def _quad(v) -> QuadExt:
    if isinstance(v, QuadExt):
        return v
    if isinstance(v, (list, tuple)):
        a, b, d = v
        return QuadExt(mpq(str(a)), mpq(str(b)), int(d))
    return QuadExt(mpq(str(v)))


def _qstr(x) -> str:
    if isinstance(x, QuadExt):
        return str(x)
    x = mpq(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Context:
    """Objects built once per fixture run from its inputs."""

    def __init__(self, fixture: Fixture):
        self.fixture = fixture
        self.inputs = fixture.inputs

    # lattice side
    @cached_property
    def lat(self) -> dict:
        if "lattice" not in self.inputs:
            raise FixtureError("fixture has no lattice input")
        return self.inputs["lattice"]

    @cached_property
    def G(self) -> list:
        return [list(map(int, r)) for r in self.lat["gram"]]

    @cached_property
    def generators(self) -> dict:
        return {k: [list(map(int, r)) for r in m] for k, m in self.lat.get("generators", {}).items()}

    @cached_property
    def M(self) -> list:
        if "pullback" in self.lat:
            return [list(map(int, r)) for r in self.lat["pullback"]]
        order = self.lat["compose"]
        acc = self.generators[order[0]]
        for k in order[1:]:
            acc = la.mat_mul(acc, self.generators[k])
        return acc

    @cached_property
    def charpoly(self) -> list:
        if "charpoly" in self.lat:
            return [int(c) for c in self.lat["charpoly"]]
        return [int(c) for c in la.charpoly(self.M)]

    @cached_property
    def radius(self) -> ns.SpectralRadius:
        return ns.spectral_radius_of_poly(self.charpoly)

    def cls(self, name: str) -> list:
        return [int(x) for x in self.lat["classes"][name]]

    @cached_property
    def split(self) -> ns.HyperbolicSplit:
        return ns.hyperbolic_split(self.M, self.G, self.cls("H"))

    # map side
    @cached_property
    def sigma(self) -> FieldEndo:
        if "map" not in self.inputs:
            raise FixtureError("fixture has no map input")
        return FieldEndo.from_spec(self.inputs["map"])

    @cached_property
    def plane(self) -> cremona.PlaneMap:
        m = self.inputs["map"]
        if list(m["vars"]) != list(cremona.AVARS):
            raise FixtureError("plane operations need variables x, y")
        return cremona.homogenize([RatFunc.parse(s, cremona.AVARS) for s in m["images"]])

    def rf(self, text: str) -> RatFunc:
        return RatFunc.parse(str(text), self.sigma.vars)

    def gens(self, args: Mapping) -> tuple:
        a, b = args.get("generators", ["x", "y"])
        return self.rf(a), self.rf(b)


# -- operations ---------------------------------------------------------------------
#
# Every handler returns plain JSON data so expectations can be compared and
# reports serialized without special cases.

OPS: dict[str, Callable[[Context, dict], Any]] = {}


def op(name: str):
    def deco(fn):
        OPS[name] = fn
        return fn
    return deco


def _exact_roots(chi: list) -> list:
    """Real roots of an integer polynomial whose irrational part is at most quadratic."""
    rest = upoly.to_q(chi)
    roots = []
    for r, k in upoly.rational_roots(chi):
        roots += [QuadExt(r)] * k
        for _ in range(k):
            rest = upoly.divmod_(rest, [-r, mpq(1)])[0]
    d = upoly.deg(rest)
    if d == 2:
        roots += ns._quad_roots(upoly.monic(rest))
    elif d > 2:
        raise FixtureError("irrational part has degree above 2")
    return sorted(roots, key=float)


def _factor_strings(chi: list) -> list:
    rest = upoly.to_q(chi)
    out = []
    for r, k in upoly.rational_roots(chi):
        for _ in range(k):
            out.append(upoly.to_string([-r, mpq(1)]))
            rest = upoly.divmod_(rest, [-r, mpq(1)])[0]
    if upoly.deg(rest) >= 1:
        out.append(upoly.to_string(rest))
    return out


@op("pullback")
def _op_pullback(ctx: Context, args: dict):
    return [[int(x) for x in r] for r in ctx.M]


@op("charpoly")
def _op_charpoly(ctx: Context, args: dict):
    if "matrix" in args:
        return upoly.to_string(la.charpoly([list(map(int, r)) for r in args["matrix"]]))
    return upoly.to_string(ctx.charpoly)


@op("charpoly_factors")
def _op_factors(ctx: Context, args: dict):
    return _factor_strings(ctx.charpoly)


@op("eigenvalues")
def _op_eigenvalues(ctx: Context, args: dict):
    return [str(r) for r in _exact_roots(ctx.charpoly)]


@op("spectral_radius")
def _op_radius(ctx: Context, args: dict):
    sr = ctx.radius
    if sr.exact is not None and not args.get("numeric"):
        return str(sr.exact)
    sr.refine(mpq(1, 10**30))
    return float(sr)


@op("isometry")
def _op_isometry(ctx: Context, args: dict):
    mats = list(ctx.generators.values()) + [ctx.M]
    return all(ns.is_isometry(m, ctx.G) for m in mats)


@op("signature")
def _op_signature(ctx: Context, args: dict):
    return list(ns.signature(ctx.G))


@op("hyperbolic_split")
def _op_split(ctx: Context, args: dict):
    s = ctx.split
    return {"lambda": str(s.lam), "e_plus": [str(c) for c in s.e_plus],
            "e_minus": [str(c) for c in s.e_minus], "w": [str(c) for c in s.w],
            "pairing": str(s.pairing), "checks": all(s.checks.values())}


@op("intersection_sequence")
def _op_sequence(ctx: Context, args: dict):
    seq = ns.intersection_sequence(ctx.M, ctx.G, ctx.cls("H"), ctx.cls("C"), int(args["j_max"]))
    return {"head": [int(v) for v in seq.values[: int(args.get("head", 3))]], "verdict": seq.verdict}


@op("trace_cross_check")
def _op_trace(ctx: Context, args: dict):
    """``s_j = factor * trace(M^j)`` for every ``j``."""
    j_max, factor = int(args["j_max"]), int(args["factor"])
    seq = ns.intersection_sequence(ctx.M, ctx.G, ctx.cls("H"), ctx.cls("C"), j_max)
    P = la.identity(len(ctx.M))
    for j in range(j_max + 1):
        if seq.values[j] != factor * sum(P[i][i] for i in range(len(P))):
            return False
        P = la.mat_mul(P, ctx.M)
    return True


@op("eigen_formula")
def _op_eigen_formula(ctx: Context, args: dict):
    j_max = int(args["j_max"])
    H = ctx.cls("H")
    if H != ctx.cls("C"):
        raise FixtureError("the eigen formula compares H with itself")
    seq = ns.intersection_sequence(ctx.M, ctx.G, H, H, j_max)
    return all(ns.eigen_formula(ctx.split, ctx.M, ctx.G, j) == seq.values[j] for j in range(j_max + 1))


@op("closed_form")
def _op_closed_form(ctx: Context, args: dict):
    """``c (lam^n + lam^-n) + e (-1)^(n+1)`` against the integer sequence."""
    c, e = _quad(args["coefficient"]), _quad(args.get("alternating", 0))
    n_max = int(args.get("n_max", 3))
    lam = ctx.radius.eigenvalue()
    vals = [c * (lam ** n + lam ** (-n)) + e * (-1) ** (n + 1) for n in range(n_max + 1)]
    seq = ns.intersection_sequence(ctx.M, ctx.G, ctx.cls("H"), ctx.cls("C"), n_max).values
    return {"values": [_qstr(v) for v in vals], "matches_sequence": all(v == s for v, s in zip(vals, seq))}


@op("pairing")
def _op_pairing(ctx: Context, args: dict):
    u = [_quad(x) for x in args["u"]]
    v = [_quad(x) for x in args["v"]]
    return _qstr(la.pairing(u, ctx.G, v))


@op("unit_sum")
def _op_unit_sum(ctx: Context, args: dict):
    """``alpha + sign * alpha^-1``."""
    a = _quad(args["alpha"])
    return _qstr(a + int(args["sign"]) * a.inverse())


@op("is_eigenvector")
def _op_is_eigvec(ctx: Context, args: dict):
    v = [_quad(x) for x in args["vector"]]
    mu = _quad(args["eigenvalue"])
    return la.mat_vec(ctx.M, v) == [mu * c for c in v]


@op("sum_coefficient")
def _op_sum_coeff(ctx: Context, args: dict):
    """``c`` with ``u + v = c * H``, or None when the sum is not a multiple of ``H``."""
    s = [_quad(a) + _quad(b) for a, b in zip(args["u"], args["v"])]
    H = ctx.cls(args.get("class", "H"))
    k = next(i for i, h in enumerate(H) if h)
    c = s[k] / H[k]
    return _qstr(c) if all(x == c * h for x, h in zip(s, H)) else None


@op("cauchy_schwarz")
def _op_cs(ctx: Context, args: dict):
    rep = ns.cauchy_schwarz_check(ctx.M, ctx.G, ctx.split, int(args["j_max"]))
    return {"holds": rep["holds"], "equality_all": all(r["equality"] for r in rep["rows"])}


_BOUNDS = {"main": ns.MAIN_THRESHOLD, "improved": ns.IMPROVED_THRESHOLD}


@op("threshold")
def _op_threshold(ctx: Context, args: dict):
    bound = _BOUNDS[args.get("bound", "main")]
    lam = _quad(args["lambda"]) if "lambda" in args else ctx.radius
    return ns.threshold_min_power(lam, bound).n


@op("cor_improve")
def _op_cor(ctx: Context, args: dict):
    return bool(ns.cor_improve_applies(ctx.M, int(args["n"]))["applies"])


# map operations

@op("graded_dimension")
def _op_gdim(ctx: Context, args: dict):
    a, b = ctx.gens(args)
    return freecert.graded_dimension(ctx.sigma, a, b, int(args["step"]), int(args["depth"]),
                                     oracle=bool(args.get("oracle", False)))


@op("certify_free")
def _op_certify(ctx: Context, args: dict):
    a, b = ctx.gens(args)
    cert = freecert.certify_free(ctx.sigma, a, b, int(args["step"]), int(args["depth"]),
                                 oracle=bool(args.get("oracle", False)))
    return {"dims": cert.dims, "verdict": cert.verdict,
            "witness": {w: str(c) for w, c in cert.witness} if cert.witness else None,
            "witness_verified": cert.witness_verified}


@op("word_collision")
def _op_collision(ctx: Context, args: dict):
    """Whether the listed words have the same value in the skew ring."""
    a, b = ctx.gens(args)
    words = args["words"]
    table = {w.letters: w.value for w in enumerate_words(a, b, ctx.sigma, int(args["step"]), len(words[0]) - 1)}
    return len({table[w] for w in words}) == 1


@op("doubling_profile")
def _op_doubling(ctx: Context, args: dict):
    h = ctx.rf(args["h"])
    n, j_max = int(args.get("step", 1)), int(args["j_max"])
    if "curve" in args:
        prof = freecert.doubling_profile(ctx.sigma, h, freecert.CurveRestriction.parse(args["curve"]), n, j_max)
    else:
        prof = freecert.default_line(ctx.sigma, h, n, j_max)
    return {"degrees": prof.degrees, "holds": prof.holds}


@op("power_lift")
def _op_power_lift(ctx: Context, args: dict):
    a, b = ctx.gens(args)
    return freecert.power_lift_check(ctx.sigma, a, b, int(args["i"]), int(args["m"]), int(args["depth"])).status


@op("growth_profile")
def _op_growth(ctx: Context, args: dict):
    gens = [ctx.rf(g) for g in args.get("generators", ["x", "y"])]
    prof = freecert.growth_profile(ctx.sigma, gens, int(args["N"]), step=int(args.get("step", 1)))
    return {"dims": prof.dims, "kind": prof.kind, "fitted_degree": prof.fitted_degree}


@op("plane_forms")
def _op_forms(ctx: Context, args: dict):
    return list(ctx.plane.to_strings())


@op("degree_sequence")
def _op_degseq(ctx: Context, args: dict):
    seq = cremona.degree_sequence(ctx.plane, int(args["N"]), int(args.get("budget", cremona.DEFAULT_DEGREE_BUDGET)))
    lam = seq.radius.describe() if seq.radius is not None else None
    return {"degrees": seq.degrees, "drops": seq.drops, "lambda": lam, "recurrence": seq.recurrence}


@op("lambda_agreement")
def _op_lambda_agree(ctx: Context, args: dict):
    """Recurrence-fit lambda against ``d_N^(1/N)``."""
    seq = cremona.degree_sequence(ctx.plane, int(args["N"]), int(args.get("budget", cremona.DEFAULT_DEGREE_BUDGET)))
    if seq.lambda_root is None or seq.partial:
        return False
    return abs(seq.lambda_root - seq.lambda_nth_root()) < float(args.get("tol", 1e-3))


@op("compose_self_identity")
def _op_involution(ctx: Context, args: dict):
    return cremona.compose_primitive(ctx.plane, ctx.plane).is_identity()


@op("contracted_curves")
def _op_contracted(ctx: Context, args: dict):
    cc = cremona.contracted_curves(ctx.plane)
    return sorted([str(f), k] for f, k in cc.factors)


@op("conjugate_degrees")
def _op_conj(ctx: Context, args: dict):
    def pm(images):
        return cremona.homogenize([RatFunc.parse(s, cremona.AVARS) for s in images])

    conj = cremona.conjugate_map(ctx.plane, pm(args["pi"]), pm(args["pi_inverse"]))
    return cremona.degree_sequence(conj, int(args["N"])).degrees


@op("nongeometric")
def _op_nongeo(ctx: Context, args: dict):
    lam = args["lambda"]
    lam = float(lam) if isinstance(lam, float) else _quad(lam)
    return cremona.henon_nongeometric_report(lam).obstruction


# -- comparison and reports ------------------------------------------------------------

def matches(expected, actual) -> bool:
    """Structural equality; dict expectations check only their own keys and
    ``{"approx": v, "tol": t}`` compares floats."""
    if isinstance(expected, dict):
        if set(expected) == {"approx", "tol"}:
            return isinstance(actual, (int, float)) and abs(actual - expected["approx"]) <= expected["tol"]
        return isinstance(actual, dict) and all(k in actual and matches(v, actual[k]) for k, v in expected.items())
    if isinstance(expected, list):
        return isinstance(actual, list) and len(expected) == len(actual) and all(
            matches(e, a) for e, a in zip(expected, actual))
    if isinstance(expected, bool) or isinstance(actual, bool):
        return expected is actual
    return expected == actual


@dataclass
class CheckResult:
    id: str
    op: str
    provenance: str
    expected: Any
    actual: Any
    passed: bool
    oracle: str | None = None
    error: str | None = None
    erratum: dict | None = None
    erratum_checks: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"id": self.id, "op": self.op, "provenance": self.provenance, "expected": self.expected,
               "actual": self.actual, "passed": self.passed}
        if self.oracle:
            out["oracle"] = self.oracle
        if self.error:
            out["error"] = self.error
        if self.erratum:
            out["erratum"] = {"id": self.erratum["id"], "printed": self.erratum["printed"],
                              "corrected": self.erratum["corrected"], "note": self.erratum["note"],
                              "checks": self.erratum_checks}
        return out


@dataclass
class FixtureReport:
    name: str
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed and all(c["passed"] for c in r.erratum_checks) for r in self.results)

    def errata(self) -> list:
        return [r.erratum for r in self.results if r.erratum]

    def to_json(self) -> dict:
        return {"fixture": self.name, "passed": self.passed, "results": [r.to_json() for r in self.results]}

    def format_text(self) -> str:
        lines = [f"fixture {self.name}"]
        for r in self.results:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"  [{mark}] {r.id} {r.op} ({r.provenance}) -> {json.dumps(r.actual, default=str)}")
            if r.error:
                lines.append(f"         error: {r.error}")
            if r.erratum:
                lines.append(f"         erratum {r.erratum['id']}: printed {r.erratum['printed']}; "
                             f"corrected {r.erratum['corrected']}")
                for c in r.erratum_checks:
                    lines.append(f"         [{'PASS' if c['passed'] else 'FAIL'}] {c['label']}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _run(ctx: Context, opname: str, args: dict):
    try:
        return OPS[opname](ctx, dict(args)), None
    except Exception as exc:  # noqa: BLE001 - reported per expectation
        return None, f"{type(exc).__name__}: {exc}"


def run_fixture(name: str) -> FixtureReport:
    fx = get_fixture(name)
    ctx = Context(fx)
    results = []
    for e in fx.expectations:
        actual, err = _run(ctx, e.op, e.args)
        res = CheckResult(e.id, e.op, e.provenance, e.expected, actual,
                          err is None and matches(e.expected, actual), e.oracle, err, e.erratum)
        if e.erratum:
            for chk in e.erratum["checks"]:
                got, cerr = _run(ctx, chk["op"], chk.get("args", {}))
                res.erratum_checks.append({"label": chk["label"], "op": chk["op"], "expected": chk["expected"],
                                           "actual": got, "error": cerr,
                                           "passed": cerr is None and matches(chk["expected"], got)})
        results.append(res)
    return FixtureReport(fx.name, results)


def run_all() -> list:
    return [run_fixture(name) for name, _ in list_fixtures()]


def generate_errata(reports: list | None = None) -> str:
    """Markdown ledger of every erratum, with the status of its checks."""
    if reports is None:
        reports = run_all()
    lines = ["# Errata", "",
             "Printed values that the exact oracles contradict. Each entry is generated from the",
             "erratum records in the fixture files by `skewcert atlas errata`; the fixture asserts the",
             "corrected value and both sides are re-executed on every run.", ""]
    found = sorted(((rep.name, r) for rep in reports for r in rep.results if r.erratum),
                   key=lambda pair: pair[1].erratum["id"])
    for name, r in found:
        er = r.erratum
        lines += [f"## {er['id']}: {er['title']}" if "title" in er else f"## {er['id']}", "",
                  f"- fixture: `{name}`, expectation `{r.id}` (`{r.op}`)",
                  f"- printed: {er['printed']}",
                  f"- corrected: {er['corrected']}",
                  f"- corrected value check: {'pass' if r.passed else 'FAIL'}"]
        for c in r.erratum_checks:
            lines.append(f"- check `{c['op']}`: {c['label']}: {'pass' if c['passed'] else 'FAIL'}")
        lines += ["", er["note"], ""]
    return "\n".join(lines).rstrip() + "\n"
