"""Command-line interface: ``skewcert <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import atlas, cremona, freecert, nslattice as ns
from .exactcore.endo import FieldEndo
from .exactcore.ratfunc import RatFunc
from .exactcore.upoly import to_string


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SystemExit(f"error: no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: {path} is not valid JSON ({exc})") from None


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, ensure_ascii=False, default=str))
    else:
        print(text)


def _sigma(args) -> FieldEndo:
    return FieldEndo.from_spec(_load_json(args.map))


# -- certify / doubling ----------------------------------------------------------

def cmd_certify(args) -> int:
    sigma = _sigma(args)
    names = [g.strip() for g in args.gens.split(",")]
    if len(names) != 2:
        raise SystemExit("error: --gens needs exactly two comma-separated generators")
    a, b = (RatFunc.parse(g, sigma.vars) for g in names)
    cert = freecert.certify_free(sigma, a, b, args.step, args.depth, method=args.method, oracle=args.oracle)
    lines = [f"dims: {cert.dims}", f"verdict: {cert.verdict}", cert.note()]
    if cert.witness:
        lines.append("witness: " + " + ".join(f"({c})*{w}" for w, c in cert.witness)
                     + f"  [{cert.witness_verified}]")
    _emit(args, cert.to_json(), "\n".join(lines))
    return 0


def cmd_doubling(args) -> int:
    sigma = _sigma(args)
    h = RatFunc.parse(args.h, sigma.vars)
    if args.curve:
        prof = freecert.doubling_profile(sigma, h, freecert.CurveRestriction.parse(args.curve, len(sigma.vars)),
                                         args.step, args.depth)
    else:
        prof = freecert.default_line(sigma, h, args.step, args.depth)
    text = "\n".join([f"curve: {prof.curve}", f"degrees: {prof.degrees}",
                      f"doubling holds: {prof.holds}"] + [f"  {m}" for m in prof.log])
    _emit(args, prof.to_json(), text)
    return 0


# -- lattice -------------------------------------------------------------------------

def cmd_lattice(args) -> int:
    system = ns.LatticeSystem.from_spec(_load_json(args.spec))
    bad = system.validate()
    if bad:
        raise SystemExit("error: " + "; ".join(bad))
    M, G = system.M(), system.G()
    payload: dict = {"op": args.op}
    if args.op == "radius":
        sr = ns.spectral_radius(M)
        payload.update(charpoly=to_string(sr.charpoly), radius=sr.describe(), method=sr.method,
                       exact=sr.exact is not None)
        text = f"charpoly: {payload['charpoly']}\nspectral radius: {payload['radius']} ({sr.method})"
    elif args.op == "split":
        H = _cls(system, "H")
        s = ns.hyperbolic_split(M, G, H)
        payload.update(lam=str(s.lam), e_plus=[str(c) for c in s.e_plus], e_minus=[str(c) for c in s.e_minus],
                       w=[str(c) for c in s.w], pairing=str(s.pairing), exact=s.exact,
                       checks={k: bool(v) for k, v in s.checks.items()})
        text = "\n".join([f"lambda: {payload['lam']}", f"e+: {payload['e_plus']}", f"e-: {payload['e_minus']}",
                          f"w: {payload['w']}", f"e+.e-: {payload['pairing']}"]
                         + [f"  [{'ok' if v else 'FAIL'}] {k}" for k, v in payload["checks"].items()])
    elif args.op == "sequence":
        H = _cls(system, "H")
        C = _cls(system, "C") if "C" in system.classes else H
        seq = ns.intersection_sequence(M, G, H, C, args.j_max)
        payload.update(values=[int(v) for v in seq.values], verdict=seq.verdict, failures=seq.failures,
                       boundary=seq.boundary)
        text = f"s_j: {payload['values']}\ndoubling s_(j+1) > 2 s_j through j={args.j_max}: {seq.verdict}"
    else:
        bound = ns.MAIN_THRESHOLD if args.bound == "main" else ns.IMPROVED_THRESHOLD
        res = ns.threshold_min_power(ns.spectral_radius(M), bound)
        payload.update(bound=str(bound), n=res.n, boundary=res.boundary, note=res.note)
        text = f"smallest n with rho^n >= {bound}: {res.n}" + (f" ({res.note})" if res.note else "")
    _emit(args, payload, text)
    return 0


def _cls(system: ns.LatticeSystem, name: str) -> list:
    if name not in system.classes:
        raise SystemExit(f"error: lattice spec has no class {name}")
    return list(system.classes[name])


# -- cremona ------------------------------------------------------------------------

def cmd_cremona(args) -> int:
    spec = _load_json(args.map)
    if list(spec.get("vars", [])) != list(cremona.AVARS):
        raise SystemExit("error: plane maps use variables x, y")
    plane = cremona.homogenize([RatFunc.parse(s, cremona.AVARS) for s in spec["images"]])
    seq = cremona.degree_sequence(plane, args.iterations, args.budget)
    payload = seq.to_json()
    payload["forms"] = plane.to_strings()
    lines = [f"map: {plane}", f"degrees: {seq.degrees}", f"drops at: {seq.drops or 'none'}",
             f"lambda estimate: {seq.lambda_estimate:.6f}"]
    if seq.recurrence is not None:
        lines.append("recurrence: d_n = " + " + ".join(f"({c}) d_(n-{k + 1})" for k, c in enumerate(seq.recurrence)))
    if seq.note:
        lines.append(seq.note)
    report = _threshold_report(seq)
    payload["threshold_report"] = report
    lines.append("threshold report:")
    lines += [f"  {k}: {v}" for k, v in report.items()]
    _emit(args, payload, "\n".join(lines))
    return 0


def _threshold_report(seq: cremona.DegreeSequence) -> dict:
    """Which finite ingredients were verified; the stable model is not built."""
    out = {"degree_sequence": "computed", "stable_on_window": not seq.drops}
    if seq.radius is not None and seq.radius.exact is not None:
        lam = seq.radius.exact
        out["lambda"] = str(lam)
        if float(lam) > 1:
            out["min_power_main"] = ns.threshold_min_power(lam, ns.MAIN_THRESHOLD).n
            ng = cremona.henon_nongeometric_report(lam)
            out["non_geometric"] = ng.obstruction
            out["non_geometric_reason"] = ng.reason
        else:
            out["min_power_main"] = None
    else:
        out["lambda"] = "no exact value (no recurrence fitted)"
    out["not_verified"] = "free pair construction on a stable model; run `doubling` on a chosen curve"
    return out


# -- atlas ------------------------------------------------------------------------

def cmd_atlas(args) -> int:
    if args.atlas_cmd == "list":
        rows = atlas.list_fixtures()
        if args.json:
            print(json.dumps([{"name": n, "summary": s} for n, s in rows], indent=2, ensure_ascii=False))
        else:
            width = max(len(n) for n, _ in rows)
            for n, s in rows:
                print(f"{n:<{width}}  {s}")
        return 0
    if args.atlas_cmd == "run":
        names = [n for n, _ in atlas.list_fixtures()] if args.name == "all" else [args.name]
        reports = [atlas.run_fixture(n) for n in names]
        if args.json:
            data = [r.to_json() for r in reports]
            print(json.dumps(data[0] if len(data) == 1 else data, indent=2, ensure_ascii=False, default=str))
        else:
            print("\n".join(r.format_text() for r in reports))
        return 0 if all(r.passed for r in reports) else 1
    text = atlas.generate_errata()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}")
    return 0


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skewcert", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="finite-window freeness certificate for k{a t^n, b t^n}")
    c.add_argument("--map", required=True, help="JSON map spec {vars, images, inverse_images?}")
    c.add_argument("--gens", default="x,y")
    c.add_argument("--step", type=int, default=1)
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--method", choices=["auto", "symbolic", "sample", "modular"], default="auto")
    c.add_argument("--oracle", action="store_true", help="cross-check ranks by independent evaluation")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("doubling", help="degree profile of sigma^(nj)(h) restricted to a curve")
    d.add_argument("--map", required=True)
    d.add_argument("--h", required=True)
    d.add_argument("--curve", help='parametrization in s, e.g. "s,3"; default: first valid horizontal line')
    d.add_argument("--step", type=int, default=1)
    d.add_argument("--depth", type=int, default=5)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_doubling)

    lt = sub.add_parser("lattice", help="Neron-Severi lattice computations")
    lt.add_argument("--spec", required=True)
    lt.add_argument("--op", choices=["split", "sequence", "radius", "threshold"], required=True)
    lt.add_argument("--j-max", type=int, default=20)
    lt.add_argument("--bound", choices=["main", "improved"], default="main")
    lt.add_argument("--json", action="store_true")
    lt.set_defaults(func=cmd_lattice)

    cr = sub.add_parser("cremona", help="degree sequence of a plane birational map")
    cr.add_argument("--map", required=True)
    cr.add_argument("--iterations", type=int, default=8)
    cr.add_argument("--budget", type=int, default=cremona.DEFAULT_DEGREE_BUDGET)
    cr.add_argument("--json", action="store_true")
    cr.set_defaults(func=cmd_cremona)

    at = sub.add_parser("atlas", help="curated fixtures")
    asub = at.add_subparsers(dest="atlas_cmd", required=True)
    run = asub.add_parser("run", help="run one fixture, or all")
    run.add_argument("name")
    run.add_argument("--json", action="store_true")
    ls = asub.add_parser("list")
    ls.add_argument("--json", action="store_true")
    er = asub.add_parser("errata", help="regenerate the errata ledger")
    er.add_argument("--output", default="ERRATA.md")
    at.set_defaults(func=cmd_atlas)
    return p


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
