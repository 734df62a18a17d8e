"""Compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Each kernel runs on identical random inputs under both backends; the
outputs are compared before any timing is reported.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time

import gmpy2

from skewcert import _kernels_py

try:
    from skewcert import _kernels
except ImportError:
    _kernels = None


def _sparse(rng: random.Random, terms: int, bits: int) -> dict:
    # packed exponents: two 20-bit fields
    return {rng.randrange(64) | (rng.randrange(64) << 20): rng.getrandbits(bits) - (1 << (bits - 1))
            for _ in range(terms)}


def _matrix(rng: random.Random, n: int, m: int, bits: int) -> list:
    return [[rng.getrandbits(bits) - (1 << (bits - 1)) for _ in range(m)] for _ in range(n)]


def cases(seed: int = 2024) -> list:
    rng = random.Random(seed)
    p = int(gmpy2.next_prime(1 << 61))
    a, b = _sparse(rng, 400, 64), _sparse(rng, 400, 64)
    big = _matrix(rng, 40, 40, 32)
    wide = _matrix(rng, 256, 256, 62)
    return [
        ("sparse_mul 400x400 terms", "sparse_mul", (a, b)),
        ("sparse_square 400 terms", "sparse_square", (a,)),
        ("bareiss_echelon 40x40, 32-bit", "bareiss_echelon", (big,)),
        ("rank_mod 256x256, 61-bit prime", "rank_mod", ([[x % p for x in r] for r in wide], p)),
        ("independent_rows_mod 256x256", "independent_rows_mod", ([[x % p for x in r] for r in wide], p)),
    ]


def _time(fn, args, repeat: int) -> tuple:
    out = None
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def run(repeat: int) -> list:
    rows = []
    for label, name, args in cases():
        t_py, r_py = _time(getattr(_kernels_py, name), args, repeat)
        row = {"kernel": label, "python_s": t_py}
        if _kernels is not None:
            t_c, r_c = _time(getattr(_kernels, name), args, repeat)
            if r_c != r_py:
                raise SystemExit(f"backends disagree on {label}")
            row.update(compiled_s=t_c, speedup=t_py / t_c if t_c else float("inf"))
        rows.append(row)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = run(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    if _kernels is None:
        print("compiled extension not built; timing the Python fallback only")
    print(f"{'kernel':<34}{'python (ms)':>13}{'compiled (ms)':>15}{'speedup':>9}")
    for r in rows:
        c = f"{1e3 * r['compiled_s']:>15.2f}{r['speedup']:>8.1f}x" if "compiled_s" in r else ""
        print(f"{r['kernel']:<34}{1e3 * r['python_s']:>13.2f}{c}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
