import os
import subprocess
import sys

import gmpy2
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from skewcert import _kernels_py as py
from skewcert import kernels

compiled = pytest.importorskip("skewcert._kernels", reason="compiled extension not built")

P61 = int(gmpy2.next_prime(1 << 61))
BIG_P = int(gmpy2.next_prime(1 << 64))

coeff = st.integers(-(1 << 80), 1 << 80)
key = st.builds(lambda a, b: a | (b << 20), st.integers(0, 40), st.integers(0, 40))
sparse = st.dictionaries(key, coeff.filter(bool), max_size=25)


def matrices(max_rows=8, max_cols=8, lo=-50, hi=50):
    return st.integers(1, max_cols).flatmap(lambda n: st.lists(
        st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=0, max_size=max_rows))


def test_backend_selected():
    assert kernels.BACKEND == "compiled"
    env = dict(os.environ, SKEWCERT_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from skewcert import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(sparse, sparse)
@settings(max_examples=200)
def test_sparse_mul_parity(a, b):
    expected = py.sparse_mul(a, b)
    assert compiled.sparse_mul(a, b) == expected
    assert py.sparse_mul(b, a) == expected


@given(sparse)
@settings(max_examples=200)
def test_sparse_square_parity(a):
    expected = py.sparse_mul(a, a)
    assert py.sparse_square(a) == expected
    assert compiled.sparse_square(a) == expected


@given(matrices())
@settings(max_examples=200)
def test_bareiss_parity_and_rank(rows):
    ech, piv = py.bareiss_echelon(rows)
    assert compiled.bareiss_echelon(rows) == (ech, piv)
    if rows:
        assert len(piv) == sp.Matrix(rows).rank()


@given(matrices(lo=-(1 << 70), hi=1 << 70), st.sampled_from([2, 3, 101, 65537, P61]))
@settings(max_examples=200)
def test_rank_mod_parity(rows, p):
    r = py.rank_mod(rows, p)
    assert compiled.rank_mod(rows, p) == r
    if rows:
        assert r <= sp.Matrix(rows).rank()


@given(matrices(max_rows=12), st.sampled_from([3, 7, P61]))
@settings(max_examples=200)
def test_independent_rows_parity(rows, p):
    keep = py.independent_rows_mod(rows, p)
    assert compiled.independent_rows_mod(rows, p) == keep
    assert len(keep) == py.rank_mod(rows, p)
    assert py.rank_mod([rows[i] for i in keep], p) == len(keep)


def test_rank_mod_large_prime_falls_back():
    rows = [[1, 2, 3], [2, 4, 6], [BIG_P + 1, 0, 1]]
    assert compiled.rank_mod(rows, BIG_P) == py.rank_mod(rows, BIG_P) == 2


def test_rank_over_q_vs_mod_p():
    # rank mod p can only drop, and drops when p divides every maximal minor
    rows = [[1, 0], [0, 5]]
    assert py.rank_mod(rows, 5) == 1
    assert py.rank_mod(rows, 7) == 2
    assert compiled.rank_mod(rows, 5) == 1
