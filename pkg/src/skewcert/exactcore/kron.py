"""Kronecker-substitution multiplication for integer polynomials.

Exponent vectors are flattened with mixed radix into one exponent, the
signed coefficients are split into nonnegative halves and packed into big
integers, and GMP performs the product.  Used only when the dense slot
range is moderate compared with the term count.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

_MAX_BITS = 1 << 29
_MIN_WORK = 4000


def _radices(da: tuple, db: tuple) -> list:
    return [a + b + 1 for a, b in zip(da, db)]


def _flatten(e, radices) -> int:
    k = 0
    m = 1
    for x, r in zip(e, radices):
        k += x * m
        m *= r
    return k


def _pack(terms: dict, radices, nslots: int, width: int, drop_last: bool) -> tuple:
    pos = bytearray(nslots * width)
    neg = bytearray(nslots * width)
    for e, c in terms.items():
        if drop_last:
            e = e[:-1]
        k = _flatten(e, radices) * width
        n = int(c.numerator)
        if n > 0:
            pos[k:k + width] = n.to_bytes(width, "little")
        else:
            neg[k:k + width] = (-n).to_bytes(width, "little")
    return mpz(int.from_bytes(pos, "little")), mpz(int.from_bytes(neg, "little"))


def _unpack(value, nslots: int, width: int) -> memoryview:
    return memoryview(int(value).to_bytes(nslots * width, "little"))


def _bits(terms: dict) -> int:
    return max(int(c.numerator).bit_length() for c in terms.values())


def kronecker_mul(ta: dict, tb: dict, da: tuple, db: tuple, homog: tuple | None):
    """Product of integer-coefficient term maps, or ``None`` if not worthwhile.

    ``homog`` is ``(deg_a, deg_b)`` when both factors are homogeneous, in
    which case the last exponent is implied by the others.
    """
    if len(ta) * len(tb) < _MIN_WORK:
        return None
    drop = homog is not None and len(da) > 1
    if drop:
        da, db = da[:-1], db[:-1]
    radices = _radices(da, db)
    nslots = 1
    for r in radices:
        nslots *= r
    square = ta is tb
    width_bits = _bits(ta) + _bits(tb) + min(len(ta), len(tb)).bit_length() + 2
    width = (width_bits + 7) // 8
    if nslots * width * 8 > _MAX_BITS or nslots > 64 * len(ta) * len(tb):
        return None
    pa, na = _pack(ta, radices, nslots, width, drop)
    if square:
        pb, nb = pa, na
        s1 = pa * pa + na * na
        s2 = 2 * pa * na
    else:
        pb, nb = _pack(tb, radices, nslots, width, drop)
        s1 = pa * pb + na * nb
        s2 = pa * nb + na * pb
    m1 = _unpack(s1, nslots, width)
    m2 = _unpack(s2, nslots, width)
    total = homog[0] + homog[1] if drop else 0
    out = {}
    zero = bytes(width)
    frm = int.from_bytes
    for k in range(nslots):
        off = k * width
        b1 = m1[off:off + width]
        b2 = m2[off:off + width]
        if b1 == zero and b2 == zero:
            continue
        c = frm(b1, "little") - frm(b2, "little")
        if not c:
            continue
        e = []
        rest = k
        for r in radices:
            rest, x = divmod(rest, r)
            e.append(x)
        if drop:
            e.append(total - sum(e))
        out[tuple(e)] = mpq(c)
    return out
