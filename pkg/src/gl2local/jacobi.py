"""Exact Jacobi-type character sums with certified leading p-adic terms.

The central quantity is the sum over the residue field of
``[s]^a [1-s]^b`` where ``[.]`` denotes the Teichmuller lift into the
Witt ring.  Classical Stickelberger theory predicts its exact p-adic
valuation u by a base-p digit count and its leading unit U by a signed
ratio of digit factorials mod p.  ``certify`` recomputes the sum
exactly and confirms that the remainder past the predicted leading
term has strictly larger valuation.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import BadInput, DegenerateSum, InternalCheckFailed
from .exactnum import WittElem, witt_ring
from .ffield import FFElem, FiniteField, add_encodings


class JacobiSumResult(NamedTuple):
    """Exponents, exact sum, predicted leading term, and the verdict."""

    a: int
    b: int
    value: WittElem
    valuation: int
    unit: FFElem
    certified: bool


def _check_range(field: FiniteField, a: int, b: int) -> None:
    top = field.q - 1
    if not (0 < a <= top and 0 < b <= top):
        raise BadInput(f"exponents must lie in [1, {top}]; got a={a}, b={b}")


def jacobi_sum(field: FiniteField, a: int, b: int, precision: int) -> WittElem:
    """Sum of [s]^a [1-s]^b over the field, exact modulo p^precision.

    Terms at s = 0 and s = 1 vanish because [0] = 0.
    """
    _check_range(field, a, b)
    ring = witt_ring(field, precision)
    q = field.q
    qm1 = q - 1
    ks = np.arange(qm1, dtype=np.int64)
    # encoding of -s as s runs over the unit group in generator order
    half = qm1 // 2 if field.p != 2 else 0
    neg = field.gpow[(ks + half) % qm1]
    comp = np.asarray(add_encodings(field, 1, neg), dtype=np.int64)
    keep = comp != 0                     # drops s = 1
    ls = field.dlog[comp[keep]]          # dlog of 1 - s
    expo = (a * ks[keep] + b * ls) % qm1
    return ring.sum_rows(ring.teich_table[expo])


def _digits(n: int, p: int, f: int) -> list[int]:
    return [(n // p**j) % p for j in range(f)]


def stickelberger(field: FiniteField, a: int, b: int) -> tuple[int, FFElem]:
    """Predicted valuation u and leading unit U of the (a, b) sum.

    u counts, over the f base-p digit slots, how far the digitwise sum
    of a and b falls short of maximal after reducing a+b into [1, q-2];
    U is a signed ratio of digit factorials mod p.
    """
    _check_range(field, a, b)
    p, f, q = field.p, field.m, field.q
    c = (a + b) % (q - 1)
    if c == 0:
        raise DegenerateSum("a + b is divisible by q - 1; no leading unit")
    da, db, dc = _digits(a, p, f), _digits(b, p, f), _digits(c, p, f)
    num = sum(p - 1 - (da[j] + db[j] - dc[j]) for j in range(f))
    u, rem = divmod(num, p - 1)
    if rem or u < 0:
        raise InternalCheckFailed(f"digit count {num} is not a valuation")
    unit = 1
    for j in range(f):
        unit = unit * math.factorial(da[j]) * math.factorial(db[j]) % p
        unit = unit * pow(math.factorial(dc[j]), -1, p) % p
    if (f - 1 + u) % 2:
        unit = -unit % p
    return u, field.from_int(unit)


def certify(field: FiniteField, a: int, b: int,
            precision: int | None = None) -> JacobiSumResult:
    """Check that the exact sum equals [U] p^u plus higher-order terms."""
    u, unit = stickelberger(field, a, b)
    if precision is None:
        precision = u + 5
    if precision < u + 2:
        raise BadInput(f"need precision >= {u + 2} to certify u = {u}")
    ring = witt_ring(field, precision)
    total = jacobi_sum(field, a, b, precision)
    lead = ring.teich(unit) * ring.from_int(field.p**u)
    certified = (total - lead).valuation() > u
    return JacobiSumResult(a, b, total, u, unit, certified)


def admissible_exponents(field: FiniteField):
    """All (a, b) pairs accepted by stickelberger, in lexicographic order."""
    top = field.q - 1
    for a in range(1, top + 1):
        for b in range(1, top + 1):
            if (a + b) % top:
                yield a, b
