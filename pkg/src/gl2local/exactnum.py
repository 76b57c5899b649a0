"""Exact arithmetic above the finite fields.

Three layers, all exact (no floats anywhere):

* WittRing / WittElem: the unramified extension Z_p^(m) truncated at
  p^N, realized as Z/p^N[x]/(h).  The modulus h is the lift of the
  field modulus whose root x is itself a (q-1)-st root of unity, so
  Teichmuller representatives are literal monomial powers x^k and the
  residue map is coefficient-wise reduction mod p.
* PadicScaled / ScaledUnit: a value u * p^s with the p-power tracked
  separately, so dividing by p is bookkeeping and never loses
  precision.  ScaledUnit keeps u in the finite field (infinite
  precision, multiplicative only); PadicScaled keeps u in a WittRing.
* CycloInt: an element of Z[zeta_n] as an integer vector on the n-th
  roots of unity, with canonical reduction mod the n-th cyclotomic
  polynomial for equality tests, Galois twists, and reduction to F_ell
  at a split prime.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import (
    BadInput,
    ConductorMismatch,
    InternalCheckFailed,
    NonIntegral,
    PrecisionLoss,
    ZeroArgument,
)
from .ffield import FFElem, FiniteField


# --------------------------------------------------------------------------
# Witt vectors at finite precision


def _poly_mul_mod_int(a, b, f, mod):
    """Product of coefficient lists mod (f(x), mod); f monic."""
    m = len(f) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % mod
    for i in range(len(res) - 1, m - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(m):
                res[i - m + j] = (res[i - m + j] - c * f[j]) % mod
    res = res[:m]
    res += [0] * (m - len(res))
    return res


def _poly_pow_mod_int(base, e, f, mod):
    m = len(f) - 1
    acc = [1] + [0] * (m - 1)
    cur = list(base[:m]) + [0] * (m - len(base))
    while e:
        if e & 1:
            acc = _poly_mul_mod_int(acc, cur, f, mod)
        e >>= 1
        if e:
            cur = _poly_mul_mod_int(cur, cur, f, mod)
    return acc


def _teich_modulus(field: FiniteField, pN: int, N: int) -> tuple[int, ...]:
    """Monic lift h of the field modulus with x^(q-1) = 1 mod (h, p^N).

    Start from the naive integer lift, take the limit of q-th powers of
    x to reach the multiplicative representative t, and expand the
    product of (X - conjugates of t).  The coefficients must come out
    scalar; that is asserted, not assumed.
    """
    p, m, q = field.p, field.m, field.q
    if m == 1:
        g = (-field.modulus[0]) % p
        t = pow(g, p ** (N - 1), pN)
        return ((-t) % pN, 1)
    f_int = [c % pN for c in field.modulus]
    t = [0, 1] + [0] * (m - 2)  # x in the naive-lift ring
    for _ in range(N - 1):
        t = _poly_pow_mod_int(t, q, f_int, pN)
    conj = [t]
    for _ in range(m - 1):
        conj.append(_poly_pow_mod_int(conj[-1], p, f_int, pN))
    # expand prod (X - conj_i); coefficients live in the naive-lift ring
    hc = [[1] + [0] * (m - 1)]  # poly in X with ring coefficients
    for r in conj:
        neg_r = [(-c) % pN for c in r]
        new = [[0] * m for _ in range(len(hc) + 1)]
        for i, ci in enumerate(hc):
            prod = _poly_mul_mod_int(ci, neg_r, f_int, pN)
            for j in range(m):
                new[i][j] = (new[i][j] + prod[j]) % pN
                new[i + 1][j] = (new[i + 1][j] + ci[j]) % pN
        hc = new
    out = []
    for i, ci in enumerate(hc[:-1]):
        if any(c % pN for c in ci[1:]):
            raise InternalCheckFailed("lifted modulus has non-scalar coefficient")
        out.append(ci[0] % pN)
    if hc[-1] != [1] + [0] * (m - 1):
        raise InternalCheckFailed("lifted modulus is not monic")
    h = tuple(out) + (1,)
    if tuple(c % p for c in h) != field.modulus:
        raise InternalCheckFailed("lifted modulus does not reduce correctly")
    return h


class WittElem:
    """Element of a WittRing, as a coefficient tuple on 1, x, .., x^(m-1)."""

    __slots__ = ("ring", "c")

    def __init__(self, ring: "WittRing", c: tuple[int, ...]):
        self.ring = ring
        self.c = c

    def _coerce(self, other):
        if isinstance(other, WittElem):
            if other.ring is not self.ring:
                raise BadInput("elements of different Witt rings")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.from_int(int(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        pN = self.ring.pN
        return WittElem(self.ring, tuple((a + b) % pN for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        pN = self.ring.pN
        return WittElem(self.ring, tuple((-a) % pN for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = self.ring
        return WittElem(r, tuple(_poly_mul_mod_int(self.c, o.c, r.h, r.pN)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        r = self.ring
        if e < 0:
            return self.inverse() ** (-e)
        return WittElem(r, tuple(_poly_pow_mod_int(self.c, e, r.h, r.pN))) if e else r.one

    def inverse(self) -> "WittElem":
        """Inverse of a unit, by lifting the residue inverse p-adically."""
        r = self.ring
        res = self.residue()
        if res.enc == 0:
            raise ZeroArgument("inverse of a non-unit")
        inv = r.teich(res.inverse())
        # Newton: y -> y(2 - wy), doubles correct p-adic digits each step
        for _ in range(max(1, r.precision).bit_length() + 1):
            inv = inv * (r.from_int(2) - self * inv)
        if (self * inv) != r.one:
            raise InternalCheckFailed("unit inversion failed")
        return inv

    def residue(self) -> FFElem:
        """Reduction mod p into the residue field."""
        f = self.ring.field
        enc = 0
        mult = 1
        for a in self.c:
            enc += (a % f.p) * mult
            mult *= f.p
        return FFElem(f, enc)

    def valuation(self) -> int:
        """p-adic valuation; full precision N means 'zero as far as known'."""
        r = self.ring
        best = r.precision
        for a in self.c:
            if a % r.pN == 0:
                continue
            v = 0
            while a % r.p == 0:
                a //= r.p
                v += 1
            best = min(best, v)
        return best

    def frob(self) -> "WittElem":
        """Canonical Frobenius lift (x -> x^p as a ring map)."""
        r = self.ring
        out = [0] * r.m
        for i, a in enumerate(self.c):
            if a:
                row = r._frob_rows[i]
                for j in range(r.m):
                    out[j] = (out[j] + a * row[j]) % r.pN
        return WittElem(r, tuple(out))

    def is_zero(self) -> bool:
        return all(a % self.ring.pN == 0 for a in self.c)

    def __eq__(self, other):
        if isinstance(other, WittElem):
            return self.ring is other.ring and self.c == other.c
        if isinstance(other, (int, np.integer)):
            return self == self.ring.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ring), self.c))

    def __repr__(self):
        return f"W{self.c} mod {self.ring.p}^{self.ring.precision}"


class WittRing:
    """W(F_q)/p^N with Teichmuller monomials; build via witt_ring()."""

    def __init__(self, field: FiniteField, precision: int):
        if precision < 1:
            raise BadInput("precision must be >= 1")
        self.field = field
        self.p = field.p
        self.m = field.m
        self.q = field.q
        self.precision = precision
        self.pN = field.p**precision
        self.h = _teich_modulus(field, self.pN, precision)
        self.zero = WittElem(self, (0,) * self.m)
        self.one = WittElem(self, (1,) + (0,) * (self.m - 1))
        x = [0, 1] if self.m > 1 else [(-self.h[0]) % self.pN]
        self._x = WittElem(self, tuple(x + [0] * (self.m - len(x))))
        # x must be a root of unity of exact order q - 1 (assert, not assume)
        if self._x ** (self.q - 1) != self.one:
            raise InternalCheckFailed("monomial generator is not a root of unity")
        # frobenius sends x^i to x^(i*p); precompute those rows
        self._frob_rows = [
            tuple((self._x ** (i * self.p)).c) for i in range(self.m)
        ]
        self._teich_table = None

    # -- constructors

    def from_int(self, i: int) -> WittElem:
        return WittElem(self, (i % self.pN,) + (0,) * (self.m - 1))

    def elem(self, coeffs) -> WittElem:
        c = tuple(int(a) % self.pN for a in coeffs)
        if len(c) != self.m:
            raise BadInput(f"need {self.m} coefficients")
        return WittElem(self, c)

    def teich(self, a) -> WittElem:
        """Multiplicative lift of a residue-field element."""
        if isinstance(a, FFElem):
            if a.field is not self.field:
                raise BadInput("element of the wrong residue field")
            enc = a.enc
        else:
            enc = int(a) % self.field.p
        if enc == 0:
            return self.zero
        k = int(self.field.dlog[enc])
        tab = self._teich_table
        if tab is not None:
            return WittElem(self, tuple(int(v) for v in tab[k]))
        return self._x**k

    def teich_pow(self, k: int) -> WittElem:
        """x^k for the fixed generator root of unity x."""
        return self._x ** (k % (self.q - 1))

    def monomial(self, k: int, j: int = 0) -> WittElem:
        """x^k * p^j (j >= 0)."""
        if j < 0:
            raise BadInput("negative p-power; use PadicScaled for that")
        if j >= self.precision:
            return self.zero
        w = self.teich_pow(k)
        pj = self.p**j
        return WittElem(self, tuple(a * pj % self.pN for a in w.c))

    # -- batch support

    @property
    def teich_table(self) -> np.ndarray:
        """(q-1, m) int64 array; row k is the coefficient vector of x^k.

        Only valid when p^N is small enough for int64 products; checked.
        """
        if self._teich_table is None:
            if self.pN > 3 * 10**8:
                raise PrecisionLoss("teich table would overflow int64 kernels")
            rows = np.empty((self.q - 1, self.m), dtype=np.int64)
            cur = self.one
            for k in range(self.q - 1):
                rows[k] = cur.c
                cur = cur * self._x
            if cur != self.one:
                raise InternalCheckFailed("teichmuller table did not close")
            self._teich_table = rows
        return self._teich_table

    def sum_rows(self, rows: np.ndarray) -> WittElem:
        """Exact sum of teich-table rows (object-dtype safe fallback)."""
        if len(rows) == 0:
            return self.zero
        tot = rows.astype(object).sum(axis=0)
        return WittElem(self, tuple(int(t) % self.pN for t in tot))

    # -- structure maps

    def at_precision(self, n: int) -> "WittRing":
        return witt_ring(self.field, n)

    def reduce_to(self, w: WittElem, n: int) -> WittElem:
        if n > self.precision:
            raise PrecisionLoss("cannot raise precision of an element")
        r2 = self.at_precision(n)
        return WittElem(r2, tuple(a % r2.pN for a in w.c))

    def exact_div_p(self, w: WittElem, j: int) -> WittElem:
        """Divide by p^j exactly, landing in precision N - j."""
        if j == 0:
            return w
        if j < 0 or j >= self.precision:
            raise BadInput("bad p-power for exact division")
        pj = self.p**j
        if any(a % pj for a in w.c):
            raise NonIntegral(f"element is not divisible by p^{j}")
        r2 = self.at_precision(self.precision - j)
        return WittElem(r2, tuple((a // pj) % r2.pN for a in w.c))

    def __repr__(self):
        return f"W(GF({self.p}^{self.m}))/p^{self.precision}"


@lru_cache(maxsize=None)
def witt_ring(field: FiniteField, precision: int) -> WittRing:
    return WittRing(field, precision)


def teichmuller(ring: WittRing, a) -> WittElem:
    return ring.teich(a)


def valuation(w: WittElem) -> int:
    return w.valuation()


def embed_witt(w: WittElem, emb, ring: WittRing) -> WittElem:
    """Push a Witt element along a residue-field embedding.

    ``emb`` must embed the source residue field into ``ring.field`` and
    both rings must carry the same precision.  The map sends the source
    monomial generator to the multiplicative lift of its image, which is
    a ring homomorphism because multiplicative lifts are unique.
    """
    src = w.ring
    if emb.src is not src.field or emb.dst is not ring.field:
        raise BadInput("embedding does not match the two rings")
    if ring.precision != src.precision:
        raise BadInput("rings carry different precisions")
    gen = ring.teich(emb(src._x.residue()))
    acc = ring.zero
    for c in reversed(w.c):
        acc = acc * gen + ring.from_int(c)
    if acc.residue() != emb(w.residue()):
        raise InternalCheckFailed("embedded element has the wrong residue")
    return acc


# --------------------------------------------------------------------------
# Scaled values: unit times a power of p


class ScaledUnit:
    """u * p^s with u a nonzero finite-field element and s an integer.

    Purely multiplicative and exact at infinite precision; the natural
    carrier for eigenvalue-type quantities.
    """

    __slots__ = ("unit", "pexp")

    def __init__(self, unit: FFElem, pexp: int = 0):
        if unit.enc == 0:
            raise ZeroArgument("ScaledUnit must carry a unit")
        self.unit = unit
        self.pexp = pexp

    def __mul__(self, other):
        if isinstance(other, ScaledUnit):
            return ScaledUnit(self.unit * other.unit, self.pexp + other.pexp)
        if isinstance(other, FFElem):
            return ScaledUnit(self.unit * other, self.pexp)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledUnit):
            return ScaledUnit(self.unit / other.unit, self.pexp - other.pexp)
        if isinstance(other, FFElem):
            return ScaledUnit(self.unit / other, self.pexp)
        return NotImplemented

    def __pow__(self, k: int):
        return ScaledUnit(self.unit**k, self.pexp * k)

    def inverse(self):
        return ScaledUnit(self.unit.inverse(), -self.pexp)

    def is_unit(self) -> bool:
        return self.pexp == 0

    def residue(self) -> FFElem:
        """Reduction mod p; zero if the p-exponent is positive."""
        if self.pexp < 0:
            raise NonIntegral("negative p-power has no residue")
        return self.unit if self.pexp == 0 else self.unit.field.zero

    def to_padic(self, ring: WittRing) -> "PadicScaled":
        return PadicScaled(ring.teich(self.unit), self.pexp)

    def __eq__(self, other):
        if isinstance(other, ScaledUnit):
            return self.unit == other.unit and self.pexp == other.pexp
        if isinstance(other, FFElem):
            return self.pexp == 0 and self.unit == other
        return NotImplemented

    def __hash__(self):
        return hash((self.unit, self.pexp))

    def __repr__(self):
        if self.pexp == 0:
            return f"({self.unit!r})"
        return f"({self.unit!r}) * p^{self.pexp}"


class PadicScaled:
    """w * p^s with w a Witt element; the value is known mod p^(N+s).

    Division by powers of p only moves s, so no precision is lost until
    values at different scales are combined.
    """

    __slots__ = ("w", "shift")

    def __init__(self, w: WittElem, shift: int = 0):
        self.w = w
        self.shift = shift

    @property
    def ring(self) -> WittRing:
        return self.w.ring

    def _aligned(self, other: "PadicScaled"):
        if self.ring is not other.ring:
            raise BadInput("scaled values over different rings")
        s = min(self.shift, other.shift)
        a = self.w if self.shift == s else self.w * self.ring.from_int(
            self.ring.p ** (self.shift - s)
        )
        b = other.w if other.shift == s else other.w * self.ring.from_int(
            self.ring.p ** (other.shift - s)
        )
        return a, b, s

    def __add__(self, other):
        if not isinstance(other, PadicScaled):
            return NotImplemented
        a, b, s = self._aligned(other)
        return PadicScaled(a + b, s)

    def __sub__(self, other):
        if not isinstance(other, PadicScaled):
            return NotImplemented
        a, b, s = self._aligned(other)
        return PadicScaled(a - b, s)

    def __mul__(self, other):
        if isinstance(other, PadicScaled):
            return PadicScaled(self.w * other.w, self.shift + other.shift)
        if isinstance(other, WittElem):
            return PadicScaled(self.w * other, self.shift)
        return NotImplemented

    __rmul__ = __mul__

    def div_p(self, j: int = 1) -> "PadicScaled":
        return PadicScaled(self.w, self.shift - j)

    def valuation(self) -> int:
        return self.w.valuation() + self.shift

    def residue(self) -> FFElem:
        """Reduction mod p of an integral value."""
        if self.shift > 0:
            return self.ring.field.zero
        if self.shift == 0:
            return self.w.residue()
        return self.ring.exact_div_p(self.w, -self.shift).residue()

    def to_witt(self) -> WittElem:
        """Forget the scale; only legal at shift 0."""
        if self.shift != 0:
            raise PrecisionLoss("nonzero shift; use residue() or align first")
        return self.w

    def __eq__(self, other):
        if not isinstance(other, PadicScaled):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a == b

    def __repr__(self):
        return f"{self.w!r} * p^{self.shift}"


# --------------------------------------------------------------------------
# Exact cyclotomic integers


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (low first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise BadInput("conductor must be >= 1")
    num = [-1] + [0] * (n - 1) + [1]  # X^n - 1
    for d in range(1, n):
        if n % d == 0:
            phi_d = cyclotomic_poly(d)
            num = _poly_exact_div(num, phi_d)
    return tuple(num)


def _poly_exact_div(num, den):
    """Exact division of integer polynomials (den monic up to sign)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % lead:
            raise InternalCheckFailed("non-exact polynomial division")
        q = c // lead
        out[i] = q
        if q:
            for j, dj in enumerate(den):
                num[i + j] -= q * dj
    if any(num[: len(den) - 1]):
        raise InternalCheckFailed("nonzero remainder in exact division")
    return out


class CycloInt:
    """Exact element of Z[zeta_n], stored on all n roots of unity.

    The storage is the group-ring vector (c_0, .., c_{n-1}) meaning
    sum c_i zeta^i; equality and hashing go through the canonical
    reduction mod the n-th cyclotomic polynomial.
    """

    __slots__ = ("n", "c", "_canon")

    def __init__(self, n: int, c):
        self.n = n
        cc = [0] * n
        if isinstance(c, dict):
            for k, v in c.items():
                cc[k % n] += int(v)
        else:
            if len(c) > n:
                raise BadInput("coefficient vector longer than conductor")
            for k, v in enumerate(c):
                cc[k] = int(v)
        self.c = tuple(cc)
        self._canon = None

    @classmethod
    def from_int(cls, n: int, v: int) -> "CycloInt":
        return cls(n, {0: v})

    def _check(self, other: "CycloInt"):
        if self.n != other.n:
            raise ConductorMismatch(f"conductors {self.n} and {other.n}")

    def _coerce(self, other):
        if isinstance(other, CycloInt):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return CycloInt.from_int(self.n, int(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloInt(self.n, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return CycloInt(self.n, [-a for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self.n
        out = [0] * n
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        k = i + j
                        out[k - n if k >= n else k] += a * b
        return CycloInt(n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise BadInput("negative powers are not defined in Z[zeta]")
        acc = CycloInt.from_int(self.n, 1)
        cur = self
        while e:
            if e & 1:
                acc = acc * cur
            e >>= 1
            if e:
                cur = cur * cur
        return acc

    def galois(self, t: int) -> "CycloInt":
        """Apply zeta -> zeta^t (t must be invertible mod n)."""
        from math import gcd

        if gcd(t, self.n) != 1:
            raise BadInput(f"{t} is not invertible mod {self.n}")
        out = [0] * self.n
        for i, a in enumerate(self.c):
            if a:
                out[(i * t) % self.n] += a
        return CycloInt(self.n, out)

    def conjugate(self) -> "CycloInt":
        return self.galois(-1 % self.n) if self.n > 1 else CycloInt(self.n, self.c)

    def canonical(self) -> tuple[int, ...]:
        """Reduction mod the cyclotomic polynomial (degree phi(n) vector)."""
        if self._canon is None:
            phi = cyclotomic_poly(self.n)
            deg = len(phi) - 1
            rem = list(self.c)
            for i in range(len(rem) - 1, deg - 1, -1):
                c = rem[i]
                if c:
                    rem[i] = 0
                    for j in range(deg):
                        rem[i - deg + j] -= c * phi[j]
            self._canon = tuple(rem[:deg])
        return self._canon

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.canonical())

    def is_int(self):
        """The integer value if rational, else None."""
        can = self.canonical()
        if any(can[1:]):
            return None
        return can[0]

    def mod_prime(self, ell: int, w: int) -> int:
        """Image in F_ell sending zeta to w (needs w of order n mod ell)."""
        acc = 0
        wp = 1
        for a in self.c:
            if a:
                acc = (acc + a * wp) % ell
            wp = wp * w % ell
        return acc

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, CycloInt) else other
        if o is None:
            return NotImplemented
        self._check(o)
        return self.canonical() == o.canonical()

    def __hash__(self):
        return hash((self.n, self.canonical()))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = [
            (f"{a}" if i == 0 else (f"{a}*z^{i}" if a != 1 else f"z^{i}"))
            for i, a in enumerate(self.c)
            if a
        ]
        return f"Cyclo[{self.n}](" + (" + ".join(terms) or "0") + ")"


def root_of_unity(n: int, k: int = 1) -> CycloInt:
    return CycloInt(n, {k % n: 1})


def cyclo_mul(a: CycloInt, b: CycloInt) -> CycloInt:
    return a * b
