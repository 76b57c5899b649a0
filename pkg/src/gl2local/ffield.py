"""Finite fields with full discrete-log tables.

A field F_{p^m} is materialized as the power table of one fixed
generator plus the inverse (dlog) table, so products, inverses and
powers reduce to index arithmetic mod p^m - 1.  Construction is
deterministic: a given (p, m) always produces the same modulus, the
same generator and the same element encoding, so encodings are stable
across processes and safe to freeze in tests.

Encoding: an element is an integer in [0, p^m); its base-p digits are
the coefficients (constant term first) of the polynomial representative
in the modulus root.  For m = 1 the encoding is the residue itself and
the generator is the smallest primitive root.  For m >= 2 the modulus
is the first monic degree-m polynomial, scanning coefficient words in
base-p order (constant term = least significant digit), whose root has
full multiplicative order p^m - 1; the generator is that root, so its
encoding is p.

Tables are capped at p^m <= 10**6 entries.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd

import numpy as np

from .errors import (
    BadInput,
    CompositeP,
    NoEmbedding,
    TableTooLarge,
    ZeroArgument,
)

TABLE_CAP = 10**6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization by trial division, as ((prime, exponent), ...).

    Adequate for n up to ~10**12, which covers every group order that
    appears here (at most (p^m)^2 with p^m <= 10**6).
    """
    if n < 1:
        raise BadInput(f"cannot factor {n}")
    out: list[list[int]] = []
    for d in (2, 3):
        while n % d == 0:
            if out and out[-1][0] == d:
                out[-1][1] += 1
            else:
                out.append([d, 1])
            n //= d
    d = 5
    # wheel over 6k +- 1
    while d * d <= n:
        for dd in (d, d + 2):
            while n % dd == 0:
                if out and out[-1][0] == dd:
                    out[-1][1] += 1
                else:
                    out.append([dd, 1])
                n //= dd
        d += 6
    if n > 1:
        out.append([n, 1])
    return tuple((a, b) for a, b in out)


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(a for a, _ in factorize(n))


# --- dense polynomial helpers over F_p (coefficient lists, low degree first)


def _poly_mul_mod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    for i in range(len(res) - 1, m - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(m):
                res[i - m + j] = (res[i - m + j] - c * f[j]) % p
    res = res[:m]
    res += [0] * (m - len(res))
    return res


def _poly_pow_mod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    acc = [1] + [0] * (m - 1)
    cur = base[:m] + [0] * (m - len(base))
    while e:
        if e & 1:
            acc = _poly_mul_mod(acc, cur, f, p)
        e >>= 1
        if e:
            cur = _poly_mul_mod(cur, cur, f, p)
    return acc


def _x_has_full_order(coeffs: tuple[int, ...], p: int, m: int) -> bool:
    """True iff x has multiplicative order p^m - 1 mod the monic poly.

    Full order forces the quotient ring's unit group to have at least
    p^m - 1 elements, which already implies the modulus is irreducible,
    so no separate irreducibility test is needed.
    """
    q1 = p**m - 1
    f = list(coeffs) + [1]
    x = [0, 1]
    if _poly_pow_mod(x, q1, f, p) != [1] + [0] * (m - 1):
        return False
    for ell in prime_divisors(q1):
        if _poly_pow_mod(x, q1 // ell, f, p) == [1] + [0] * (m - 1):
            return False
    return True


def _smallest_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    ells = prime_divisors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in ells):
            return g
    raise AssertionError("no primitive root found")  # unreachable for prime p


def _find_modulus(p: int, m: int) -> tuple[int, ...]:
    """Deterministic modulus choice; see module docstring."""
    if m == 1:
        return (-_smallest_primitive_root(p) % p,)
    for n in range(1, p**m):
        if n % p == 0:
            continue  # constant term 0: x not a unit
        coeffs = []
        t = n
        for _ in range(m):
            coeffs.append(t % p)
            t //= p
        coeffs_t = tuple(coeffs)
        if _x_has_full_order(coeffs_t, p, m):
            return coeffs_t
    raise AssertionError("no primitive modulus found")  # unreachable


def _digit_add_vec(a: np.ndarray, b: np.ndarray, p: int, m: int) -> np.ndarray:
    """Carry-free digitwise sum of base-p encodings (numpy arrays)."""
    out = np.zeros_like(a)
    mult = 1
    for _ in range(m):
        out += ((a % p + b % p) % p) * mult
        a = a // p
        b = b // p
        mult *= p
    return out


def add_encodings(field: "FiniteField", a, b):
    """Elementwise field addition on raw encodings (ints or int arrays)."""
    if field.m == 1:
        return (a + b) % field.p
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    a, b = np.broadcast_arrays(a, b)
    return _digit_add_vec(a, b, field.p, field.m)


class FFElem:
    """One field element, identified by its integer encoding."""

    __slots__ = ("field", "enc")

    def __init__(self, field: "FiniteField", enc: int):
        self.field = field
        self.enc = enc

    # -- helpers

    def _coerce(self, other):
        if isinstance(other, FFElem):
            if other.field is not self.field:
                raise BadInput("elements of different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return None

    @property
    def dlog(self) -> int:
        d = int(self.field.dlog[self.enc])
        if d < 0:
            raise ZeroArgument("dlog of zero")
        return d

    def is_zero(self) -> bool:
        return self.enc == 0

    # -- ring operations

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        f = self.field
        if f.m == 1:
            return FFElem(f, (self.enc + o.enc) % f.p)
        return FFElem(f, f._add_enc(self.enc, o.enc))

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        if self.enc == 0:
            return self
        if f.m == 1:
            return FFElem(f, (-self.enc) % f.p)
        return FFElem(f, f._neg_enc(self.enc))

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
        f = self.field
        if self.enc == 0 or o.enc == 0:
            return f.zero
        k = (int(f.dlog[self.enc]) + int(f.dlog[o.enc])) % (f.q - 1)
        return FFElem(f, int(f.gpow[k]))

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        f = self.field
        if self.enc == 0:
            raise ZeroArgument("inverse of zero")
        k = (-int(f.dlog[self.enc])) % (f.q - 1)
        return FFElem(f, int(f.gpow[k]))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        f = self.field
        if self.enc == 0:
            if e > 0:
                return f.zero
            if e == 0:
                return f.one
            raise ZeroArgument("negative power of zero")
        k = (int(f.dlog[self.enc]) * e) % (f.q - 1)
        return FFElem(f, int(f.gpow[k]))

    def frob(self, k: int = 1) -> "FFElem":
        """Apply the p-power frobenius k times (k may be negative)."""
        f = self.field
        return self ** pow(f.p, k % f.m if f.m > 1 else 0, f.q - 1) if f.q > 2 else self

    # -- structure maps

    def trace(self) -> "FFElem":
        """Trace down to the prime subfield (returned in this field)."""
        acc = self
        cur = self
        for _ in range(self.field.m - 1):
            cur = cur.frob()
            acc = acc + cur
        return acc

    def norm(self) -> "FFElem":
        """Norm down to the prime subfield (returned in this field)."""
        f = self.field
        if self.enc == 0:
            return f.zero
        k = (int(f.dlog[self.enc]) * ((f.q - 1) // (f.p - 1))) % (f.q - 1)
        return FFElem(f, int(f.gpow[k]))

    def lift_int(self) -> int:
        """Integer representative, valid only in the prime subfield."""
        if self.enc < self.field.p:
            return self.enc
        raise BadInput(f"{self!r} is not in the prime subfield")

    # -- protocol

    def __eq__(self, other):
        if isinstance(other, FFElem):
            return self.field is other.field and self.enc == other.enc
        if isinstance(other, (int, np.integer)):
            return self.enc == self.field.from_int(int(other)).enc
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.enc))

    def __bool__(self):
        return self.enc != 0

    def __repr__(self):
        return f"{self.field._poly_str(self.enc)} in {self.field!r}"


class FiniteField:
    """F_{p^m} with dlog tables; build via make_field, not directly."""

    def __init__(self, p: int, m: int):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = _find_modulus(p, m) + (1,)  # monic, low coeffs first
        self._build_tables()
        self.zero = FFElem(self, 0)
        self.one = FFElem(self, 1)
        self.gen = FFElem(self, int(self.gpow[1 % (self.q - 1)]))

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        if m == 1:
            g = (-self.modulus[0]) % p  # modulus is x - g
            glist = [0] * (q - 1)
            e = 1
            for k in range(q - 1):
                glist[k] = e
                e = e * g % p
        else:
            pm1 = p ** (m - 1)
            # step table for multiplication by x, built vectorized
            red = np.zeros(p, dtype=np.int64)
            for t in range(1, p):
                enc = 0
                mult = 1
                for c in self.modulus[:-1]:
                    enc += ((-t * c) % p) * mult
                    mult *= p
                red[t] = enc
            e = np.arange(q, dtype=np.int64)
            shifted = (e % pm1) * p
            step = _digit_add_vec(shifted, red[e // pm1], p, m)
            step_l = step.tolist()
            glist = [0] * (q - 1)
            enc = 1
            for k in range(q - 1):
                glist[k] = enc
                enc = step_l[enc]
            if enc != 1:
                raise AssertionError("generator power table did not close")
        self.gpow = np.array(glist, dtype=np.int64)
        self.dlog = np.full(q, -1, dtype=np.int64)
        self.dlog[self.gpow] = np.arange(q - 1, dtype=np.int64)
        if int(self.dlog[0]) != -1 or (q > 2 and int(self.dlog[1]) != 0):
            raise AssertionError("dlog table inconsistent")

    # -- raw encoding arithmetic (used by elements and batch kernels)

    def _add_enc(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def _neg_enc(self, a: int) -> int:
        p = self.p
        out = 0
        mult = 1
        while a:
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    # -- element constructors

    def elem(self, enc: int) -> FFElem:
        if not 0 <= enc < self.q:
            raise BadInput(f"encoding {enc} out of range for {self!r}")
        return FFElem(self, enc)

    def from_int(self, i: int) -> FFElem:
        return FFElem(self, i % self.p)

    def __call__(self, i: int) -> FFElem:
        return self.from_int(i)

    def elements(self):
        for enc in range(self.q):
            yield FFElem(self, enc)

    def units(self):
        for k in range(self.q - 1):
            yield FFElem(self, int(self.gpow[k]))

    def random(self, rng) -> FFElem:
        return FFElem(self, rng.randrange(self.q))

    def random_unit(self, rng) -> FFElem:
        return FFElem(self, int(self.gpow[rng.randrange(self.q - 1)]))

    # -- misc

    def _poly_str(self, enc: int) -> str:
        if self.m == 1 or enc < self.p:
            return str(enc % self.p if self.m > 1 else enc)
        terms = []
        i = 0
        while enc:
            c = enc % self.p
            if c:
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append(f"{c}g" if c > 1 else "g")
                else:
                    terms.append(f"{c}g^{i}" if c > 1 else f"g^{i}")
            enc //= self.p
            i += 1
        return "+".join(reversed(terms))

    def __repr__(self):
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"


@lru_cache(maxsize=None)
def make_field(p: int, m: int = 1) -> FiniteField:
    """Build (and memoize) the field with p^m elements."""
    if not isinstance(p, int) or not isinstance(m, int):
        raise BadInput("p and m must be ints")
    if m < 1:
        raise BadInput(f"extension degree must be >= 1, got {m}")
    if not is_prime(p):
        raise CompositeP(f"{p} is not prime")
    if p**m > TABLE_CAP:
        raise TableTooLarge(f"{p}^{m} exceeds the table cap {TABLE_CAP}")
    return FiniteField(p, m)


def frobenius(x: FFElem, k: int = 1) -> FFElem:
    return x.frob(k)


class FieldEmbedding:
    """A ring embedding between two materialized fields.

    Stored as the image of the source generator; application is index
    arithmetic on dlogs.
    """

    __slots__ = ("src", "dst", "image", "_mult")

    def __init__(self, src: FiniteField, dst: FiniteField, image: FFElem):
        self.src = src
        self.dst = dst
        self.image = image
        self._mult = image.dlog if src.q > 2 else 0

    def __call__(self, x: FFElem) -> FFElem:
        if x.field is not self.src:
            raise BadInput("element not in the source field")
        if x.enc == 0:
            return self.dst.zero
        k = (int(self.src.dlog[x.enc]) * self._mult) % (self.dst.q - 1)
        return FFElem(self.dst, int(self.dst.gpow[k]))

    def map_encoding(self, enc):
        """Vectorized application on raw encodings (0 maps to 0)."""
        enc = np.asarray(enc, dtype=np.int64)
        out = np.zeros_like(enc)
        nz = enc != 0
        k = (self.src.dlog[enc[nz]] * self._mult) % (self.dst.q - 1)
        out[nz] = self.dst.gpow[k]
        return out

    def precompose_frobenius(self, k: int = 1) -> "FieldEmbedding":
        """The embedding x -> self(frob^k(x))."""
        e = pow(self.src.p, k % self.src.m, self.src.q - 1) if self.src.q > 2 else 1
        return FieldEmbedding(self.src, self.dst, self.image**e)

    def __eq__(self, other):
        if not isinstance(other, FieldEmbedding):
            return NotImplemented
        return (
            self.src is other.src
            and self.dst is other.dst
            and self.image.enc == other.image.enc
        )

    def __hash__(self):
        return hash((id(self.src), id(self.dst), self.image.enc))

    def __repr__(self):
        return f"Embed({self.src!r} -> {self.dst!r}, gen -> {self.image!r})"


@lru_cache(maxsize=None)
def embeddings(src: FiniteField, dst: FiniteField) -> tuple[FieldEmbedding, ...]:
    """All embeddings src -> dst, in frobenius order.

    Entry 0 is the embedding whose generator image has the smallest
    encoding; entry i is entry 0 precomposed with the i-th power of the
    source frobenius.  Length is the source degree.
    """
    if src.p != dst.p or dst.m % src.m != 0:
        raise NoEmbedding(f"no embedding {src!r} -> {dst!r}")
    ds = (dst.q - 1) // (src.q - 1)
    # roots of the source modulus among elements of order dividing q_src - 1
    f = list(src.modulus)
    roots = []
    for j in range(src.q - 1):
        cand = FFElem(dst, int(dst.gpow[(j * ds) % (dst.q - 1)]))
        acc = dst.zero
        for c in reversed(f):
            acc = acc * cand + dst.from_int(c)
        if acc.enc == 0:
            roots.append(cand)
    if len(roots) != src.m:
        raise AssertionError(
            f"found {len(roots)} roots of the modulus, expected {src.m}"
        )
    base = min(roots, key=lambda r: r.enc)
    out = []
    img = base
    for _ in range(src.m):
        out.append(FieldEmbedding(src, dst, img))
        img = img ** src.p
    if {e.image.enc for e in out} != {r.enc for r in roots}:
        raise AssertionError("frobenius orbit does not match root set")
    return tuple(out)


class MultChar:
    """Tame multiplicative character of a finite field's unit group.

    Values land in the unit group of a second field through a chosen
    embedding: chi(x) = emb(x) ** exponent.  Internally every character
    is normalized to the canonical embedding (entry 0 of embeddings()),
    so equal characters compare equal regardless of how they were built.
    Evaluation at zero raises ZeroArgument.
    """

    __slots__ = ("src", "dst", "exponent", "_emb0")

    def __init__(self, emb: FieldEmbedding, exponent: int):
        self.src = emb.src
        self.dst = emb.dst
        embs = embeddings(emb.src, emb.dst)
        self._emb0 = embs[0]
        for i, e in enumerate(embs):
            if e == emb:
                off = i
                break
        else:
            raise BadInput("embedding is not one of embeddings(src, dst)")
        self.exponent = (exponent * pow(emb.src.p, off, emb.src.q - 1)) % (
            emb.src.q - 1
        ) if emb.src.q > 2 else 0

    @classmethod
    def from_weights(cls, embs: tuple[FieldEmbedding, ...], weights) -> "MultChar":
        """Product over i of (i-th embedding as character)^weights[i]."""
        if len(weights) != len(embs):
            raise BadInput("one weight per embedding required")
        src = embs[0].src
        e = sum(w * pow(src.p, i, src.q - 1) for i, w in enumerate(weights))
        return cls(embs[0], e % (src.q - 1) if src.q > 2 else 0)

    def __call__(self, x: FFElem) -> FFElem:
        if x.enc == 0:
            raise ZeroArgument("character evaluated at zero")
        return self._emb0(x) ** self.exponent

    def __mul__(self, other: "MultChar") -> "MultChar":
        if self.src is not other.src or self.dst is not other.dst:
            raise BadInput("characters on different groups")
        return MultChar(self._emb0, self.exponent + other.exponent)

    def __pow__(self, k: int) -> "MultChar":
        return MultChar(self._emb0, self.exponent * k)

    def inverse(self) -> "MultChar":
        return MultChar(self._emb0, -self.exponent)

    @property
    def order(self) -> int:
        n = self.src.q - 1
        return n // gcd(self.exponent, n) if n > 1 else 1

    def is_trivial(self) -> bool:
        return self.exponent % (self.src.q - 1) == 0 if self.src.q > 2 else True

    def __eq__(self, other):
        if not isinstance(other, MultChar):
            return NotImplemented
        return (
            self.src is other.src
            and self.dst is other.dst
            and self.exponent == other.exponent
        )

    def __hash__(self):
        return hash((id(self.src), id(self.dst), self.exponent))

    def __repr__(self):
        return f"MultChar({self.src!r} -> {self.dst!r}, exp={self.exponent})"


def char_eval(chi: MultChar, x: FFElem) -> FFElem:
    return chi(x)
