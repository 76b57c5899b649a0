"""Parameter calculus for generic reducible two-dimensional mod-p local data.

A :class:`GenericRho` packages the numerical data of a generic reducible
representation of the absolute Galois group of the unramified degree-``f``
extension of Q_p with coefficients in ``k_E = F_{p^{2f}}``: a weight vector
``r``, two sequences of Frobenius scaling units ``alpha`` and ``beta``, a
sequence of extension parameters ``x`` (one per embedding of F_q into k_E),
and a tame twist exponent.  The scalars depend on a choice of basis; the
module computes the quantities that do not:

* ``gauge_invariant(rho, J)``   -- basis-independent scalar of a subset J,
* ``series_parameter(rho, J)``  -- the mod-p principal-series parameter,
* ``frobenius_unit(rho, J)``    -- unit part of the crystalline Frobenius
  eigenvalue on the J-isotypic component,
* ``serre_weights(rho)``        -- the attached set of irreducible weights,
* ``induction_constituents``    -- constituents of the Iwahori induction of
  the tame character pair of J, with weight-set membership flags.

Embeddings are indexed by ``i`` in ``Z/f`` (``sigma_i = sigma_0 o phi^i``
where ``phi`` is the arithmetic Frobenius); a subset ``J`` is any iterable
of such indices and is normalised to a ``frozenset``.
"""

from __future__ import annotations

import random
from typing import Iterable, Mapping, NamedTuple

from ._mutations import active
from .errors import (
    BadInput,
    InconsistentValues,
    PreconditionViolated,
    ZeroScale,
)
from .ffield import FFElem, FiniteField, MultChar, embeddings, make_field

Subset = frozenset


# ---------------------------------------------------------------------------
# subsets of Z/f


def normalize_subset(J: Iterable[int] | int, f: int) -> Subset:
    """Coerce ``J`` (iterable of indices, or a bitmask int) to a frozenset mod f."""
    if isinstance(J, int):
        if J < 0 or J >= (1 << f):
            raise BadInput(f"bitmask {J} out of range for f={f}")
        return frozenset(i for i in range(f) if J >> i & 1)
    return frozenset(i % f for i in J)


def complement(J: Iterable[int], f: int) -> Subset:
    J = normalize_subset(J, f)
    return frozenset(range(f)) - J


def subset_mask(J: Iterable[int], f: int) -> int:
    return sum(1 << i for i in normalize_subset(J, f))


def all_subsets(f: int):
    """All 2^f subsets of Z/f, in bitmask order."""
    for mask in range(1 << f):
        yield frozenset(i for i in range(f) if mask >> i & 1)


def frontier(J: Iterable[int], f: int) -> Subset:
    """Positions where membership of ``J`` changes along i-1 -> i (always even)."""
    J = normalize_subset(J, f)
    return frozenset(i for i in range(f) if (i in J) != ((i - 1) % f in J))


def entries(J: Iterable[int], f: int) -> Subset:
    """Frontier positions inside J (i in J, i-1 not in J)."""
    J = normalize_subset(J, f)
    return frozenset(i for i in J if (i - 1) % f not in J)


def exits(J: Iterable[int], f: int) -> Subset:
    """Frontier positions outside J (i not in J, i-1 in J)."""
    J = normalize_subset(J, f)
    return frozenset(i for i in range(f) if i not in J and (i - 1) % f in J)


# ---------------------------------------------------------------------------
# tame characters of the diagonal torus


class TameChar:
    """A tame character: inertial exponent mod q-1 plus an unramified unit.

    The inertial part is a power of the fundamental character attached to
    the base embedding; the unramified part is the value on p.
    """

    __slots__ = ("order", "exp", "unram")

    def __init__(self, order: int, exp: int, unram: FFElem):
        if unram.is_zero():
            raise BadInput("unramified value must be a unit")
        self.order = order
        self.exp = exp % order
        self.unram = unram

    def __mul__(self, other: "TameChar") -> "TameChar":
        if self.order != other.order:
            raise BadInput("tame characters of different orders")
        return TameChar(self.order, self.exp + other.exp, self.unram * other.unram)

    def inverse(self) -> "TameChar":
        return TameChar(self.order, -self.exp, self.unram.inverse())

    def __pow__(self, e: int) -> "TameChar":
        return TameChar(self.order, self.exp * e, self.unram ** (e % (self.unram.field.q - 1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TameChar):
            return NotImplemented
        return (self.order, self.exp, self.unram) == (other.order, other.exp, other.unram)

    def __hash__(self) -> int:
        return hash((self.order, self.exp, self.unram))

    def __repr__(self) -> str:
        return f"TameChar(order={self.order}, exp={self.exp}, unram={self.unram!r})"


class BorelChar(NamedTuple):
    """Character of the upper-triangular subgroup over F_q.

    ``(a, b; 0, d)`` acts through ``sigma_0(a)^a_exp * sigma_0(d)^d_exp``,
    exponents taken mod q-1.
    """

    a_exp: int
    d_exp: int


# ---------------------------------------------------------------------------
# the parameter package


class GenericRho:
    """Numerical data of a generic reducible representation.

    Parameters live in ``k_E = F_{p^{2f}}``; ``alpha`` and ``beta`` must be
    units, the ``x`` entries may vanish.  ``theta_exp`` is the exponent of
    the tame twist on the residue units (its value on p is 1 by convention).
    Weight vectors with every entry 0 or every entry p-3 sit outside the
    proven range of the calculus and are rejected unless
    ``allow_boundary_weights`` is set.
    """

    __slots__ = ("p", "f", "r", "alpha", "beta", "x", "theta_exp",
                 "base", "coeff", "embs")

    def __init__(self, p: int, f: int, r: Iterable[int],
                 alpha: Iterable, beta: Iterable, x: Iterable,
                 theta_exp: int = 0, allow_boundary_weights: bool = False):
        if p <= 3:
            raise BadInput(f"need p > 3, got {p}")
        if f < 1:
            raise BadInput(f"need f >= 1, got {f}")
        self.p = p
        self.f = f
        self.base = make_field(p, f)
        self.coeff = make_field(p, 2 * f)
        self.embs = embeddings(self.base, self.coeff)

        r = tuple(int(v) for v in r)
        if len(r) != f:
            raise BadInput(f"weight vector has length {len(r)}, expected {f}")
        if any(v < 0 or v > p - 3 for v in r):
            raise BadInput(f"weights must lie in [0, {p - 3}], got {r}")
        if not allow_boundary_weights and (set(r) == {0} or set(r) == {p - 3}):
            raise PreconditionViolated(
                "constant weight vector at the boundary (all 0 or all p-3) "
                "is outside the supported generic range")
        self.r = r

        self.alpha = self._units(alpha, "alpha")
        self.beta = self._units(beta, "beta")
        x = tuple(self._coerce(v) for v in x)
        if len(x) != f:
            raise BadInput(f"x has length {len(x)}, expected {f}")
        self.x = x
        self.theta_exp = int(theta_exp) % (p ** f - 1)

    def _coerce(self, v) -> FFElem:
        if isinstance(v, FFElem):
            if v.field is not self.coeff:
                raise BadInput("scalar from the wrong field")
            return v
        return self.coeff.from_int(int(v))

    def _units(self, seq, name: str) -> tuple:
        vals = tuple(self._coerce(v) for v in seq)
        if len(vals) != self.f:
            raise BadInput(f"{name} has length {len(vals)}, expected {self.f}")
        if any(v.is_zero() for v in vals):
            raise BadInput(f"{name} entries must be units")
        return vals

    # -- derived scalars ----------------------------------------------------

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def qm1(self) -> int:
        return self.q - 1

    @property
    def zero_set(self) -> Subset:
        """Indices with vanishing extension parameter."""
        return frozenset(i for i in range(self.f) if self.x[i].is_zero())

    @property
    def is_split(self) -> bool:
        return len(self.zero_set) == self.f

    @property
    def unit_empty(self) -> FFElem:
        """Frobenius unit of the empty subset: inverse of the beta product."""
        prod = self.coeff.one
        for b in self.beta:
            prod = prod * b
        return prod.inverse()

    @property
    def unit_full(self) -> FFElem:
        """Frobenius unit of the full subset: inverse of the alpha product."""
        prod = self.coeff.one
        for a in self.alpha:
            prod = prod * a
        return prod.inverse()

    @property
    def det_unit(self) -> FFElem:
        """Value of the determinant character on p."""
        return self.unit_empty * self.unit_full

    @property
    def theta(self) -> MultChar:
        return MultChar(self.embs[0], self.theta_exp)

    @property
    def theta_minus_one(self) -> FFElem:
        # sigma_0(-1) = -1, so theta(-1) = (-1)^theta_exp in k_E
        return self.coeff.one if self.theta_exp % 2 == 0 else -self.coeff.one

    def subsets(self):
        return all_subsets(self.f)

    # -- structural equality -------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenericRho):
            return NotImplemented
        return (self.p, self.f, self.r, self.theta_exp,
                self.alpha, self.beta, self.x) == \
               (other.p, other.f, other.r, other.theta_exp,
                other.alpha, other.beta, other.x)

    def __hash__(self) -> int:
        return hash((self.p, self.f, self.r, self.theta_exp,
                     self.alpha, self.beta, self.x))

    def __repr__(self) -> str:
        enc = lambda seq: ",".join(str(v.enc) for v in seq)
        return (f"GenericRho(p={self.p}, f={self.f}, r={self.r}, "
                f"alpha=[{enc(self.alpha)}], beta=[{enc(self.beta)}], "
                f"x=[{enc(self.x)}], theta_exp={self.theta_exp})")


# ---------------------------------------------------------------------------
# exponents of the tame character pair


def gap_exponents(rho: GenericRho, J: Iterable[int]) -> tuple:
    """Digit vector of the exponent gap between the two tame characters of J.

    Entry i depends on membership of i and i-1 in J:
    (in, in) -> r_i, (in, out) -> r_i + 1, (out, in) -> p - 2 - r_i,
    (out, out) -> p - 1 - r_i.
    """
    J = normalize_subset(J, rho.f)
    out = []
    for i in range(rho.f):
        prev = (i - 1) % rho.f in J
        if i in J:
            out.append(rho.r[i] if prev else rho.r[i] + 1)
        else:
            out.append(rho.p - 2 - rho.r[i] if prev else rho.p - 1 - rho.r[i])
    if active("shift_gap_exponent"):
        out[0] += 1
    return tuple(out)


def tame_exponent(rho: GenericRho, J: Iterable[int]) -> int:
    """Exponent mod q-1 of the tame character attached to J (d-slot)."""
    J = normalize_subset(J, rho.f)
    e = rho.theta_exp
    for i in range(rho.f):
        e += (rho.r[i] if i in J else rho.p - 1) * rho.p ** i
    return e % rho.qm1


def induction_character(rho: GenericRho, J: Iterable[int]) -> BorelChar:
    """Iwahori character pair of J: a-slot is the twin exponent, d-slot the main one."""
    J = normalize_subset(J, rho.f)
    a = rho.theta_exp
    for i in range(rho.f):
        a += (rho.p - 1 if i in J else rho.r[i]) * rho.p ** i
    pair = BorelChar(a % rho.qm1, tame_exponent(rho, J))
    if pair.a_exp == pair.d_exp:
        raise PreconditionViolated(
            "tame character pair degenerates; weight vector is not generic")
    return pair


# ---------------------------------------------------------------------------
# invariants


def _frontier_ratio(rho: GenericRho, J: Subset, with_weights: bool):
    """(prefactor, numerator, denominator) of the invariant formulas.

    prefactor is the inverse of prod(alpha over J) * prod(beta off J);
    numerator ranges over entry points, denominator over exit points,
    with factors x_i or x_i*(r_i+1) according to ``with_weights``.
    """
    prod = rho.coeff.one
    for i in range(rho.f):
        prod = prod * (rho.alpha[i] if i in J else rho.beta[i])
    num = rho.coeff.one
    for i in entries(J, rho.f):
        num = num * rho.x[i]
        if with_weights:
            num = num * rho.coeff.from_int(rho.r[i] + 1)
    den = rho.coeff.one
    for i in exits(J, rho.f):
        den = den * rho.x[i]
        if with_weights:
            den = den * rho.coeff.from_int(rho.r[i] + 1)
    return prod.inverse(), num, den


def gauge_invariant(rho: GenericRho, J: Iterable[int]) -> FFElem:
    """Basis-independent scalar of J (no weight factors, no sign).

    Defined when no exit point of J has vanishing extension parameter;
    vanishes exactly when some entry point does.
    """
    J = normalize_subset(J, rho.f)
    bad = rho.zero_set & exits(J, rho.f)
    if bad:
        raise PreconditionViolated(
            f"invariant undefined: zero extension parameter at exit points {sorted(bad)}")
    pre, num, den = _frontier_ratio(rho, J, with_weights=False)
    return pre * num / den


def series_parameter(rho: GenericRho, J: Iterable[int]) -> FFElem:
    """Mod-p principal-series parameter of J (nonzero).

    Requires the zero set to avoid the whole frontier of J.
    """
    J = normalize_subset(J, rho.f)
    bad = rho.zero_set & frontier(J, rho.f)
    if bad:
        raise PreconditionViolated(
            f"series parameter undefined: zero set meets frontier at {sorted(bad)}")
    pre, num, den = _frontier_ratio(rho, J, with_weights=True)
    val = -(rho.theta_minus_one) * pre * num / den
    if active("flip_invariant_sign"):
        val = -val
    return val


def frobenius_unit(rho: GenericRho, J: Iterable[int]) -> FFElem:
    """Unit part of the Frobenius eigenvalue on the J-side: signed gauge invariant."""
    J = normalize_subset(J, rho.f)
    bad = rho.zero_set & frontier(J, rho.f)
    if bad:
        raise PreconditionViolated(
            f"frobenius unit undefined: zero set meets frontier at {sorted(bad)}")
    sign = -1 if (len(frontier(J, rho.f)) // 2) % 2 else 1
    val = gauge_invariant(rho, J)
    if sign < 0:
        val = -val
    if active("flip_frobenius_unit_sign"):
        val = -val
    return val


# ---------------------------------------------------------------------------
# gauge action


def reparametrize(rho: GenericRho, u: Iterable, v: Iterable) -> GenericRho:
    """Apply the basis change with scaling vectors u (alpha-side) and v (beta-side)."""
    u = tuple(rho._coerce(s) for s in u)
    v = tuple(rho._coerce(s) for s in v)
    if len(u) != rho.f or len(v) != rho.f:
        raise BadInput("scaling vectors must have length f")
    if any(s.is_zero() for s in u + v):
        raise ZeroScale("scaling vectors must consist of units")
    f = rho.f
    alpha = [u[i] * rho.alpha[i] / u[(i - 1) % f] for i in range(f)]
    beta = [v[i] * rho.beta[i] / v[(i - 1) % f] for i in range(f)]
    x = [(v[(i - 1) % f] / u[(i - 1) % f]) * rho.x[i] for i in range(f)]
    return GenericRho(rho.p, f, rho.r, alpha, beta, x, rho.theta_exp,
                      allow_boundary_weights=True)


def canonical_form(rho: GenericRho) -> GenericRho:
    """Canonical representative of the gauge orbit.

    alpha and beta become all-ones except at index 0 (which then carries the
    inverse unit products); the first nonvanishing extension parameter is
    scaled to 1.  Two packages are gauge equivalent iff their canonical
    forms are equal.
    """
    f = rho.f
    one = rho.coeff.one
    u = [one] * f
    v = [one] * f
    for i in range(f - 1, 0, -1):
        u[i - 1] = u[i] * rho.alpha[i]
        v[i - 1] = v[i] * rho.beta[i]
    out = reparametrize(rho, u, v)
    nonzero = sorted(set(range(f)) - rho.zero_set)
    if nonzero:
        lead = out.x[nonzero[0]]
        scale = lead.inverse()
        x = [scale * val for val in out.x]
        out = GenericRho(rho.p, f, rho.r, out.alpha, out.beta, x,
                         rho.theta_exp, allow_boundary_weights=True)
    return out


def gauge_equivalent(r1: GenericRho, r2: GenericRho) -> bool:
    return canonical_form(r1) == canonical_form(r2)


def recover_from_invariants(p: int, f: int, r: Iterable[int],
                            zeros: Iterable[int],
                            values: Mapping, theta_exp: int = 0) -> GenericRho:
    """Rebuild a canonical-form package from its gauge invariants.

    ``values`` maps subsets (any iterable of indices) to coefficient-field
    values of :func:`gauge_invariant`; it must contain the empty and full
    subsets and the cyclic intervals joining consecutive indices outside
    ``zeros``.  Every supplied value is checked against the rebuilt package.
    """
    zeros = normalize_subset(zeros, f)
    table = {normalize_subset(J, f): val for J, val in values.items()}
    empty, full = frozenset(), frozenset(range(f))
    if empty not in table or full not in table:
        raise BadInput("values for the empty and full subsets are required")

    lam, mu = table[empty], table[full]
    if lam.is_zero() or mu.is_zero():
        raise InconsistentValues("boundary invariants must be units")
    coeff = lam.field
    one = coeff.one

    # canonical alpha/beta: all ones except index 0
    alpha = [one] * f
    beta = [one] * f
    alpha[0] = mu.inverse()
    beta[0] = lam.inverse()

    x = [coeff.zero] * f
    free = sorted(set(range(f)) - zeros)
    if free:
        x[free[0]] = one
        # chain forward along the intervals joining consecutive free indices;
        # the wrap-around interval is redundant and only gets verified below
        for a, b in zip(free, free[1:]):
            interval = frozenset(range(a, b))
            if interval not in table:
                raise BadInput(f"missing invariant for interval {sorted(interval)}")
            val = table[interval]
            if val.is_zero():
                raise InconsistentValues(
                    f"interval {sorted(interval)} invariant must be a unit")
            prod = one
            for i in range(f):
                prod = prod * (alpha[i] if i in interval else beta[i])
            # value = prod^-1 * x[a] / x[b]
            x[b] = x[a] / (val * prod)

    rho = GenericRho(p, f, r, alpha, beta, x, theta_exp,
                     allow_boundary_weights=True)
    if rho.zero_set != zeros:
        raise InconsistentValues("rebuilt zero set disagrees with the request")
    for J, val in table.items():
        if zeros & exits(J, f):
            raise BadInput(f"value supplied for inadmissible subset {sorted(J)}")
        if gauge_invariant(rho, J) != val:
            raise InconsistentValues(f"invariant mismatch at subset {sorted(J)}")
    return rho


# ---------------------------------------------------------------------------
# weights


class SerreWeight:
    """Irreducible weight label: symmetric-power digits plus determinant twist.

    The q(q-1) pairs (s, twist) with s in [0, p-1]^f and twist mod q-1 label
    the irreducible representations of GL2(F_q) over the coefficient field.
    """

    __slots__ = ("p", "f", "s", "twist")

    def __init__(self, p: int, f: int, s: Iterable[int], twist: int):
        self.p = p
        self.f = f
        self.s = tuple(int(v) for v in s)
        if len(self.s) != f:
            raise BadInput(f"digit vector has length {len(self.s)}, expected {f}")
        if any(v < 0 or v > p - 1 for v in self.s):
            raise BadInput(f"digits must lie in [0, {p - 1}], got {self.s}")
        self.twist = int(twist) % (p ** f - 1)

    @property
    def dim(self) -> int:
        d = 1
        for v in self.s:
            d *= v + 1
        return d

    def line_char(self) -> BorelChar:
        """Character of the diagonal on the unipotent-fixed line."""
        qm1 = self.p ** self.f - 1
        a = sum(v * self.p ** i for i, v in enumerate(self.s)) + self.twist
        return BorelChar(a % qm1, self.twist)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SerreWeight):
            return NotImplemented
        return (self.p, self.f, self.s, self.twist) == \
               (other.p, other.f, other.s, other.twist)

    def __hash__(self) -> int:
        return hash((self.p, self.f, self.s, self.twist))

    def __repr__(self) -> str:
        return f"SerreWeight(p={self.p}, f={self.f}, s={self.s}, twist={self.twist})"


def socle_weight(rho: GenericRho) -> SerreWeight:
    """The weight with the bare digits r and twist theta."""
    return SerreWeight(rho.p, rho.f, rho.r, rho.theta_exp)


def serre_weights(rho: GenericRho) -> frozenset:
    """The 2^|zero_set| weights attached to the package.

    One weight per subset I of the zero set; digit i depends on membership
    of i and i+1 in I, the twist compensates the digits over positions
    whose successor lies in I.
    """
    p, f = rho.p, rho.f
    out = set()
    zeros = sorted(rho.zero_set)
    for mask in range(1 << len(zeros)):
        I = {zeros[k] for k in range(len(zeros)) if mask >> k & 1}
        s = []
        for i in range(f):
            nxt = (i + 1) % f in I
            if i in I:
                s.append(p - 3 - rho.r[i] if nxt else rho.r[i] + 1)
            else:
                s.append(p - 2 - rho.r[i] if nxt else rho.r[i])
        twist = rho.theta_exp
        for i in range(f):
            if (i + 1) % f in I:
                twist -= (s[i] + 1) * p ** i
        out.add(SerreWeight(p, f, s, twist))
    return frozenset(out)


def iwahori_weight(rho: GenericRho, J: Iterable[int]) -> SerreWeight:
    """The unique weight whose Iwahori line carries the character pair of J."""
    J = normalize_subset(J, rho.f)
    c = gap_exponents(rho, J)
    s = [rho.p - 1 - v for v in c]
    return SerreWeight(rho.p, rho.f, s, tame_exponent(rho, J))


def admissible_pair(rho: GenericRho, J: Iterable[int]) -> tuple:
    """(J-side, complement-side) membership criteria for the socle component.

    First flag: the Iwahori weight of J lies in the socle component of the
    weight-set hull; second flag: same for the complement of J.  Both hold
    iff the zero set avoids the frontier of J.
    """
    J = normalize_subset(J, rho.f)
    return (not (rho.zero_set & exits(J, rho.f)),
            not (rho.zero_set & entries(J, rho.f)))


# ---------------------------------------------------------------------------
# constituents of the Iwahori induction


class Constituent(NamedTuple):
    """One constituent slot of the Iwahori induction, indexed by a subset.

    ``weight`` is None when the digit pattern degenerates (empty slot);
    ``in_weight_set`` flags membership in the weight set of the package.
    """

    index: Subset
    weight: SerreWeight | None
    in_weight_set: bool


def _membership_window(rho: GenericRho, J: Subset) -> tuple:
    """(lower, upper) index sets bounding the weight-set constituents.

    Position j sits in the window according to the membership pattern of
    (j+1, j) in J and whether j+1 lies in the zero set.
    """
    f = rho.f
    zeros = rho.zero_set
    lo, hi = set(), set()
    for j in range(f):
        nxt = (j + 1) % f
        in_nxt, in_j = nxt in J, j in J
        if not in_nxt and not in_j:
            lo.add(j)
            hi.add(j)
        elif in_nxt and not in_j:
            hi.add(j)
            if nxt not in zeros:
                lo.add(j)
        elif not in_nxt and in_j:
            if nxt in zeros:
                hi.add(j)
    return frozenset(lo), frozenset(hi)


def induction_constituents(rho: GenericRho, J: Iterable[int]) -> tuple:
    """All constituent slots of the Iwahori induction attached to J.

    Slots are indexed by subsets K of Z/f; digit i of slot K depends on
    membership of i and i-1 in K relative to the gap exponents, the twist
    accumulates the gap digits over K with a boundary correction.  Total
    dimension over nonempty slots is q+1.  The flagged slots are exactly
    those between the membership window bounds; when the zero set avoids
    the frontier of J the unique flagged slot is the complement of J and
    carries the socle weight.
    """
    J = normalize_subset(J, rho.f)
    p, f = rho.p, rho.f
    c = gap_exponents(rho, J)
    base_twist = induction_character(rho, J).a_exp
    lo, hi = _membership_window(rho, J)
    out = []
    for K in all_subsets(f):
        s = []
        ok = True
        for i in range(f):
            prev = (i - 1) % f in K
            if i in K:
                d = p - 1 - c[i] if prev else p - 2 - c[i]
            else:
                d = c[i] - 1 if prev else c[i]
            if d < 0:
                ok = False
                break
            s.append(d)
        if not ok:
            out.append(Constituent(K, None, False))
            continue
        twist = base_twist
        for i in K:
            twist += c[i] * p ** i
            if (i - 1) % f not in K:
                twist += p ** i
        weight = SerreWeight(p, f, s, twist)
        flagged = lo <= K <= hi
        out.append(Constituent(K, weight, flagged))
    return tuple(out)


# ---------------------------------------------------------------------------
# the rank-one subcharacter of the reduction


def reduction_subchar(rho: GenericRho, J: Iterable[int]) -> TameChar:
    """Tame character of the rank-one sub of the reduction of a J-type lattice.

    The exponent is assembled by walking the inverse-Frobenius orbit and
    accumulating run/boundary contributions against the gap exponents; it
    always collapses to theta + sum (r_i + 1) p^i.  The unramified part is
    the Frobenius unit of the empty subset.
    """
    J = normalize_subset(J, rho.f)
    p, f = rho.p, rho.f
    c = gap_exponents(rho, J)
    # m[j]: membership of the (-j)-th Frobenius twist of the base embedding
    m = [(-j) % f in J for j in range(f)]
    h = 0
    for j in range(f):
        nxt = m[(j + 1) % f]
        w = p ** (f - j)
        if m[j] == nxt:
            h += w
        elif m[j] and not nxt:
            h += w
        if not m[j]:
            h -= w * c[(-j) % f]
    exp = (tame_exponent(rho, J) + h) % rho.qm1
    return TameChar(rho.qm1, exp, rho.unit_empty)


# ---------------------------------------------------------------------------
# sampling and serialization


def random_rho(p: int, f: int, rng: random.Random,
               zero_pattern: Iterable[int] | None = None,
               theta_exp: int | None = None) -> GenericRho:
    """Draw a uniform generic package; ``zero_pattern`` fixes the zero set exactly."""
    coeff = make_field(p, 2 * f)
    while True:
        r = [rng.randrange(p - 2) for _ in range(f)]
        if not (set(r) == {0} or set(r) == {p - 3}):
            break
    alpha = [coeff.random_unit(rng) for _ in range(f)]
    beta = [coeff.random_unit(rng) for _ in range(f)]
    if zero_pattern is None:
        x = [coeff.random(rng) for _ in range(f)]
    else:
        zeros = normalize_subset(zero_pattern, f)
        x = [coeff.zero if i in zeros else coeff.random_unit(rng)
             for i in range(f)]
    if theta_exp is None:
        theta_exp = rng.randrange(p ** f - 1)
    return GenericRho(p, f, r, alpha, beta, x, theta_exp)


def format_record(rho: GenericRho, J: Iterable[int] | None = None) -> str:
    """One-line record of a package, optionally with a subset and its parameter."""
    ints = lambda seq: ",".join(str(v) for v in seq)
    encs = lambda seq: ",".join(str(v.enc) for v in seq)
    parts = [f"p={rho.p}", f"f={rho.f}", f"r={ints(rho.r)}",
             f"alpha={encs(rho.alpha)}", f"beta={encs(rho.beta)}",
             f"x={encs(rho.x)}", f"theta={rho.theta_exp}"]
    if J is not None:
        J = normalize_subset(J, rho.f)
        parts.append(f"J={subset_mask(J, rho.f)}")
        parts.append(f"xJ={series_parameter(rho, J).enc}")
    return " ".join(parts)


def parse_record(line: str):
    """Inverse of :func:`format_record`.

    Returns (rho, J, value) with J and value None when absent; the recorded
    parameter value is recomputed and checked.
    """
    fields = {}
    for tok in line.split():
        if "=" not in tok:
            raise BadInput(f"malformed record token {tok!r}")
        key, _, val = tok.partition("=")
        fields[key] = val
    try:
        p, f = int(fields["p"]), int(fields["f"])
        r = [int(v) for v in fields["r"].split(",")]
        theta = int(fields["theta"])
        coeff = make_field(p, 2 * f)
        grab = lambda key: [coeff.elem(int(v)) for v in fields[key].split(",")]
        rho = GenericRho(p, f, r, grab("alpha"), grab("beta"), grab("x"), theta)
    except KeyError as exc:
        raise BadInput(f"record missing field {exc}") from exc
    if "J" not in fields:
        return rho, None, None
    J = normalize_subset(int(fields["J"]), f)
    val = coeff.elem(int(fields["xJ"]))
    if series_parameter(rho, J) != val:
        raise InconsistentValues("recorded parameter disagrees with the data")
    return rho, J, val
