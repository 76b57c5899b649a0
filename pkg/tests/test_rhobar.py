"""Tests for the parameter calculus: invariants, gauge action, weights."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl2local import rhobar as rb
from gl2local._mutations import inject
from gl2local.errors import (
    BadInput,
    InconsistentValues,
    PreconditionViolated,
    ZeroScale,
)
from gl2local.ffield import make_field


def mk(p, f, r, alpha, beta, x, theta=0):
    return rb.GenericRho(p, f, r, alpha, beta, x, theta)


def example_f2():
    # p=5, f=2 base case used across the suite; parameter of {0} equals 1
    return mk(5, 2, (1, 2), (1, 1), (1, 2), (1, 3))


def admissible(rho):
    return [J for J in rho.subsets() if not (rho.zero_set & rb.frontier(J, rho.f))]


# ---------------------------------------------------------------------------
# construction and subsets


def test_construction_validation():
    with pytest.raises(BadInput):
        mk(3, 1, (0,), (1,), (1,), (1,))
    with pytest.raises(BadInput):
        mk(5, 1, (1, 1), (1,), (1,), (1,))          # r too long
    with pytest.raises(BadInput):
        mk(5, 1, (3,), (1,), (1,), (1,))            # weight > p-3
    with pytest.raises(BadInput):
        mk(5, 2, (1, 1), (0, 1), (1, 1), (1, 1))    # alpha not a unit
    with pytest.raises(PreconditionViolated):
        mk(5, 2, (0, 0), (1, 1), (1, 1), (1, 1))    # boundary weight vector
    with pytest.raises(PreconditionViolated):
        mk(5, 2, (2, 2), (1, 1), (1, 1), (1, 1))
    rho = rb.GenericRho(5, 2, (0, 0), (1, 1), (1, 1), (1, 1),
                        allow_boundary_weights=True)
    assert rho.r == (0, 0)


def test_zero_set_examples():
    assert example_f2().zero_set == frozenset()
    split = mk(5, 2, (1, 2), (1, 1), (1, 1), (0, 0))
    assert split.zero_set == frozenset({0, 1}) and split.is_split
    assert mk(5, 2, (1, 2), (1, 1), (1, 1), (0, 1)).zero_set == frozenset({0})


def test_subset_helpers():
    f = 4
    J = rb.normalize_subset(0b0101, f)
    assert J == frozenset({0, 2})
    assert rb.subset_mask(J, f) == 0b0101
    assert rb.complement(J, f) == frozenset({1, 3})
    assert rb.entries(J, f) == frozenset({0, 2})
    assert rb.exits(J, f) == frozenset({1, 3})
    assert len(list(rb.all_subsets(f))) == 16
    with pytest.raises(BadInput):
        rb.normalize_subset(16, f)


def test_frontier_examples():
    assert rb.frontier(frozenset(), 3) == frozenset()
    assert rb.frontier({0}, 3) == frozenset({0, 1})
    assert rb.frontier({0}, 1) == frozenset()


@given(st.integers(min_value=1, max_value=6), st.data())
def test_frontier_properties(f, data):
    mask = data.draw(st.integers(min_value=0, max_value=(1 << f) - 1))
    J = rb.normalize_subset(mask, f)
    F = rb.frontier(J, f)
    assert len(F) % 2 == 0
    assert rb.frontier(rb.complement(J, f), f) == F
    ent, ext = rb.entries(J, f), rb.exits(J, f)
    assert ent | ext == F and not ent & ext
    assert len(ent) == len(ext)


# ---------------------------------------------------------------------------
# exponents and characters


def test_gap_exponents_cases():
    p = 7
    rho1 = mk(p, 1, (2,), (1,), (1,), (1,))
    assert rb.gap_exponents(rho1, frozenset()) == (p - 1 - 2,)
    assert rb.gap_exponents(rho1, {0}) == (2,)
    rho2 = mk(p, 2, (1, 3), (1, 1), (1, 1), (1, 1))
    assert rb.gap_exponents(rho2, {0}) == (1 + 1, p - 2 - 3)


def test_gap_character_identity():
    rng = random.Random(11)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2)]:
        rho = rb.random_rho(p, f, rng)
        for J in rho.subsets():
            pair = rb.induction_character(rho, J)
            c = rb.gap_exponents(rho, J)
            gap = sum(v * p ** i for i, v in enumerate(c))
            assert (pair.d_exp - pair.a_exp - gap) % rho.qm1 == 0


def test_induction_character_twin_is_complement():
    rng = random.Random(12)
    for p, f in [(5, 2), (5, 3), (7, 2)]:
        rho = rb.random_rho(p, f, rng)
        for J in rho.subsets():
            pair = rb.induction_character(rho, J)
            assert pair.a_exp == rb.tame_exponent(rho, rb.complement(J, f))
            assert pair.a_exp != pair.d_exp


def test_induction_character_f1_values():
    rho = mk(5, 1, (1,), (1,), (1,), (1,))
    full = rb.induction_character(rho, {0})
    assert (full.a_exp - 4) % 4 == 0 and full.d_exp == 1
    empty = rb.induction_character(rho, frozenset())
    assert empty.d_exp == 0 and empty.a_exp == 1


# ---------------------------------------------------------------------------
# invariants


def test_gauge_invariant_extremes():
    rng = random.Random(13)
    for p, f in [(5, 1), (5, 2), (7, 3)]:
        rho = rb.random_rho(p, f, rng)
        assert rb.gauge_invariant(rho, frozenset()) == rho.unit_empty
        assert rb.gauge_invariant(rho, range(f)) == rho.unit_full


def test_gauge_invariant_zero_and_undefined():
    rho = mk(5, 2, (1, 2), (1, 1), (1, 1), (0, 1))
    # entries({0}) = {0} hits the zero set: invariant vanishes
    assert rb.gauge_invariant(rho, {0}).is_zero()
    # exits({1}) = {0} hits the zero set: invariant undefined
    with pytest.raises(PreconditionViolated):
        rb.gauge_invariant(rho, {1})
    with pytest.raises(PreconditionViolated):
        rb.series_parameter(rho, {0})


def test_series_parameter_example_f2():
    rho = example_f2()
    one = rho.coeff.one
    assert rb.series_parameter(rho, {0}) == one
    # complement value forced by the product law: det unit is 3 mod 5
    assert rb.series_parameter(rho, {1}) == rho.coeff.from_int(3)
    assert rho.det_unit == rho.coeff.from_int(3)


def test_series_parameter_extremes():
    rng = random.Random(14)
    for p, f in [(5, 1), (7, 1), (5, 3)]:
        for _ in range(5):
            rho = rb.random_rho(p, f, rng)
            sgn = rho.theta_minus_one
            assert rb.series_parameter(rho, frozenset()) == -(sgn) * rho.unit_empty
            assert rb.series_parameter(rho, range(f)) == -(sgn) * rho.unit_full


def test_product_law():
    rng = random.Random(15)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2), (7, 3)]:
        for pattern in [None, frozenset(), frozenset({0})]:
            rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
            for J in admissible(rho):
                lhs = rb.series_parameter(rho, J) * \
                    rb.series_parameter(rho, rb.complement(J, f))
                assert lhs == rho.det_unit


def test_simplified_product_no_zeros():
    rng = random.Random(16)
    for p, f in [(5, 2), (5, 3), (7, 2)]:
        rho = rb.random_rho(p, f, rng, zero_pattern=frozenset())
        coeff = rho.coeff
        for J in rho.subsets():
            prod = coeff.one
            for i in range(f):
                prod = prod * (rho.alpha[i] if i in J else rho.beta[i])
            acc = -(rho.theta_minus_one) * prod.inverse()
            for i in J:
                nxt = (i + 1) % f
                acc = acc * rho.x[i] * coeff.from_int(rho.r[i] + 1)
                acc = acc / (rho.x[nxt] * coeff.from_int(rho.r[nxt] + 1))
            assert acc == rb.series_parameter(rho, J)


def test_frobenius_unit_extremes_and_relation():
    rng = random.Random(17)
    for p, f in [(5, 1), (5, 2), (7, 3)]:
        rho = rb.random_rho(p, f, rng, zero_pattern=frozenset())
        assert rb.frobenius_unit(rho, frozenset()) == rho.unit_empty
        assert rb.frobenius_unit(rho, range(f)) == rho.unit_full
        for J in rho.subsets():
            sign = -1 if (len(rb.frontier(J, f)) // 2) % 2 else 1
            ratio = rho.coeff.one
            for i in rb.entries(J, f):
                ratio = ratio * rho.coeff.from_int(rho.r[i] + 1)
            for i in rb.exits(J, f):
                ratio = ratio / rho.coeff.from_int(rho.r[i] + 1)
            expect = -(rho.theta_minus_one) * rb.frobenius_unit(rho, J) * ratio
            if sign < 0:
                expect = -expect
            assert rb.series_parameter(rho, J) == expect


# ---------------------------------------------------------------------------
# gauge action


def random_units(rho, rng):
    return [rho.coeff.random_unit(rng) for _ in range(rho.f)]


def test_reparametrize_identity_and_zero():
    rho = example_f2()
    ones = [1] * rho.f
    assert rb.reparametrize(rho, ones, ones) == rho
    with pytest.raises(ZeroScale):
        rb.reparametrize(rho, [0, 1], ones)


def test_invariance_under_reparametrize():
    rng = random.Random(18)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2)]:
        for pattern in [None, frozenset({0})]:
            rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
            for _ in range(10):
                other = rb.reparametrize(rho, random_units(rho, rng),
                                         random_units(rho, rng))
                assert other.unit_empty == rho.unit_empty
                assert other.unit_full == rho.unit_full
                assert other.zero_set == rho.zero_set
                assert rb.serre_weights(other) == rb.serre_weights(rho)
                for J in rho.subsets():
                    if rho.zero_set & rb.exits(J, f):
                        continue
                    assert rb.gauge_invariant(other, J) == \
                        rb.gauge_invariant(rho, J)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=0, max_value=10 ** 6))
def test_series_parameter_gauge_invariance(seed_rho, seed_gauge):
    rho = rb.random_rho(5, 2, random.Random(seed_rho), zero_pattern=frozenset())
    rng = random.Random(seed_gauge)
    other = rb.reparametrize(rho, random_units(rho, rng), random_units(rho, rng))
    for J in rho.subsets():
        assert rb.series_parameter(other, J) == rb.series_parameter(rho, J)


def test_canonical_form():
    rng = random.Random(19)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2)]:
        for pattern in [None, frozenset(), frozenset({0}), frozenset(range(f))]:
            rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
            can = rb.canonical_form(rho)
            assert rb.canonical_form(can) == can
            one = rho.coeff.one
            assert all(can.alpha[i] == one for i in range(1, f))
            assert all(can.beta[i] == one for i in range(1, f))
            assert can.alpha[0] == rho.unit_full.inverse()
            assert can.beta[0] == rho.unit_empty.inverse()
            free = sorted(set(range(f)) - rho.zero_set)
            if free:
                assert can.x[free[0]] == one
            other = rb.reparametrize(rho, random_units(rho, rng),
                                     random_units(rho, rng))
            assert rb.canonical_form(other) == can
            assert rb.gauge_equivalent(other, rho)


# ---------------------------------------------------------------------------
# recovery


def test_recover_round_trip():
    rng = random.Random(20)
    cases = [(5, 1, None), (5, 2, None), (5, 2, frozenset({1})),
             (5, 3, None), (5, 3, frozenset({0, 2})), (7, 2, frozenset())]
    for p, f, pattern in cases:
        rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
        values = {J: rb.gauge_invariant(rho, J) for J in admissible_values(rho)}
        out = rb.recover_from_invariants(p, f, rho.r, rho.zero_set, values,
                                         rho.theta_exp)
        assert out == rb.canonical_form(rho)


def admissible_values(rho):
    return [J for J in rho.subsets() if not (rho.zero_set & rb.exits(J, rho.f))]


def test_recover_split_and_f1():
    rng = random.Random(21)
    rho = rb.random_rho(5, 2, rng, zero_pattern=frozenset({0, 1}))
    values = {frozenset(): rho.unit_empty, frozenset({0, 1}): rho.unit_full}
    out = rb.recover_from_invariants(5, 2, rho.r, {0, 1}, values, rho.theta_exp)
    assert out.is_split and out.unit_empty == rho.unit_empty

    rho1 = rb.random_rho(7, 1, rng)
    values1 = {frozenset(): rho1.unit_empty, frozenset({0}): rho1.unit_full}
    out1 = rb.recover_from_invariants(7, 1, rho1.r, frozenset(), values1,
                                      rho1.theta_exp)
    assert out1 == rb.canonical_form(rho1)


def test_recover_rejects_bad_values():
    rng = random.Random(22)
    rho = rb.random_rho(5, 2, rng, zero_pattern=frozenset())
    values = {J: rb.gauge_invariant(rho, J) for J in admissible_values(rho)}
    g = rho.coeff.gen
    bad = dict(values)
    bad[frozenset({0})] = values[frozenset({0})] * g
    with pytest.raises(InconsistentValues):
        rb.recover_from_invariants(5, 2, rho.r, frozenset(), bad, rho.theta_exp)
    missing = {frozenset(): values[frozenset()],
               frozenset({0, 1}): values[frozenset({0, 1})]}
    with pytest.raises(BadInput):
        rb.recover_from_invariants(5, 2, rho.r, frozenset(), missing,
                                   rho.theta_exp)


# ---------------------------------------------------------------------------
# weights


def test_serre_weights_counts():
    rng = random.Random(23)
    rho = rb.random_rho(5, 2, rng, zero_pattern=frozenset())
    weights = rb.serre_weights(rho)
    assert weights == frozenset({rb.socle_weight(rho)})

    split = rb.random_rho(5, 2, rng, zero_pattern=frozenset({0, 1}))
    assert len(rb.serre_weights(split)) == 4

    for _ in range(20):
        f = rng.choice([1, 2, 3])
        pattern = frozenset(i for i in range(f) if rng.random() < 0.5)
        any_rho = rb.random_rho(5, f, rng, zero_pattern=pattern)
        ws = rb.serre_weights(any_rho)
        assert len(ws) == 2 ** len(pattern)
        assert rb.socle_weight(any_rho) in ws


def test_serre_weight_labels():
    w = rb.SerreWeight(5, 2, (1, 2), 3)
    assert w.dim == 6
    assert w.line_char() == rb.BorelChar((1 + 2 * 5 + 3) % 24, 3)
    assert w == rb.SerreWeight(5, 2, (1, 2), 3 + 24)
    with pytest.raises(BadInput):
        rb.SerreWeight(5, 2, (1, 5), 0)


def test_iwahori_weight_formulas():
    rng = random.Random(24)
    for p, f in [(5, 1), (5, 2), (7, 2)]:
        rho = rb.random_rho(p, f, rng)
        assert rb.iwahori_weight(rho, frozenset()) == rb.socle_weight(rho)
        top = rb.iwahori_weight(rho, range(f))
        assert top.s == tuple(p - 1 - v for v in rho.r)
        expo = (rho.theta_exp + sum(v * p ** i for i, v in enumerate(rho.r)))
        assert top.twist == expo % rho.qm1


def test_iwahori_weight_uniqueness_scan():
    rng = random.Random(25)
    for p, f in [(5, 1), (5, 2)]:
        rho = rb.random_rho(p, f, rng)
        q = rho.q
        for J in rho.subsets():
            pair = rb.induction_character(rho, J)
            target = rb.BorelChar(pair.a_exp, pair.d_exp)
            hits = []
            for smask in range(p ** f):
                s = [(smask // p ** i) % p for i in range(f)]
                for twist in range(q - 1):
                    w = rb.SerreWeight(p, f, s, twist)
                    if w.line_char() == target:
                        hits.append(w)
            assert hits == [rb.iwahori_weight(rho, J)]


def test_admissible_pair():
    rng = random.Random(26)
    rho = rb.random_rho(5, 3, rng, zero_pattern=frozenset())
    assert all(rb.admissible_pair(rho, J) == (True, True)
               for J in rho.subsets())
    split = rb.random_rho(5, 3, rng, zero_pattern=frozenset({0, 1, 2}))
    for J in split.subsets():
        flags = rb.admissible_pair(split, J)
        if J and J != frozenset(range(3)):
            assert not (flags[0] and flags[1])
    for f in [1, 2, 3, 4]:
        pattern = frozenset(i for i in range(f) if rng.random() < 0.5)
        rho_f = rb.random_rho(5, f, rng, zero_pattern=pattern)
        for J in rho_f.subsets():
            both = all(rb.admissible_pair(rho_f, J))
            assert both == (not (rho_f.zero_set & rb.frontier(J, f)))


# ---------------------------------------------------------------------------
# constituents of the Iwahori induction


def test_constituent_dimension_sum():
    rng = random.Random(27)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2), (7, 3), (5, 4)]:
        rho = rb.random_rho(p, f, rng)
        for J in rho.subsets():
            slots = rb.induction_constituents(rho, J)
            assert len(slots) == 2 ** f
            total = sum(s.weight.dim for s in slots if s.weight is not None)
            assert total == rho.q + 1


def test_constituent_anchors():
    rng = random.Random(28)
    for p, f in [(5, 2), (5, 3), (7, 2)]:
        rho = rb.random_rho(p, f, rng)
        for J in rho.subsets():
            slots = {s.index: s for s in rb.induction_constituents(rho, J)}
            pair = rb.induction_character(rho, J)
            socle = slots[frozenset()].weight
            assert socle.s == rb.gap_exponents(rho, J)
            assert socle.twist == pair.a_exp
            cosocle = slots[frozenset(range(f))].weight
            assert cosocle == rb.iwahori_weight(rho, J)
            mid = slots[rb.complement(J, f)].weight
            assert mid == rb.socle_weight(rho)


def test_constituent_flags():
    rng = random.Random(29)
    for p, f in [(5, 2), (5, 3), (7, 2)]:
        for trial in range(8):
            pattern = frozenset(i for i in range(f) if rng.random() < 0.4)
            rho = rb.random_rho(p, f, rng, zero_pattern=pattern)
            weights = rb.serre_weights(rho)
            for J in rho.subsets():
                slots = rb.induction_constituents(rho, J)
                flagged = [s for s in slots if s.in_weight_set]
                comp = rb.complement(J, f)
                assert any(s.index == comp for s in flagged)
                for s in flagged:
                    assert s.weight is not None
                    assert s.weight in weights
                if not (rho.zero_set & rb.frontier(J, f)):
                    assert len(flagged) == 1
                    assert flagged[0].index == comp
                    assert flagged[0].weight == rb.socle_weight(rho)


# ---------------------------------------------------------------------------
# reduction subcharacter


def test_reduction_subchar_identity():
    rng = random.Random(30)
    for p, f in [(5, 1), (5, 2), (5, 3), (7, 2), (5, 4)]:
        rho = rb.random_rho(p, f, rng)
        target = (rho.theta_exp +
                  sum((rho.r[i] + 1) * p ** i for i in range(f))) % rho.qm1
        for J in rho.subsets():
            chi = rb.reduction_subchar(rho, J)
            assert chi.exp == target
            assert chi.unram == rho.unit_empty


def test_tame_char_algebra():
    F = make_field(5, 2)
    a = rb.TameChar(24, 3, F.gen)
    b = rb.TameChar(24, 25, F.gen)
    assert (a * b).exp == 4
    assert (a * b).unram == F.gen ** 2
    assert a.inverse().exp == 21
    assert (a ** 2).unram == F.gen ** 2
    with pytest.raises(BadInput):
        rb.TameChar(24, 1, F.zero)


# ---------------------------------------------------------------------------
# serialization and sampling


def test_record_round_trip():
    rho = example_f2()
    line = rb.format_record(rho, {0})
    back, J, val = rb.parse_record(line)
    assert back == rho and J == frozenset({0})
    assert val == rho.coeff.one

    bare, none_j, none_v = rb.parse_record(rb.format_record(rho))
    assert bare == rho and none_j is None and none_v is None

    corrupted = line.replace("xJ=1", "xJ=2")
    with pytest.raises(InconsistentValues):
        rb.parse_record(corrupted)
    with pytest.raises(BadInput):
        rb.parse_record("p=5 f=2 nonsense")


def test_random_rho_determinism():
    a = rb.random_rho(5, 2, random.Random(99))
    b = rb.random_rho(5, 2, random.Random(99))
    assert a == b
    c = rb.random_rho(5, 3, random.Random(7), zero_pattern=frozenset({1}))
    assert c.zero_set == frozenset({1})
    for seed in range(30):
        rho = rb.random_rho(5, 2, random.Random(seed))
        assert not (set(rho.r) == {0} or set(rho.r) == {2})


# ---------------------------------------------------------------------------
# mutation hooks (negative controls)


def test_mutation_flip_invariant_sign_detected():
    rho = example_f2()
    baseline = rb.series_parameter(rho, frozenset())
    assert baseline == -(rho.theta_minus_one) * rho.unit_empty
    with inject("flip_invariant_sign"):
        assert rb.series_parameter(rho, frozenset()) == -baseline
    assert rb.series_parameter(rho, frozenset()) == baseline


def test_mutation_flip_frobenius_unit_detected():
    rho = example_f2()
    with inject("flip_frobenius_unit_sign"):
        assert rb.frobenius_unit(rho, frozenset()) != rho.unit_empty
    assert rb.frobenius_unit(rho, frozenset()) == rho.unit_empty


def test_mutation_shift_gap_exponent_detected():
    rho = example_f2()
    J = frozenset({0})
    pair = rb.induction_character(rho, J)
    with inject("shift_gap_exponent"):
        c = rb.gap_exponents(rho, J)
        gap = sum(v * rho.p ** i for i, v in enumerate(c))
        assert (pair.d_exp - pair.a_exp - gap) % rho.qm1 != 0


def test_theta_character_normalization():
    rho = example_f2()
    from gl2local.ffield import MultChar
    assert rho.theta == MultChar(rho.embs[0], rho.theta_exp)
    g = rho.base.elem(int(rho.base.gpow[1]))
    assert rho.theta(g) == rho.embs[0](g) ** rho.theta_exp
    minus_one = rho.base.from_int(-1)
    assert rho.theta(minus_one) == rho.theta_minus_one
