"""Tests for the integral descent data and the filtered-module dictionary."""

import random

import pytest

from gl2local import rhobar as rb
from gl2local import sdiv
from gl2local._mutations import inject
from gl2local.errors import (
    BadInput,
    InvalidModule,
    PreconditionViolated,
)
from gl2local.exactnum import witt_ring


def admissible(rho):
    return [J for J in rho.subsets()
            if not (rho.zero_set & rb.frontier(J, rho.f))]


def grid(rng, cells, per_cell, patterns=(None,)):
    for p, f in cells:
        for pattern in patterns:
            for _ in range(per_cell):
                pat = pattern
                if pat == "some":
                    pat = frozenset(i for i in range(f) if rng.random() < 0.4)
                yield rb.random_rho(p, f, rng, zero_pattern=pat)


def test_from_rho_f1_examples():
    rng = random.Random(40)
    rho = rb.random_rho(5, 1, rng)
    m0 = sdiv.from_rho(rho, frozenset())
    expect = -(rho.x[0] * rho.beta[0] / rho.alpha[0])
    assert m0.a[0].residue() == expect
    assert m0.alpha_prime.residue() == rho.unit_empty
    assert m0.alpha.residue() == rho.unit_full
    m1 = sdiv.from_rho(rho, {0})
    assert m1.alpha_prime.residue() == rho.unit_full
    assert m1.alpha.residue() == rho.unit_empty


def test_from_rho_precondition():
    rho = rb.random_rho(5, 2, random.Random(41), zero_pattern=frozenset({0}))
    # 0 is an entry of J={0}, so the frontier meets the zero set
    with pytest.raises(PreconditionViolated):
        sdiv.from_rho(rho, {0})


def test_validate_and_swap():
    rng = random.Random(42)
    for rho in grid(rng, [(5, 2), (5, 3), (7, 2)], 3, (None, "some")):
        for J in admissible(rho):
            m = sdiv.from_rho(rho, J)
            ok, msg = sdiv.validate_type_J(m)
            assert ok and msg is None
            twin = m.swap_type()
            assert sdiv.validate_type_J(twin)[0]
            assert twin.J == rb.complement(J, rho.f)


def test_validate_rejects_zero_on_frontier():
    rho = rb.random_rho(5, 2, random.Random(43), zero_pattern=frozenset())
    m = sdiv.from_rho(rho, {0})
    zeroed = list(m.a)
    # embedding 0 is a frontier entry of J={0}; slot for index 0 is 0
    zeroed[0] = m.ring.zero
    bad = sdiv.SDivModule(m.p, m.f, m.r, m.theta_exp, m.J, zeroed,
                          m.alpha, m.alpha_prime)
    ok, msg = sdiv.validate_type_J(bad)
    assert not ok and "frontier" in msg
    with pytest.raises(InvalidModule):
        sdiv.big_A(bad)
    with pytest.raises(InvalidModule):
        sdiv.to_fontaine_laffaille(bad)
    with pytest.raises(InvalidModule):
        sdiv.frobenius_eigenvalues(bad)


def test_construction_validation():
    rho = rb.random_rho(5, 2, random.Random(44))
    m = sdiv.from_rho(rho, frozenset())
    with pytest.raises(BadInput):
        sdiv.SDivModule(5, 2, m.r, 0, frozenset(), m.a[:1],
                        m.alpha, m.alpha_prime)
    with pytest.raises(BadInput):
        sdiv.SDivModule(5, 2, m.r, 0, frozenset(), m.a,
                        m.ring.zero, m.alpha_prime)
    with pytest.raises(BadInput):
        sdiv.SDivModule(5, 2, (1,), 0, frozenset(), m.a,
                        m.alpha, m.alpha_prime)


def test_big_A_is_unit_empty():
    rng = random.Random(45)
    for rho in grid(rng, [(5, 1), (5, 2), (5, 3), (7, 2)], 4,
                    (None, "some")):
        for J in admissible(rho):
            m = sdiv.from_rho(rho, J)
            assert sdiv.big_A(m) == rho.unit_empty


def test_two_route_frobenius_unit():
    rng = random.Random(46)
    for rho in grid(rng, [(5, 1), (5, 2), (5, 3), (5, 4), (7, 3)], 4,
                    (None, "some")):
        for J in admissible(rho):
            m = sdiv.from_rho(rho, J)
            direct = rb.frobenius_unit(rho, J)
            routed = sdiv.recurrence_frobenius_unit(
                m, rho.unit_empty, rho.unit_full)
            assert direct == routed
            assert m.alpha.residue() * direct == rho.det_unit


def test_frontier_scalar_products_match_recurrence():
    rng = random.Random(47)
    for rho in grid(rng, [(5, 2), (5, 3), (5, 4), (7, 3)], 6, (None,)):
        for J in admissible(rho):
            m = sdiv.from_rho(rho, J)
            front = rb.frontier(J, rho.f)
            js = [j for j in range(rho.f)
                  if sdiv.slot_index(j, rho.f) in front]
            closed = sdiv.frontier_scalar_products(rho, J)
            assert len(closed) == len(js)
            acc = rho.coeff.one
            for n, j in enumerate(js):
                acc = acc * m.a[j].residue()
                assert closed[n] == acc


def test_round_trip_canonical_form():
    rng = random.Random(48)
    for rho in grid(rng, [(5, 1), (5, 2), (5, 3), (7, 2)], 4,
                    (None, "some")):
        want = rb.canonical_form(rho)
        for J in admissible(rho):
            out = sdiv.to_fontaine_laffaille(sdiv.from_rho(rho, J))
            assert rb.canonical_form(out) == want
            assert out.zero_set == rho.zero_set


def test_output_unit_positions():
    rng = random.Random(49)
    rho = rb.random_rho(5, 3, rng)
    out = sdiv.to_fontaine_laffaille(sdiv.from_rho(rho, {1}))
    one = rho.coeff.one
    last = sdiv.slot_index(rho.f - 1, rho.f)
    for i in range(rho.f):
        if i != last:
            assert out.alpha[i] == one and out.beta[i] == one
    assert out.unit_empty == rho.unit_empty
    assert out.unit_full == rho.unit_full


def test_frobenius_eigenvalues():
    rng = random.Random(50)
    for rho in grid(rng, [(5, 2), (7, 2)], 3, (None,)):
        for J in admissible(rho):
            m = sdiv.from_rho(rho, J)
            V, Vp = sdiv.frobenius_eigenvalues(m)
            assert V.shift == rho.f - len(J)
            assert Vp.shift == len(J)
            assert V.w == m.alpha and Vp.w == m.alpha_prime
        full = sdiv.from_rho(rho, range(rho.f))
        assert sdiv.frobenius_eigenvalues(full)[1].shift == rho.f
        assert full.alpha_prime.residue() == rho.unit_full
        empty = sdiv.from_rho(rho, frozenset())
        assert sdiv.frobenius_eigenvalues(empty)[1].shift == 0
        assert empty.alpha_prime.residue() == rho.unit_empty


def test_filtration_exponent_rotations():
    rng = random.Random(51)
    for rho in grid(rng, [(5, 1), (5, 2), (5, 3), (5, 4), (7, 3)], 2,
                    (None,)):
        p, f, e = rho.p, rho.f, rho.q - 1
        for J in rho.subsets():
            c = rb.gap_exponents(rho, J)
            base = sdiv.filtration_exponent(rho, J, 0)
            assert base == sum(v * p**i for i, v in enumerate(c))
            for j in range(f):
                cj = sdiv.filtration_exponent(rho, J, j)
                cjm = sdiv.filtration_exponent(rho, J, (j - 1) % f)
                ci = c[(-j) % f]
                assert 1 <= cj <= e - 1
                assert e - cj + p * cjm == e * (ci + 1)
                assert cj + p * (e - cjm) == e * (p - ci)


def test_format_module():
    rho = rb.random_rho(5, 2, random.Random(52))
    m = sdiv.from_rho(rho, {0})
    line = sdiv.format_module(m)
    for key in ("p=5", "f=2", "J=1", "a=", "alpha=", "alphap="):
        assert key in line


def test_mutation_flip_breaks_two_route_check():
    rho = rb.random_rho(5, 2, random.Random(53), zero_pattern=frozenset())
    J = frozenset({0})
    with inject("flip_frobenius_unit_sign"):
        m = sdiv.from_rho(rho, J)
        direct = rb.frobenius_unit(rho, J)
        routed = sdiv.recurrence_frobenius_unit(
            m, rho.unit_empty, rho.unit_full)
        # the datum was built with the flipped unit, the route was not
        assert direct != routed or sdiv.big_A(m) != rho.unit_empty
