"""Tests for exact Brauer characters, induction, and the type reductions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl2local import modrep as M
from gl2local.errors import (
    BadInput,
    ConductorMismatch,
    FieldTooLarge,
    GroupTooLarge,
    InternalCheckFailed,
    NonIntegral,
    PreconditionViolated,
)
from gl2local.exactnum import CycloInt
from gl2local.ffield import embeddings, make_field
from gl2local.rhobar import SerreWeight


def w(q, digits, twist):
    p = 3 if q in (3, 9, 27) else (5 if q in (5, 25) else q)
    f = 1
    qq = p
    while qq < q:
        qq *= p
        f += 1
    return SerreWeight(p, f, digits if isinstance(digits, tuple) else (digits,), twist)


def one(n):
    return CycloInt.from_int(n, 1)


# ---------------------------------------------------------------------------
# groups and classes


@pytest.mark.parametrize("q", [5, 7, 9])
def test_field_class_counts(q):
    g = M.gl2_field(q)
    kinds = {}
    for cls in g.classes:
        kinds[cls.label[0]] = kinds.get(cls.label[0], 0) + 1
    assert kinds["central"] == q - 1
    assert kinds["split"] == (q - 1) * (q - 2) // 2
    assert kinds["nonsplit"] == q * (q - 1) // 2
    assert g.n_classes == q * (q - 1)
    assert g.classes[0].label == ("central", 0)
    for cls in g.classes:
        expected = {"central": 1, "split": q * (q + 1), "nonsplit": q * (q - 1)}
        assert cls.size == expected[cls.label[0]]


def test_ring_classes_biject_with_field():
    assert M.gl2_ring(5, 2).class_labels == M.gl2_field(5).class_labels
    assert M.gl2_ring(3, 2).class_labels == M.gl2_field(3).class_labels


def test_ring_level_one_is_field():
    assert M.gl2_ring(5, 1) is M.gl2_field(5)


def test_classify_regular_roundtrip():
    g = M.gl2_ring(3, 2)
    reps = np.stack([c.rep for c in g.classes])
    assert np.array_equal(g.classify_regular(reps), np.arange(g.n_classes))


def test_bad_field_inputs():
    with pytest.raises(BadInput):
        M.gl2_field(2)
    with pytest.raises(BadInput):
        M.gl2_field(4)
    with pytest.raises(BadInput):
        M.gl2_field(6)
    with pytest.raises(BadInput):
        M.gl2_ring(9, 2)


def test_group_enumeration_cap():
    with pytest.raises(GroupTooLarge):
        M.gl2_ring(7, 2)
    with pytest.raises(GroupTooLarge):
        M.gl2_field(29)


# ---------------------------------------------------------------------------
# cyclotomic vector layer


@pytest.mark.parametrize("n", [8, 24, 48, 80])
def test_power_basis_rows_match_cyclo(n):
    rows = M._power_basis_rows(n)
    rng = np.random.default_rng(7)
    for k in map(int, rng.integers(0, n, 12)):
        assert tuple(int(v) for v in rows[k]) == CycloInt(n, {k: 1}).canonical()


def test_vec_mul_matches_cyclo_product():
    n = 24
    rng = np.random.default_rng(11)
    for _ in range(8):
        u = rng.integers(-4, 5, M._phi(n))
        v = rng.integers(-4, 5, M._phi(n))
        got = M._vec_mul(n, u, v)
        want = (CycloInt(n, [int(x) for x in u]) * CycloInt(n, [int(x) for x in v])).canonical()
        assert tuple(int(x) for x in got) == want


# ---------------------------------------------------------------------------
# irreducible weight characters


def test_trivial_weight_is_constant_one():
    g = M.gl2_field(5)
    chi = M.irreducible_brauer(w(5, 0, 0), g)
    for label, val in chi.items():
        assert val == one(24)


def test_steinberg_central_values():
    q = 5
    g = M.gl2_field(q)
    chi = M.irreducible_brauer(M.steinberg_weight(q, 1), g)
    for k in range(q - 1):
        want = CycloInt(24, {2 * 1 * (q + 1) * k % 24: q})
        assert chi.value(("central", k)) == want


def test_dimension_sum_q5():
    assert sum(wt.dim for wt in M.all_weights(5)) == 60


@pytest.mark.parametrize("q", [5, 7, 9])
def test_weight_count(q):
    assert len(M.all_weights(q)) == q * (q - 1)


def test_twist_multiplicativity():
    g = M.gl2_field(5)
    det1 = M.irreducible_brauer(w(5, 0, 1), g)
    for digits in range(5):
        lhs = M.irreducible_brauer(w(5, digits, 1), g)
        rhs = M.irreducible_brauer(w(5, digits, 0), g) * det1
        assert lhs == rhs


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 7), st.integers(0, 7))
@settings(max_examples=25, deadline=None)
def test_central_value_formula_q9(d0, d1, twist, k):
    q = 9
    g = M.gl2_field(q)
    wt = SerreWeight(3, 2, (d0, d1), twist)
    chi = M.irreducible_brauer(wt, g)
    e = M.weight_central_exponent(wt)
    want = CycloInt(80, {e * (q + 1) * k % 80: wt.dim})
    assert chi.value(("central", k)) == want


def test_weight_central_exponent_examples():
    assert M.weight_central_exponent(SerreWeight(5, 1, (2,), 3)) == 0
    assert M.weight_central_exponent(SerreWeight(5, 1, (1,), 0)) == 1
    assert M.weight_central_exponent(SerreWeight(3, 2, (1, 2), 0)) == 7


def test_weight_cap():
    with pytest.raises(FieldTooLarge):
        M.irreducible_brauer(SerreWeight(3, 3, (0, 0, 0), 0))


def test_central_sum_multiplicity_rank_one_field():
    # 0 < r < p-1 gives 2; the two one-dimensional-twist families give 1
    assert M.central_sum_multiplicity(SerreWeight(5, 1, (2,), 1)) == 2
    assert M.central_sum_multiplicity(SerreWeight(5, 1, (0,), 2)) == 1
    assert M.central_sum_multiplicity(SerreWeight(5, 1, (4,), 0)) == 1


def test_central_sum_multiplicity_degree_two_field():
    assert M.central_sum_multiplicity(SerreWeight(5, 2, (4, 4), 0)) == 1
    assert M.central_sum_multiplicity(SerreWeight(5, 2, (0, 0), 1)) == 3
    assert M.central_sum_multiplicity(SerreWeight(5, 2, (4, 0), 0)) == 2
    assert M.central_sum_multiplicity(SerreWeight(5, 2, (2, 3), 0)) == 4


# ---------------------------------------------------------------------------
# induction


def test_whole_group_induction_is_trivial():
    g = M.gl2_field(5)
    chi = M.induced_brauer(g, M.whole_group_char(g))
    for _, val in chi.items():
        assert val == one(24)


@pytest.mark.parametrize("q", [5, 7, 9])
def test_scalar_type_induction_closed_form(q):
    g = M.gl2_field(q)
    for psi in (0, 1):
        sub = M.triangular_char(g, psi, 0, diag_match=True)
        assert M.induced_brauer(g, sub) == M.central_induction_brauer(g, psi)


def test_induction_matches_direct_conjugation():
    g = M.gl2_field(5)
    sub = M.nonsplit_torus_char(g, 1)
    fast = M.induced_brauer(g, sub)
    direct = M._induced_on_subset(
        g, np.ones(g.order, dtype=bool), sub, [c.rep for c in g.classes]
    )
    assert np.array_equal(fast.table, np.stack(direct))
    g2 = M.gl2_ring(3, 2)
    sub2 = M.triangular_char(g2, (1, 1), (0, 0), level=2)
    fast2 = M.induced_brauer(g2, sub2)
    direct2 = M._induced_on_subset(
        g2, np.ones(g2.order, dtype=bool), sub2, [c.rep for c in g2.classes]
    )
    assert np.array_equal(fast2.table, np.stack(direct2))


def test_induction_transitivity_through_triangular():
    # diagonal torus -> triangular subgroup -> whole group, against one-shot
    g = M.gl2_field(5)
    n = g.conductor
    ops = g.ops
    elems, invs = g.elements, g.inverses
    dtab = g.field2.dlog[g._emb_image]

    def member(mats):
        return (mats[..., 1, 0] == 0) & (mats[..., 0, 1] == 0)

    def expo(mats):
        return (1 * dtab[mats[..., 0, 0]] + 2 * dtab[mats[..., 1, 1]]) % n

    lam = M.SubgroupChar(g, "diagonal(1,2)", n, member, expo)
    one_shot = M.induced_brauer(g, lam)

    k_mask = elems[:, 1, 0] == 0
    k_el, k_inv = elems[k_mask], invs[k_mask]
    ksize = int(k_mask.sum())
    ident = np.eye(2, dtype=np.int64)
    reg = k_el[np.all(ops.matpow(k_el, n) == ident, axis=(1, 2))]
    mid_vals = {}
    for y in reg:
        conj = ops.matmul(ops.matmul(k_el, y), k_inv)
        mask = lam.membership(conj)
        z = M._zeta_exponents(lam.exponents(conj[mask]), lam.value_order, n)
        counts = np.zeros(n, dtype=np.int64)
        np.add.at(counts, z, 1)
        canon = M._reduce_counts(n, counts)
        assert not np.any(canon % lam.size)
        mid_vals[tuple(map(int, y.ravel()))] = canon // lam.size
    rows = []
    for cls in g.classes:
        conj = ops.matmul(ops.matmul(elems, cls.rep), invs)
        in_k = conj[:, 1, 0] == 0
        total = np.zeros(M._phi(n), dtype=np.int64)
        for y in conj[in_k]:
            total += mid_vals[tuple(map(int, y.ravel()))]
        assert not np.any(total % ksize)
        rows.append(total // ksize)
    assert np.array_equal(one_shot.table, np.stack(rows))


def test_subgroup_char_validation_has_teeth():
    g = M.gl2_field(5)

    def member(mats):
        return mats[..., 1, 0] == 0

    def bad_expo(mats):
        return mats[..., 0, 1] % 3

    broken = M.SubgroupChar(g, "broken", 24, member, bad_expo)
    with pytest.raises(InternalCheckFailed):
        broken.validate()


def test_induction_group_mismatch():
    g5, g7 = M.gl2_field(5), M.gl2_field(7)
    sub = M.triangular_char(g5, 0, 0)
    with pytest.raises(BadInput):
        M.induced_brauer(g7, sub)


# ---------------------------------------------------------------------------
# quadratic-extension character classes


def test_cuspidal_class_dimension_and_split_vanishing():
    g = M.gl2_field(5)
    chi = M.cuspidal_reduction_brauer(g, 1)
    assert chi.dimension() == 4
    for k1 in range(4):
        for k2 in range(k1 + 1, 4):
            assert chi.value(("split", k1, k2)) == CycloInt.from_int(24, 0)


def test_cuspidal_norm_factoring_case_is_virtual_difference():
    q = 5
    g = M.gl2_field(q)
    for t in (0, 1, 2):
        ge = M.cuspidal_reduction((q + 1) * t, q)
        assert ge.entries == {
            SerreWeight(5, 1, (4,), t): 1,
            SerreWeight(5, 1, (0,), t): -1,
        }
        assert M.grothendieck_brauer(ge, g) == M.cuspidal_reduction_brauer(g, (q + 1) * t)


def test_cuspidal_generic_case_decomposes():
    g = M.gl2_field(5)
    ge = M.cuspidal_reduction(1, 5)
    assert ge.dimension() == 4
    assert ge.is_effective()
    assert M.grothendieck_brauer(ge, g) == M.cuspidal_reduction_brauer(g, 1)


def test_cuspidal_accepts_mult_char():
    f2 = make_field(5, 2)
    xi = __import__("gl2local.ffield", fromlist=["MultChar"]).MultChar(
        embeddings(f2, f2)[0], 7
    )
    assert M.cuspidal_reduction(xi) == M.cuspidal_reduction(7, 5)


def test_cuspidal_virtual_branch_needs_no_tables():
    # norm-factoring characters work even above the enumeration caps
    ge = M.cuspidal_reduction(50 * 1, 49)
    assert ge.dimension() == 48


# ---------------------------------------------------------------------------
# decomposition


@pytest.mark.parametrize("q", [5, 9])
def test_decompose_irreducible_roundtrip(q):
    rng = np.random.default_rng(3)
    weights = M.all_weights(q)
    for i in map(int, rng.integers(0, len(weights), 6)):
        ge = M.decompose(M.irreducible_brauer(weights[i]))
        assert ge.entries == {weights[i]: 1}


def test_decompose_zero_is_empty():
    g = M.gl2_field(5)
    assert M.decompose(M.BrauerChar.zero(g)) == M.GrothElem()


def test_decompose_random_roundtrip():
    q = 7
    g = M.gl2_field(q)
    weights = M.all_weights(q)
    rng = np.random.default_rng(5)
    for _ in range(5):
        idx = rng.choice(len(weights), 4, replace=False)
        coeffs = rng.integers(-3, 4, 4)
        ge = M.GrothElem({weights[int(i)]: int(c) for i, c in zip(idx, coeffs)})
        assert M.decompose(M.grothendieck_brauer(ge, g)) == ge


def test_decompose_rejects_non_integral():
    g = M.gl2_field(5)
    table = M.irreducible_brauer(w(5, 2, 1), g).table.copy()
    table[3, 0] += 1
    with pytest.raises(NonIntegral):
        M.decompose(M.BrauerChar(g, table))


def test_decompose_cap_is_opt_in():
    g = M.gl2_field(25)
    chi = M.central_induction_brauer(g, 0)
    with pytest.raises(FieldTooLarge):
        M.decompose(chi)


def test_triangular_induction_constituents_q5():
    g = M.gl2_field(5)
    ge = M.decompose(M.induced_brauer(g, M.triangular_char(g, 1, 0)))
    assert ge.entries == {
        SerreWeight(5, 1, (1,), 0): 1,
        SerreWeight(5, 1, (3,), 1): 1,
    }
    assert ge.dimension() == 6


# ---------------------------------------------------------------------------
# the scalar-type sum identity


@pytest.mark.parametrize("q", [5, 7, 9])
def test_central_type_sum(q):
    rep = M.verify_central_type_sum(q, 1)
    assert rep.passed and not rep.partial


def test_central_type_sum_multiplicities_q5():
    g = M.gl2_field(5)
    sub = M.triangular_char(g, 0, 0, diag_match=True)
    ge = M.decompose(M.induced_brauer(g, sub))
    assert ge.entries == {
        SerreWeight(5, 1, (0,), 0): 1,
        SerreWeight(5, 1, (0,), 2): 1,
        SerreWeight(5, 1, (2,), 1): 2,
        SerreWeight(5, 1, (2,), 3): 2,
        SerreWeight(5, 1, (4,), 0): 1,
        SerreWeight(5, 1, (4,), 2): 1,
    }
    assert ge.dimension() == 24


# ---------------------------------------------------------------------------
# the triangular type reduction


def test_split_reduction_level_zero():
    rep = M.verify_split_type_reduction(5, 0, 2, 2)
    assert rep.passed
    with pytest.raises(ConductorMismatch):
        M.verify_split_type_reduction(5, 0, 1, 2)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_split_reduction_level_one(p):
    rep = M.verify_split_type_reduction(p, 1, 1, 0)
    assert rep.passed
    with pytest.raises(ConductorMismatch):
        M.verify_split_type_reduction(p, 1, 2, 2)


@pytest.mark.parametrize("p", [3, 5])
def test_split_reduction_level_two(p):
    rep = M.verify_split_type_reduction(p, 2, (1, 1), (0, 0))
    assert rep.passed and not rep.partial
    with pytest.raises(ConductorMismatch):
        M.verify_split_type_reduction(p, 2, (1, 1), (0, 1))


# ---------------------------------------------------------------------------
# the even-conductor quadratic type reduction


@pytest.mark.parametrize("q", [5, 7, 9])
def test_unramified_quadratic_depth_one(q):
    rep = M.verify_unramified_quadratic_type(q, 1, 1)
    assert rep.passed and not rep.partial
    with pytest.raises(ConductorMismatch):
        M.verify_unramified_quadratic_type(q, 1, q + 1)


@pytest.mark.parametrize("p", [3, 5])
def test_unramified_quadratic_depth_two(p):
    c = make_field(p, 2).gen.enc
    rep = M.verify_unramified_quadratic_type(p, 2, (1, c))
    assert rep.passed and not rep.partial
    with pytest.raises(ConductorMismatch):
        M.verify_unramified_quadratic_type(p, 2, (1, 1))


def test_unramified_quadratic_depth_two_value_table():
    # frozen central value at p=3: (q-1)q = 6 times a conductor-8 root
    p = 3
    c = make_field(p, 2).gen.enc
    g2 = M.gl2_ring(p, 2)
    brute = M.induced_brauer(g2, M.unramified_quadratic_char(g2, 1, c))
    assert brute.value(("central", 1)) == CycloInt(8, {4: 6})
    assert brute.value(("nonsplit", 1)) == CycloInt(8, {1: 1, 3: 1})


def test_unramified_quadratic_deeper_recursion():
    for m in (3, 4):
        rep = M.verify_unramified_quadratic_type(5, m, 1)
        assert rep.passed and rep.partial


def test_unramified_quadratic_depth_two_needs_prime_field():
    with pytest.raises(PreconditionViolated):
        M.verify_unramified_quadratic_type(9, 2, (1, 3))


# ---------------------------------------------------------------------------
# the odd-conductor quadratic type reduction


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("m", [1, 2])
def test_ramified_quadratic(p, m):
    rep = M.verify_ramified_quadratic_type(p, m, 1)
    assert rep.passed and not rep.partial


def test_ramified_quadratic_deeper_is_partial():
    rep = M.verify_ramified_quadratic_type(3, 3, 0)
    assert rep.passed and rep.partial


def test_ramified_quadratic_needs_prime_field():
    with pytest.raises(PreconditionViolated):
        M.verify_ramified_quadratic_type(9, 1)


# ---------------------------------------------------------------------------
# quaternionic types


@pytest.mark.parametrize("q", [5, 7, 9])
def test_quaternion_report(q):
    assert M.quaternion_report(q).passed


def test_quaternion_twist_single_label():
    ge = M.quaternion_type_reduction(5, "twist", {"chi": 2})
    assert ge.entries == {12: 1}
    assert ge.dimension() == 1


def test_quaternion_unramified_depth_one_is_single_character():
    ge = M.quaternion_type_reduction(5, "unramified", {"m": 1, "xi": 7})
    assert ge.entries == {7: 1}
    conj = M.quaternion_type_reduction(5, "unramified", {"m": 1, "xi": 7, "conjugate": True})
    assert conj.entries == {7 * 5 % 24: 1}
    with pytest.raises(ConductorMismatch):
        M.quaternion_type_reduction(5, "unramified", {"m": 1, "xi": 6})


def test_quaternion_ramified_labels():
    q = 5
    ge = M.quaternion_type_reduction(q, "ramified", {"m": 1, "psi": 1})
    assert ge.entries == {(1 + 4 * j) % 24: 1 for j in range(q + 1)}
    assert ge.dimension() == q + 1
    deep = M.quaternion_type_reduction(q, "ramified", {"m": 3, "psi": 0})
    assert deep.dimension() == q * q * (q + 1)


def test_quaternion_unknown_case():
    with pytest.raises(BadInput):
        M.quaternion_type_reduction(5, "cubic", {})


# ---------------------------------------------------------------------------
# class function arithmetic and reports


def test_brauer_char_algebra():
    g = M.gl2_field(5)
    a = M.cuspidal_reduction_brauer(g, 1)
    b = M.central_induction_brauer(g, 0)
    assert (a + b) - b == a
    assert (-a) + a == M.BrauerChar.zero(g)
    prod = a * b
    lab = ("central", 2)
    assert prod.value(lab) == a.value(lab) * b.value(lab)
    assert 3 * a == a + a + a


def test_brauer_char_unknown_label():
    g = M.gl2_field(5)
    with pytest.raises(BadInput):
        M.central_induction_brauer(g, 0).value(("central", 99))


def test_transport_requires_matching_classes():
    chi = M.central_induction_brauer(M.gl2_field(5), 0)
    with pytest.raises(BadInput):
        chi.transport(M.gl2_field(7))


def test_groth_elem_laws():
    a = M.GrothElem({w(5, 1, 0): 2, w(5, 2, 1): -1})
    b = M.GrothElem({w(5, 2, 1): 1})
    assert a + b == M.GrothElem({w(5, 1, 0): 2})
    assert a - a == M.GrothElem()
    assert not (a - a)
    assert (2 * a).multiplicity(w(5, 1, 0)) == 4
    assert a.dimension() == 2 * 2 - 3


def test_report_formatting():
    rep = M.verify_central_type_sum(5, 0)
    text = rep.format()
    assert "central_type_sum" in text and "pass" in text
    assert "central(g^0)" in text
    assert rep.summary().endswith("pass")


def test_cyclo_text_rendering():
    assert M._cyclo_text(CycloInt(8, {0: 2, 1: -1, 3: 4})) == "2-z+4*z^3"
    assert M._cyclo_text(CycloInt.from_int(8, 0)) == "0"
    assert M._cyclo_text(CycloInt(8, {1: 1})) == "z"
