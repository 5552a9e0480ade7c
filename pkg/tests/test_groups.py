import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symbreak.errors import GroupMismatchError, SizeCapError
from symbreak.groups import (
    GroupElement,
    conjugacy_class_of_subgroup,
    construct_group,
    left_cosets,
    subgroup_generate,
    trivial_subgroup,
    whole_group,
)


def brute_force_compose(a, b):
    return tuple(a[b[i]] for i in range(len(a)))


def brute_force_closure(gens):
    """Test-local closure by repeated composition on raw tuples."""
    d = len(gens[0])
    elems = {tuple(range(d))} | set(gens)
    while True:
        new = {brute_force_compose(a, b) for a in elems for b in elems} - elems
        if not new:
            return elems
        elems |= new


def test_trivial_group():
    g = construct_group({"kind": "cyclic", "n": 1})
    assert g.order == 1
    assert g.degree == 1
    assert g.elements[0].is_identity()
    assert g.generators == ()


def test_s3_matches_brute_force_enumeration():
    g = construct_group({"kind": "symmetric", "n": 3})
    expected = sorted(itertools.permutations(range(3)))
    assert [e.perm for e in g.elements] == expected
    assert g.order == 6
    assert g.degree == 3
    # generators are the transposition and the 3-cycle
    gen_perms = {g.elements[i].perm for i in g.generators}
    assert gen_perms == {(1, 0, 2), (1, 2, 0)}
    # closure of the table against raw composition
    for i, a in enumerate(g.elements):
        for j, b in enumerate(g.elements):
            assert g.elements[g.mult(i, j)].perm == brute_force_compose(a.perm, b.perm)


def test_d4_matches_brute_force_closure():
    g = construct_group({"kind": "dihedral", "n": 4})
    expected = brute_force_closure([(1, 2, 3, 0), (0, 3, 2, 1)])
    assert {e.perm for e in g.elements} == expected
    assert g.order == 8
    assert g.degree == 4


def test_dihedral_2_is_faithful_klein_group():
    g = construct_group({"kind": "dihedral", "n": 2})
    assert g.order == 4
    # every non-identity element is an involution
    assert all(g.inv(i) == i for i in range(4))


def test_cyclic_group_structure():
    g = construct_group({"kind": "cyclic", "n": 4})
    assert g.order == 4 and g.degree == 4
    r = g.index_of((1, 2, 3, 0))
    assert g.mult(r, r) == g.index_of((2, 3, 0, 1))
    assert g.inv(r) == g.index_of((3, 0, 1, 2))


def test_product_group_acts_on_disjoint_blocks():
    g = construct_group({"kind": "product", "factors": [{"kind": "cyclic", "n": 2},
                                                        {"kind": "cyclic", "n": 3}]})
    assert g.order == 6
    assert g.degree == 5
    swap = g.index_of((1, 0, 2, 3, 4))
    shift = g.index_of((0, 1, 3, 4, 2))
    assert g.mult(swap, shift) == g.mult(shift, swap)   # factors commute


@pytest.mark.parametrize("spec", [
    {"kind": "symmetric", "n": 8},
    {"kind": "cyclic", "n": 6000},
    {"kind": "dihedral", "n": 3000},
    {"kind": "product", "factors": [{"kind": "cyclic", "n": 100},
                                    {"kind": "cyclic", "n": 100}]},
])
def test_order_cap_rejected(spec):
    with pytest.raises(SizeCapError):
        construct_group(spec)


@pytest.mark.parametrize("spec", [
    {"kind": "cyclic", "n": 0},
    {"kind": "dihedral", "n": 1},
    {"kind": "symmetric", "n": 0},
    {"kind": "weyl", "n": 2},
    {"kind": "product", "factors": [{"kind": "cyclic", "n": 2}]},
])
def test_bad_descriptors_rejected(spec):
    with pytest.raises(ValueError):
        construct_group(spec)


@pytest.mark.parametrize("spec", [
    {"kind": "cyclic", "n": 4},
    {"kind": "symmetric", "n": 3},
    {"kind": "dihedral", "n": 4},
    {"kind": "product", "factors": [{"kind": "cyclic", "n": 2}, {"kind": "cyclic", "n": 2}]},
])
def test_antihomomorphism_of_inverse(spec):
    g = construct_group(spec)
    for a in range(g.order):
        for b in range(g.order):
            assert g.inv(g.mult(a, b)) == g.mult(g.inv(b), g.inv(a))


def test_associativity_full_triple_enumeration():
    for spec in [{"kind": "symmetric", "n": 3}, {"kind": "dihedral", "n": 4}]:
        g = construct_group(spec)
        for a in range(g.order):
            for b in range(g.order):
                ab = g.mult(a, b)
                for c in range(g.order):
                    assert g.mult(ab, c) == g.mult(a, g.mult(b, c))


def test_construction_is_deterministic():
    a = construct_group({"kind": "dihedral", "n": 4})
    b = construct_group({"kind": "dihedral", "n": 4})
    assert [e.perm for e in a.elements] == [e.perm for e in b.elements]
    assert np.array_equal(a.mult_table, b.mult_table)
    assert np.array_equal(a.inv_table, b.inv_table)
    assert a.generators == b.generators


def test_group_element_validation():
    with pytest.raises(ValueError):
        GroupElement((0, 0, 1))
    with pytest.raises(ValueError):
        GroupElement((1, 2, 3))


# -- subgroups ---------------------------------------------------------------


def test_subgroup_generate_empty_gives_trivial():
    g = construct_group({"kind": "symmetric", "n": 3})
    sub = subgroup_generate(g, [])
    assert sub.member_indices == (0,)


def test_subgroup_generate_involution(fx):
    sub = subgroup_generate(fx.s3, [fx.s3.index_of((1, 0, 2))])
    assert sub.order == 2


def test_subgroup_generate_rotations_brute_force(fx):
    r = fx.d4.index_of((1, 2, 3, 0))
    sub = subgroup_generate(fx.d4, [r])
    expected = brute_force_closure([(1, 2, 3, 0)])
    assert {fx.d4.elements[i].perm for i in sub.member_indices} == expected
    assert sub.order == 4


def test_subgroup_generate_bad_index(fx):
    with pytest.raises(ValueError):
        subgroup_generate(fx.s3, [99])


def test_generating_set_regenerates(fx):
    for sub in [fx.d4_rot, fx.d4_kdiag, fx.s3_alt, whole_group(fx.d4)]:
        regen = subgroup_generate(sub.parent, sub.generating_set())
        assert regen.member_indices == sub.member_indices


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=7), max_size=4))
def test_generated_subgroup_order_divides_group_order(gens):
    g = construct_group({"kind": "dihedral", "n": 4})
    sub = subgroup_generate(g, gens)
    assert g.order % sub.order == 0


# -- cosets ------------------------------------------------------------------


def test_single_coset_for_whole_group(fx):
    dec = left_cosets(fx.s3, whole_group(fx.s3))
    assert len(dec.cosets) == 1
    assert dec.representatives == (0,)


def test_s3_cosets_brute_force_partition(fx):
    sub = fx.s3_swap
    dec = left_cosets(fx.s3, sub)
    assert len(dec.cosets) == 3
    assert all(len(c) == 2 for c in dec.cosets)
    # brute-force partition: g*H computed off the raw table
    expected = set()
    for g in range(6):
        expected.add(tuple(sorted(fx.s3.mult(g, h) for h in sub.member_indices)))
    assert set(dec.cosets) == expected


def test_d4_rotation_cosets(fx):
    dec = left_cosets(fx.d4, fx.d4_rot)
    assert len(dec.cosets) == 2
    assert all(len(c) == 4 for c in dec.cosets)


@pytest.mark.parametrize("sub_name", ["d4_rot", "d4_diag", "d4_kdiag", "s3_swap", "s3_alt"])
def test_cosets_partition_and_reps(fx, sub_name):
    sub = getattr(fx, sub_name)
    group = sub.parent
    dec = left_cosets(group, sub)
    seen = set()
    for coset, rep in zip(dec.cosets, dec.representatives):
        assert rep == min(coset)           # lexicographically smallest member
        assert rep in coset
        assert len(coset) == sub.order
        assert not (seen & set(coset))
        seen |= set(coset)
    assert seen == set(range(group.order))
    assert dec.representatives[0] == 0     # identity coset first
    assert set(dec.cosets[0]) == set(sub.member_indices)


def test_cosets_group_mismatch(fx):
    with pytest.raises(GroupMismatchError):
        left_cosets(fx.d4, fx.s3_swap)


# -- conjugacy classes -------------------------------------------------------


def test_trivial_subgroup_class(fx):
    cls = conjugacy_class_of_subgroup(fx.s3, trivial_subgroup(fx.s3))
    assert len(cls) == 1
    assert cls[0].member_indices == (0,)


def test_s3_transposition_class_brute_force(fx):
    cls = conjugacy_class_of_subgroup(fx.s3, fx.s3_swap)
    assert len(cls) == 3
    # brute-force conjugation of the member set by all 6 elements
    expected = set()
    for g in range(6):
        expected.add(tuple(sorted(fx.s3.conjugate(g, h) for h in fx.s3_swap.member_indices)))
    assert {c.member_indices for c in cls} == expected


def test_d4_rotation_subgroup_is_normal(fx):
    cls = conjugacy_class_of_subgroup(fx.d4, fx.d4_rot)
    assert len(cls) == 1


def test_d4_reflection_classes(fx):
    assert len(conjugacy_class_of_subgroup(fx.d4, fx.d4_diag)) == 2
    assert len(conjugacy_class_of_subgroup(fx.d4, fx.d4_edge)) == 2


def test_conjugates_have_equal_order(fx):
    for sub in [fx.d4_diag, fx.d4_edge, fx.d4_kdiag, fx.s3_swap]:
        for conj in conjugacy_class_of_subgroup(sub.parent, sub):
            assert conj.order == sub.order
