import json
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.combinatorics import Permutation as SymPerm
from sympy.combinatorics import PermutationGroup

from noetherp.perm import (BudgetExceeded, GroupSpec, IndexOutOfRange, NotAMember, Permutation, WreathElement,
                           all_exponent_vectors, block_rotation_total, enumerate_group, generator_indices,
                           is_member, kernel_contains, kernel_group, normal_form, order_exponent,
                           orientation_group, orientation_group_full, phi, product_of, sigma, sylow_group,
                           sylow_in_kernel_check, wreath_conjugation_check, wreath_group_elements)


def sympy_order(g: GroupSpec) -> int:
    gens = [SymPerm([x - 1 for x in perm.images]) for perm in g.perms()]
    if not gens:
        return 1
    return PermutationGroup(gens).order()


def legendre_by_division(n: int, p: int) -> int:
    f, k = factorial(n), 0
    while f % p == 0:
        f //= p
        k += 1
    return k


MATRIX = [(4, 2), (6, 2), (8, 2), (13, 2), (6, 3), (9, 3), (10, 5)]


@pytest.mark.parametrize("n,p", MATRIX)
def test_order_exponent_matches_direct_division(n, p):
    assert order_exponent(n, p) == legendre_by_division(n, p)


@pytest.mark.parametrize("n,p", MATRIX)
def test_sylow_order_matches_sympy(n, p):
    g = sylow_group(n, p)
    assert sympy_order(g) == p ** order_exponent(n, p)


@pytest.mark.parametrize("n,p", MATRIX)
def test_orientation_order_matches_sympy(n, p):
    assert sympy_order(orientation_group(n, p)) * p == sympy_order(sylow_group(n, p))


def test_sigma_example_and_range():
    assert sigma(13, 2, (2, 1)).cycle_text() == "(1 5)(2 6)(3 7)(4 8)"
    assert sigma(9, 3, (1, 1)).cycle_text() == "(1 4 7)(2 5 8)(3 6 9)"
    with pytest.raises(IndexOutOfRange):
        sigma(13, 2, (3, 1))
    with pytest.raises(IndexOutOfRange):
        sigma(13, 2, (0, 7))


def test_generator_count_for_13_2():
    assert len(generator_indices(13, 2)) == 10


def test_orientation_generators_4_2():
    cyc = [g.cycle_text() for g in orientation_group(4, 2).perms()]
    assert cyc == ["(1 2)(3 4)", "(1 3)(2 4)"]


def test_full_family_generates_same_group():
    a = set(enumerate_group(orientation_group(8, 2)))
    b = set(enumerate_group(orientation_group_full(8, 2)))
    assert a == b


def test_composition_convention():
    a = Permutation.from_cycles(3, [(1, 2)])
    b = Permutation.from_cycles(3, [(2, 3)])
    assert (a * b)(2) == a(b(2)) == 3
    assert (a * b)(1) == 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=6))
def test_block_rotation_total_is_a_homomorphism(words):
    gens = sylow_group(9, 3).perms()
    elems = [gens[w % len(gens)] for w in words]
    x = Permutation.identity(9)
    total = 0
    for e in elems:
        x = x * e
        total += block_rotation_total(e, 3)
    assert block_rotation_total(x, 3) == total % 3


@pytest.mark.parametrize("n,p", [(4, 2), (8, 2), (9, 3)])
def test_orientation_group_is_kernel_of_rotation_total(n, p):
    h = set(enumerate_group(orientation_group(n, p)))
    for x in enumerate_group(sylow_group(n, p)):
        assert (x in h) == (block_rotation_total(x, p) == 0)


@pytest.mark.parametrize("n,p", [(8, 2), (9, 3)])
def test_normal_form_roundtrip(n, p):
    g = sylow_group(n, p)
    for x in enumerate_group(g)[:40]:
        assert product_of(g, normal_form(g, x)) == x


def test_normal_form_rejects_non_members():
    g = sylow_group(4, 2)
    with pytest.raises(NotAMember):
        normal_form(g, Permutation.from_cycles(4, [(1, 2, 3)]))
    assert not is_member(g, Permutation.from_cycles(4, [(1, 2, 3)]))


def test_enumeration_cap():
    with pytest.raises(BudgetExceeded):
        enumerate_group(sylow_group(8, 2), cap=10)


def test_all_exponent_vectors_count():
    assert sum(1 for _ in all_exponent_vectors(9, 3)) == 81


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_wreath_embedding_is_a_homomorphism(data):
    elems = wreath_group_elements(2, 3)
    a = data.draw(st.sampled_from(elems))
    b = data.draw(st.sampled_from(elems))
    assert (a * b).to_permutation() == a.to_permutation() * b.to_permutation()
    assert WreathElement.from_permutation(a.to_permutation(), 3) == a
    assert phi(a * b) == (phi(a) + phi(b)) % 3


@pytest.mark.parametrize("p,m", [(2, 2), (2, 3), (3, 2)])
def test_wreath_conjugation(p, m):
    assert wreath_conjugation_check(p, m)


@pytest.mark.parametrize("n,p", [(2, 2), (3, 3), (2, 3)])
def test_kernel_group_order_and_membership(n, p):
    elems = enumerate_group(kernel_group(n, p))
    assert len(elems) == factorial(n) * p ** (n - 1)
    assert all(kernel_contains(WreathElement.from_permutation(x, p)) for x in elems)
    full = [w for w in wreath_group_elements(n, p) if kernel_contains(w)]
    assert len(full) == len(elems)


@pytest.mark.parametrize("n,p", [(1, 3), (2, 2), (3, 3), (2, 3)])
def test_sylow_in_kernel(n, p):
    rep = sylow_in_kernel_check(n, p)
    assert rep["pass"]


def test_group_spec_json_roundtrip():
    g = orientation_group(6, 3)
    d = json.loads(g.to_json())
    assert GroupSpec.from_dict(d) == g
    with pytest.raises(ValueError):
        GroupSpec(3, 3, "nope")
