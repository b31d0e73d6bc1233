import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy.combinatorics import Permutation, PermutationGroup

from eqsig.catalog_groups import catalog_group, dihedral_permutations, group_names
from eqsig.errors import BadTransversal, NotNormal
from eqsig.groups import (
    FiniteGroup,
    Subgroup,
    all_subgroups,
    center,
    conjugation_iso,
    is_conjugation_closed,
    make_h_section,
    max_families,
    normalizer,
    quotient,
)

# classical subgroup counts
SUBGROUP_COUNTS = {"Z1": 1, "Z6": 4, "Z12": 6, "Z16": 5, "V4": 5, "Z2xZ2xZ2": 16, "Z3xZ3": 6, "Z2xZ4": 8,
                   "S3": 6, "D4": 10, "D5": 8, "D6": 16, "Q8": 6, "A4": 10, "Z2xS3": 16, "Dic3": 8}

# the fourteen groups of order 16: (subgroups, normal subgroups, exponent of the center)
ORDER16 = {
    "Z16": (5, 5, 16), "Z4xZ4": (15, 15, 4), "Z4xZ2sdZ2": (23, 11, 2), "Z4sdZ4": (15, 11, 2),
    "Z2xZ8": (11, 11, 8), "M16": (11, 9, 4), "D8": (19, 7, 2), "SD16": (15, 7, 2), "Q16": (11, 7, 2),
    "Z2xZ2xZ4": (27, 27, 4), "Z2xD4": (35, 19, 2), "Z2xQ8": (19, 19, 2), "Pauli": (23, 17, 4),
    "Z2xZ2xZ2xZ2": (67, 67, 2),
}


@pytest.mark.parametrize("name", group_names())
def test_catalog_groups_are_groups(name):
    G = catalog_group(name).group
    G._check_axioms()
    for a in range(G.order):
        assert G.m(a, G.i(a)) == 0


@pytest.mark.parametrize("name", sorted(SUBGROUP_COUNTS))
def test_subgroup_counts(name):
    assert len(all_subgroups(catalog_group(name).group)) == SUBGROUP_COUNTS[name]


def _order(G, g):
    k, x = 1, g
    while x != 0:
        x, k = G.m(x, g), k + 1
    return k


@pytest.mark.parametrize("name", sorted(ORDER16))
def test_order16_isomorphism_types(name):
    G = catalog_group(name).group
    subs = all_subgroups(G)
    center = [g for g in range(G.order) if all(G.m(g, h) == G.m(h, g) for h in range(G.order))]
    assert G.order == 16
    assert (len(subs), sum(H.is_normal() for H in subs), max(_order(G, z) for z in center)) == ORDER16[name]


def test_order16_catalog_is_complete():
    assert sorted(n for n in group_names() if catalog_group(n).group.order == 16) == sorted(ORDER16)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_dihedral_against_sympy(n):
    r, s = dihedral_permutations(n)
    G = FiniteGroup.from_permutations([r, s])
    P = PermutationGroup([Permutation(r), Permutation(s)])
    assert G.order == P.order()
    assert len(G.conjugacy_classes) == len(P.conjugacy_classes())
    assert center(G).order == P.center().order()


def test_from_permutations_composition():
    G = FiniteGroup.from_permutations([[1, 2, 0], [1, 0, 2]])
    perms = [tuple(p) for p in G.permutations]
    for a in range(G.order):
        for b in range(G.order):
            comp = tuple(perms[a][perms[b][x]] for x in range(3))
            assert perms[G.m(a, b)] == comp


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        FiniteGroup([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        Subgroup(FiniteGroup.cyclic(4), (0, 1))


def test_quotient_and_normality():
    G = catalog_group("S3").group
    A3 = Subgroup(G, tuple(g for g in range(6) if G.element_order(g) != 2))
    q = quotient(G, A3)
    assert q.group.order == 2
    assert G.is_homomorphism(q.group, q.proj)
    refl = Subgroup(G, (0, next(g for g in range(6) if G.element_order(g) == 2)))
    with pytest.raises(NotNormal):
        quotient(G, refl)
    assert normalizer(G, refl) == refl


@pytest.mark.parametrize("name", ["D4", "Q8", "A4", "Z2xS3", "Z4xZ4"])
def test_sections_every_normal_subgroup(name):
    G = catalog_group(name).group
    for H in all_subgroups(G):
        if not H.is_normal():
            continue
        sec = make_h_section(G, H)
        sec.verify()
        alt = [0] + [max(c) for c in sec.quotient.cosets[1:]]
        make_h_section(G, H, alt).verify()


def test_bad_transversal():
    G = FiniteGroup.cyclic(4)
    H = Subgroup(G, (0, 2))
    with pytest.raises(BadTransversal):
        make_h_section(G, H, [0, 2])
    with pytest.raises(BadTransversal):
        make_h_section(G, H, [2, 1])


@given(st.sampled_from(["D4", "Q8", "A4", "Z2xS3"]), st.data())
def test_conjugation_iso_is_homomorphism(name, data):
    G = catalog_group(name).group
    subs = all_subgroups(G)
    H = data.draw(st.sampled_from(subs))
    g = data.draw(st.integers(0, G.order - 1))
    s = conjugation_iso(G, H, g)
    assert s.target == normalizer(G, H.conjugate(g))


def test_isotropy_families():
    G = catalog_group("D4").group
    fam = all_subgroups(G)
    assert is_conjugation_closed(fam)
    layers = max_families(fam)
    assert layers[0] == [Subgroup.whole(G)]
    assert layers[-1] == [Subgroup.trivial(G)]
    assert sum(len(x) for x in layers) == len(fam)


@given(st.integers(1, 16))
def test_cyclic_orders(n):
    G = FiniteGroup.cyclic(n)
    assert max(G.element_order(g) for g in range(n)) == n
    assert G.is_abelian()
    assert np.array_equal(np.sort(G.class_of), np.arange(n))
