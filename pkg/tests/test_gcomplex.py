import numpy as np
import pytest
from hypothesis import given, strategies as st

from eqsig.complexes import complex_fixture, complex_names, octahedron_bad_action, rp2_6, torus7
from eqsig.errors import NotClosed, NotMaximal, NotOrientable, NotRegular
from eqsig.gcomplex import (
    SimplicialGComplex,
    barycentric_subdivision,
    conner_floyd_split,
    find_orientation,
    fixed_subcomplex,
    perm_sign,
    quotient_complex,
    regularize,
    stratify,
    validate_action,
)
from eqsig.groups import FiniteGroup, Subgroup, all_subgroups

F_VECTORS = {
    "point": (1,),
    "tetrahedron_boundary": (4, 6, 4),
    "octahedron": (6, 12, 8),
    "torus7_z7": (7, 21, 14),
    "sphere4": (6, 15, 20, 15, 6),
    "cp2_9": (9, 36, 84, 90, 36),
}


@pytest.mark.parametrize("name", complex_names())
def test_fixture_actions_valid(name):
    c = complex_fixture(name)
    rep = validate_action(c)
    assert rep.passed, rep.violations


@pytest.mark.parametrize("name", sorted(F_VECTORS))
def test_f_vectors(name):
    assert complex_fixture(name).f_vector == F_VECTORS[name]


def test_bad_action_witness():
    rep = validate_action(octahedron_bad_action())
    assert not rep.passed
    kind, info = rep.violations[0]
    assert kind == "simplex mapped outside the complex"
    assert info["image"] not in [list(s) for s in octahedron_bad_action().simplices[len(info["image"]) - 1]]


@given(st.permutations(range(5)))
def test_perm_sign(p):
    inversions = sum(1 for i in range(5) for j in range(i + 1, 5) if p[i] > p[j])
    assert perm_sign(p) == (-1) ** inversions


def test_orientation_errors():
    with pytest.raises(NotOrientable):
        find_orientation(rp2_6())
    disk = SimplicialGComplex(3, [(0, 1, 2)])
    with pytest.raises(NotClosed):
        find_orientation(disk)


@pytest.mark.parametrize("name", complex_names())
def test_subdivision_keeps_euler_and_action(name):
    c = complex_fixture(name)
    if sum(c.f_vector) > 400:
        pytest.skip("large")
    sd = barycentric_subdivision(c)
    assert sd.euler_characteristic() == c.euler_characteristic()
    assert sd.f_vector[0] == sum(c.f_vector)
    assert validate_action(sd).passed
    assert sd.is_regular()


def test_regularize_needs_subdivision():
    # the reflection of a triangle flips the edge {1, 2}
    G = FiniteGroup.cyclic(2)
    c = SimplicialGComplex(3, [(0, 1), (1, 2), (0, 2)], G, [[0, 1, 2], [0, 2, 1]])
    assert not c.is_regular()
    r, steps = regularize(c)
    assert steps == 1 and r.is_regular()
    with pytest.raises(NotRegular):
        regularize(c, max_subdivisions=0)
    with pytest.raises(NotRegular):
        quotient_complex(c)


@pytest.mark.parametrize("name", [n for n in complex_names() if complex_fixture(n).G.order > 1])
def test_stratification(name):
    c, _ = regularize(complex_fixture(name))
    st_ = stratify(c)
    assert st_.report.passed, st_.report.violations
    total = sum(st_.cardinalities().values())
    assert total == sum(c.f_vector)
    # each stratum is exactly the simplices with that isotropy
    for H, cells in st_.strata.items():
        for k, s in cells:
            assert c.isotropy(s) == H


def test_torus_free_quotient():
    c = torus7()
    q = quotient_complex(c)
    assert [len(x) for x in q.cells] == [1, 3, 2]
    assert q.euler_characteristic() * 7 == c.euler_characteristic()


def test_conner_floyd_on_octahedron():
    c, _ = regularize(complex_fixture("octahedron_v4"))
    G = c.G
    for H in all_subgroups(G):
        if H.order != 2:
            continue
        sp = conner_floyd_split(c, H)
        assert sp.report.passed, sp.report.violations
        assert len(sp.components) == G.order // sp.N.order


def test_conner_floyd_rejects_non_maximal():
    c, _ = regularize(complex_fixture("octahedron_v4"))
    with pytest.raises(NotMaximal):
        conner_floyd_split(c, Subgroup.trivial(c.G))


def test_fixed_subcomplex_closed():
    c, _ = regularize(complex_fixture("octahedron_rot2"))
    for H in all_subgroups(c.G):
        assert fixed_subcomplex(c, H).is_closed_under_faces()


def test_from_generators_matches_table():
    c = complex_fixture("hexagon_s3")
    G = c.G
    for g in range(G.order):
        for h in range(G.order):
            assert np.array_equal(c.action[G.m(g, h)], c.action[g][c.action[h]])


def test_trivial_group_default():
    c = SimplicialGComplex(3, [(0, 1), (1, 2), (0, 2)])
    assert c.G.order == 1
    assert isinstance(c.G, FiniteGroup)
    assert validate_action(c).passed
