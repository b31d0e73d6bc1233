import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqsig.bundle_catalog import _lift, bundle_fixture, bundle_names, z2_mobius_principal
from eqsig.bundles import (
    CocycleFailure,
    EquivariantAtlas,
    PrincipalData,
    TransitionBundle,
    check_cocycle,
    classification_pairing,
    equivariant_isomorphism,
    from_principal,
    reduce_to_normal,
    round_trip,
    split_by_conjugates,
    to_principal,
    trivial_bundle,
    validate_atlas,
)
from eqsig.gcomplex import Subcomplex
from eqsig.model import identity_automorphism, lift_intertwiner, verify_automorphism

NAMES = bundle_names()


def _conjugates(b1, b2, w):
    for (x, y), cells in b1.atlas.overlaps.items():
        for key in cells:
            rhs = w.chart_maps[x].inverse() * b1.value(x, y, key) * w.chart_maps[y]
            if not b2.value(x, y, key).close(rhs, 1e-7):
                return False
    return True


def _equivariant(b1, b2, vmap):
    M1, M2 = b1.atlas.M, b2.atlas.M
    return all(np.array_equal(vmap[M1.action[g]], M2.action[g][vmap]) for g in range(M1.G.order))


@pytest.mark.parametrize("name", NAMES)
def test_fixture_is_cocycle(name):
    b = bundle_fixture(name)
    assert validate_atlas(b.atlas).passed
    rep = check_cocycle(b)
    assert rep.passed, rep.violations


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_witness(name):
    b = bundle_fixture(name)
    b2, w = round_trip(b)
    assert w is not None
    assert check_cocycle(b2).passed
    assert all(verify_automorphism(h).passed for h in w.chart_maps)
    assert _conjugates(b, b2, w)
    assert _equivariant(b, b2, w.vertex_map)
    assert sorted(w.vertex_map.tolist()) == list(range(b2.atlas.M.n_vertices))


@pytest.mark.parametrize("name", NAMES)
def test_trivial_bundle(name):
    b = bundle_fixture(name)
    t = trivial_bundle(b.atlas, b.model)
    rep = check_cocycle(t)
    assert rep.passed, rep.violations


def _gauge(b, seed):
    """Regauge every chart by a random automorphism; lifts move with pr of the gauge."""
    rng = np.random.default_rng(seed)
    m, at = b.model, b.atlas
    G0, f = m.base_group, m.f_dim
    inner = getattr(m, "inner", m)
    liftable = [a for a in range(G0.order) if lift_intertwiner(inner, a) is not None]
    cs = [int(rng.choice(liftable)) for _ in range(at.n_charts)]
    h = [_lift(m, c, rng.standard_normal((f, f)) + 1j * rng.standard_normal((f, f)) + 2 * np.eye(f)) for c in cs]
    lifts = [at.vertex(x, int(m.right[0, G0.i(c)])) for x, c in enumerate(cs)]
    atlas = EquivariantAtlas(at.M, at.H, lifts, name=f"{at.name} regauged")
    tr = {p: {k: h[p[0]].inverse() * A * h[p[1]] for k, A in t.items()} for p, t in b.transitions.items()}
    return TransitionBundle(atlas, m, tr, f"{b.name} regauged")


@settings(max_examples=12)
@given(st.sampled_from(NAMES), st.integers(0, 2 ** 32 - 1))
def test_regauged_bundles_are_isomorphic(name, seed):
    b = bundle_fixture(name)
    b2 = _gauge(b, seed)
    assert check_cocycle(b2).passed
    w = equivariant_isomorphism(b, b2)
    assert w is not None
    assert _conjugates(b, b2, w)


def test_nonisomorphic_pair():
    """The Moebius cover is connected; the product cover is not."""
    p = z2_mobius_principal()
    M1, b1 = from_principal(p)
    I = identity_automorphism(p.model)
    M2, b2 = from_principal(PrincipalData(4, p.cells, p.model, {k: {c: I for c in v} for k, v in p.transitions.items()}))
    assert check_cocycle(b1).passed and check_cocycle(b2).passed
    comps = [len(Subcomplex(M, [set(x) for x in M.simplices]).components()) for M in (M1, M2)]
    assert comps == [1, 2]
    assert equivariant_isomorphism(b1, b2) is None
    assert equivariant_isomorphism(b1, b1) is not None


def test_principal_classes_cocycle():
    b = bundle_fixture("q8_center")
    p = to_principal(b)
    cls = p.classes()
    G0 = b.model.base_group
    for key in b.atlas.cells:
        for i in range(len(key)):
            for j in range(i + 1, len(key)):
                for k in range(j + 1, len(key)):
                    x, y, z = key[i], key[j], key[k]
                    assert G0.m(cls[(x, y, key)], cls[(y, z, key)]) == cls[(x, z, key)]


def test_broken_cocycle_witness():
    b = bundle_fixture("broken_cocycle")
    rep = check_cocycle(b)
    assert not rep.passed
    kinds = [v[0] for v in rep.violations]
    assert "cocycle" in kinds
    cyc = next(v[1] for v in rep.violations if v[0] == "cocycle")
    assert cyc["cell"] == [0, 1, 2]
    with pytest.raises(CocycleFailure):
        to_principal(b)


def test_broken_atlas_witness():
    b = bundle_fixture("broken_atlas")
    rep = validate_atlas(b.atlas)
    assert not rep.passed
    kind, info = rep.violations[0]
    assert kind == "U_a meets several translates of U_b"
    assert info["translates"] == [0, 1]
    assert not check_cocycle(b).passed


def test_s3_split():
    b = bundle_fixture("s3_reflection")
    sp = split_by_conjugates(b)
    assert sp.report.passed, sp.report.violations
    assert len(sp.components) == 3
    verts = [set(c.vertices) for c in sp.components]
    assert all(not (verts[i] & verts[j]) for i in range(3) for j in range(i + 1, 3))
    assert set().union(*verts) == set(range(b.atlas.M.n_vertices))
    subgroups = {c.subgroup for c in sp.components}
    assert len(subgroups) == 3


@pytest.mark.parametrize("name,components,deck", [("s3_reflection", 3, 1), ("d4_reflection", 2, 2)])
def test_reduce_to_normal(name, components, deck):
    b = bundle_fixture(name)
    r = reduce_to_normal(b)
    assert r.report.passed, r.report.violations
    assert r.report.notes["deck_group_order"] == deck
    assert split_by_conjugates(b).report.notes["components"] == components
    rebuilt = r.reconstruct()
    assert check_cocycle(rebuilt).passed
    assert equivariant_isomorphism(b, rebuilt) is not None


def test_classification_records():
    recs = classification_pairing([reduce_to_normal(bundle_fixture(n)) for n in ("s3_reflection", "d4_reflection", "z4_arc_cover")])
    assert recs.passed
    rows = recs.notes["records"]
    assert [r["bundle"] for r in rows].count("s3_reflection on M^H") == 2
    assert all(r["deck_action_free"] for r in rows)
    assert {r["deck_group_order"] for r in rows} == {1, 2}
