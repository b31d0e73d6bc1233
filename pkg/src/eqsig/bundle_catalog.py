"""Shipped bundle fixtures and their deliberately broken variants."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .bundles import EquivariantAtlas, PrincipalData, TransitionBundle, transitions_from
from .catalog_groups import catalog_group, dihedral_permutations, subgroup_irreps
from .complexes import OCT_ROT_X, OCT_ROT_Y, OCT_ROT_Z, hexagon_s3, octagon_d4, simplex_boundary
from .errors import UnknownFixture
from .gcomplex import SimplicialGComplex
from .groups import FiniteGroup, Subgroup
from .model import (
    NonNormalModel,
    automorphism_from,
    build_model,
    build_nonnormal_model,
    extend_automorphism,
    identity_automorphism,
)


def _sign(group_name: str, H: Subgroup):
    """The irreducible of an order-2 subgroup that is -1 on the generator."""
    for r in subgroup_irreps(group_name, H):
        if r.dim == 1 and abs(r.matrices[1, 0, 0] + 1) < 1e-9:
            return r
    raise AssertionError("no sign character")


def _rng_matrix(rng, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 2 * np.eye(n)


def _lift(model, a: int, B) -> object:
    if isinstance(model, NonNormalModel):
        return extend_automorphism(model, automorphism_from(model.inner, a, B))
    return automorphism_from(model, a, B)


def _pairwise(atlas: EquivariantAtlas, model, B_of, name: str) -> TransitionBundle:
    """One value per overlap, lying over the class the atlas dictates."""
    probe = TransitionBundle(atlas, model, {}, name)
    values = {}
    for pair, cells in sorted(atlas.overlaps.items()):
        a = probe.base_element(atlas.class_of(*pair, cells[0]))
        values[pair] = _lift(model, a, B_of(pair))
    return TransitionBundle(atlas, model, transitions_from(atlas, values), name)


def _cycle(n: int):
    return [(i, (i + 1) % n) for i in range(n)]


def z4_arc_cover() -> TransitionBundle:
    """Z/4 with H = {0, 2} over the 8-cycle; the odd elements rotate by half a turn.

    The orbit space is a 4-cycle covered by four vertex stars; the overlap
    between the first and last chart carries the nontrivial class.
    """
    G = catalog_group("Z4").group
    H = Subgroup(G, (0, 2))
    act = [[(v + 4 * (g % 2)) % 8 for v in range(8)] for g in range(4)]
    M = SimplicialGComplex(8, _cycle(8), G, act, name="z4_cycle8")
    atlas = EquivariantAtlas(M, H, [0, 1, 2, 3], name="z4_arc_cover")
    model = build_model(G, H, _sign("Z4", H))
    scal = {(0, 1): 2.0, (1, 2): 0.5 + 1j, (2, 3): -1.5, (0, 3): 1j}
    return _pairwise(atlas, model, lambda p: [[scal[p]]], "z4_arc_cover")


def _kernel_cocycle_atlas():
    G = catalog_group("Z2").group
    base = simplex_boundary(2)
    M = SimplicialGComplex(4, base.facets, G, [list(range(4))] * 2, name="tetra_trivial_z2")
    H = Subgroup.whole(G)
    return G, H, EquivariantAtlas(M, H, [0, 1, 2, 3], name="kernel_cocycle_s2")


def kernel_cocycle_s2() -> TransitionBundle:
    """Fiber-only GL(2) cocycle C_b C_a^-1 on the tetrahedron boundary (G0 trivial)."""
    G, H, atlas = _kernel_cocycle_atlas()
    model = build_model(G, H, _sign("Z2", H), f_dim=2)
    rng = np.random.default_rng(11)
    C = [_rng_matrix(rng, 2) for _ in range(4)]
    return _pairwise(atlas, model, lambda p: C[p[1]] @ np.linalg.inv(C[p[0]]), "kernel_cocycle_s2")


def q8_center() -> TransitionBundle:
    """Q8 over its centre with the sign character; base M = tetrahedron boundary x Q8/Z."""
    G = catalog_group("Q8").group
    minus = G.labels.index("-1")
    H = Subgroup(G, (0, minus))
    model = build_model(G, H, _sign("Q8", H), f_dim=2)
    base = simplex_boundary(2)
    npts = model.n_points
    facets = [tuple(x * npts + q for x in f) for f in base.facets for q in range(npts)]
    act = [[(w // npts) * npts + int(model.target[w % npts, g]) for w in range(4 * npts)] for g in range(G.order)]
    M = SimplicialGComplex(4 * npts, facets, G, act, name="tetra_x_v4")
    offsets = [0, 1, 2, 3]
    atlas = EquivariantAtlas(M, H, [x * npts + offsets[x] for x in range(4)], name="q8_center")
    rng = np.random.default_rng(5)
    C = [_rng_matrix(rng, 2) for _ in range(4)]
    probe = TransitionBundle(atlas, model, {}, "q8_center")
    L = [automorphism_from(model, probe.base_element(c), np.eye(2)) for c in offsets]
    values = {}
    for (x, y) in atlas.overlaps:
        K = automorphism_from(model, 0, C[y] @ np.linalg.inv(C[x]))
        values[(x, y)] = L[x] * K * L[y].inverse()
    return TransitionBundle(atlas, model, transitions_from(atlas, values), "q8_center")


def octahedron_poles() -> TransitionBundle:
    """V4 rotations of the octahedron restricted to the z-poles, H the z-rotation."""
    G = FiniteGroup.from_permutations([OCT_ROT_X, OCT_ROT_Y], name="V4")
    perms = [list(p) for p in G.permutations]
    hz = perms.index(OCT_ROT_Z)
    H = Subgroup(G, (0, hz))
    act = [[p[4] - 4, p[5] - 4] for p in perms]
    M = SimplicialGComplex(2, [(0,), (1,)], G, act, name="octahedron_poles")
    atlas = EquivariantAtlas(M, H, [0], name="octahedron_poles")
    rho = next(r for r in _subgroup_reps(H) if abs(r.matrices[1, 0, 0] + 1) < 1e-9)
    model = build_model(G, H, rho)
    return TransitionBundle(atlas, model, {}, "octahedron_poles")


def _subgroup_reps(H: Subgroup):
    from .reps import group_irreps

    return group_irreps(H.as_group())


def _circle_bundle(G: FiniteGroup, group_name: str, s: int, strand_action, strands: list[int], lifts: list[tuple[int, int]], name: str, seed: int) -> TransitionBundle:
    """Copies of a 3-cycle indexed by polygon vertices, moved by the polygon action."""
    pos = {v: k for k, v in enumerate(strands)}
    n = 3 * len(strands)
    facets = [(3 * k + j, 3 * k + (j + 1) % 3) for k in range(len(strands)) for j in range(3)]
    act = [[3 * pos[int(strand_action[g, strands[w // 3]])] + w % 3 for w in range(n)] for g in range(G.order)]
    M = SimplicialGComplex(n, facets, G, act, name=f"{name}_base")
    H = Subgroup(G, (0, s))
    nn, _ = build_nonnormal_model(G, H, _sign(group_name, H), f_dim=2)
    atlas = EquivariantAtlas(M, H, [3 * pos[i] + j for i, j in lifts], name=name)
    rng = np.random.default_rng(seed)
    B = {}
    return _pairwise(atlas, nn, lambda p: B.setdefault(p, _rng_matrix(rng, 2)), name)


def s3_reflection() -> TransitionBundle:
    """S3 acting on six 3-cycles through the hexagon; H a reflection, so N(H) = H."""
    c = hexagon_s3()
    G = c.G
    _, s3 = dihedral_permutations(3)
    s = G.permutations.index(tuple(s3))
    lifts = [(0, 0), (0, 1), (0, 2), (3, 0), (3, 1), (3, 2)]
    return _circle_bundle(G, "S3", s, c.action, list(range(6)), lifts, "s3_reflection", 3)


def d4_reflection() -> TransitionBundle:
    """D4 on the even octagon vertices times a 3-cycle; N(H)/H = Z/2 swaps 0 and 4."""
    c = octagon_d4()
    G = c.G
    _, s4 = dihedral_permutations(4)
    s = G.permutations.index(tuple(s4))
    lifts = [(0, 0), (4, 1), (0, 2)]
    return _circle_bundle(G, "D4", s, c.action, [0, 2, 4, 6], lifts, "d4_reflection", 4)


def z2_mobius_principal() -> PrincipalData:
    """Principal data over a 4-cycle with the nontrivial class on one edge."""
    G = catalog_group("Z2").group
    H = Subgroup.trivial(G)
    rho = _subgroup_reps(H)[0]
    model = build_model(G, H, rho)
    cells = [(0,), (1,), (2,), (3,), (0, 1), (0, 3), (1, 2), (2, 3)]
    I = identity_automorphism(model)
    flip = automorphism_from(model, 1, np.eye(1))
    tr = {(0, 1): {(0, 1): I}, (1, 2): {(1, 2): I}, (2, 3): {(2, 3): I}, (0, 3): {(0, 3): flip}}
    return PrincipalData(4, cells, model, tr, "z2_mobius")


# -- mutations ------------------------------------------------------------------


def broken_cocycle() -> TransitionBundle:
    """The kernel cocycle with Psi_01 rescaled on the single face (0, 1, 2)."""
    b = kernel_cocycle_s2()
    tr = {p: dict(t) for p, t in b.transitions.items()}
    A = tr[(0, 1)][(0, 1, 2)]
    tr[(0, 1)][(0, 1, 2)] = A.mutated(0, 2.0 * A.blocks[0])
    return TransitionBundle(b.atlas, b.model, tr, "broken_cocycle")


def broken_atlas() -> TransitionBundle:
    """A half-turn on the 4-cycle with two charts: U_0 meets both translates of U_1."""
    G = catalog_group("Z2").group
    H = Subgroup.trivial(G)
    M = SimplicialGComplex(4, _cycle(4), G, [[0, 1, 2, 3], [2, 3, 0, 1]], name="z2_cycle4")
    atlas = EquivariantAtlas(M, H, [0, 1], name="broken_atlas")
    model = build_model(G, H, _subgroup_reps(H)[0])
    I = identity_automorphism(model)
    return TransitionBundle(atlas, model, transitions_from(atlas, {p: I for p in atlas.overlaps}), "broken_atlas")


BUNDLES = {
    "z4_arc_cover": z4_arc_cover,
    "kernel_cocycle_s2": kernel_cocycle_s2,
    "q8_center": q8_center,
    "octahedron_poles": octahedron_poles,
    "s3_reflection": s3_reflection,
    "d4_reflection": d4_reflection,
}

MUTATIONS = {
    "broken_cocycle": broken_cocycle,
    "broken_atlas": broken_atlas,
}


@lru_cache(maxsize=None)
def bundle_fixture(name: str) -> TransitionBundle:
    builder = BUNDLES.get(name) or MUTATIONS.get(name)
    if builder is None:
        raise UnknownFixture(f"unknown bundle {name!r}")
    return builder()


def bundle_names(include_mutations: bool = False) -> list[str]:
    return list(BUNDLES) + (list(MUTATIONS) if include_mutations else [])
