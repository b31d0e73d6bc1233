"""Shipped simplicial G-complexes."""
from __future__ import annotations

from functools import lru_cache

from .catalog_groups import catalog_group, dihedral_permutations
from .errors import UnknownFixture
from .gcomplex import SimplicialGComplex, find_orientation, product_action, product_complex
from .groups import FiniteGroup

# Nine-vertex CP^2: facets found as four orbits of the translation group of
# the affine plane over F_3 (vertex 3x + y is the point (x, y)).
CP2_9_FACETS = [
    (0, 1, 2, 3, 4), (0, 1, 2, 3, 5), (0, 1, 2, 4, 5), (0, 1, 3, 4, 6), (0, 1, 3, 5, 7), (0, 1, 3, 6, 7),
    (0, 1, 4, 5, 6), (0, 1, 5, 6, 8), (0, 1, 5, 7, 8), (0, 1, 6, 7, 8), (0, 2, 3, 4, 8), (0, 2, 3, 5, 8),
    (0, 2, 4, 5, 6), (0, 2, 4, 6, 7), (0, 2, 4, 7, 8), (0, 2, 5, 6, 8), (0, 2, 6, 7, 8), (0, 3, 4, 6, 7),
    (0, 3, 4, 7, 8), (0, 3, 5, 7, 8), (1, 2, 3, 4, 8), (1, 2, 3, 5, 7), (1, 2, 3, 6, 7), (1, 2, 3, 6, 8),
    (1, 2, 4, 5, 7), (1, 2, 4, 7, 8), (1, 2, 6, 7, 8), (1, 3, 4, 6, 8), (1, 4, 5, 6, 8), (1, 4, 5, 7, 8),
    (2, 3, 5, 6, 7), (2, 3, 5, 6, 8), (2, 4, 5, 6, 7), (3, 4, 5, 6, 7), (3, 4, 5, 6, 8), (3, 4, 5, 7, 8),
]

# Six-vertex real projective plane.
RP2_6_FACETS = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6), (2, 3, 5), (3, 4, 6), (2, 4, 5), (3, 5, 6), (2, 4, 6)]

# Octahedron vertices: 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z
OCT_ROT_Z = [1, 0, 3, 2, 4, 5]
OCT_ROT_X = [0, 1, 3, 2, 5, 4]
OCT_ROT_Y = [1, 0, 2, 3, 5, 4]
OCT_ANTIPODAL = [1, 0, 3, 2, 5, 4]


def _group_from_perms(perms, name):
    G = FiniteGroup.from_permutations(perms, name=name)
    return G, [list(p) for p in G.permutations]


def simplex_boundary(n: int, name: str = "") -> SimplicialGComplex:
    """Boundary of the (n+1)-simplex, oriented as the boundary of [0..n+1]."""
    verts = range(n + 2)
    facets = [tuple(v for v in verts if v != i) for i in verts]
    orient = {f: (-1) ** i for i, f in enumerate(facets)}
    return SimplicialGComplex(n + 2, facets, orientation=orient, name=name or f"boundary_simplex_{n + 1}")


def point() -> SimplicialGComplex:
    return SimplicialGComplex(1, [(0,)], orientation={(0,): 1}, name="point")


def octahedron(G: FiniteGroup | None = None, action=None, name: str = "octahedron") -> SimplicialGComplex:
    facets = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    orient = {f: (1 if f[0] == 0 else -1) * (1 if f[1] == 2 else -1) * (1 if f[2] == 4 else -1) for f in facets}
    return SimplicialGComplex(6, facets, G, action, orient, name)


def octahedron_rotation() -> SimplicialGComplex:
    G, act = _group_from_perms([OCT_ROT_Z], "Z2")
    return octahedron(G, act, "octahedron_rot2")


def octahedron_klein() -> SimplicialGComplex:
    G, act = _group_from_perms([OCT_ROT_X, OCT_ROT_Y], "V4")
    return octahedron(G, act, "octahedron_v4")


def octahedron_bad_action() -> SimplicialGComplex:
    """Swapping +x and +y alone carries the edge {+x,-y} to the non-edge {+y,-y}."""
    G, act = _group_from_perms([[2, 1, 0, 3, 4, 5]], "Z2")
    return octahedron(G, act, "octahedron_bad")


def torus7(with_action: bool = True) -> SimplicialGComplex:
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    c = SimplicialGComplex(7, facets, name="torus7")
    c = c.with_orientation(find_orientation(c))
    if with_action:
        G = FiniteGroup.cyclic(7)
        act = [[(v + g) % 7 for v in range(7)] for g in range(7)]
        c = c.with_action(G, act)
        c.name = "torus7_z7"
    return c


def cp2_9() -> SimplicialGComplex:
    c = SimplicialGComplex(9, CP2_9_FACETS, name="cp2_9")
    o = find_orientation(c)
    # global sign fixed so that the middle pairing is positive definite
    return c.with_orientation({k: -v for k, v in o.items()})


def rp2_6() -> SimplicialGComplex:
    return SimplicialGComplex(6, [tuple(v - 1 for v in f) for f in RP2_6_FACETS], name="rp2_6")


def _polygon(n: int):
    facets = [(i, (i + 1) % n) for i in range(n)]
    orient = {tuple(sorted(f)): (1 if f[0] < f[1] else -1) for f in facets}
    return facets, orient


def hexagon_s3() -> SimplicialGComplex:
    """S3 = D3 acting on a hexagon by r: i -> i+2 and s: i -> -i."""
    G = catalog_group("S3").group
    r3, s3 = dihedral_permutations(3)
    gi = {G.permutations.index(tuple(r3)): [(i + 2) % 6 for i in range(6)], G.permutations.index(tuple(s3)): [(-i) % 6 for i in range(6)]}
    facets, orient = _polygon(6)
    return SimplicialGComplex.from_generators(6, facets, G, gi, orient, name="hexagon_s3")


def octagon_d4() -> SimplicialGComplex:
    """D4 acting on an octagon by r: i -> i+2 and s: i -> -i."""
    G = catalog_group("D4").group
    r4, s4 = dihedral_permutations(4)
    gi = {G.permutations.index(tuple(r4)): [(i + 2) % 8 for i in range(8)], G.permutations.index(tuple(s4)): [(-i) % 8 for i in range(8)]}
    facets, orient = _polygon(8)
    return SimplicialGComplex.from_generators(8, facets, G, gi, orient, name="octagon_d4")


def s2xs2_swap() -> SimplicialGComplex:
    """Staircase product of two copies of the tetrahedron boundary with the factor swap."""
    K = simplex_boundary(2)
    P = product_complex(K, K, "s2xs2")
    swap = [(v % 4) * 4 + v // 4 for v in range(16)]
    G, act = _group_from_perms([swap], "Z2")
    c = P.with_action(G, act)
    c = c.with_orientation(find_orientation(c))
    c.name = "s2xs2_swap"
    return c


def oct2_antipodal() -> SimplicialGComplex:
    """Octahedron squared with the free involution (antipode, antipode)."""
    K = octahedron()
    P = product_complex(K, K, "oct2")
    G, act = _group_from_perms([product_action(K, K, OCT_ANTIPODAL, OCT_ANTIPODAL)], "Z2")
    c = P.with_action(G, act)
    c = c.with_orientation(find_orientation(c))
    c.name = "oct2_antipodal"
    return c


def disjoint_union(a: SimplicialGComplex, b: SimplicialGComplex, name: str = "") -> SimplicialGComplex:
    """Disjoint union with the trivial action; orientations carried over."""
    off = a.n_vertices
    facets = list(a.facets) + [tuple(v + off for v in f) for f in b.facets]
    orient = None
    if a.orientation is not None and b.orientation is not None:
        orient = dict(a.orientation)
        orient.update({tuple(v + off for v in f): s for f, s in b.orientation.items()})
    return SimplicialGComplex(a.n_vertices + b.n_vertices, facets, orientation=orient, name=name or f"{a.name}+{b.name}")


def with_trivial_action(c: SimplicialGComplex) -> SimplicialGComplex:
    out = SimplicialGComplex(c.n_vertices, c.facets, orientation=c.orientation, name=c.name)
    return out


COMPLEXES = {
    "point": point,
    "tetrahedron_boundary": lambda: simplex_boundary(2, "tetrahedron_boundary"),
    "octahedron": octahedron,
    "octahedron_rot2": octahedron_rotation,
    "octahedron_v4": octahedron_klein,
    "torus7_z7": torus7,
    "sphere4": lambda: simplex_boundary(4, "sphere4"),
    "cp2_9": cp2_9,
    "hexagon_s3": hexagon_s3,
    "octagon_d4": octagon_d4,
    "s2xs2_swap": s2xs2_swap,
    "oct2_antipodal": oct2_antipodal,
}


@lru_cache(maxsize=None)
def _cached(name: str) -> SimplicialGComplex:
    try:
        return COMPLEXES[name]()
    except KeyError:
        raise UnknownFixture(f"unknown complex {name!r}") from None


def complex_fixture(name: str) -> SimplicialGComplex:
    return _cached(name)


def complex_names() -> list[str]:
    return list(COMPLEXES)
