"""Finite simplicial complexes with simplicial actions of a finite group."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import NotClosed, NotMaximal, NotOrientable, NotRegular
from .exactmath import RatMatrix
from .groups import FiniteGroup, Subgroup, max_families, normalizer
from .model import CheckReport

Simplex = tuple[int, ...]


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    s = list(seq)
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


class SimplicialGComplex:
    """Simplicial complex generated by its facets, with a vertex action of G.

    ``action[g]`` is the vertex permutation of g (an int array).  The
    orientation, if present, maps each top simplex (sorted tuple) to +1/-1
    relative to its sorted vertex order.
    """

    def __init__(self, n_vertices: int, facets: Iterable[Sequence[int]], G: FiniteGroup | None = None, action=None, orientation: Mapping[Simplex, int] | None = None, name: str = ""):
        self.n_vertices = int(n_vertices)
        self.name = name
        facets = sorted({tuple(sorted(int(v) for v in f)) for f in facets})
        for f in facets:
            if len(set(f)) != len(f):
                raise ValueError(f"repeated vertex in simplex {f}")
            if f and (f[0] < 0 or f[-1] >= self.n_vertices):
                raise ValueError(f"vertex out of range in {f}")
        dim = max((len(f) - 1 for f in facets), default=-1)
        layers: list[set] = [set() for _ in range(dim + 1)]
        for f in facets:
            for k in range(len(f)):
                layers[k].update(combinations(f, k + 1))
        layers[0].update((v,) for v in range(self.n_vertices))
        self.simplices: list[list[Simplex]] = [sorted(s) for s in layers]
        self.index: list[dict[Simplex, int]] = [{s: i for i, s in enumerate(lst)} for lst in self.simplices]
        self.dim = dim
        self.facets = facets
        if G is None:
            G = FiniteGroup.cyclic(1)
            action = [list(range(self.n_vertices))]
        self.G = G
        self.action = np.asarray(action, dtype=np.int64).reshape(G.order, self.n_vertices)
        self.orientation = None if orientation is None else {tuple(sorted(k)): int(v) for k, v in orientation.items()}

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_generators(cls, n_vertices: int, facets, G: FiniteGroup, generator_images: Mapping[int, Sequence[int]], orientation=None, name: str = "") -> "SimplicialGComplex":
        """Action determined by the vertex permutations of some generators of G."""
        gens = list(generator_images)
        tree = G.words(gens)
        act = [None] * G.order
        act[0] = np.arange(n_vertices)
        order = sorted(range(G.order), key=lambda x: _depth(tree, x))
        for x in order:
            if x == 0:
                continue
            parent, gen = tree[x]
            # x = parent * gen
            act[x] = act[parent][np.asarray(generator_images[gen])]
        return cls(n_vertices, facets, G, np.stack(act), orientation, name)

    def with_orientation(self, orientation) -> "SimplicialGComplex":
        return SimplicialGComplex(self.n_vertices, self.facets, self.G, self.action, orientation, self.name)

    def with_action(self, G: FiniteGroup, action) -> "SimplicialGComplex":
        return SimplicialGComplex(self.n_vertices, self.facets, G, action, self.orientation, self.name)

    def reversed(self) -> "SimplicialGComplex":
        if self.orientation is None:
            raise ValueError("complex has no orientation")
        return self.with_orientation({k: -v for k, v in self.orientation.items()})

    # -- basic data ------------------------------------------------------------

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def image(self, g: int, s: Simplex) -> tuple[Simplex, int]:
        """g applied to the oriented simplex s: (sorted image, sign)."""
        img = [int(self.action[g, v]) for v in s]
        return tuple(sorted(img)), perm_sign(img)

    @cached_property
    def simplex_action(self) -> list[np.ndarray]:
        """Per dimension: array (|G|, count) of image indices."""
        out = []
        for k, lst in enumerate(self.simplices):
            arr = np.empty((self.G.order, len(lst)), dtype=np.int64)
            for g in range(self.G.order):
                for i, s in enumerate(lst):
                    arr[g, i] = self.index[k][tuple(sorted(self.action[g, list(s)]))]
            out.append(arr)
        return out

    @cached_property
    def simplex_action_sign(self) -> list[np.ndarray]:
        out = []
        for k, lst in enumerate(self.simplices):
            arr = np.empty((self.G.order, len(lst)), dtype=np.int64)
            for g in range(self.G.order):
                for i, s in enumerate(lst):
                    arr[g, i] = perm_sign(self.action[g, list(s)])
            out.append(arr)
        return out

    def boundary_columns(self, k: int) -> list[dict[int, int]]:
        """Columns of d_k : C_k -> C_{k-1} as sparse dicts."""
        if k <= 0 or k > self.dim:
            return [{} for _ in range(self.count(k))]
        idx = self.index[k - 1]
        cols = []
        for s in self.simplices[k]:
            col = {}
            for i in range(k + 1):
                col[idx[s[:i] + s[i + 1:]]] = (-1) ** i
            cols.append(col)
        return cols

    def boundary(self, k: int) -> RatMatrix:
        return RatMatrix(self.count(k - 1), self.count(k), self.boundary_columns(k))

    # -- isotropy --------------------------------------------------------------

    @cached_property
    def vertex_stabilizers(self) -> list[frozenset]:
        return [frozenset(int(g) for g in np.nonzero(self.action[:, v] == v)[0]) for v in range(self.n_vertices)]

    def isotropy(self, s: Simplex) -> Subgroup:
        st = frozenset(range(self.G.order))
        for v in s:
            st = st & self.vertex_stabilizers[v]
        return Subgroup(self.G, tuple(st))

    def setwise_stabilizer(self, k: int, i: int) -> tuple[int, ...]:
        return tuple(int(g) for g in np.nonzero(self.simplex_action[k][:, i] == i)[0])

    def is_regular(self) -> bool:
        for k in range(self.dim + 1):
            for i, s in enumerate(self.simplices[k]):
                for g in self.setwise_stabilizer(k, i):
                    if any(self.action[g, v] != v for v in s):
                        return False
        return True

    def orientation_preserving(self) -> list[int]:
        """Group elements mapping the fundamental chain to itself."""
        if self.orientation is None:
            raise ValueError("complex has no orientation")
        out = []
        for g in range(self.G.order):
            ok = True
            for f in self.facets:
                img, sgn = self.image(g, f)
                if self.orientation[img] != sgn * self.orientation[f]:
                    ok = False
                    break
            if ok:
                out.append(g)
        return out

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "f_vector": list(self.f_vector),
            "group": self.G.name,
            "group_order": self.G.order,
        }


def _depth(tree, x) -> int:
    d = 0
    while tree[x] is not None:
        x = tree[x][0]
        d += 1
    return d


# ---------------------------------------------------------------------------


def validate_action(c: SimplicialGComplex) -> CheckReport:
    rep = CheckReport("simplicial action", tol=0.0)
    G, A = c.G, c.action
    for g in range(G.order):
        rep.checks += 1
        if sorted(A[g].tolist()) != list(range(c.n_vertices)):
            rep.fail(("not a vertex permutation", G.labels[g]))
            return rep
    for g in range(G.order):
        for h in range(G.order):
            rep.checks += 1
            if not np.array_equal(A[G.m(g, h)], A[g][A[h]]):
                rep.fail(("not a homomorphism", G.labels[g], G.labels[h]))
    if not rep.passed:
        return rep
    for k in range(c.dim + 1):
        for s in c.simplices[k]:
            for g in range(G.order):
                rep.checks += 1
                img, _ = c.image(g, s)
                if img not in c.index[k]:
                    rep.fail(("simplex mapped outside the complex", {"simplex": list(s), "g": G.labels[g], "image": list(img)}))
    if not rep.passed:
        return rep
    # g d = d g on oriented chains
    for k in range(1, c.dim + 1):
        for s in c.simplices[k]:
            for g in range(G.order):
                rep.checks += 1
                img, sg = c.image(g, s)
                lhs = {}
                for i in range(k + 1):
                    f = img[:i] + img[i + 1:]
                    lhs[f] = lhs.get(f, 0) + sg * (-1) ** i
                rhs = {}
                for i in range(k + 1):
                    fi, sf = c.image(g, s[:i] + s[i + 1:])
                    rhs[fi] = rhs.get(fi, 0) + sf * (-1) ** i
                if {x: v for x, v in lhs.items() if v} != {x: v for x, v in rhs.items() if v}:
                    rep.fail(("boundary not equivariant", {"simplex": list(s), "g": G.labels[g]}))
    return rep


def barycentric_subdivision(c: SimplicialGComplex) -> SimplicialGComplex:
    """New vertices are the simplices of c, ordered by (dimension, index)."""
    verts = [s for lst in c.simplices for s in lst]
    vid = {s: i for i, s in enumerate(verts)}
    facets = []
    orient = {} if c.orientation is not None else None
    for top in c.facets:
        for order in permutations(top):
            flag = [tuple(sorted(order[: k + 1])) for k in range(len(order))]
            ids = [vid[f] for f in flag]
            sd = tuple(sorted(ids))
            facets.append(sd)
            if orient is not None and len(top) - 1 == c.dim:
                orient[sd] = c.orientation[top] * perm_sign([top.index(v) for v in order]) * perm_sign(ids)
    act = np.empty((c.G.order, len(verts)), dtype=np.int64)
    for g in range(c.G.order):
        for i, s in enumerate(verts):
            act[g, i] = vid[tuple(sorted(c.action[g, list(s)]))]
    return SimplicialGComplex(len(verts), facets, c.G, act, orient, name=f"sd({c.name})")


def regularize(c: SimplicialGComplex, max_subdivisions: int = 2) -> tuple[SimplicialGComplex, int]:
    """Subdivide until regular; returns the complex and the number of subdivisions used."""
    steps = 0
    while not c.is_regular():
        if steps >= max_subdivisions:
            raise NotRegular(f"action still not regular after {steps} subdivisions")
        c = barycentric_subdivision(c)
        steps += 1
    return c, steps


def _require_regular(c: SimplicialGComplex) -> None:
    if not c.is_regular():
        raise NotRegular("action is not regular; call regularize first")


@dataclass
class Subcomplex:
    parent: SimplicialGComplex = field(repr=False)
    simplices: list[set]  # per dimension

    def all(self) -> set:
        return {(k, s) for k, lst in enumerate(self.simplices) for s in lst}

    @property
    def vertices(self) -> list[int]:
        return sorted(s[0] for s in self.simplices[0]) if self.simplices else []

    def is_empty(self) -> bool:
        return not any(self.simplices)

    def is_closed_under_faces(self) -> bool:
        for k in range(1, len(self.simplices)):
            for s in self.simplices[k]:
                for i in range(k + 1):
                    if s[:i] + s[i + 1:] not in self.simplices[k - 1]:
                        return False
        return True

    def f_vector(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def components(self) -> list[list[int]]:
        """Vertex sets of connected components."""
        verts = self.vertices
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        if len(self.simplices) > 1:
            for a, b in self.simplices[1]:
                parent[find(a)] = find(b)
        groups: dict[int, list[int]] = {}
        for v in verts:
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())


def fixed_subcomplex(c: SimplicialGComplex, H: Subgroup) -> Subcomplex:
    _require_regular(c)
    fixed = {v for v in range(c.n_vertices) if all(c.action[h, v] == v for h in H.elements)}
    layers = [{s for s in lst if all(v in fixed for v in s)} for lst in c.simplices]
    return Subcomplex(c, layers)


@dataclass
class Stratification:
    family: list[Subgroup]  # nontrivial isotropy groups
    layers: list[list[Subgroup]]
    strata: dict  # Subgroup -> set of (dim, simplex); the trivial group keys the free stratum
    fixed_sets: dict  # Subgroup -> Subcomplex
    report: CheckReport

    def cardinalities(self) -> dict:
        return {H.elements: len(v) for H, v in self.strata.items()}


def stratify(c: SimplicialGComplex) -> Stratification:
    _require_regular(c)
    G = c.G
    rep = CheckReport("stratification", tol=0.0)
    iso = {}
    for k, lst in enumerate(c.simplices):
        for s in lst:
            iso[(k, s)] = c.isotropy(s)
    trivial = Subgroup.trivial(G)
    family = sorted({H for H in iso.values() if H.order > 1}, key=lambda s: (s.order, s.elements))
    fixed = {H: fixed_subcomplex(c, H) for H in family}
    strata = {}
    for H in family:
        bigger = [K for K in family if H < K]
        removed = set()
        for K in bigger:
            removed |= fixed[K].all()
        strata[H] = fixed[H].all() - removed
        exact = {x for x, K in iso.items() if K == H}
        rep.checks += 1
        if strata[H] != exact:
            rep.fail(("set difference differs from exact isotropy", list(H.elements)))
    strata[trivial] = {x for x, K in iso.items() if K.order == 1}
    # disjoint cover
    seen: set = set()
    for H, s in strata.items():
        rep.checks += 1
        if seen & s:
            rep.fail(("strata overlap", list(H.elements)))
        seen |= s
    rep.checks += 1
    if seen != set(iso):
        rep.fail("strata do not cover M")
    # containment
    for H1 in family:
        for H2 in family:
            if H1 <= H2:
                rep.checks += 1
                if not fixed[H2].all() <= fixed[H1].all():
                    rep.fail(("M^H2 not inside M^H1", list(H1.elements), list(H2.elements)))
    # g M^H = M^{gHg^-1}
    for H in family:
        for g in range(G.order):
            K = H.conjugate(g)
            rep.checks += 1
            moved = {(k, c.image(g, s)[0]) for (k, s) in fixed[H].all()}
            other = fixed[K].all() if K in fixed else fixed_subcomplex(c, K).all()
            if moved != other:
                rep.fail(("g M^H != M^{gHg^-1}", list(H.elements), G.labels[g]))
    for H in family:
        rep.checks += 1
        if not fixed[H].is_closed_under_faces():
            rep.fail(("fixed set not a subcomplex", list(H.elements)))
    return Stratification(family, max_families(family), strata, fixed, rep)


# ---------------------------------------------------------------------------


@dataclass
class QuotientComplex:
    """Orbit cells of a regular action with the induced cellular boundary."""

    source: SimplicialGComplex = field(repr=False)
    cells: list[list[Simplex]]  # per dimension: orbit representatives (smallest member)
    projection: list[dict]  # per dimension: simplex -> (cell index, sign)
    boundaries: list[RatMatrix]  # d_k for k = 0..n (d_0 is empty)

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def count(self, k: int) -> int:
        return len(self.cells[k]) if 0 <= k < len(self.cells) else 0

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(c) for k, c in enumerate(self.cells))

    def boundary(self, k: int) -> RatMatrix:
        if k <= 0 or k > self.dim:
            return RatMatrix(self.count(k - 1), self.count(k))
        return self.boundaries[k]


def quotient_complex(c: SimplicialGComplex) -> QuotientComplex:
    _require_regular(c)
    G = c.G
    cells, proj = [], []
    for k, lst in enumerate(c.simplices):
        act, sgn = c.simplex_action[k], c.simplex_action_sign[k]
        seen = {}
        reps = []
        for i, s in enumerate(lst):
            if s in seen:
                continue
            j = len(reps)
            reps.append(s)
            for g in range(G.order):
                t = lst[act[g, i]]
                if t in seen:
                    if seen[t] != (j, int(sgn[g, i])):
                        raise NotRegular(f"orbit of {s} carries inconsistent orientations")
                else:
                    seen[t] = (j, int(sgn[g, i]))
        cells.append(reps)
        proj.append(seen)
    free = all(len(c.vertex_stabilizers[v]) == 1 for v in range(c.n_vertices))
    if free:
        for k in range(c.dim + 1):
            assert len(cells[k]) * G.order == c.count(k), "free action must have orbits of size |G|"
    bds = [RatMatrix(0, len(cells[0]))]
    for k in range(1, c.dim + 1):
        cols = []
        for s in cells[k]:
            col: dict[int, int] = {}
            for i in range(k + 1):
                j, sg = proj[k - 1][s[:i] + s[i + 1:]]
                col[j] = col.get(j, 0) + sg * (-1) ** i
            cols.append({r: v for r, v in col.items() if v})
        bds.append(RatMatrix(len(cells[k - 1]), len(cells[k]), cols))
    return QuotientComplex(c, cells, proj, bds)


# ---------------------------------------------------------------------------


@dataclass
class SplitComponent:
    representative: int  # t with component t M^H
    subgroup: Subgroup  # t H t^-1
    normalizer: Subgroup
    fixed: Subcomplex


@dataclass
class ConnerFloydSplit:
    H: Subgroup
    N: Subgroup
    components: list[SplitComponent]
    report: CheckReport


def conner_floyd_split(c: SimplicialGComplex, H: Subgroup) -> ConnerFloydSplit:
    _require_regular(c)
    G = c.G
    rep = CheckReport("Conner-Floyd split", tol=0.0)
    MH = fixed_subcomplex(c, H)
    for k, s in MH.all():
        K = c.isotropy(s)
        if H < K:
            raise NotMaximal(f"simplex {list(s)} of M^H has isotropy {list(K.elements)} strictly larger than H")
    N = normalizer(G, H)
    if MH.is_empty():
        return ConnerFloydSplit(H, N, [], rep)
    comps = []
    for coset in N.left_cosets():
        t = coset[0]
        K = H.conjugate(t)
        comps.append(SplitComponent(t, K, normalizer(G, K), fixed_subcomplex(c, K)))
    # pairwise disjoint
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            rep.checks += 1
            if set(comps[i].fixed.vertices) & set(comps[j].fixed.vertices):
                rep.fail(("components meet", i, j))
    # t M^H is the component and G permutes components transitively
    by_vertices = {tuple(cp.fixed.vertices): i for i, cp in enumerate(comps)}
    for i, cp in enumerate(comps):
        rep.checks += 1
        moved = {(k, c.image(cp.representative, s)[0]) for (k, s) in MH.all()}
        if moved != cp.fixed.all():
            rep.fail(("t M^H differs from M^{tHt^-1}", i))
    for g in range(G.order):
        for i, cp in enumerate(comps):
            rep.checks += 1
            img = tuple(sorted(int(c.action[g, v]) for v in cp.fixed.vertices))
            if img not in by_vertices:
                rep.fail(("g does not permute components", G.labels[g], i))
    # N(H)/H acts freely on M^H
    for n in N.elements:
        if n in H:
            continue
        for v in MH.vertices:
            rep.checks += 1
            if c.action[n, v] == v:
                rep.fail(("N(H)/H not free on M^H", G.labels[n], v))
    # square: g(n x) = s_g(n) g(x), and any l in tN induces the same component
    for i, cp in enumerate(comps):
        for l in sorted(G.m(cp.representative, n) for n in N.elements):
            for n in N.elements:
                sn = G.conj(l, n)
                for v in MH.vertices:
                    rep.checks += 1
                    if c.action[l, c.action[n, v]] != c.action[sn, c.action[l, v]]:
                        rep.fail(("s_g square fails", i, G.labels[l], G.labels[n], v))
            rep.checks += 1
            if sorted(int(c.action[l, v]) for v in MH.vertices) != cp.fixed.vertices:
                rep.fail(("representative changes component", i, G.labels[l]))
    rep.notes["components"] = len(comps)
    rep.notes["index_N"] = G.order // N.order
    return ConnerFloydSplit(H, N, comps, rep)


def find_orientation(c: SimplicialGComplex) -> dict[Simplex, int]:
    """Coherent orientation of a closed pseudomanifold; the first facet gets +1.

    Raises NotClosed when some ridge does not have exactly two cofaces and
    NotOrientable with a witness facet when propagation meets a conflict.
    """
    n = c.dim
    tops = [f for f in c.facets if len(f) == n + 1]
    cof: dict[Simplex, list[tuple[Simplex, int]]] = {}
    for f in tops:
        for i in range(n + 1):
            cof.setdefault(f[:i] + f[i + 1:], []).append((f, (-1) ** i))
    if n == 0:
        return {f: 1 for f in tops}
    for r, lst in sorted(cof.items()):
        if len(lst) != 2:
            raise NotClosed(f"ridge {list(r)} has {len(lst)} cofaces", witness=list(r))
    orient: dict[Simplex, int] = {}
    for start in tops:
        if start in orient:
            continue
        orient[start] = 1
        stack = [start]
        while stack:
            f = stack.pop()
            for i in range(n + 1):
                r = f[:i] + f[i + 1:]
                (a, sa), (b, sb) = cof[r]
                other, so = (b, sb) if a == f else (a, sa)
                mine = sa if a == f else sb
                want = -orient[f] * mine * so
                if other in orient:
                    if orient[other] != want:
                        raise NotOrientable(f"orientation conflict across ridge {list(r)}", witness=list(other))
                else:
                    orient[other] = want
                    stack.append(other)
    return orient


def product_complex(K: SimplicialGComplex, L: SimplicialGComplex, name: str = "") -> SimplicialGComplex:
    """Staircase triangulation of K x L using the sorted vertex order of each factor.

    Vertex (a, b) has index a * |V(L)| + b.  No group action is attached.
    """
    nl = L.n_vertices
    facets = []
    for s in K.facets:
        for t in L.facets:
            p, q = len(s) - 1, len(t) - 1
            for horiz in combinations(range(p + q), p):
                i = j = 0
                path = [s[0] * nl + t[0]]
                hs = set(horiz)
                for step in range(p + q):
                    if step in hs:
                        i += 1
                    else:
                        j += 1
                    path.append(s[i] * nl + t[j])
                facets.append(path)
    return SimplicialGComplex(K.n_vertices * nl, facets, name=name or f"{K.name}x{L.name}")


def product_action(K: SimplicialGComplex, L: SimplicialGComplex, pk: Sequence[int], pl: Sequence[int]) -> list[int]:
    nl = L.n_vertices
    return [int(pk[a]) * nl + int(pl[b]) for a in range(K.n_vertices) for b in range(nl)]
