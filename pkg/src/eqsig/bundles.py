"""Equivariant bundles with quasi-free action, given by atlases and transition cocycles.

The base M is a simplicial G-complex in which every simplex has isotropy
conjugate to H.  Charts are open stars of vertex orbits: chart alpha has a
chosen lift v_alpha with isotropy exactly H, and every vertex of M is
uniquely rep(q) v_alpha for a coset q in G/H.  A cell of the orbit space is
keyed by the sorted tuple of charts of its vertices.

Transition values are equivariant automorphisms of the fiber model
(canonical or non-normal).  Psi[(alpha, beta)][cell] changes alpha
coordinates into beta coordinates, and products read left to right, so the
cocycle condition is Psi_ag = Psi_ab * Psi_bg.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import EqsigError, NonFreeAction, NotLiftable
from .gcomplex import ConnerFloydSplit, SimplicialGComplex, conner_floyd_split
from .groups import Subgroup
from .model import (
    CanonicalModel,
    CheckReport,
    EquivariantAutomorphism,
    FiberModel,
    NonNormalModel,
    automorphism_from,
    extend_automorphism,
    restrict_automorphism,
    transported,
    verify_automorphism,
)
from .reps import UnitaryRep, group_irreps, intertwiner

Cell = tuple[int, ...]


class CocycleFailure(EqsigError):
    pass


# ---------------------------------------------------------------------------
# Atlas


class EquivariantAtlas:
    def __init__(self, M: SimplicialGComplex, H: Subgroup, lifts, name: str = ""):
        self.M = M
        self.H = H
        self.lifts = [int(v) for v in lifts]
        self.name = name
        G = M.G
        self.cosets = tuple(H.left_cosets())
        self.rep = [c[0] for c in self.cosets]
        coset_of = np.empty(G.order, dtype=np.int64)
        for k, c in enumerate(self.cosets):
            coset_of[list(c)] = k
        self.coset_of = coset_of
        n = M.n_vertices
        chart = np.full(n, -1, dtype=np.int64)
        point = np.full(n, -1, dtype=np.int64)
        for a, v in enumerate(self.lifts):
            for q, g in enumerate(self.rep):
                w = M.action[g, v]
                if chart[w] == -1:
                    chart[w], point[w] = a, q
        self.chart = chart
        self.point = point
        # cells of the orbit space and the lifted simplex of each cell in each of its charts
        cells: set[Cell] = set()
        lifted: dict[tuple[int, Cell], tuple[int, ...]] = {}
        lift_set = {v: a for a, v in enumerate(self.lifts)}
        for lst in M.simplices:
            for s in lst:
                if any(chart[v] < 0 for v in s):
                    continue
                key = tuple(sorted(int(chart[v]) for v in s))
                if len(set(key)) != len(key):
                    continue
                cells.add(key)
                for v in s:
                    if v in lift_set:
                        lifted.setdefault((lift_set[v], key), s)
        self.cells = sorted(cells, key=lambda k: (len(k), k))
        self._lifted = lifted
        overlaps: dict[tuple[int, int], list[Cell]] = {}
        for key in self.cells:
            for a, b in combinations(key, 2):
                overlaps.setdefault((a, b), []).append(key)
        self.overlaps = overlaps

    @property
    def n_charts(self) -> int:
        return len(self.lifts)

    def vertex(self, a: int, q: int) -> int:
        """The vertex rep(q) v_a."""
        return int(self.M.action[self.rep[q], self.lifts[a]])

    def class_of(self, a: int, b: int, key: Cell) -> int:
        """Coset q with U_a meeting rep(q) U_b on the given cell."""
        s = self._lifted[(a, key)]
        for v in s:
            if self.chart[v] == b:
                return int(self.point[v])
        raise KeyError((a, b, key))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "charts": self.n_charts,
            "cells": [len([k for k in self.cells if len(k) == d + 1]) for d in range(max((len(k) for k in self.cells), default=0))],
            "overlaps": len(self.overlaps),
        }


def validate_atlas(atlas: EquivariantAtlas) -> CheckReport:
    """Chart lifts, isotropy type, and the two disjointness conditions on open stars."""
    M, H = atlas.M, atlas.H
    G = M.G
    rep = CheckReport(f"atlas {atlas.name}".strip(), tol=0.0)
    conj = {H.conjugate(g) for g in range(G.order)}
    for a, v in enumerate(atlas.lifts):
        rep.checks += 1
        stab = tuple(g for g in range(G.order) if M.action[g, v] == v)
        if stab != H.elements:
            rep.fail(("lift isotropy differs from H", {"chart": a, "vertex": v, "isotropy": list(stab)}))
        if atlas.chart[v] != a:
            rep.fail(("two charts share a vertex orbit", {"chart": a, "other": int(atlas.chart[v])}))
    for w in range(M.n_vertices):
        rep.checks += 1
        if atlas.chart[w] < 0:
            rep.fail(("vertex not covered by any chart", {"vertex": w}))
    for lst in M.simplices:
        for s in lst:
            rep.checks += 1
            if M.isotropy(s) not in conj:
                rep.fail(("simplex isotropy not conjugate to H", {"simplex": list(s)}))
    edges = set(M.simplices[1]) if M.dim >= 1 else set()
    for a, va in enumerate(atlas.lifts):
        for b in range(atlas.n_charts):
            hits = []
            for q in range(len(atlas.cosets)):
                if a == b and q == 0:
                    continue
                w = atlas.vertex(b, q)
                if w != va and tuple(sorted((va, w))) in edges:
                    hits.append(q)
            rep.checks += 1
            if a == b and hits:
                rep.fail(("translates of U_a meet", {"chart": a, "translates": hits}))
            elif a != b and len(hits) > 1:
                rep.fail(("U_a meets several translates of U_b", {"a": a, "b": b, "translates": hits}))
    rep.notes["charts"] = atlas.n_charts
    rep.notes["cells"] = len(atlas.cells)
    return rep


# ---------------------------------------------------------------------------
# Bundles


@dataclass
class TransitionBundle:
    atlas: EquivariantAtlas
    model: FiberModel
    transitions: dict  # (a, b) with a < b -> {cell: EquivariantAutomorphism}
    name: str = ""

    def __post_init__(self):
        G = self.model.group
        if G is not self.atlas.M.G and not np.array_equal(G.mul, self.atlas.M.G.mul):
            raise ValueError("atlas and model use different groups")
        for q, g in enumerate(self.atlas.rep):
            if self.model.target[0, g] != q:
                raise ValueError("model points do not match the cosets of the atlas")

    def value(self, a: int, b: int, key: Cell) -> EquivariantAutomorphism:
        if a < b:
            return self.transitions[(a, b)][key]
        return self.transitions[(b, a)][key].inverse()

    def base_element(self, q: int) -> int:
        """The element of the automorphism base group that moves the base point to q."""
        hits = np.nonzero(self.model.right[0] == q)[0]
        if len(hits) == 0:
            raise KeyError(q)
        return int(hits[0])


def check_cocycle(b: TransitionBundle) -> CheckReport:
    atlas, m = b.atlas, b.model
    rep = CheckReport(f"cocycle {b.name}".strip(), tol=m.tol)
    av = validate_atlas(atlas)
    if not av.passed:
        rep.fail(("atlas invalid", av.violations[:3]))
        return rep
    seen: dict[int, bool] = {}
    for (a, c), cells in sorted(atlas.overlaps.items()):
        table = b.transitions.get((a, c))
        if table is None:
            rep.fail(("missing transition", {"pair": (a, c)}))
            continue
        for key in cells:
            rep.checks += 1
            A = table.get(key)
            if A is None:
                rep.fail(("missing transition on cell", {"pair": (a, c), "cell": list(key)}))
                continue
            q = atlas.class_of(a, c, key)
            if m.right[0, A.a] != q:
                rep.fail(("pr of transition differs from overlap class", {"pair": (a, c), "cell": list(key)}))
            if id(A) not in seen:
                seen[id(A)] = verify_automorphism(A).passed
            if not seen[id(A)]:
                rep.fail(("transition not equivariant", {"pair": (a, c), "cell": list(key)}))
            # constant across the overlap: compare with faces that still contain both charts
            for x in key:
                if x in (a, c) or len(key) <= 2:
                    continue
                face = tuple(y for y in key if y != x)
                B = table.get(face)
                if B is not None and not A.close(B):
                    rep.fail(("transition not constant on overlap", {"pair": (a, c), "cell": list(key), "face": list(face)}))
    for key in atlas.cells:
        if len(key) < 3:
            continue
        for x, y, z in combinations(key, 3):
            rep.checks += 1
            try:
                lhs = b.value(x, z, key)
                rhs = b.value(x, y, key) * b.value(y, z, key)
            except KeyError:
                continue
            if not lhs.close(rhs):
                rep.fail(("cocycle", {"triple": [x, y, z], "cell": list(key)}))
            G0 = m.base_group
            if G0.mul[b.base_element(atlas.class_of(x, y, key)), b.base_element(atlas.class_of(y, z, key))] != b.base_element(atlas.class_of(x, z, key)):
                rep.fail(("overlap classes are not a cocycle", {"triple": [x, y, z], "cell": list(key)}))
    return rep


def transitions_from(atlas: EquivariantAtlas, pair_values: dict) -> dict:
    """Spread one automorphism per overlapping pair over all cells of the overlap."""
    out = {}
    for pair, cells in atlas.overlaps.items():
        A = pair_values[pair]
        out[pair] = {key: A for key in cells}
    return out


def _point_transversal(model: FiberModel) -> list[int]:
    """T_p with target[0, T_p] = p and phi(p, g) = id (x) rho(T_{gp}^-1 g T_p)."""
    if isinstance(model, CanonicalModel):
        return [int(t) for t in model.section.transversal]
    if isinstance(model, NonNormalModel):
        G, N = model.group, model.N
        return [G.m(model.component_reps[i], N.elements[model.inner.section.transversal[c]]) for (i, c) in model.split]
    raise TypeError(type(model).__name__)


def extension_of_rho(model: FiberModel) -> UnitaryRep | None:
    """An irreducible G-rep restricting to rho on H, written in rho's basis."""
    G, H, rho = model.group, model.H, model.rho
    for sigma in group_irreps(G):
        if sigma.dim != rho.dim:
            continue
        C = intertwiner(rho, sigma.restrict(H))
        if C is None:
            continue
        Cm = C.matrix.data
        mats = np.einsum("ij,gjk,kl->gil", np.linalg.inv(Cm), sigma.matrices, Cm)
        return UnitaryRep(G, mats, rho.tol, f"{sigma.name} extending rho")
    return None


def _canonical_lift(model: FiberModel, a: int) -> EquivariantAutomorphism:
    f = np.eye(model.f_dim)
    if isinstance(model, NonNormalModel):
        return extend_automorphism(model, automorphism_from(model.inner, a, f))
    return automorphism_from(model, a, f)


def trivial_bundle(atlas: EquivariantAtlas, model: FiberModel, name: str = "") -> TransitionBundle:
    """M x (F (x) V) in the charts of the atlas.

    With an extension sigma of rho to G the product bundle has transition
    blocks id (x) sigma(T_{q a}^-1 T_q).  Without one, the overlap classes
    must be a coboundary c_a c_b^-1 and the transitions are L(c_a) L(c_b)^-1.
    """
    sigma = extension_of_rho(model)
    G = model.group
    T = _point_transversal(model)
    cache: dict[int, EquivariantAutomorphism] = {}
    probe = TransitionBundle(atlas, model, {}, name)

    def product_value(a: int) -> EquivariantAutomorphism:
        if a not in cache:
            blocks = []
            for p in range(model.n_points):
                pa = model.right[p, a]
                blocks.append(np.kron(np.eye(model.f_dim), sigma(G.m(G.i(T[pa]), T[p]))))
            cache[a] = EquivariantAutomorphism(model, int(a), np.stack(blocks))
        return cache[a]

    out = {}
    if sigma is not None:
        for pair, cells in atlas.overlaps.items():
            out[pair] = {key: product_value(probe.base_element(atlas.class_of(*pair, key))) for key in cells}
        return TransitionBundle(atlas, model, out, name or f"trivial over {atlas.name}")
    offsets = _coboundary(atlas, probe)
    if offsets is None:
        raise NotLiftable("rho does not extend to G and the overlap classes are not a coboundary")
    L = {c: _canonical_lift(model, c) for c in set(offsets.values())}
    for (x, y), cells in atlas.overlaps.items():
        A = L[offsets[x]] * L[offsets[y]].inverse()
        out[(x, y)] = {key: A for key in cells}
    return TransitionBundle(atlas, model, out, name or f"trivial over {atlas.name}")


def _coboundary(atlas: EquivariantAtlas, b: TransitionBundle) -> dict[int, int] | None:
    """c_a with class(a, b) = c_a c_b^-1, or None."""
    G0 = b.model.base_group
    cls = {}
    for (x, y), cells in atlas.overlaps.items():
        cls[(x, y)] = b.base_element(atlas.class_of(x, y, cells[0]))
    off: dict[int, int] = {}
    for root in range(atlas.n_charts):
        if root in off:
            continue
        off[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for (u, v), g in cls.items():
                if u == x and v not in off:
                    off[v] = G0.mul[G0.i(g), off[x]]
                    queue.append(v)
                elif v == x and u not in off:
                    off[u] = G0.mul[g, off[x]]
                    queue.append(u)
    for (u, v), g in cls.items():
        if G0.mul[off[u], G0.i(off[v])] != g:
            return None
    return {k: int(v) for k, v in off.items()}


# ---------------------------------------------------------------------------
# Principal data


@dataclass
class PrincipalData:
    n_charts: int
    cells: list  # keys of the orbit-space cells
    model: FiberModel
    transitions: dict
    name: str = ""

    def classes(self) -> dict:
        """pr of every transition value: (a, b, cell) -> element of the base group."""
        return {(x, y, key): int(A.a) for (x, y), table in self.transitions.items() for key, A in table.items()}


def to_principal(b: TransitionBundle) -> PrincipalData:
    rep = check_cocycle(b)
    if not rep.passed:
        raise CocycleFailure(f"transition data is not a cocycle: {rep.violations[:3]}")
    return PrincipalData(b.atlas.n_charts, list(b.atlas.cells), b.model, {p: dict(t) for p, t in b.transitions.items()}, b.name)


def from_principal(p: PrincipalData, name: str = "") -> tuple[SimplicialGComplex, TransitionBundle]:
    """Glue U_a x G/H along pr of the transitions and reassemble the bundle."""
    m = p.model
    G = m.group
    npts = m.n_points
    for key in p.cells:
        if len(set(key)) != len(key):
            raise NonFreeAction(f"cell {list(key)} meets chart {key} twice")
    facets = []
    for key in p.cells:
        a0 = key[0]
        shifts = [0]
        for x in key[1:]:
            shifts.append(int(p.transitions[(a0, x)][key].a))
        for q in range(npts):
            facets.append(tuple(x * npts + int(m.right[q, s]) for x, s in zip(key, shifts)))
    n = p.n_charts * npts
    action = np.empty((G.order, n), dtype=np.int64)
    for g in range(G.order):
        for x in range(p.n_charts):
            action[g, x * npts:(x + 1) * npts] = x * npts + m.target[:, g]
    M = SimplicialGComplex(n, facets, G, action, name=name or f"cover of {p.name}")
    H = m.H
    conj = {H.conjugate(g) for g in range(G.order)}
    for lst in M.simplices:
        for s in lst:
            if M.isotropy(s) not in conj:
                raise NonFreeAction(f"glued simplex {list(s)} has isotropy {list(M.isotropy(s).elements)}")
    atlas = EquivariantAtlas(M, H, [x * npts for x in range(p.n_charts)], name=M.name)
    if set(atlas.cells) != set(p.cells):
        raise NonFreeAction("glued complex has cells the principal data does not describe")
    b = TransitionBundle(atlas, m, {pair: dict(t) for pair, t in p.transitions.items()}, name or p.name)
    return M, b


# ---------------------------------------------------------------------------
# Equivariant isomorphism witnesses


@dataclass
class BundleIsomorphism:
    chart_maps: list  # h_a per chart
    vertex_map: np.ndarray  # M1 vertex -> M2 vertex
    report: CheckReport


def _kernel_blocks(model: FiberModel, B: np.ndarray) -> EquivariantAutomorphism:
    d = model.fiber_dim // model.f_dim
    return EquivariantAutomorphism(model, 0, np.stack([np.kron(B, np.eye(d))] * model.n_points))


def _components(n: int, nbrs) -> list[list[int]]:
    comps, seen = [], set()
    for r in range(n):
        if r in seen:
            continue
        order, queue = [], deque([r])
        seen.add(r)
        while queue:
            x = queue.popleft()
            order.append(x)
            for y, _ in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        comps.append(order)
    return comps


def _propagate(b1, b2, nbrs, order, root):
    h = {order[0]: root}
    for x in order:
        for y, key in nbrs[x]:
            if y not in h:
                h[y] = b1.value(x, y, key).inverse() * h[x] * b2.value(x, y, key)
    return h


def _solve_root(b1, b2, nbrs, order, c: int, seed: int = 0):
    """Root h = K(B) L(c) with B solving the linear conjugation conditions, or None."""
    m = b1.model
    try:
        L = _canonical_lift(m, c)
    except NotLiftable:
        return None
    f = m.f_dim
    charts = set(order)
    basis = []
    for i in range(f * f):
        E = np.zeros((f, f), dtype=complex)
        E.flat[i] = 1.0
        basis.append(_propagate(b1, b2, nbrs, order, _kernel_blocks(m, E) * L))
    rows = []
    for (x, y), cells in b1.atlas.overlaps.items():
        if x not in charts:
            continue
        for key in cells:
            cols = []
            for h in basis:
                lhs, rhs = h[x] * b2.value(x, y, key), b1.value(x, y, key) * h[y]
                if lhs.a != rhs.a:
                    return None
                cols.append((lhs.blocks - rhs.blocks).reshape(-1))
            rows.append(np.stack(cols, axis=1))
    if rows:
        R = np.concatenate(rows, axis=0)
        _, sv, vh = np.linalg.svd(R)
        null = vh[np.sum(sv > m.tol * max(1.0, sv[0] if len(sv) else 1.0)):].conj()
        if len(null) == 0:
            return None
        coeff = np.random.default_rng(seed).standard_normal(len(null)) if len(null) > 1 else np.ones(1)
        vec = coeff @ null
    else:
        vec = np.eye(f, dtype=complex).reshape(-1)
    B = vec.reshape(f, f)
    if abs(np.linalg.det(B)) <= m.tol:
        return None
    return _propagate(b1, b2, nbrs, order, _kernel_blocks(m, B) * L)


def equivariant_isomorphism(b1: TransitionBundle, b2: TransitionBundle) -> BundleIsomorphism | None:
    """Chart automorphisms h with Psi2_ab = h_a^-1 Psi1_ab h_b.

    On each connected component of the chart graph the root is h = K(B) L(c)
    for c in the base group; the rest is forced by propagation along a
    spanning tree, and the remaining overlaps give linear equations for B.
    The induced vertex map must be a G-equivariant simplicial isomorphism.
    """
    A1, A2 = b1.atlas, b2.atlas
    if A1.n_charts != A2.n_charts or set(A1.cells) != set(A2.cells):
        return None
    m = b1.model
    nbrs: dict[int, list] = {x: [] for x in range(A1.n_charts)}
    for (x, y), cells in A1.overlaps.items():
        nbrs[x].append((y, cells[0]))
        nbrs[y].append((x, cells[0]))
    h: dict[int, EquivariantAutomorphism] = {}
    for order in _components(A1.n_charts, nbrs):
        for c in range(m.base_group.order):
            trial = _solve_root(b1, b2, nbrs, order, c)
            if trial is not None and _conjugates(b1, b2, trial, set(order)):
                h.update(trial)
                break
        else:
            return None
    rep = CheckReport("bundle isomorphism", tol=m.tol)
    for x, A in h.items():
        rep.merge(verify_automorphism(A))
    for (x, y), cells in A1.overlaps.items():
        for key in cells:
            rep.checks += 1
            if not b2.value(x, y, key).close(h[x].inverse() * b1.value(x, y, key) * h[y]):
                rep.fail(("chart maps do not conjugate the cocycles", {"pair": (x, y), "cell": list(key)}))
    vmap = _vertex_map(b1, b2, h, rep)
    if not rep.passed:
        return None
    return BundleIsomorphism([h[x] for x in range(A1.n_charts)], vmap, rep)


def _conjugates(b1, b2, h, charts) -> bool:
    for (x, y), cells in b1.atlas.overlaps.items():
        if x not in charts:
            continue
        for key in cells:
            if not b2.value(x, y, key).close(h[x].inverse() * b1.value(x, y, key) * h[y]):
                return False
    return True


def _vertex_map(b1: TransitionBundle, b2: TransitionBundle, h, rep: CheckReport) -> np.ndarray:
    """rep(q) v_a -> rep(q c_a) v'_a with c_a = pr h_a; checked simplicial, bijective, equivariant."""
    A1, A2, m = b1.atlas, b2.atlas, b1.model
    M1, M2 = A1.M, A2.M
    vmap = np.empty(M1.n_vertices, dtype=np.int64)
    for w in range(M1.n_vertices):
        x, q = int(A1.chart[w]), int(A1.point[w])
        vmap[w] = A2.vertex(x, int(m.right[q, h[x].a]))
    rep.checks += 1
    if len(set(vmap.tolist())) != M2.n_vertices or M1.n_vertices != M2.n_vertices:
        rep.fail("vertex map is not a bijection")
        return vmap
    if M1.f_vector != M2.f_vector:
        rep.fail(("f-vectors differ", {"source": list(M1.f_vector), "target": list(M2.f_vector)}))
        return vmap
    for k, lst in enumerate(M1.simplices):
        images = {tuple(sorted(int(vmap[v]) for v in s)) for s in lst}
        rep.checks += 1
        if images != set(M2.simplices[k]):
            rep.fail(("vertex map is not a simplicial isomorphism", {"dim": k}))
    G = M1.G
    for g in range(G.order):
        rep.checks += 1
        if not np.array_equal(vmap[M1.action[g]], M2.action[g][vmap]):
            rep.fail(("vertex map not equivariant", G.labels[g]))
    return vmap


def round_trip(b: TransitionBundle) -> tuple[TransitionBundle, BundleIsomorphism | None]:
    _, b2 = from_principal(to_principal(b))
    return b2, equivariant_isomorphism(b, b2)


# ---------------------------------------------------------------------------
# Non-normal reduction


@dataclass
class BundleComponent:
    index: int
    representative: int
    subgroup: Subgroup
    normalizer: Subgroup
    vertices: list
    points: list


@dataclass
class BundleSplit:
    components: list
    base: ConnerFloydSplit | None
    report: CheckReport


def split_by_conjugates(b: TransitionBundle) -> BundleSplit:
    m, atlas = b.model, b.atlas
    M, G = atlas.M, atlas.M.G
    rep = CheckReport("split by conjugates", tol=m.tol)
    if not isinstance(m, NonNormalModel):
        comp = BundleComponent(0, 0, atlas.H, Subgroup.whole(G), list(range(M.n_vertices)), list(range(m.n_points)))
        rep.notes["components"] = 1
        return BundleSplit([comp], None, rep)
    cf = conner_floyd_split(M, atlas.H)
    rep.merge(cf.report)
    nn = m
    rep.checks += 1
    if len(cf.components) != nn.n_components:
        rep.fail(("component count differs from |G/N(H)|", {"base": len(cf.components), "model": nn.n_components}))
    comps = []
    for i, sc in enumerate(cf.components):
        pts = nn.component_points(i)
        verts = sorted(w for w in range(M.n_vertices) if nn.split[atlas.point[w]][0] == i)
        rep.checks += 1
        if sc.representative != nn.component_reps[i] or verts != sc.fixed.vertices:
            rep.fail(("bundle component does not sit over the fixed set of its conjugate", i))
        comps.append(BundleComponent(i, sc.representative, sc.subgroup, sc.normalizer, verts, pts))
    # disjoint and transitively permuted
    owner = {}
    for c in comps:
        for w in c.vertices:
            rep.checks += 1
            if w in owner:
                rep.fail(("components overlap", {"vertex": w}))
            owner[w] = c.index
    for g in range(G.order):
        for c in comps:
            imgs = {owner.get(int(M.action[g, w])) for w in c.vertices}
            rep.checks += 1
            if len(imgs) != 1:
                rep.fail(("g does not carry a component onto a component", G.labels[g]))
    rep.checks += 1
    if {owner.get(int(M.action[g, comps[0].vertices[0]])) for g in range(G.order)} != {c.index for c in comps}:
        rep.fail("components not permuted transitively")
    # the square s_g x g: transport of every transition value along each l in tN(H)
    values = {id(A): A for table in b.transitions.values() for A in table.values()}
    for A in values.values():
        for c in comps:
            ref = None
            for l in sorted({G.m(c.representative, n) for n in nn.N.elements}):
                tr = transported(nn, A, l)
                for q, blk in tr.items():
                    rep.checks += 1
                    if np.max(np.abs(blk - A.blocks[q])) > m.tol:
                        rep.fail(("s_g square fails", {"component": c.index, "l": G.labels[l]}))
                if ref is not None and any(np.max(np.abs(ref[q] - tr[q])) > m.tol for q in ref):
                    rep.fail(("transport depends on the representative", {"component": c.index, "l": G.labels[l]}))
                ref = tr
    for c in comps:
        for l in sorted({G.m(c.representative, n) for n in nn.N.elements}):
            for w in comps[0].vertices:
                rep.checks += 1
                lw = int(M.action[l, w])
                if atlas.point[lw] != nn.target[atlas.point[w], l] or atlas.chart[lw] != atlas.chart[w]:
                    rep.fail(("base square fails", {"component": c.index, "l": G.labels[l], "vertex": w}))
    rep.notes["components"] = len(comps)
    return BundleSplit(comps, cf, rep)


@dataclass
class ReducedBundle:
    bundle: TransitionBundle  # over M^H with the N(H)-action
    source: TransitionBundle
    vertices: list  # M^H vertex k is source vertex vertices[k]
    report: CheckReport

    def reconstruct(self) -> TransitionBundle:
        """Extend every transition blockwise back to GX(rho) over the original atlas."""
        src = self.source
        if not isinstance(src.model, NonNormalModel):
            return self.bundle
        cache: dict[int, EquivariantAutomorphism] = {}
        out = {}
        for pair, table in self.bundle.transitions.items():
            row = {}
            for key, A in table.items():
                if id(A) not in cache:
                    cache[id(A)] = extend_automorphism(src.model, A)
                row[key] = cache[id(A)]
            out[pair] = row
        return TransitionBundle(src.atlas, src.model, out, f"{src.name} rebuilt")


def reduce_to_normal(b: TransitionBundle) -> ReducedBundle:
    rep = CheckReport("reduction to the normaliser", tol=b.model.tol)
    if not isinstance(b.model, NonNormalModel):
        rep.notes["identity"] = True
        return ReducedBundle(b, b, list(range(b.atlas.M.n_vertices)), rep)
    nn = b.model
    split = split_by_conjugates(b)
    rep.merge(split.report)
    atlas = b.atlas
    M, N = atlas.M, nn.N
    verts = split.components[0].vertices
    local = {w: k for k, w in enumerate(verts)}
    vset = set(verts)
    facets = [tuple(local[v] for v in s) for lst in M.simplices for s in lst if all(v in vset for v in s)]
    Ng = N.as_group()
    action = np.array([[local[int(M.action[n, w])] for w in verts] for n in N.elements], dtype=np.int64)
    MH = SimplicialGComplex(len(verts), facets, Ng, action, name=f"{M.name}^H")
    H_loc = Subgroup(Ng, tuple(N.local(h) for h in atlas.H.elements))
    red_atlas = EquivariantAtlas(MH, H_loc, [local[v] for v in atlas.lifts], name=MH.name)
    cache: dict[int, EquivariantAutomorphism] = {}
    out = {}
    for pair, table in b.transitions.items():
        row = {}
        for key, A in table.items():
            if id(A) not in cache:
                cache[id(A)] = restrict_automorphism(nn, A)
            row[key] = cache[id(A)]
        out[pair] = row
    red = TransitionBundle(red_atlas, nn.inner, out, f"{b.name} on M^H")
    # N(H)/H acts freely on M^H
    for n in range(Ng.order):
        if n in H_loc:
            continue
        for w in range(MH.n_vertices):
            rep.checks += 1
            if MH.action[n, w] == w:
                rep.fail(("N(H)/H fixes a vertex of M^H", {"element": Ng.labels[n], "vertex": w}))
    rep.merge(check_cocycle(red))
    out_b = ReducedBundle(red, b, verts, rep)
    witness = equivariant_isomorphism(b, out_b.reconstruct())
    rep.checks += 1
    if witness is None:
        rep.fail("reconstruction is not isomorphic to the original bundle")
    rep.notes["normaliser_order"] = N.order
    rep.notes["deck_group_order"] = N.order // atlas.H.order
    return out_b


def classification_pairing(reduced: list) -> CheckReport:
    """One record per connected component of each orbit space: rho, base, principal data, deck freeness."""
    rep = CheckReport("classification records", tol=0.0)
    records = []
    for r in reduced:
        b = r.bundle if isinstance(r, ReducedBundle) else r
        atlas, m = b.atlas, b.model
        M = atlas.M
        parent = list(range(atlas.n_charts))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for x, y in atlas.overlaps:
            parent[find(x)] = find(y)
        groups: dict[int, list] = {}
        for x in range(atlas.n_charts):
            groups.setdefault(find(x), []).append(x)
        G0 = m.base_group
        for charts in sorted(groups.values()):
            cs = set(charts)
            verts = [w for w in range(M.n_vertices) if atlas.chart[w] in cs]
            free = True
            for g in range(M.G.order):
                if g in atlas.H:
                    continue
                for w in verts:
                    rep.checks += 1
                    if M.action[g, w] == w:
                        free = False
                        rep.fail(("deck action not free", {"bundle": b.name, "element": M.G.labels[g], "vertex": w}))
            cells = [k for k in atlas.cells if k[0] in cs]
            classes = {f"{x}-{y}": G0.labels[int(b.value(x, y, key).a)] for (x, y), keys in sorted(atlas.overlaps.items()) if x in cs for key in keys[:1]}
            records.append({
                "bundle": b.name,
                "rho": m.rho.name or "rho",
                "rho_character": [round(float(np.real(np.trace(mat))), 9) + 0.0 for mat in m.rho.matrices],
                "stationary_subgroup": [M.G.labels[h] for h in atlas.H.elements],
                "charts": charts,
                "base_cells": [sum(1 for k in cells if len(k) == d) for d in range(1, max((len(k) for k in cells), default=0) + 1)],
                "principal_classes": classes,
                "deck_group_order": G0.order,
                "deck_action_free": free,
                "ordinary_bundle": G0.order == 1,
            })
    rep.notes["records"] = records
    return rep
