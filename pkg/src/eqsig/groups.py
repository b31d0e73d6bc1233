"""Finite groups given by multiplication tables.

Elements are the integers ``0..order-1`` with 0 the identity.  Everything is
decided by exhaustive search, which is cheap at the orders we care about.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BadTransversal, NotNormal


class FiniteGroup:
    def __init__(self, mul, name: str = "", labels: Sequence | None = None, check: bool = True):
        mul = np.asarray(mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise ValueError("multiplication table must be square")
        self.mul = mul
        self.mul.setflags(write=False)
        self.order = n
        self.name = name
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        if check:
            self._check_axioms()
        inv = np.empty(n, dtype=np.int64)
        for a in range(n):
            inv[a] = int(np.nonzero(mul[a] == 0)[0][0])
        self.inv = inv
        self.inv.setflags(write=False)

    def _check_axioms(self) -> None:
        n = self.order
        m = self.mul
        if m.min() < 0 or m.max() >= n:
            raise ValueError("table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(m[0], ar) and np.array_equal(m[:, 0], ar)):
            raise ValueError("element 0 is not the identity")
        for row in m:
            if len(set(row.tolist())) != n:
                raise ValueError("table is not a Latin square")
        # (ab)c == a(bc) for every triple
        if not np.array_equal(m[m], m[ar[:, None, None], m[None, :, :]]):
            raise ValueError("table is not associative")

    # constructors -------------------------------------------------------------
    @classmethod
    def from_permutations(cls, generators: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        """Close a set of permutations (image lists) under composition.

        Elements are numbered in breadth-first order from the identity, so the
        generators' images are reachable and deterministic.  Composition is
        ``(p*q)(x) = p(q(x))``.
        """
        gens = [tuple(int(x) for x in g) for g in generators]
        if not gens:
            raise ValueError("need at least one generator")
        deg = len(gens[0])
        if any(len(g) != deg or sorted(g) != list(range(deg)) for g in gens):
            raise ValueError("generators must be permutations of a common degree")
        ident = tuple(range(deg))
        elems = [ident]
        index = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = tuple(p[g[x]] for x in range(deg))
                    if q not in index:
                        index[q] = len(elems)
                        elems.append(q)
                        nxt.append(q)
            frontier = nxt
        n = len(elems)
        mul = np.empty((n, n), dtype=np.int64)
        for i, p in enumerate(elems):
            for j, q in enumerate(elems):
                mul[i, j] = index[tuple(p[q[x]] for x in range(deg))]
        grp = cls(mul, name=name, labels=[str(list(e)) for e in elems], check=False)
        grp.permutations = elems
        return grp

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        mul = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls(mul, name=f"Z{n}", labels=[str(i) for i in range(n)])

    @classmethod
    def direct_product(cls, a: "FiniteGroup", b: "FiniteGroup", name: str = "") -> "FiniteGroup":
        n = a.order * b.order
        mul = np.empty((n, n), dtype=np.int64)
        for x in range(n):
            xa, xb = divmod(x, b.order)
            for y in range(n):
                ya, yb = divmod(y, b.order)
                mul[x, y] = a.mul[xa, ya] * b.order + b.mul[xb, yb]
        labels = [f"({la},{lb})" for la in a.labels for lb in b.labels]
        return cls(mul, name=name or f"{a.name}x{b.name}", labels=labels, check=False)

    # basic operations ------------------------------------------------------
    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"

    def elements(self) -> range:
        return range(self.order)

    def m(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def i(self, a: int) -> int:
        return int(self.inv[a])

    def prod(self, *xs: int) -> int:
        r = 0
        for x in xs:
            r = int(self.mul[r, x])
        return r

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = int(self.mul[x, a])
            k += 1
        return k

    def generated(self, gens: Iterable[int]) -> frozenset:
        elems = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(elems)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        """Classes sorted by smallest member; the identity class comes first."""
        seen = set()
        classes = []
        for x in range(self.order):
            if x in seen:
                continue
            cl = sorted({self.conj(g, x) for g in range(self.order)})
            seen.update(cl)
            classes.append(tuple(cl))
        return classes

    @cached_property
    def class_of(self) -> np.ndarray:
        out = np.empty(self.order, dtype=np.int64)
        for k, cl in enumerate(self.conjugacy_classes):
            out[list(cl)] = k
        return out

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily by element index."""
        gens: list[int] = []
        span = frozenset({0})
        for x in sorted(range(self.order), key=lambda e: (-self.element_order(e), e)):
            if x not in span:
                gens.append(x)
                span = self.generated(gens)
                if len(span) == self.order:
                    break
        return tuple(gens)

    def is_homomorphism(self, target: "FiniteGroup", images: Sequence[int]) -> bool:
        img = np.asarray(images)
        return bool(np.array_equal(img[self.mul], target.mul[img[:, None], img[None, :]]))

    def words(self, gens: Sequence[int]) -> list[tuple[int, int] | None]:
        """Breadth-first spanning tree over ``gens``: entry x is (parent, gen) with x = parent*gen."""
        tree: list = [None] * self.order
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.mul[x, g])
                    if y not in seen:
                        seen.add(y)
                        tree[y] = (x, g)
                        nxt.append(y)
            frontier = nxt
        if len(seen) != self.order:
            raise ValueError("elements do not generate the group")
        return tree


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False, hash=False, repr=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(set(int(x) for x in self.elements)))
        object.__setattr__(self, "elements", els)
        g = self.parent
        s = set(els)
        if 0 not in s:
            raise ValueError("subgroup must contain the identity")
        for a in els:
            if g.i(a) not in s:
                raise ValueError("subset not closed under inverses")
            for b in els:
                if g.m(a, b) not in s:
                    raise ValueError("subset not closed under multiplication")

    @classmethod
    def generated_by(cls, parent: FiniteGroup, gens: Iterable[int]) -> "Subgroup":
        return cls(parent, tuple(parent.generated(gens)))

    @classmethod
    def whole(cls, parent: FiniteGroup) -> "Subgroup":
        return cls(parent, tuple(range(parent.order)))

    @classmethod
    def trivial(cls, parent: FiniteGroup) -> "Subgroup":
        return cls(parent, (0,))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return int(x) in self._set

    @property
    def _set(self) -> frozenset:
        cached = self.__dict__.get("_elset")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_elset", cached)
        return cached

    def __le__(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def __lt__(self, other: "Subgroup") -> bool:
        return self._set < other._set

    def __len__(self) -> int:
        return self.order

    def conjugate(self, g: int) -> "Subgroup":
        """g H g^-1"""
        return Subgroup(self.parent, tuple(self.parent.conj(g, h) for h in self.elements))

    def is_normal(self) -> bool:
        return all(self.conjugate(g) == self for g in range(self.parent.order))

    def left_coset(self, g: int) -> frozenset:
        return frozenset(self.parent.m(g, h) for h in self.elements)

    def left_cosets(self) -> list[tuple[int, ...]]:
        """Left cosets gH sorted by smallest member (so H itself is first)."""
        seen = set()
        out = []
        for g in range(self.parent.order):
            if g in seen:
                continue
            c = tuple(sorted(self.left_coset(g)))
            seen.update(c)
            out.append(c)
        return out

    def as_group(self) -> FiniteGroup:
        """The subgroup as an abstract group; local index k is ``elements[k]``."""
        cached = self.__dict__.get("_as_group")
        if cached is None:
            pos = {x: k for k, x in enumerate(self.elements)}
            n = self.order
            mul = np.empty((n, n), dtype=np.int64)
            for a, x in enumerate(self.elements):
                for b, y in enumerate(self.elements):
                    mul[a, b] = pos[self.parent.m(x, y)]
            cached = FiniteGroup(mul, name=f"sub{list(self.elements)}", labels=[self.parent.labels[x] for x in self.elements], check=False)
            object.__setattr__(self, "_as_group", cached)
        return cached

    def local(self, x: int) -> int:
        return self.elements.index(int(x))

    def __repr__(self) -> str:
        return f"Subgroup({list(self.elements)})"


def all_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup, as joins of cyclic subgroups; sorted by (order, elements)."""
    found = {G.generated([x]) for x in range(G.order)}
    frontier = set(found)
    while frontier:
        new = set()
        for a in frontier:
            for b in found:
                j = G.generated(a | b)
                if j not in found and j not in new:
                    new.add(j)
        found |= new
        frontier = new
    subs = [Subgroup(G, tuple(s)) for s in found]
    subs.sort(key=lambda s: (s.order, s.elements))
    return subs


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(G, tuple(g for g in range(G.order) if H.conjugate(g) == H))


def centralizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(G, tuple(g for g in range(G.order) if all(G.conj(g, h) == h for h in H.elements)))


def center(G: FiniteGroup) -> Subgroup:
    return centralizer(G, Subgroup.whole(G))


@dataclass(frozen=True)
class Quotient:
    group: FiniteGroup
    proj: np.ndarray  # element of G -> coset index
    cosets: tuple[tuple[int, ...], ...]


def quotient(G: FiniteGroup, H: Subgroup) -> Quotient:
    """G/H for normal H. Cosets are ordered by smallest member."""
    for g in range(G.order):
        if H.conjugate(g) != H:
            raise NotNormal(f"g={g} conjugates {list(H.elements)} off itself")
    cosets = H.left_cosets()
    proj = np.empty(G.order, dtype=np.int64)
    for k, c in enumerate(cosets):
        proj[list(c)] = k
    n = len(cosets)
    mul = np.empty((n, n), dtype=np.int64)
    for a, ca in enumerate(cosets):
        for b, cb in enumerate(cosets):
            mul[a, b] = proj[G.m(ca[0], cb[0])]
    G0 = FiniteGroup(mul, name=f"{G.name}/{H.order}", labels=[f"[{G.labels[c[0]]}]" for c in cosets])
    if not G.is_homomorphism(G0, proj):
        raise AssertionError("projection is not a homomorphism")
    if set(np.nonzero(proj == 0)[0].tolist()) != set(H.elements):
        raise AssertionError("kernel of projection differs from H")
    proj.setflags(write=False)
    return Quotient(G0, proj, tuple(cosets))


@dataclass(frozen=True)
class HSection:
    """Coset representatives r([g]) with r([1]) = 1 and the induced u: G -> H.

    ``u(g) = r([g])^-1 g`` so that g = r([g]) u(g) and u(gh) = u(g) h.
    """

    group: FiniteGroup = field(repr=False)
    subgroup: Subgroup
    quotient: Quotient = field(repr=False)
    transversal: tuple[int, ...]  # coset index -> representative
    u: tuple[int, ...]  # element -> element of H

    def rep(self, coset: int) -> int:
        return self.transversal[coset]

    def coset(self, g: int) -> int:
        return int(self.quotient.proj[g])

    def verify(self) -> None:
        G, H = self.group, self.subgroup
        if self.u[0] != 0:
            raise AssertionError("u(1) != 1")
        for g in range(G.order):
            if G.m(self.transversal[self.coset(g)], self.u[g]) != g:
                raise AssertionError(f"g != r([g]) u(g) at g={g}")
            for h in H.elements:
                if self.u[G.m(g, h)] != G.m(self.u[g], h):
                    raise AssertionError(f"u(gh) != u(g)h at g={g}, h={h}")


def make_h_section(G: FiniteGroup, H: Subgroup, transversal: Sequence[int] | None = None) -> HSection:
    q = quotient(G, H)
    if transversal is None:
        reps = tuple(c[0] for c in q.cosets)
    else:
        reps_list = [int(t) for t in transversal]
        hit = [int(q.proj[t]) for t in reps_list]
        if sorted(hit) != list(range(len(q.cosets))):
            raise BadTransversal("transversal must meet every coset exactly once")
        if 0 not in reps_list:
            raise BadTransversal("the identity must represent the trivial coset")
        reps = [0] * len(q.cosets)
        for t, c in zip(reps_list, hit):
            reps[c] = t
        reps = tuple(reps)
    u = tuple(G.m(G.i(reps[int(q.proj[g])]), g) for g in range(G.order))
    sec = HSection(G, H, q, reps, u)
    sec.verify()
    return sec


@dataclass(frozen=True)
class ConjugationMap:
    """s_g: N(H) -> N(gHg^-1), n -> g n g^-1."""

    g: int
    source: Subgroup
    target: Subgroup
    mapping: dict = field(compare=False)

    def __call__(self, n: int) -> int:
        return self.mapping[int(n)]


def conjugation_iso(G: FiniteGroup, H: Subgroup, g: int) -> ConjugationMap:
    N = normalizer(G, H)
    target = normalizer(G, H.conjugate(g))
    mapping = {n: G.conj(g, n) for n in N.elements}
    if sorted(mapping.values()) != list(target.elements):
        raise AssertionError("conjugation does not carry N(H) onto N(gHg^-1)")
    for a in N.elements:
        for b in N.elements:
            if mapping[G.m(a, b)] != G.m(mapping[a], mapping[b]):
                raise AssertionError("conjugation map is not a homomorphism")
    return ConjugationMap(g, N, target, mapping)


def is_conjugation_closed(family: Iterable[Subgroup]) -> bool:
    fam = set(family)
    return all(H.conjugate(g) in fam for H in fam for g in range(H.parent.order))


def max_families(family: Iterable[Subgroup]) -> list[list[Subgroup]]:
    """Peel maximal elements: layer 0 = maximal members, layer k = maximal among what is left."""
    rest = sorted(set(family), key=lambda s: (s.order, s.elements))
    layers = []
    while rest:
        top = [H for H in rest if not any(H < K for K in rest)]
        layers.append(sorted(top, key=lambda s: s.elements))
        rest = [H for H in rest if H not in top]
    return layers
