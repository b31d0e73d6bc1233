"""Shipped finite groups with explicit unitary irreducible representations."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .groups import FiniteGroup, Subgroup
from .reps import UnitaryRep, irreps_from_restriction


@dataclass(frozen=True)
class CatalogGroup:
    group: FiniteGroup
    irreps: tuple[UnitaryRep, ...]


def _perm_index(G: FiniteGroup, perm) -> int:
    return G.permutations.index(tuple(perm))


def _cyclic(n: int) -> CatalogGroup:
    G = FiniteGroup.cyclic(n)
    irreps = []
    for j in range(n):
        z = np.exp(2j * np.pi * j * np.arange(n) / n)
        irreps.append(UnitaryRep(G, z.reshape(n, 1, 1), name=f"chi{j}"))
    return CatalogGroup(G, tuple(irreps))


def _product(a: CatalogGroup, b: CatalogGroup, name: str) -> CatalogGroup:
    G = FiniteGroup.direct_product(a.group, b.group, name=name)
    irreps = []
    nb = b.group.order
    for ra in a.irreps:
        for rb in b.irreps:
            mats = np.stack([np.kron(ra.matrices[x // nb], rb.matrices[x % nb]) for x in range(G.order)])
            irreps.append(UnitaryRep(G, mats, name=f"{ra.name}*{rb.name}"))
    irreps.sort(key=lambda r: r.dim)
    return CatalogGroup(G, tuple(irreps))


def dihedral_permutations(n: int) -> tuple[list[int], list[int]]:
    """Rotation i -> i+1 and reflection i -> -i on the vertices of an n-gon."""
    r = [(i + 1) % n for i in range(n)]
    s = [(-i) % n for i in range(n)]
    return r, s


def _dihedral(n: int, name: str) -> CatalogGroup:
    r, s = dihedral_permutations(n)
    G = FiniteGroup.from_permutations([r, s], name=name)
    ri, si = _perm_index(G, r), _perm_index(G, s)
    reps = []
    one_dim = [(1, 1), (1, -1)]
    if n % 2 == 0:
        one_dim += [(-1, 1), (-1, -1)]
    for k, (a, b) in enumerate(one_dim):
        reps.append(UnitaryRep.from_generators(G, {ri: np.array([[a]]), si: np.array([[b]])}, name=f"lin{k}"))
    for j in range(1, (n - 1) // 2 + 1):
        t = 2 * np.pi * j / n
        rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        ref = np.array([[1.0, 0.0], [0.0, -1.0]])
        reps.append(UnitaryRep.from_generators(G, {ri: rot, si: ref}, name=f"rot{j}"))
    return CatalogGroup(G, tuple(reps))


def _matrix_group(gens: list[np.ndarray], name: str) -> tuple[FiniteGroup, list[np.ndarray]]:
    def key(m):
        return tuple(np.round(m, 8).reshape(-1).tolist())

    d = gens[0].shape[0]
    elems = [np.eye(d, dtype=complex)]
    index = {key(elems[0]): 0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in gens:
                m = elems[i] @ g
                k = key(m)
                if k not in index:
                    index[k] = len(elems)
                    elems.append(m)
                    nxt.append(index[k])
        frontier = nxt
    n = len(elems)
    mul = np.array([[index[key(elems[a] @ elems[b])] for b in range(n)] for a in range(n)])
    return FiniteGroup(mul, name=name), elems


def _q8() -> CatalogGroup:
    qi = np.array([[1j, 0], [0, -1j]])
    qj = np.array([[0, 1], [-1, 0]], dtype=complex)
    G, elems = _matrix_group([qi, qj], "Q8")
    gi = next(k for k, m in enumerate(elems) if np.allclose(m, qi))
    gj = next(k for k, m in enumerate(elems) if np.allclose(m, qj))
    reps = []
    for k, (a, b) in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)]):
        reps.append(UnitaryRep.from_generators(G, {gi: np.array([[a]]), gj: np.array([[b]])}, name=f"lin{k}"))
    reps.append(UnitaryRep(G, np.stack(elems), name="spin"))
    G.labels = _quaternion_labels(elems)
    return CatalogGroup(G, tuple(reps))


def _quaternion_labels(elems) -> list[str]:
    names = {
        (1, 0, 0, 1): "1", (-1, 0, 0, -1): "-1",
        (1j, 0, 0, -1j): "i", (-1j, 0, 0, 1j): "-i",
        (0, 1, -1, 0): "j", (0, -1, 1, 0): "-j",
        (0, 1j, 1j, 0): "k", (0, -1j, -1j, 0): "-k",
    }
    out = []
    for m in elems:
        flat = tuple(complex(round(z.real), round(z.imag)) for z in m.reshape(-1))
        out.append(next((v for k, v in names.items() if tuple(complex(x) for x in k) == flat), "?"))
    return out


def _a4() -> CatalogGroup:
    c = [1, 2, 0, 3]
    t = [1, 0, 3, 2]
    G = FiniteGroup.from_permutations([c, t], name="A4")
    ci, ti = _perm_index(G, c), _perm_index(G, t)
    w = np.exp(2j * np.pi / 3)
    reps = [UnitaryRep.from_generators(G, {ci: np.array([[w ** k]]), ti: np.array([[1]])}, name=f"lin{k}") for k in range(3)]
    # orthonormal basis of the sum-zero subspace of C^4
    Q, _ = np.linalg.qr(np.array([[1, 1, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=float))
    P = np.zeros((G.order, 4, 4))
    for g, perm in enumerate(G.permutations):
        P[g, list(perm), list(range(4))] = 1.0
    reps.append(UnitaryRep(G, np.einsum("ai,gab,bj->gij", Q, P, Q), name="std"))
    return CatalogGroup(G, tuple(reps))


def _cyclic_extension(ns: tuple[int, ...], phi: Callable, m: int, a0: tuple[int, ...], name: str) -> CatalogGroup:
    """G = <A, x> with A = Z_n1 x ... abelian normal, x a x^-1 = phi(a), x^m = a0 in A.

    Elements are pairs (a, e), 0 <= e < m.  Irreps by Clifford induction: a character chi
    of A with x-orbit of length t extends to A<x^t> by x^t -> lam (lam^(m/t) = chi(a0)) and
    induces up to a t-dimensional irrep.
    """
    A = [tuple(int(v) for v in a) for a in np.ndindex(*ns)]

    def add(a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, ns))

    def phi_pow(a, e):
        for _ in range(e):
            a = tuple(v % n for v, n in zip(phi(a), ns))
        return a

    elems = [(a, e) for e in range(m) for a in A]
    eidx = {g: i for i, g in enumerate(elems)}
    mul = np.empty((len(elems), len(elems)), dtype=np.int64)
    for i, (a, e) in enumerate(elems):
        for j, (b, f) in enumerate(elems):
            c = add(a, phi_pow(b, e))
            if e + f >= m:
                c = add(c, a0)
            mul[i, j] = eidx[(c, (e + f) % m)]
    letters = "abc"
    labels = ["".join(f"{letters[k]}{v}" for k, v in enumerate(a) if v) + (f"x{e}" if e else "") or "1" for a, e in elems]
    G = FiniteGroup(mul, name=name, labels=labels)

    def chi(j, a) -> complex:
        return np.exp(2j * np.pi * sum(jk * ak / n for jk, ak, n in zip(j, a, ns)))

    # phi has finite order; its inverse is the last power before the identity
    order = next(k for k in range(1, 64) if all(phi_pow(a, k) == a for a in A))
    table = {j: np.array([chi(j, a) for a in A]) for j in A}

    def moved(j):
        vals = np.array([chi(j, phi_pow(a, order - 1)) for a in A])
        return next(k for k, v in table.items() if np.allclose(v, vals))

    seen: set = set()
    reps = []
    for j in A:
        if j in seen:
            continue
        orbit = [j]
        while (nxt := moved(orbit[-1])) != j:
            orbit.append(nxt)
        seen.update(orbit)
        t, q = len(orbit), m // len(orbit)
        root = chi(j, a0) ** (1 / q)
        for s in range(q):
            lam = root * np.exp(2j * np.pi * s / q)
            X = np.zeros((t, t), dtype=complex)
            for i in range(t - 1):
                X[i + 1, i] = 1
            X[0, t - 1] = lam
            mats = []
            for a, e in elems:
                D = np.diag([chi(j, phi_pow(a, (order - i % order) % order)) for i in range(t)])
                mats.append(D @ np.linalg.matrix_power(X, e))
            reps.append(UnitaryRep(G, np.stack(mats), name=f"ind{len(reps)}"))
    reps.sort(key=lambda r: r.dim)
    return CatalogGroup(G, tuple(reps))


def _builders() -> dict[str, Callable[[], CatalogGroup]]:
    b: dict[str, Callable[[], CatalogGroup]] = {}
    for n in range(1, 17):
        b[f"Z{n}"] = (lambda n=n: _cyclic(n))
    b["V4"] = lambda: _product(_cyclic(2), _cyclic(2), "V4")
    b["Z2xZ4"] = lambda: _product(_cyclic(2), _cyclic(4), "Z2xZ4")
    b["Z2xZ2xZ2"] = lambda: _product(_product(_cyclic(2), _cyclic(2), "V4"), _cyclic(2), "Z2xZ2xZ2")
    b["Z3xZ3"] = lambda: _product(_cyclic(3), _cyclic(3), "Z3xZ3")
    b["Z2xZ6"] = lambda: _product(_cyclic(2), _cyclic(6), "Z2xZ6")
    b["Z2xZ8"] = lambda: _product(_cyclic(2), _cyclic(8), "Z2xZ8")
    b["Z4xZ4"] = lambda: _product(_cyclic(4), _cyclic(4), "Z4xZ4")
    b["S3"] = lambda: _dihedral(3, "S3")
    for n in (4, 5, 6, 7, 8):
        b[f"D{n}"] = (lambda n=n: _dihedral(n, f"D{n}"))
    b["Q8"] = _q8
    b["A4"] = _a4
    b["Z2xS3"] = lambda: _product(_cyclic(2), _dihedral(3, "S3"), "Z2xS3")
    # the remaining groups of order 12 and 16
    b["Dic3"] = lambda: _cyclic_extension((6,), lambda a: (-a[0],), 2, (3,), "Dic3")
    b["Z2xZ2xZ2xZ2"] = lambda: _product(catalog_group("Z2xZ2xZ2"), _cyclic(2), "Z2xZ2xZ2xZ2")
    b["Z2xZ2xZ4"] = lambda: _product(catalog_group("V4"), _cyclic(4), "Z2xZ2xZ4")
    b["Z2xD4"] = lambda: _product(_cyclic(2), catalog_group("D4"), "Z2xD4")
    b["Z2xQ8"] = lambda: _product(_cyclic(2), catalog_group("Q8"), "Z2xQ8")
    b["Q16"] = lambda: _cyclic_extension((8,), lambda a: (-a[0],), 2, (4,), "Q16")
    b["SD16"] = lambda: _cyclic_extension((8,), lambda a: (3 * a[0],), 2, (0,), "SD16")
    b["M16"] = lambda: _cyclic_extension((8,), lambda a: (5 * a[0],), 2, (0,), "M16")
    b["Z4sdZ4"] = lambda: _cyclic_extension((4,), lambda a: (-a[0],), 4, (0,), "Z4sdZ4")
    b["Z4xZ2sdZ2"] = lambda: _cyclic_extension((4, 2), lambda a: (a[0], a[1] + a[0]), 2, (0, 0), "Z4xZ2sdZ2")
    b["Pauli"] = lambda: _cyclic_extension((4, 2), lambda a: (a[0] + 2 * a[1], a[1]), 2, (0, 0), "Pauli")
    return b


BUILDERS = _builders()


@lru_cache(maxsize=None)
def catalog_group(name: str) -> CatalogGroup:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown catalog group {name!r}; known: {sorted(BUILDERS)}") from None


def group_names() -> list[str]:
    return list(BUILDERS)


def subgroup_irreps(name: str, H: Subgroup) -> list[UnitaryRep]:
    """Irreducibles of a subgroup of a catalog group (the shipped list when H = G)."""
    cg = catalog_group(name)
    if H.order == cg.group.order:
        return list(cg.irreps)
    return _subgroup_irreps_cached(name, H.elements)


@lru_cache(maxsize=None)
def _subgroup_irreps_cached(name: str, elements: tuple[int, ...]) -> list[UnitaryRep]:
    cg = catalog_group(name)
    return irreps_from_restriction(cg.irreps, Subgroup(cg.group, elements))
