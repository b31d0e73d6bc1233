"""Unitary representations of finite groups.

Matrices are complex floats; every comparison uses the tolerance stored on the
representation.  Integer-valued facts (multiplicities, character norms) are
rounded and the rounding error is checked against that tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    CharacterNormNotIntegral,
    ConjugationLeavesSubgroup,
    IncompleteIrrepList,
    SchurDimensionAnomaly,
)
from .exactmath import DEFAULT_TOL, CxMatrix, cx_solve_homogeneous
from .groups import FiniteGroup, Subgroup

PHASE_CUTOFF = 1e-6


@dataclass(frozen=True)
class UnitaryRep:
    group: FiniteGroup = field(repr=False)
    matrices: np.ndarray = field(repr=False)  # shape (|G|, dim, dim)
    tol: float = DEFAULT_TOL
    name: str = ""

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[0] != self.group.order or mats.shape[1] != mats.shape[2]:
            raise ValueError("need one square matrix per group element")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __call__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def check(self) -> None:
        G, M, t = self.group, self.matrices, self.tol
        prod = np.einsum("aij,bjk->abik", M, M)
        err = np.max(np.abs(prod - M[G.mul])) if G.order else 0.0
        if err > t:
            raise ValueError(f"{self.name or 'rep'}: not a homomorphism (error {err:.2e})")
        eye = np.eye(self.dim)
        uerr = np.max(np.abs(np.einsum("gji,gjk->gik", M.conj(), M) - eye))
        if uerr > t:
            raise ValueError(f"{self.name or 'rep'}: not unitary (error {uerr:.2e})")

    @classmethod
    def from_generators(cls, G: FiniteGroup, images: Mapping[int, np.ndarray], tol: float = DEFAULT_TOL, name: str = "") -> "UnitaryRep":
        gens = sorted(images)
        tree = G.words(gens)
        d = np.asarray(images[gens[0]]).shape[0]
        mats = np.empty((G.order, d, d), dtype=complex)
        mats[0] = np.eye(d)
        order = sorted(range(1, G.order), key=lambda x: _depth(tree, x))
        for x in order:
            parent, g = tree[x]
            mats[x] = mats[parent] @ np.asarray(images[g], dtype=complex)
        rep = cls(G, mats, tol, name)
        rep.check()
        return rep

    @classmethod
    def trivial(cls, G: FiniteGroup, tol: float = DEFAULT_TOL) -> "UnitaryRep":
        return cls(G, np.ones((G.order, 1, 1)), tol, "trivial")

    @classmethod
    def regular(cls, G: FiniteGroup, tol: float = DEFAULT_TOL) -> "UnitaryRep":
        n = G.order
        mats = np.zeros((n, n, n))
        for g in range(n):
            mats[g, G.mul[g], np.arange(n)] = 1.0
        return cls(G, mats, tol, "regular")

    def with_tol(self, tol: float) -> "UnitaryRep":
        return UnitaryRep(self.group, self.matrices, tol, self.name)

    def direct_sum(self, other: "UnitaryRep") -> "UnitaryRep":
        d1, d2 = self.dim, other.dim
        mats = np.zeros((self.group.order, d1 + d2, d1 + d2), dtype=complex)
        mats[:, :d1, :d1] = self.matrices
        mats[:, d1:, d1:] = other.matrices
        return UnitaryRep(self.group, mats, max(self.tol, other.tol), f"{self.name}+{other.name}")

    def restrict(self, H: Subgroup) -> "UnitaryRep":
        return UnitaryRep(H.as_group(), self.matrices[list(H.elements)], self.tol, f"{self.name}|H")

    def conjugated_by(self, U: np.ndarray) -> "UnitaryRep":
        """U^* rho(g) U"""
        return UnitaryRep(self.group, np.einsum("ji,gjk,kl->gil", U.conj(), self.matrices, U), self.tol, self.name)


def _depth(tree, x) -> int:
    d = 0
    while tree[x] is not None:
        x = tree[x][0]
        d += 1
    return d


@dataclass(frozen=True)
class Intertwiner:
    """C with C source(h) = target(h) C, unitary, phase-normalised."""

    source: UnitaryRep = field(repr=False)
    target: UnitaryRep = field(repr=False)
    matrix: CxMatrix
    scalar_ambiguity: str = "unique up to a unit scalar (Schur)"

    def residual(self) -> float:
        C = self.matrix.data
        return float(np.max(np.abs(np.einsum("ij,hjk->hik", C, self.source.matrices) - np.einsum("hij,jk->hik", self.target.matrices, C))))


def character(rho: UnitaryRep) -> np.ndarray:
    """Trace per conjugacy class, in ``group.conjugacy_classes`` order."""
    tr = np.trace(rho.matrices, axis1=1, axis2=2)
    out = []
    for cl in rho.group.conjugacy_classes:
        vals = tr[list(cl)]
        if np.max(np.abs(vals - vals[0])) > rho.tol * max(1, rho.dim):
            raise ValueError("character is not a class function")
        out.append(vals[0])
    return np.array(out)


def element_character(rho: UnitaryRep) -> np.ndarray:
    return np.trace(rho.matrices, axis1=1, axis2=2)


def char_inner(chi1: np.ndarray, chi2: np.ndarray, G: FiniteGroup) -> complex:
    """<chi1, chi2> = |G|^-1 sum_g chi1(g) conj(chi2(g)); accepts per-class or per-element vectors."""
    if len(chi1) == G.order and len(chi2) == G.order:
        return complex(np.sum(chi1 * np.conj(chi2)) / G.order)
    sizes = np.array([len(c) for c in G.conjugacy_classes])
    return complex(np.sum(sizes * chi1 * np.conj(chi2)) / G.order)


def _rounded(x: complex, tol: float, what: str) -> int:
    k = int(round(x.real))
    if abs(x - k) > tol:
        raise CharacterNormNotIntegral(f"{what} = {x:.6g} is not within {tol:g} of an integer")
    return k


def is_irreducible(rho: UnitaryRep) -> bool:
    chi = element_character(rho)
    n = _rounded(char_inner(chi, chi, rho.group), rho.tol * max(1, rho.dim) ** 2, "character norm")
    return n == 1


def multiplicity(rho: UnitaryRep, irrep: UnitaryRep) -> int:
    tol = max(rho.tol, irrep.tol) * max(1, rho.dim * irrep.dim)
    return _rounded(char_inner(element_character(rho), element_character(irrep), rho.group), tol, "multiplicity")


@dataclass(frozen=True)
class IsotypicDecomposition:
    multiplicities: tuple[int, ...]
    unitary: np.ndarray  # columns: copy 1 of irrep k (dim_k cols), copy 2, ...
    blocks: tuple[tuple[int, int, int], ...]  # (irrep index, start column, stop column)

    def block_diagonal(self, irreps: Sequence[UnitaryRep], g: int) -> np.ndarray:
        parts = []
        for k, m in enumerate(self.multiplicities):
            for _ in range(m):
                parts.append(irreps[k].matrices[g])
        n = sum(p.shape[0] for p in parts)
        out = np.zeros((n, n), dtype=complex)
        s = 0
        for p in parts:
            d = p.shape[0]
            out[s:s + d, s:s + d] = p
            s += d
        return out


def _orthonormal_columns(M: np.ndarray, rank: int) -> np.ndarray:
    u, s, _ = np.linalg.svd(M)
    return u[:, :rank]


def isotypic_decompose(rho: UnitaryRep, irreps: Sequence[UnitaryRep]) -> IsotypicDecomposition:
    """Split rho into copies of the given irreducibles.

    Multiplicities come from characters.  For each irrep the matrix-unit
    projector P^{11} = (d/|G|) sum conj(rho_k(g)_{11}) rho(g) cuts out one
    vector per copy; the other basis vectors of that copy are P^{j1} applied
    to it, which makes the copy transform exactly like rho_k.
    """
    G = rho.group
    mults = tuple(multiplicity(rho, r) for r in irreps)
    if sum(m * r.dim for m, r in zip(mults, irreps)) != rho.dim:
        raise IncompleteIrrepList(f"irreps explain {sum(m * r.dim for m, r in zip(mults, irreps))} of {rho.dim} dimensions")
    cols = []
    blocks = []
    start = 0
    for k, (m, rk) in enumerate(zip(mults, irreps)):
        if m == 0:
            continue
        d = rk.dim
        # P[j] is the matrix unit projector P^{j1}
        P = [(d / G.order) * np.einsum("g,gab->ab", rk.matrices[:, j, 0].conj(), rho.matrices) for j in range(d)]
        seeds = _orthonormal_columns(P[0], m)
        for i in range(m):
            x = seeds[:, i]
            for j in range(d):
                cols.append(P[j] @ x)
            blocks.append((k, start, start + d))
            start += d
    U = np.column_stack(cols) if cols else np.zeros((rho.dim, 0), dtype=complex)
    return IsotypicDecomposition(mults, U, tuple(blocks))


def conjugate_rep(rho: UnitaryRep, H: Subgroup, g: int, target: Subgroup | None = None) -> UnitaryRep:
    """rho_g(k) = rho(g^-1 k g) on target = gHg^-1 (defaults to H itself)."""
    G = H.parent
    if target is None:
        if H.conjugate(g) != H:
            bad = next(h for h in H.elements if G.conj(G.i(g), h) not in H)
            raise ConjugationLeavesSubgroup(f"g^-1 h g leaves H for h={bad}")
        target = H
    elif H.conjugate(g) != target:
        raise ConjugationLeavesSubgroup("supplied target is not gHg^-1")
    gi = G.i(g)
    mats = np.stack([rho.matrices[H.local(G.conj(gi, k))] for k in target.elements])
    return UnitaryRep(target.as_group(), mats, rho.tol, f"{rho.name}^{g}")


def _commutation_system(rho: UnitaryRep, sigma: UnitaryRep) -> list[np.ndarray]:
    """Constraints on vec_row(C) for C rho(h) = sigma(h) C."""
    a, b = sigma.dim, rho.dim
    blocks = []
    for h in range(rho.group.order):
        blocks.append(np.kron(np.eye(a), rho.matrices[h].T) - np.kron(sigma.matrices[h], np.eye(b)))
    return blocks


def hom_space(rho: UnitaryRep, sigma: UnitaryRep) -> list[np.ndarray]:
    """Basis of {C : C rho(h) = sigma(h) C} as sigma.dim x rho.dim matrices."""
    tol = max(rho.tol, sigma.tol)
    sol = cx_solve_homogeneous([CxMatrix(b, tol) for b in _commutation_system(rho, sigma)], tol=tol)
    return [v.reshape(sigma.dim, rho.dim) for v in sol]


def normalize_phase(C: np.ndarray) -> np.ndarray:
    flat = C.reshape(-1)
    idx = int(np.nonzero(np.abs(flat) > PHASE_CUTOFF)[0][0])
    return C * (abs(flat[idx]) / flat[idx])


def intertwiner(rho: UnitaryRep, sigma: UnitaryRep) -> Intertwiner | None:
    if rho.group.order != sigma.group.order or not np.array_equal(rho.group.mul, sigma.group.mul):
        raise ValueError("representations live on different groups")
    sol = hom_space(rho, sigma)
    if len(sol) == 0:
        return None
    if len(sol) > 1:
        raise SchurDimensionAnomaly(f"intertwiner space has dimension {len(sol)}; inputs are not irreducible")
    C = sol[0]
    c = np.real(np.trace(C.conj().T @ C)) / C.shape[1]
    C = normalize_phase(C / np.sqrt(c))
    tol = max(rho.tol, sigma.tol)
    return Intertwiner(rho, sigma, CxMatrix(C, tol))


def split_irreducible(rho: UnitaryRep, seed: int = 0) -> list[UnitaryRep]:
    """Decompose a unitary rep into irreducible blocks via a generic Hermitian commutant element."""
    rng = np.random.default_rng(seed)
    comm = hom_space(rho, rho)
    for _ in range(20):
        T = np.zeros((rho.dim, rho.dim), dtype=complex)
        for X in comm:
            c = complex(rng.standard_normal(), rng.standard_normal())
            T += c * X + (c * X).conj().T
        w, V = np.linalg.eigh(T)
        groups = []
        cur = [0]
        for i in range(1, len(w)):
            if abs(w[i] - w[cur[-1]]) < 1e-6:
                cur.append(i)
            else:
                groups.append(cur)
                cur = [i]
        groups.append(cur)
        pieces = [rho.conjugated_by(V[:, gidx]) for gidx in groups]
        if all(is_irreducible(p) for p in pieces):
            return pieces
    raise RuntimeError("failed to split representation into irreducibles")


def irreps_from_restriction(G_irreps: Sequence[UnitaryRep], H: Subgroup) -> list[UnitaryRep]:
    """All irreducibles of H, found among the constituents of restricted irreps of G.

    Every irreducible of H occurs in the restriction of some irreducible of
    the ambient group, so this list is complete; completeness is asserted via
    sum of squared dimensions.
    """
    found: list[UnitaryRep] = []
    chars: list[np.ndarray] = []
    for rho in G_irreps:
        for piece in split_irreducible(rho.restrict(H)):
            chi = element_character(piece)
            if not any(np.max(np.abs(chi - c)) < 1e-6 for c in chars):
                found.append(piece)
                chars.append(chi)
    if sum(r.dim ** 2 for r in found) != H.order:
        raise IncompleteIrrepList("restriction did not produce every irreducible of H")
    order = sorted(range(len(found)), key=lambda i: (found[i].dim, _char_key(chars[i])))
    out = []
    for n, i in enumerate(order):
        out.append(UnitaryRep(found[i].group, found[i].matrices, found[i].tol, f"irr{n}"))
    return out


def _char_key(chi: np.ndarray) -> tuple:
    return tuple((round(float(z.real), 6), round(float(z.imag), 6)) for z in chi)


def group_irreps(G: FiniteGroup, seed: int = 0) -> list[UnitaryRep]:
    """Irreducibles of an arbitrary small group, split out of the regular representation.

    The trivial representation comes first and is named ``triv``; the rest are
    ``irr1, irr2, ...`` ordered by dimension and then by character values.
    """
    cached = getattr(G, "_irreps", None)
    if cached is not None:
        return cached
    found: list[UnitaryRep] = []
    chars: list[np.ndarray] = []
    for piece in split_irreducible(UnitaryRep.regular(G), seed=seed):
        chi = element_character(piece)
        if not any(np.max(np.abs(chi - c)) < 1e-6 for c in chars):
            found.append(piece)
            chars.append(chi)
    if sum(r.dim ** 2 for r in found) != G.order:
        raise IncompleteIrrepList("regular representation did not yield every irreducible")
    triv = next(i for i, c in enumerate(chars) if np.allclose(c, 1))
    rest = sorted((i for i in range(len(found)) if i != triv), key=lambda i: (found[i].dim, _char_key(chars[i])))
    out = [UnitaryRep(G, found[triv].matrices, found[triv].tol, "triv")]
    for n, i in enumerate(rest, 1):
        out.append(UnitaryRep(G, found[i].matrices, found[i].tol, f"irr{n}"))
    G._irreps = out
    return out
