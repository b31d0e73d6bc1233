"""Rational chain complexes with G-action, the Poincare duality complex and signatures.

Cochains are identified with chains through the simplex basis, so the
coboundary is the transpose of the boundary.  A group element acts on both by
the same signed permutation.

The duality map D_k : C^{n-k} -> C_k is the symmetrised front/back-face cap
product with the fundamental cycle,

    AW_k(phi) = sum_s eps_s (-1)^{k(n-k)} phi(s[0..n-k]) s[n-k..n]
    D_k       = (AW_k + (-1)^{k(n-k)} AW_{n-k}^T) / 2,

which satisfies the chain-homotopy identity and the symmetry identity exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ApcPropertyFailure, DualityFailure, NotClosed, NotOrientable, OrientationReversed
from .exactmath import ColumnReducer, RatMatrix, SignatureTriple, SparseVec, symmetric_signature, vec_axpy
from .gcomplex import QuotientComplex, SimplicialGComplex, find_orientation, quotient_complex
from .model import CheckReport
from .reps import UnitaryRep, element_character, group_irreps

HALF = Fraction(1, 2)


def _transpose_columns(cols: Sequence[SparseVec], n_rows: int) -> list[SparseVec]:
    out: list[SparseVec] = [{} for _ in range(n_rows)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            out[i][j] = v
    return out


class CellChains:
    """Exact homology bookkeeping shared by simplicial and orbit-cell complexes."""

    counts: list[int]

    def boundary_columns(self, k: int) -> list[SparseVec]:
        raise NotImplementedError

    @property
    def top(self) -> int:
        return len(self.counts) - 1

    def count(self, k: int) -> int:
        return self.counts[k] if 0 <= k < len(self.counts) else 0

    def coboundary_columns(self, k: int) -> list[SparseVec]:
        """Columns of delta_k : C^k -> C^{k+1}."""
        if k + 1 > self.top:
            return [{} for _ in range(self.count(k))]
        return _transpose_columns(self.boundary_columns(k + 1), self.count(k))

    def rank(self, k: int) -> int:
        """Rank of d_k."""
        if k <= 0 or k > self.top:
            return 0
        if not hasattr(self, "_ranks"):
            self._ranks = {}
        if k not in self._ranks:
            red = ColumnReducer()
            for col in self.boundary_columns(k):
                red.add(col)
            self._ranks[k] = red.rank
        return self._ranks[k]

    def betti(self) -> list[int]:
        return [self.count(k) - self.rank(k) - self.rank(k + 1) for k in range(self.top + 1)]

    def coboundary_reducer(self, k: int) -> ColumnReducer:
        """Reducer spanning B^k = im delta_{k-1}."""
        red = ColumnReducer()
        if k >= 1:
            for col in self.coboundary_columns(k - 1):
                red.add(col)
        return red

    def cohomology_reps(self, k: int) -> list[SparseVec]:
        """Cocycles representing a basis of H^k, found by exact elimination."""
        if not hasattr(self, "_reps"):
            self._reps = {}
        if k not in self._reps:
            self._reps[k] = self._cohomology_reps(k)
        return self._reps[k]

    def _cohomology_reps(self, k: int) -> list[SparseVec]:
        h = self.count(k) - self.rank(k) - self.rank(k + 1)
        if h == 0:
            return []
        B = self.coboundary_reducer(k)
        reps: list[SparseVec] = []
        red = ColumnReducer()
        for j, col in enumerate(self.coboundary_columns(k)):
            r, t = red.add(col, {j: 1})
            if r:
                continue
            rem, _ = B.reduce(t)
            if rem:
                B.add(rem)
                reps.append(t)
                if len(reps) == h:
                    break
        if len(reps) != h:
            raise AssertionError(f"found {len(reps)} cohomology classes in degree {k}, expected {h}")
        return reps


class GChainComplex(CellChains):
    def __init__(self, c: SimplicialGComplex):
        self.complex = c
        self.G = c.G
        self.counts = list(c.f_vector)
        self._bd = {}

    def boundary_columns(self, k: int) -> list[SparseVec]:
        if k not in self._bd:
            self._bd[k] = self.complex.boundary_columns(k)
        return self._bd[k]

    def boundary(self, k: int) -> RatMatrix:
        return RatMatrix(self.count(k - 1), self.count(k), self.boundary_columns(k))

    def act(self, g: int, k: int, vec: SparseVec) -> SparseVec:
        """g on a chain or cochain of degree k (the same signed permutation)."""
        img = self.complex.simplex_action[k][g]
        sg = self.complex.simplex_action_sign[k][g]
        return {int(img[i]): int(sg[i]) * v for i, v in vec.items()}

    def action_matrix(self, g: int, k: int) -> RatMatrix:
        return RatMatrix(self.count(k), self.count(k), [self.act(g, k, {i: 1}) for i in range(self.count(k))])

    def check(self) -> CheckReport:
        rep = CheckReport("chain complex", tol=0.0)
        for k in range(2, self.top + 1):
            rep.checks += 1
            if not (self.boundary(k - 1) @ self.boundary(k)).is_zero():
                rep.fail(("d d != 0", k))
        for g in range(self.G.order):
            for k in range(1, self.top + 1):
                for j, col in enumerate(self.boundary_columns(k)):
                    rep.checks += 1
                    lhs = {}
                    for i, v in self.act(g, k, {j: 1}).items():
                        vec_axpy(lhs, v, self.boundary_columns(k)[i])
                    if lhs != self.act(g, k - 1, col):
                        rep.fail(("g not a chain map", self.G.labels[g], k, j))
        return rep


def chains(c: SimplicialGComplex) -> GChainComplex:
    cc = GChainComplex(c)
    rep = cc.check()
    if not rep.passed:
        raise AssertionError(f"chain complex check failed: {rep.violations[:3]}")
    return cc


def permutation_module_check(cc: GChainComplex) -> CheckReport:
    """Signed fixed-simplex counts against the induced characters of the orbit census."""
    c, G = cc.complex, cc.G
    rep = CheckReport("permutation module", tol=0.0)
    census = []
    for k in range(cc.top + 1):
        act, sgn = c.simplex_action[k], c.simplex_action_sign[k]
        direct = [int(sum(sgn[g, i] for i in range(cc.count(k)) if act[g, i] == i)) for g in range(G.order)]
        induced = [Fraction(0)] * G.order
        seen = set()
        orbits = []
        for i in range(cc.count(k)):
            if i in seen:
                continue
            orb = {int(act[g, i]) for g in range(G.order)}
            seen |= orb
            stab = [h for h in range(G.order) if act[h, i] == i]
            orbits.append(len(stab))
            for g in range(G.order):
                tot = 0
                for x in range(G.order):
                    y = G.conj(G.i(x), g)
                    if act[y, i] == i:
                        tot += int(sgn[y, i])
                induced[g] += Fraction(tot, len(stab))
        rep.checks += 1
        if [int(v) if v.denominator == 1 else v for v in induced] != direct:
            rep.fail(("character mismatch", k, direct, [str(v) for v in induced]))
        census.append({"degree": k, "orbits": len(orbits), "character": direct, "stabiliser_orders": sorted(orbits)})
    rep.notes["census"] = census
    return rep


def fundamental_cycle(c: SimplicialGComplex) -> dict[int, int]:
    """Signed sum of top simplices as {facet index: sign}, checked to be a cycle."""
    n = c.dim
    tops = c.simplices[n]
    if any(len(f) != n + 1 for f in c.facets):
        bad = next(f for f in c.facets if len(f) != n + 1)
        raise NotClosed(f"simplex {list(bad)} is maximal but not top-dimensional", witness=list(bad))
    if n > 0:
        cof: dict = {}
        for f in tops:
            for i in range(n + 1):
                r = f[:i] + f[i + 1:]
                cof[r] = cof.get(r, 0) + 1
        for r in c.simplices[n - 1]:
            if cof.get(r, 0) != 2:
                raise NotClosed(f"ridge {list(r)} has {cof.get(r, 0)} cofaces", witness=list(r))
    orient = c.orientation if c.orientation is not None else find_orientation(c)
    fund = {i: int(orient[f]) for i, f in enumerate(tops)}
    if n > 0:
        bd: SparseVec = {}
        cols = c.boundary_columns(n)
        for i, s in fund.items():
            vec_axpy(bd, s, cols[i])
        if bd:
            r = c.simplices[n - 1][min(bd)]
            raise NotOrientable(f"supplied orientation is not a cycle near ridge {list(r)}", witness=list(r))
    return fund


def reverses_orientation(cc: GChainComplex, fund: dict[int, int]) -> list[int]:
    n = cc.top
    return [g for g in range(cc.G.order) if cc.act(g, n, fund) != fund]


@dataclass
class APC:
    chain: GChainComplex
    fundamental: dict[int, int]
    aw: list[RatMatrix]
    D: list[RatMatrix]
    report: CheckReport = field(default_factory=lambda: CheckReport("APC", tol=0.0))

    @property
    def n(self) -> int:
        return self.chain.top

    @property
    def complex(self) -> SimplicialGComplex:
        return self.chain.complex


def cap_matrix(c: SimplicialGComplex, fund: dict[int, int], k: int) -> RatMatrix:
    """Unsymmetrised AW_k : C^{n-k} -> C_k."""
    n = c.dim
    t = (-1) ** (k * (n - k))
    ent: dict = {}
    for i, s in fund.items():
        f = c.simplices[n][i]
        key = (c.index[k][f[n - k:]], c.index[n - k][f[: n - k + 1]])
        ent[key] = ent.get(key, 0) + t * s
    return RatMatrix.from_entries(c.count(k), c.count(n - k), ent)


def duality_map(aw: Sequence[RatMatrix], n: int, k: int) -> RatMatrix:
    s = (-1) ** (k * (n - k))
    return (aw[k] + aw[n - k].T.scale(s)).scale(HALF)


def build_apc(c: SimplicialGComplex, verify: bool = True) -> APC:
    cc = chains(c)
    fund = fundamental_cycle(c)
    n = c.dim
    aw = [cap_matrix(c, fund, k) for k in range(n + 1)]
    D = [duality_map(aw, n, k) for k in range(n + 1)]
    apc = APC(cc, fund, aw, D)
    if verify:
        apc.report = verify_apc(apc)
        if not apc.report.passed:
            prop, deg = apc.report.violations[0][:2]
            raise ApcPropertyFailure(prop, deg, str(apc.report.violations[0]))
    return apc


def verify_apc(apc: APC) -> CheckReport:
    """Properties (1)-(4): dd = 0, chain homotopy, symmetry, homology isomorphism."""
    cc, n, D = apc.chain, apc.n, apc.D
    rep = CheckReport("APC", tol=0.0)
    for k in range(2, n + 1):
        rep.checks += 1
        if not (cc.boundary(k - 1) @ cc.boundary(k)).is_zero():
            rep.fail((1, k, "d_{k-1} d_k != 0"))
    for k in range(1, n + 1):
        rep.checks += 1
        lhs = cc.boundary(k) @ D[k]
        rhs = D[k - 1] @ cc.boundary(n - k + 1).T
        if not (lhs + rhs.scale((-1) ** (k + 1))).is_zero():
            rep.fail((2, k, "d_k D_k + (-1)^{k+1} D_{k-1} delta != 0"))
    for k in range(n + 1):
        rep.checks += 1
        if D[k] != D[n - k].T.scale((-1) ** (k * (n - k))):
            rep.fail((3, k, "D_k != (-1)^{k(n-k)} D*_{n-k}"))
    betti = cc.betti()
    for k in range(n + 1):
        rep.checks += 1
        h = betti[n - k]
        if betti[k] != h:
            rep.fail((4, k, f"dim H^{n - k} = {h} but dim H_{k} = {betti[k]}"))
            continue
        reps = cc.cohomology_reps(n - k)
        red = ColumnReducer()
        for col in cc.boundary_columns(k + 1):
            red.add(col)
        base = red.rank
        for z in reps:
            red.add(D[k].apply(z))
        if red.rank != base + h:
            rep.fail((4, k, "H(D_k) is not injective"))
    rep.notes["betti"] = betti
    return rep


# ---------------------------------------------------------------------------
# Signatures


def middle_degree(n: int) -> int | None:
    return n // 2 if n % 4 == 0 else None


def pairing_matrix(apc: APC, reps: Sequence[SparseVec]) -> RatMatrix:
    m = apc.n // 2
    Dm = apc.D[m]
    images = [Dm.apply(b) for b in reps]
    dense = [[sum((v * img.get(i, 0) for i, v in a.items()), 0) for img in images] for a in reps]
    return RatMatrix.from_dense(dense)


def signature(apc: APC, reps: Sequence[SparseVec] | None = None) -> SignatureTriple:
    m = middle_degree(apc.n)
    if m is None:
        h = apc.chain.betti()[apc.n // 2] if apc.n % 2 == 0 else 0
        return SignatureTriple(0, 0, h)
    if reps is None:
        reps = apc.chain.cohomology_reps(m)
    return symmetric_signature(pairing_matrix(apc, reps))


def _coords(red: ColumnReducer, vec: SparseVec, h: int) -> list:
    r, t = red.reduce(vec, {})
    if r:
        raise AssertionError("image is not a cocycle in the span")
    return [-t.get(i, 0) for i in range(h)]


def induced_rep_on_cohomology(cc: GChainComplex, k: int, reps: Sequence[SparseVec]) -> list[list[list]]:
    """Exact matrices M_g with g.z_j = sum_i M_g[i][j] z_i modulo coboundaries."""
    h = len(reps)
    red = ColumnReducer()
    for col in cc.coboundary_columns(k - 1) if k >= 1 else []:
        red.add(col)
    for i, z in enumerate(reps):
        r, _ = red.add(z, {i: 1})
        if not r:
            raise AssertionError("representatives are dependent in cohomology")
    mats = []
    for g in range(cc.G.order):
        cols = [_coords(red, cc.act(g, k, z), h) for z in reps]
        mats.append([[cols[j][i] for j in range(h)] for i in range(h)])
    return mats


@dataclass
class GSignature:
    total: SignatureTriple
    per_irrep: dict  # irrep name -> SignatureTriple
    dims: dict  # irrep name -> dimension
    exact: dict  # irrep name -> bool (rational projector used)
    report: CheckReport

    def weighted_total(self) -> SignatureTriple:
        p = q = z = 0
        for k, t in self.per_irrep.items():
            d = self.dims[k]
            p, q, z = p + d * t.positive, q + d * t.negative, z + d * t.null
        return SignatureTriple(p, q, z)

    def as_dict(self) -> dict:
        return {
            "total": self.total.as_list(),
            "per_irrep": {k: v.as_list() for k, v in self.per_irrep.items()},
            "dims": dict(self.dims),
        }


def _rational_character(chi: np.ndarray, tol: float = 1e-9):
    vals = []
    for z in chi:
        if abs(z.imag) > tol or abs(z.real - round(z.real)) > tol:
            return None
        vals.append(int(round(z.real)))
    return vals


def _hermitian_inertia(M: np.ndarray, tol: float) -> SignatureTriple:
    if M.shape[0] == 0:
        return SignatureTriple(0, 0, 0)
    w = np.linalg.eigvalsh((M + M.conj().T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    p = int(np.sum(w > tol * scale))
    q = int(np.sum(w < -tol * scale))
    return SignatureTriple(p, q, len(w) - p - q)


def g_signature(apc: APC, irreps: Sequence[UnitaryRep] | None = None, reps: Sequence[SparseVec] | None = None, tol: float = 1e-9) -> GSignature:
    cc, G = apc.chain, apc.chain.G
    bad = reverses_orientation(cc, apc.fundamental)
    if bad:
        raise OrientationReversed(f"{G.labels[bad[0]]} reverses the fundamental class")
    if irreps is None:
        irreps = group_irreps(G)
    rep = CheckReport("G-signature", tol=tol)
    m = middle_degree(apc.n)
    names = [r.name for r in irreps]
    dims = {r.name: r.dim for r in irreps}
    if m is None:
        # by convention the whole middle cohomology is null; split it by multiplicity
        per = {r.name: SignatureTriple(0, 0, 0) for r in irreps}
        total = SignatureTriple(0, 0, 0)
        if apc.n % 2 == 0:
            mid = cc.cohomology_reps(apc.n // 2)
            total = SignatureTriple(0, 0, len(mid))
            if mid:
                mats = induced_rep_on_cohomology(cc, apc.n // 2, mid)
                trace = np.array([float(sum(mats[g][i][i] for i in range(len(mid)))) for g in range(G.order)])
                for r in irreps:
                    mult = np.vdot(element_character(r), trace) / G.order
                    per[r.name] = SignatureTriple(0, 0, int(round(mult.real)))
        gs = GSignature(total, per, dims, {k: True for k in names}, rep)
        rep.checks += 1
        if gs.weighted_total() != total:
            rep.fail(("weighted per-irrep sum differs from total", gs.weighted_total().as_list(), total.as_list()))
        return gs
    if reps is None:
        reps = cc.cohomology_reps(m)
    h = len(reps)
    form = pairing_matrix(apc, reps)
    total = symmetric_signature(form)
    mats = induced_rep_on_cohomology(cc, m, reps)
    Bd = [[Fraction(x) for x in row] for row in form.to_dense()]
    # invariance of the form
    for g in range(G.order):
        Mg = RatMatrix.from_dense(mats[g]) if h else RatMatrix.zeros(0, 0)
        rep.checks += 1
        if h and Mg.T @ form @ Mg != form:
            rep.fail(("form not G-invariant", G.labels[g]))
    per, exact = {}, {}
    blocks_q: dict = {}
    blocks_c: dict = {}
    for r in irreps:
        chi = element_character(r)
        rat = _rational_character(chi)
        if rat is not None:
            # P = d/|G| sum chi(g^-1) M_g, exact
            P = [[Fraction(0)] * h for _ in range(h)]
            for g in range(G.order):
                c = Fraction(rat[G.i(g)] * r.dim, G.order)
                if c:
                    for i in range(h):
                        for j in range(h):
                            if mats[g][i][j]:
                                P[i][j] += c * mats[g][i][j]
            cols = [{i: P[i][j] for i in range(h) if P[i][j]} for j in range(h)]
            red = ColumnReducer()
            W = []
            for col in cols:
                rr, _ = red.add(col)
                if rr:
                    W.append(col)
            sub = [[sum((a * Bd[i][j] * b for i, a in u.items() for j, b in v.items()), Fraction(0)) for v in W] for u in W]
            t = symmetric_signature(RatMatrix.from_dense(sub)) if W else SignatureTriple(0, 0, 0)
            blocks_q[r.name] = W
            exact[r.name] = True
        else:
            Mc = np.array(mats, dtype=float).reshape(G.order, h, h)
            P = sum(np.conj(chi[g]) * Mc[g] for g in range(G.order)) * (r.dim / G.order)
            U, s, _ = np.linalg.svd(P)
            rank = int(np.sum(s > tol * max(1.0, s.max() if s.size else 1.0)))
            W = U[:, :rank]
            Bf = np.array([[float(x) for x in row] for row in Bd])
            t = _hermitian_inertia(W.conj().T @ Bf @ W, tol)
            blocks_c[r.name] = W
            exact[r.name] = False
        rep.checks += 1
        if any(x % r.dim for x in t.as_list()):
            rep.fail(("isotypic signature not divisible by irrep dimension", r.name, t.as_list()))
        per[r.name] = SignatureTriple(t.positive // r.dim, t.negative // r.dim, t.null // r.dim)
    # pairwise orthogonality of exact blocks
    qn = list(blocks_q)
    for a in range(len(qn)):
        for b in range(a + 1, len(qn)):
            for u in blocks_q[qn[a]]:
                for v in blocks_q[qn[b]]:
                    rep.checks += 1
                    val = sum((x * Bd[i][j] * y for i, x in u.items() for j, y in v.items()), Fraction(0))
                    if val != 0:
                        rep.fail(("isotypic blocks not orthogonal", qn[a], qn[b]))
    gs = GSignature(total, per, dims, exact, rep)
    rep.checks += 1
    if gs.weighted_total() != total:
        rep.fail(("weighted per-irrep sum differs from total", gs.weighted_total().as_list(), total.as_list()))
    return gs


# ---------------------------------------------------------------------------
# Quotients


class QuotientChains(CellChains):
    def __init__(self, q: QuotientComplex):
        self.q = q
        self.counts = [len(c) for c in q.cells]

    def boundary_columns(self, k: int) -> list[SparseVec]:
        if k <= 0 or k > self.top:
            return [{} for _ in range(self.count(k))]
        return list(self.q.boundaries[k].columns())


def lift_cochain(q: QuotientComplex, k: int, f: SparseVec) -> SparseVec:
    """Invariant cochain on M pulled back along the orbit projection."""
    c = q.source
    out = {}
    for i, s in enumerate(c.simplices[k]):
        j, sg = q.projection[k][s]
        v = f.get(j, 0)
        if v:
            out[i] = sg * v
    return out


def invariant_cohomology_dims(cc: GChainComplex) -> list[int]:
    """rank of (1/|G|) sum g* on each H^k(M; Q)."""
    out = []
    for k in range(cc.top + 1):
        reps = cc.cohomology_reps(k)
        h = len(reps)
        if h == 0:
            out.append(0)
            continue
        mats = induced_rep_on_cohomology(cc, k, reps)
        avg = [[sum((Fraction(mats[g][i][j]) for g in range(cc.G.order)), Fraction(0)) / cc.G.order for j in range(h)] for i in range(h)]
        red = ColumnReducer()
        for j in range(h):
            red.add({i: avg[i][j] for i in range(h) if avg[i][j]})
        out.append(red.rank)
    return out


@dataclass
class QuotientSignature:
    betti: list[int]
    signature: SignatureTriple
    invariant_dims: list[int]
    report: CheckReport


def quotient_signature(c: SimplicialGComplex, apc: APC | None = None, require_duality: bool = True) -> QuotientSignature:
    q = quotient_complex(c)
    qc = QuotientChains(q)
    rep = CheckReport("quotient signature", tol=0.0)
    qb = qc.betti()
    cc = apc.chain if apc is not None else chains(c)
    inv = invariant_cohomology_dims(cc)
    for k in range(len(qb)):
        rep.checks += 1
        if qb[k] != inv[k]:
            rep.fail(("transfer", k, qb[k], inv[k]))
    n = c.dim
    for k in range(n + 1):
        rep.checks += 1
        if qb[k] != qb[n - k]:
            if require_duality:
                raise DualityFailure(k, f"dim H^{k}(M/G) = {qb[k]} but dim H_{n - k}(M/G) = {qb[n - k]}")
            rep.fail(("duality", k))
    m = middle_degree(n)
    if m is None:
        sig = SignatureTriple(0, 0, qb[n // 2] if n % 2 == 0 else 0)
    else:
        if apc is None:
            apc = build_apc(c, verify=False)
        if reverses_orientation(apc.chain, apc.fundamental):
            raise OrientationReversed("quotient signature needs an orientation-preserving action")
        lifted = []
        for f in qc.cohomology_reps(m):
            z = lift_cochain(q, m, f)
            rep.checks += 1
            delta: SparseVec = {}
            cols = cc.coboundary_columns(m)
            for i, v in z.items():
                vec_axpy(delta, v, cols[i])
            if delta:
                rep.fail(("lifted cochain is not a cocycle", m))
            lifted.append(z)
        form = pairing_matrix(apc, lifted).scale(Fraction(1, cc.G.order))
        sig = symmetric_signature(form)
    return QuotientSignature(qb, sig, inv, rep)
