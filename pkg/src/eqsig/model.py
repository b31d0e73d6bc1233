"""The fiber model G0 x (F (x) V) with its canonical G-action and its automorphisms.

Conventions
-----------
* Fiber points are cosets of H.  For normal H these are the elements of
  G0 = G/H; ``point(g)`` is the coset index of g.
* ``phi[c, g1]`` is the matrix carrying the fiber over coset c to the fiber
  over ``target[c, g1]`` = coset of g1 * rep(c).  On F (x) V it equals
  id_F (x) rho(u(g1 g) u(g)^-1) for any representative g of c.
* An automorphism over a in the automorphism group of the base (G0, or N(H)/H
  in the non-normal case) moves the fiber over c to the fiber over
  ``right(c, a)`` = coset of rep(c) * lift(a).
* Products of automorphisms are written left to right: ``A * B`` applies A
  first, so that projection to the base group is a homomorphism.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .errors import NotLiftable, NotPureTensor, SectionMismatch
from .exactmath import DEFAULT_TOL
from .groups import (
    FiniteGroup,
    HSection,
    Subgroup,
    conjugation_iso,
    make_h_section,
    normalizer,
)
from .reps import UnitaryRep, conjugate_rep, hom_space, intertwiner


@dataclass
class CheckReport:
    name: str
    passed: bool = True
    checks: int = 0
    violations: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    notes: dict = field(default_factory=dict)

    def fail(self, what, limit: int = 20) -> None:
        self.passed = False
        if len(self.violations) < limit:
            self.violations.append(what)

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.checks += other.checks
        if not other.passed:
            self.passed = False
            self.violations.extend(other.violations[: max(0, 20 - len(self.violations))])
        return self

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": "PASS" if self.passed else "FAIL",
            "checks": self.checks,
            "tol": self.tol,
            "violations": [str(v) for v in self.violations],
            **({"notes": self.notes} if self.notes else {}),
        }


def _maxerr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.max(np.abs(a - b), axis=(-2, -1))


class FiberModel:
    """Shared machinery for normal and non-normal models.

    Subclasses fill ``group``, ``points`` (number of fiber points),
    ``phi`` (points, |G|, D, D), ``target`` (points, |G|), ``base_group``
    (automorphism group of the base), ``right`` (points, |base_group|) and
    ``tol``.
    """

    group: FiniteGroup
    base_group: FiniteGroup
    phi: np.ndarray
    target: np.ndarray
    right: np.ndarray
    tol: float
    f_dim: int
    rho: UnitaryRep

    @property
    def fiber_dim(self) -> int:
        return self.phi.shape[-1]

    @property
    def n_points(self) -> int:
        return self.phi.shape[0]

    def associativity_errors(self) -> np.ndarray:
        """err[c, g1, g2] = |phi(c, g2 g1) - phi(c g1, g2) phi(c, g1)|_max"""
        G = self.group
        n = G.order
        P, T = self.phi, self.target
        c = np.arange(self.n_points)[:, None, None]
        g1 = np.arange(n)[None, :, None]
        g2 = np.arange(n)[None, None, :]
        lhs = P[c, G.mul[g2, g1]]
        rhs = np.einsum("...ij,...jk->...ik", P[T[c, g1], g2], P[c, g1])
        err = _maxerr(lhs, rhs)
        bad_target = T[c, G.mul[g2, g1]] != T[T[c, g1], g2]
        err = np.where(bad_target, np.inf, err)
        return err


# ---------------------------------------------------------------------------
# Normal case


class CanonicalModel(FiberModel):
    def __init__(self, G: FiniteGroup, H: Subgroup, rho: UnitaryRep, f_dim: int, section: HSection, tol: float | None = None, phi: np.ndarray | None = None):
        if section.subgroup != H:
            raise ValueError("section is for a different subgroup")
        if rho.group.order != H.order:
            raise ValueError("rho must be a representation of H")
        self.group = G
        self.H = H
        self.rho = rho
        self.f_dim = int(f_dim)
        self.section = section
        self.tol = rho.tol if tol is None else tol
        self.base_group = section.quotient.group
        q = section.quotient
        n0 = q.group.order
        reps = section.transversal
        self.target = np.array([[int(q.proj[G.m(g1, reps[c])]) for g1 in range(G.order)] for c in range(n0)], dtype=np.int64)
        self.right = np.array(q.group.mul, dtype=np.int64)
        if phi is None:
            phi = np.stack([np.stack([self.formula(reps[c], g1) for g1 in range(G.order)]) for c in range(n0)])
        self.phi = np.asarray(phi, dtype=complex)

    def h_matrix(self, h: int) -> np.ndarray:
        """rho(h) for h in H, given as an element of G."""
        return self.rho.matrices[self.H.local(h)]

    def id_tensor(self, m: np.ndarray) -> np.ndarray:
        return np.kron(np.eye(self.f_dim), m)

    def formula(self, g: int, g1: int) -> np.ndarray:
        G, u = self.group, self.section.u
        return self.id_tensor(self.h_matrix(G.m(u[G.m(g1, g)], G.i(u[g]))))

    def lift(self, a: int) -> int:
        """g'(a): the transversal representative of the coset a."""
        return self.section.transversal[a]

    def point(self, g: int) -> int:
        return int(self.section.quotient.proj[g])

    def mutated(self, c: int, g1: int, matrix: np.ndarray) -> "CanonicalModel":
        phi = self.phi.copy()
        phi[c, g1] = matrix
        return CanonicalModel(self.group, self.H, self.rho, self.f_dim, self.section, self.tol, phi)

    def with_section(self, section: HSection) -> "CanonicalModel":
        return CanonicalModel(self.group, self.H, self.rho, self.f_dim, section, self.tol)

    def describe(self) -> dict:
        return {
            "G": self.group.name,
            "H": list(self.H.elements),
            "rho": self.rho.name,
            "f_dim": self.f_dim,
            "transversal": list(self.section.transversal),
        }


def build_model(G: FiniteGroup, H: Subgroup, rho: UnitaryRep, f_dim: int = 1, section: HSection | None = None, tol: float | None = None) -> CanonicalModel:
    if section is None:
        section = make_h_section(G, H)
    model = CanonicalModel(G, H, rho, f_dim, section, tol)
    report = verify_action(model)
    if not report.passed:
        raise AssertionError(f"canonical action failed verification: {report.violations[:3]}")
    return model


def verify_action(model: FiberModel) -> CheckReport:
    """Associativity of phi over all triples and independence of the coset representative."""
    rep = CheckReport("canonical action", tol=model.tol)
    err = model.associativity_errors()
    rep.checks += err.size
    G = model.group
    for c, g1, g2 in zip(*np.nonzero(err > model.tol)):
        rep.fail(("associativity", {"coset": int(c), "g1": G.labels[g1], "g2": G.labels[g2]}))
    if isinstance(model, CanonicalModel):
        for c, coset in enumerate(model.section.quotient.cosets):
            for g in coset:
                for g1 in range(G.order):
                    rep.checks += 1
                    if np.max(np.abs(model.formula(g, g1) - model.phi[c, g1])) > model.tol:
                        rep.fail(("representative", {"coset": c, "g": G.labels[g], "g1": G.labels[g1]}))
    return rep


@dataclass
class ModelIsomorphism:
    source: CanonicalModel
    target: CanonicalModel
    psi: np.ndarray  # per coset
    report: CheckReport


def model_isomorphism(m: CanonicalModel, m2: CanonicalModel) -> ModelIsomorphism:
    """psi([g]) = id (x) rho(u'(g) u(g)^-1), checked against both actions."""
    same = (
        m.group is m2.group
        and m.H == m2.H
        and m.f_dim == m2.f_dim
        and m.rho.matrices.shape == m2.rho.matrices.shape
        and np.allclose(m.rho.matrices, m2.rho.matrices, atol=m.tol, rtol=0)
    )
    if not same:
        raise SectionMismatch("models differ in more than the section")
    G = m.group
    u, u2 = m.section.u, m2.section.u
    rep = CheckReport("model isomorphism", tol=m.tol)
    psi = []
    for c, coset in enumerate(m.section.quotient.cosets):
        vals = [m.id_tensor(m.h_matrix(G.m(u2[g], G.i(u[g])))) for g in coset]
        for g, v in zip(coset, vals):
            rep.checks += 1
            if np.max(np.abs(v - vals[0])) > m.tol:
                rep.fail(("psi depends on representative", {"coset": c, "g": G.labels[g]}))
        psi.append(vals[0])
    psi = np.stack(psi)
    for c in range(m.n_points):
        for g1 in range(G.order):
            rep.checks += 1
            lhs = psi[m.target[c, g1]] @ m.phi[c, g1]
            rhs = m2.phi[c, g1] @ psi[c]
            if m.target[c, g1] != m2.target[c, g1] or np.max(np.abs(lhs - rhs)) > m.tol:
                rep.fail(("square", {"coset": c, "g1": G.labels[g1]}))
    return ModelIsomorphism(m, m2, psi, rep)


# ---------------------------------------------------------------------------
# Automorphisms


@dataclass
class EquivariantAutomorphism:
    model: FiberModel = field(repr=False)
    a: int
    blocks: np.ndarray = field(repr=False)  # (points, D, D): fiber c -> fiber right[c, a]

    def __mul__(self, other: "EquivariantAutomorphism") -> "EquivariantAutomorphism":
        """self first, then other."""
        m = self.model
        blocks = np.stack([other.blocks[m.right[c, self.a]] @ self.blocks[c] for c in range(m.n_points)])
        return EquivariantAutomorphism(m, int(m.base_group.mul[self.a, other.a]), blocks)

    def inverse(self) -> "EquivariantAutomorphism":
        m = self.model
        ainv = m.base_group.i(self.a)
        blocks = np.empty_like(self.blocks)
        for c in range(m.n_points):
            blocks[m.right[c, self.a]] = np.linalg.inv(self.blocks[c])
        return EquivariantAutomorphism(m, ainv, blocks)

    def close(self, other: "EquivariantAutomorphism", tol: float | None = None) -> bool:
        t = self.model.tol if tol is None else tol
        return self.a == other.a and bool(np.max(np.abs(self.blocks - other.blocks)) <= t)

    def is_identity(self, tol: float | None = None) -> bool:
        return self.close(identity_automorphism(self.model), tol)

    def mutated(self, c: int, matrix: np.ndarray) -> "EquivariantAutomorphism":
        blocks = self.blocks.copy()
        blocks[c] = matrix
        return EquivariantAutomorphism(self.model, self.a, blocks)

    def to_json(self) -> dict:
        return {"a": int(self.a), "blocks": _cx_to_json(self.blocks)}


def _cx_to_json(arr: np.ndarray):
    def enc(z):
        return [float(round(z.real, 12)) + 0.0, float(round(z.imag, 12)) + 0.0]

    if arr.ndim == 0:
        return enc(complex(arr))
    return [_cx_to_json(x) for x in arr]


def identity_automorphism(model: FiberModel) -> EquivariantAutomorphism:
    return EquivariantAutomorphism(model, 0, np.stack([np.eye(model.fiber_dim, dtype=complex)] * model.n_points))


def verify_automorphism(A: EquivariantAutomorphism) -> CheckReport:
    """phi(g1, [g a]) A[g] == A[g1 g] phi(g1, [g]) for every coset and g1."""
    m = A.model
    rep = CheckReport("automorphism commutation", tol=m.tol)
    G = m.group
    for c in range(m.n_points):
        ca = m.right[c, A.a]
        for g1 in range(G.order):
            rep.checks += 1
            t = m.target[c, g1]
            if m.target[ca, g1] != m.right[t, A.a]:
                rep.fail(("base map not equivariant", {"point": c, "g1": G.labels[g1]}))
                continue
            lhs = m.phi[ca, g1] @ A.blocks[c]
            rhs = A.blocks[t] @ m.phi[c, g1]
            if np.max(np.abs(lhs - rhs)) > m.tol:
                rep.fail(("commutation", {"point": c, "g1": G.labels[g1]}))
    return rep


def lift_intertwiner(model: CanonicalModel, a: int):
    """Intertwiner from rho to rho_{g'(a)}, or None when the two are inequivalent."""
    rho_g = conjugate_rep(model.rho, model.H, model.lift(a))
    return intertwiner(model.rho, rho_g)


def automorphism_from(model: CanonicalModel, a: int, B: np.ndarray) -> EquivariantAutomorphism:
    """A^a[g] = B (x) rho(u(g g'(a)) u(g'(a))^-1) C(g'(a)) rho(u(g))^-1."""
    B = np.asarray(B, dtype=complex).reshape(model.f_dim, model.f_dim)
    if abs(np.linalg.det(B)) <= model.tol:
        raise ValueError("B must be invertible")
    C = lift_intertwiner(model, a)
    if C is None:
        raise NotLiftable(f"rho and its conjugate by g'(a)={model.group.labels[model.lift(a)]} are inequivalent")
    G, u = model.group, model.section.u
    ga = model.lift(a)
    blocks = []
    for c in range(model.n_points):
        g = model.section.transversal[c]
        left = model.h_matrix(G.m(u[G.m(g, ga)], G.i(u[ga])))
        right = np.linalg.inv(model.h_matrix(u[g]))
        blocks.append(np.kron(B, left @ C.matrix.data @ right))
    A = EquivariantAutomorphism(model, int(a), np.stack(blocks))
    report = verify_automorphism(A)
    if not report.passed:
        raise AssertionError(f"lifted automorphism fails commutation: {report.violations[:3]}")
    return A


def project_automorphism(A: EquivariantAutomorphism) -> int:
    return int(A.a)


def kernel_witness(A: EquivariantAutomorphism) -> np.ndarray:
    """B with A[g] = B (x) id_V on every fiber, for A over the identity."""
    m = A.model
    if A.a != 0:
        raise ValueError("automorphism does not lie over the identity")
    d = m.fiber_dim // m.f_dim
    blk = A.blocks[0].reshape(m.f_dim, d, m.f_dim, d)
    B = np.einsum("ikjk->ij", blk) / d
    target = np.kron(B, np.eye(d))
    worst = float(np.max(np.abs(A.blocks - target[None])))
    if worst > m.tol:
        c = int(np.argmax(np.max(np.abs(A.blocks - target[None]), axis=(1, 2))))
        raise NotPureTensor(f"fiber {c} deviates from B (x) id by {worst:.2e}")
    return B


def rebuild_from_identity_block(A: EquivariantAutomorphism) -> np.ndarray:
    """Blocks recomputed from A[1] by A[g] = (id (x) rho(u(ga)u(a)^-1)) A[1] (id (x) rho(u(g))^-1)."""
    m = A.model
    if not isinstance(m, CanonicalModel):
        raise TypeError("reconstruction needs a normal canonical model")
    G, u = m.group, m.section.u
    ga = m.lift(A.a)
    out = []
    for c in range(m.n_points):
        g = m.section.transversal[c]
        left = m.id_tensor(m.h_matrix(G.m(u[G.m(g, ga)], G.i(u[ga]))))
        right = m.id_tensor(np.linalg.inv(m.h_matrix(u[g])))
        out.append(left @ A.blocks[0] @ right)
    return np.stack(out)


def pr_image(model: CanonicalModel) -> list[int]:
    """Elements a of G0 over which some automorphism exists."""
    return [a for a in range(model.base_group.order) if lift_intertwiner(model, a) is not None]


def liftable_by_linear_algebra(model: CanonicalModel, a: int) -> bool:
    """Independent test: does any A[1] with A[1](id (x) rho(h)) = phi(h,[a]) A[1] exist?"""
    H = model.H
    sub = H.as_group()
    src = UnitaryRep(sub, np.stack([model.phi[0, h] for h in H.elements]), model.tol)
    dst = UnitaryRep(sub, np.stack([model.phi[a, h] for h in H.elements]), model.tol)
    return len(hom_space(src, dst)) > 0


# ---------------------------------------------------------------------------
# Non-normal case


class NonNormalModel(FiberModel):
    """GX(rho): one canonical block X(rho_g) per coset of N(H).

    Fiber points are the left cosets of H in G.  The point gH with
    g = t_i n (t_i the component representative, n in N(H)) is the point
    [n] of component i, i.e. s_{t_i}([n]) in X(rho_{t_i}).
    """

    def __init__(self, G: FiniteGroup, H: Subgroup, rho: UnitaryRep, f_dim: int = 1, tol: float | None = None):
        self.group = G
        self.H = H
        self.rho = rho
        self.f_dim = int(f_dim)
        self.tol = rho.tol if tol is None else tol
        N = normalizer(G, H)
        self.N = N
        Ng = N.as_group()
        H_in_N = Subgroup(Ng, tuple(N.local(h) for h in H.elements))
        self.inner = build_model(Ng, H_in_N, rho, f_dim, tol=self.tol)
        self.base_group = self.inner.base_group
        comps = N.left_cosets()
        self.component_reps = tuple(c[0] for c in comps)
        self.cosets = tuple(H.left_cosets())
        coset_of = np.empty(G.order, dtype=np.int64)
        for k, c in enumerate(self.cosets):
            coset_of[list(c)] = k
        self.coset_of = coset_of
        comp_of = np.empty(G.order, dtype=np.int64)
        for i, c in enumerate(comps):
            comp_of[list(c)] = i
        self.comp_of_element = comp_of
        # point <-> (component, inner coset)
        self.point_of = {}
        self.split = []
        for p, coset in enumerate(self.cosets):
            g = coset[0]
            i = int(comp_of[g])
            n = G.m(G.i(self.component_reps[i]), g)
            inner_c = self.inner.point(N.local(n))
            self.point_of[(i, inner_c)] = p
            self.split.append((i, inner_c))
        npts = len(self.cosets)
        D = self.inner.fiber_dim
        phi = np.empty((npts, G.order, D, D), dtype=complex)
        target = np.empty((npts, G.order), dtype=np.int64)
        for p, (i, c) in enumerate(self.split):
            for g1 in range(G.order):
                x = G.m(g1, self.component_reps[i])
                j = int(comp_of[x])
                mloc = N.local(G.m(G.i(self.component_reps[j]), x))
                phi[p, g1] = self.inner.phi[c, mloc]
                target[p, g1] = self.point_of[(j, int(self.inner.target[c, mloc]))]
        self.phi = phi
        self.target = target
        self.right = np.array([[self.point_of[(i, int(self.inner.right[c, a]))] for a in range(self.base_group.order)] for (i, c) in self.split], dtype=np.int64)

    @property
    def n_components(self) -> int:
        return len(self.component_reps)

    def component_points(self, i: int) -> list[int]:
        return [p for p, (j, _) in enumerate(self.split) if j == i]

    def component_subgroup(self, i: int) -> Subgroup:
        return self.H.conjugate(self.component_reps[i])

    def describe(self) -> dict:
        return {
            "G": self.group.name,
            "H": list(self.H.elements),
            "N(H)": list(self.N.elements),
            "components": self.n_components,
            "component_reps": [self.group.labels[t] for t in self.component_reps],
        }


def build_nonnormal_model(G: FiniteGroup, H: Subgroup, rho: UnitaryRep, f_dim: int = 1, tol: float | None = None) -> tuple[NonNormalModel, CheckReport]:
    nn = NonNormalModel(G, H, rho, f_dim, tol)
    rep = verify_action(nn)
    rep.name = "non-normal model"
    comp0 = set(nn.component_points(0))
    # N(H) preserves X(rho); nothing else does
    for g in range(G.order):
        rep.checks += 1
        stays = {int(nn.target[p, g]) for p in comp0} == comp0
        if stays != (g in nn.N):
            rep.fail(("stabiliser of X(rho) differs from N(H)", G.labels[g]))
    # transitivity on components
    reached = {int(nn.comp_of_element[nn.group.m(g, 0)]) for g in range(G.order)}
    rep.checks += 1
    if reached != set(range(nn.n_components)):
        rep.fail("components not permuted transitively")
    # fixed points of gHg^-1 on the base are exactly the component of [g]
    for j in range(nn.n_components):
        Hj = nn.component_subgroup(j)
        fixed = {p for p in range(nn.n_points) if all(nn.target[p, h] == p for h in Hj.elements)}
        rep.checks += 1
        if fixed != set(nn.component_points(j)):
            rep.fail(("fixed set of conjugate subgroup", j))
    # each block is the canonical model of (N_j, H_j, rho_{t_j}, u_{t_j})
    for j, t in enumerate(nn.component_reps):
        Hj = nn.component_subgroup(j)
        sg = conjugation_iso(G, H, t)
        Nj = sg.target
        Njg = Nj.as_group()
        Hj_loc = Subgroup(Njg, tuple(Nj.local(h) for h in Hj.elements))
        rho_t = conjugate_rep(rho, H, t, target=Hj)
        transversal = [Nj.local(sg(nn.N.elements[r])) for r in nn.inner.section.transversal]
        block = CanonicalModel(Njg, Hj_loc, rho_t, f_dim, make_h_section(Njg, Hj_loc, transversal), nn.tol)
        for p in nn.component_points(j):
            _, c = nn.split[p]
            # point p is s_t([n]) with [n] the inner coset c; in block coordinates it is [t n t^-1]
            n = nn.inner.section.transversal[c]
            bc = block.point(Nj.local(sg(nn.N.elements[n])))
            for x in Nj.elements:
                rep.checks += 1
                bx = Nj.local(x)
                q = int(nn.target[p, x])
                if np.max(np.abs(block.phi[bc, bx] - nn.phi[p, x])) > nn.tol:
                    rep.fail(("component action differs from its canonical model", j, G.labels[x]))
                _, cq = nn.split[q]
                nq = nn.inner.section.transversal[cq]
                if block.point(Nj.local(sg(nn.N.elements[nq]))) != block.target[bc, bx]:
                    rep.fail(("component base action differs", j, G.labels[x]))
    if not rep.passed:
        raise AssertionError(f"non-normal model failed verification: {rep.violations[:3]}")
    return nn, rep


def extend_automorphism(nn: NonNormalModel, A: EquivariantAutomorphism) -> EquivariantAutomorphism:
    """Blockwise transport of an automorphism of X(rho) to every component of GX(rho)."""
    if A.model is not nn.inner:
        raise ValueError("automorphism must live on the inner model X(rho)")
    blocks = np.stack([A.blocks[c] for (_, c) in nn.split])
    return EquivariantAutomorphism(nn, A.a, blocks)


def restrict_automorphism(nn: NonNormalModel, A: EquivariantAutomorphism) -> EquivariantAutomorphism:
    blocks = np.stack([A.blocks[nn.point_of[(0, c)]] for c in range(nn.inner.n_points)])
    return EquivariantAutomorphism(nn.inner, A.a, blocks)


def transported(nn: NonNormalModel, A_ext: EquivariantAutomorphism, l: int) -> dict[int, np.ndarray]:
    """l A l^-1 on the component containing l: blocks keyed by point."""
    out = {}
    for p in nn.component_points(0):
        q = int(nn.target[p, l])
        pa = int(nn.right[p, A_ext.a])
        out[q] = nn.phi[pa, l] @ A_ext.blocks[p] @ np.linalg.inv(nn.phi[p, l])
    return out


def sample_automorphisms(model: CanonicalModel, seed: int = 0, count: int = 3) -> list[EquivariantAutomorphism]:
    rng = np.random.default_rng(seed)
    out = [identity_automorphism(model)]
    f = model.f_dim
    for _ in range(count):
        B = rng.standard_normal((f, f)) + 1j * rng.standard_normal((f, f)) + 2 * np.eye(f)
        out.append(automorphism_from(model, 0, B))
    for a in pr_image(model):
        if a == 0:
            continue
        B = rng.standard_normal((f, f)) + 1j * rng.standard_normal((f, f)) + 2 * np.eye(f)
        out.append(automorphism_from(model, a, B))
    return out


def nonnormal_aut_iso(nn: NonNormalModel, seed: int = 0) -> CheckReport:
    rep = CheckReport("Aut_G(GX) = Aut_N(H)(X)", tol=nn.tol)
    G = nn.group
    samples = sample_automorphisms(nn.inner, seed)
    exts = []
    for A in samples:
        ext = extend_automorphism(nn, A)
        exts.append(ext)
        rep.merge(verify_automorphism(ext))
        rep.checks += 1
        if not restrict_automorphism(nn, ext).close(A):
            rep.fail("restriction does not recover the automorphism")
        for j, t in enumerate(nn.component_reps):
            ref = None
            for l in sorted(set(G.m(t, n) for n in nn.N.elements)):
                tr = transported(nn, ext, l)
                for q, blk in tr.items():
                    rep.checks += 1
                    if np.max(np.abs(blk - ext.blocks[q])) > nn.tol:
                        rep.fail(("l A l^-1 differs from the extension", j, G.labels[l]))
                if ref is None:
                    ref = tr
                else:
                    for q in ref:
                        if np.max(np.abs(ref[q] - tr[q])) > nn.tol:
                            rep.fail(("transport depends on representative", j, G.labels[l]))
    for A, B, eA, eB in [(samples[i], samples[k], exts[i], exts[k]) for i in range(len(samples)) for k in range(len(samples))]:
        rep.checks += 1
        if not extend_automorphism(nn, A * B).close(eA * eB):
            rep.fail("extension is not multiplicative")
    rep.notes["samples"] = len(samples)
    return rep
