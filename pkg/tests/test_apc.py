from fractions import Fraction

import numpy as np
import pytest
import sympy

from eqsig.apc import (
    QuotientChains,
    build_apc,
    chains,
    g_signature,
    invariant_cohomology_dims,
    pairing_matrix,
    permutation_module_check,
    quotient_signature,
    signature,
    verify_apc,
)
from eqsig.complexes import complex_fixture, complex_names, disjoint_union, simplex_boundary
from eqsig.errors import ApcPropertyFailure, DualityFailure, NotClosed, OrientationReversed
from eqsig.exactmath import SignatureTriple
from eqsig.gcomplex import SimplicialGComplex, quotient_complex, regularize

BETTI = {
    "point": [1],
    "tetrahedron_boundary": [1, 0, 1],
    "octahedron": [1, 0, 1],
    "torus7_z7": [1, 2, 1],
    "sphere4": [1, 0, 0, 0, 1],
    "cp2_9": [1, 0, 1, 0, 1],
    "hexagon_s3": [1, 1],
    "s2xs2_swap": [1, 0, 2, 0, 1],
    "oct2_antipodal": [1, 0, 2, 0, 1],
}


def float_betti(c):
    """Oracle: floating point ranks of the dense boundary matrices."""
    ranks = [0]
    for k in range(1, c.dim + 1):
        d = np.array(c.boundary(k).to_dense(), dtype=float)
        ranks.append(int(np.linalg.matrix_rank(d)) if d.size else 0)
    ranks.append(0)
    return [c.count(k) - ranks[k] - ranks[k + 1] for k in range(c.dim + 1)]


@pytest.mark.parametrize("name", sorted(BETTI))
def test_betti_against_oracle(name):
    c = complex_fixture(name)
    ours = chains(c).betti()
    assert ours == BETTI[name]
    assert ours == float_betti(c)
    assert sum((-1) ** k * b for k, b in enumerate(ours)) == c.euler_characteristic()


@pytest.mark.parametrize("name", ["point", "tetrahedron_boundary", "octahedron", "torus7_z7", "hexagon_s3", "sphere4"])
def test_apc_properties(name):
    rep = verify_apc(build_apc(complex_fixture(name), verify=False))
    assert rep.passed, rep.violations
    assert rep.checks > 0


def test_corrupted_duality_detected():
    apc = build_apc(complex_fixture("octahedron"), verify=False)
    apc.D[1] = apc.D[1].scale(2)
    # D_1 stays antisymmetric after scaling, so only the homotopy identity breaks
    assert {v[0] for v in verify_apc(apc).violations} == {2}
    apc.D[0] = apc.D[0].scale(3)
    assert 3 in {v[0] for v in verify_apc(apc).violations}


def test_build_raises_named_property():
    c = complex_fixture("tetrahedron_boundary")
    apc = build_apc(c)
    assert apc.report.passed
    with pytest.raises(NotClosed):
        build_apc(SimplicialGComplex(3, [(0, 1, 2)]))
    assert issubclass(ApcPropertyFailure, Exception)


def test_signature_values():
    assert signature(build_apc(complex_fixture("sphere4"))) == SignatureTriple(0, 0, 0)
    cp2 = complex_fixture("cp2_9")
    assert signature(build_apc(cp2)).as_list() == [1, 0, 0]
    assert signature(build_apc(cp2.reversed())).as_list() == [0, 1, 0]
    assert signature(build_apc(complex_fixture("s2xs2_swap"))).as_list() == [1, 1, 0]


def test_pairing_matrix_oracle():
    """Eigenvalue signs of the exact S2 x S2 middle pairing."""
    apc = build_apc(complex_fixture("s2xs2_swap"), verify=False)
    form = pairing_matrix(apc, apc.chain.cohomology_reps(2))
    assert form.is_symmetric()
    ev = [sympy.N(v) for v in sympy.Matrix(form.to_dense()).eigenvals(multiple=True)]
    assert sorted(int(np.sign(float(v))) for v in ev) == [-1, 1]


def test_disjoint_union_with_reverse_is_zero():
    cp2 = complex_fixture("cp2_9")
    u = disjoint_union(cp2, cp2.reversed())
    s = signature(build_apc(u, verify=False))
    assert s.signature == 0 and s.dim == 2


def test_g_signature_swap():
    # swap exchanges the two sphere classes: a + b pairs positively, a - b negatively
    gs = g_signature(build_apc(complex_fixture("s2xs2_swap"), verify=False))
    assert gs.as_dict()["per_irrep"] == {"triv": [1, 0, 0], "irr1": [0, 1, 0]}
    assert gs.weighted_total() == gs.total
    assert gs.report.passed


def test_g_signature_antipodal():
    gs = g_signature(build_apc(complex_fixture("oct2_antipodal"), verify=False))
    assert gs.as_dict()["per_irrep"] == {"triv": [0, 0, 0], "irr1": [1, 1, 0]}


def test_g_signature_rejects_reversing_action():
    with pytest.raises(OrientationReversed):
        g_signature(build_apc(complex_fixture("hexagon_s3"), verify=False))


def test_quotient_signature():
    c = complex_fixture("s2xs2_swap")
    q = quotient_signature(c)
    assert q.betti == q.invariant_dims == [1, 0, 1, 0, 1]
    assert q.signature.as_list() == [1, 0, 0]
    assert quotient_signature(complex_fixture("oct2_antipodal")).signature.signature == 0


def test_quotient_duality_failure_raised():
    c, _ = regularize(complex_fixture("hexagon_s3"))
    with pytest.raises(DualityFailure):
        quotient_signature(c)
    assert quotient_signature(c, require_duality=False).betti == [1, 0]


def _averaged_invariant_betti(c):
    """Oracle: Betti numbers of the complex of invariant cochains, built from the averaging projector."""
    G = c.G
    cc = chains(c)
    out = []
    ranks = {}
    for k in range(c.dim + 1):
        n = c.count(k)
        P = sympy.zeros(n, n)
        for g in range(G.order):
            P += sympy.Matrix(cc.action_matrix(g, k).to_dense())
        basis = (P / G.order).columnspace()
        ranks[k] = basis
    dims = {k: len(ranks[k]) for k in ranks}
    d_rank = {}
    for k in range(c.dim):
        if not ranks[k]:
            d_rank[k] = 0
            continue
        delta = sympy.Matrix(c.boundary(k + 1).to_dense()).T
        img = delta * sympy.Matrix.hstack(*ranks[k])
        d_rank[k] = img.rank()
    d_rank[-1] = d_rank[c.dim] = 0
    for k in range(c.dim + 1):
        out.append(dims[k] - d_rank[k] - d_rank[k - 1])
    return out


@pytest.mark.parametrize("name", ["octahedron_rot2", "octahedron_v4", "torus7_z7", "hexagon_s3", "octagon_d4"])
def test_transfer_against_averaging_oracle(name):
    c, _ = regularize(complex_fixture(name))
    qb = QuotientChains(quotient_complex(c)).betti()
    inv = invariant_cohomology_dims(chains(c))
    assert qb == inv == _averaged_invariant_betti(c)


@pytest.mark.parametrize("name", [n for n in complex_names() if complex_fixture(n).G.order > 1])
def test_permutation_module(name):
    c, _ = regularize(complex_fixture(name))
    cc = chains(c)
    rep = permutation_module_check(cc)
    assert rep.passed, rep.violations
    for k, entry in enumerate(rep.notes["census"]):
        traces = [sum(Fraction(x) for x in np.diag(np.array(cc.action_matrix(g, k).to_dense(), dtype=object))) for g in range(c.G.order)]
        assert traces == entry["character"]


def test_signature_odd_dimension():
    s = signature(build_apc(simplex_boundary(1), verify=False))
    assert s.as_list() == [0, 0, 0]
