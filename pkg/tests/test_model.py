import numpy as np
import pytest
from hypothesis import given, strategies as st

from cases import case_id, check_model_case, model_cases
from eqsig.catalog import MODELS
from eqsig.catalog_groups import catalog_group, dihedral_permutations, subgroup_irreps
from eqsig.errors import NotLiftable, NotPureTensor, SectionMismatch
from eqsig.groups import Subgroup, make_h_section
from eqsig.model import (
    NonNormalModel,
    automorphism_from,
    build_model,
    build_nonnormal_model,
    extend_automorphism,
    identity_automorphism,
    kernel_witness,
    model_isomorphism,
    nonnormal_aut_iso,
    pr_image,
    restrict_automorphism,
    verify_action,
    verify_automorphism,
)

SMALL = [c for c in model_cases() if catalog_group(c[0]).group.order <= 8]


@pytest.mark.parametrize("case", SMALL, ids=case_id)
def test_model_case(case):
    name, H, _, rho = case
    assert check_model_case(name, H, rho) == []


def test_s3_a3_not_liftable():
    m = MODELS["s3_a3_model"]()
    assert pr_image(m) == [0]
    with pytest.raises(NotLiftable):
        automorphism_from(m, 1, np.eye(1))


@pytest.mark.parametrize("name", ["q8_center_model", "d4_center_model"])
def test_surjective_projection(name):
    m = MODELS[name]()
    assert pr_image(m) == list(range(m.base_group.order))


def test_a4_v4_projection():
    # a nontrivial character of V4 is moved by the 3-cycles, so only a = 1 lifts
    m = MODELS["a4_v4_model"]()
    assert pr_image(m) == [0]


def test_mutated_model_fails():
    m = MODELS["q8_center_model"]()
    bad = m.mutated(1, 3, 2 * m.phi[1, 3])
    rep = verify_action(bad)
    assert not rep.passed
    kinds = {v[0] for v in rep.violations}
    assert kinds <= {"associativity", "representative"}


def test_section_mismatch():
    m = MODELS["q8_center_model"]()
    other = build_model(m.group, m.H, m.rho, f_dim=1)
    with pytest.raises(SectionMismatch):
        model_isomorphism(m, other)


def test_kernel_witness_rejects_non_tensor():
    m = MODELS["d4_center_model"]()
    A = identity_automorphism(m)
    noisy = A.mutated(0, A.blocks[0] + np.diag([0, 0.5, 0, 0])[: m.fiber_dim, : m.fiber_dim])
    with pytest.raises(NotPureTensor):
        kernel_witness(noisy)


def _random_b(rng, f):
    return rng.standard_normal((f, f)) + 1j * rng.standard_normal((f, f)) + 2 * np.eye(f)


@given(st.integers(0, 2 ** 32 - 1))
def test_automorphism_group_laws(seed):
    m = MODELS["q8_center_model"]()
    rng = np.random.default_rng(seed)
    a, b, c = (automorphism_from(m, int(rng.integers(4)), _random_b(rng, 2)) for _ in range(3))
    assert ((a * b) * c).close(a * (b * c), 1e-8)
    assert (a * a.inverse()).is_identity(1e-8)
    assert verify_automorphism(a * b).passed
    assert (a * b).a == m.base_group.m(a.a, b.a)


@given(st.integers(0, 2 ** 32 - 1))
def test_every_automorphism_is_a_lift(seed):
    """A = K(B) L(a) with B recovered from A L(a)^-1."""
    m = MODELS["d4_center_model"]()
    rng = np.random.default_rng(seed)
    a = int(rng.integers(m.base_group.order))
    B = _random_b(rng, 2)
    A = automorphism_from(m, a, B)
    K = A * automorphism_from(m, a, np.eye(2)).inverse()
    assert np.allclose(kernel_witness(K), B, atol=1e-8)


def test_psi_between_transversals():
    G = catalog_group("D4").group
    H = Subgroup(G, (0, MODELS["d4_center_model"]().H.elements[1]))
    rho = subgroup_irreps("D4", H)[1]
    m = build_model(G, H, rho)
    for t in ([0] + [max(c) for c in m.section.quotient.cosets[1:]], [0] + [c[-1] for c in m.section.quotient.cosets[1:]]):
        iso = model_isomorphism(m, m.with_section(make_h_section(G, H, t)))
        assert iso.report.passed


def test_nonnormal_model():
    nn = MODELS["s3_reflection_model"]()
    assert isinstance(nn, NonNormalModel)
    assert nn.n_components == 3
    assert nn.n_points == 3
    assert verify_action(nn).passed
    rep = nonnormal_aut_iso(nn)
    assert rep.passed, rep.violations
    A = automorphism_from(nn.inner, 0, np.array([[1, 2], [0, 1j]]))
    ext = extend_automorphism(nn, A)
    assert verify_automorphism(ext).passed
    assert restrict_automorphism(nn, ext).close(A)


def test_d4_reflection_nonnormal():
    G = catalog_group("D4").group
    s = G.permutations.index(tuple(dihedral_permutations(4)[1]))
    H = Subgroup(G, (0, s))
    rho = next(r for r in subgroup_irreps("D4", H) if abs(r.matrices[1, 0, 0] + 1) < 1e-9)
    nn, rep = build_nonnormal_model(G, H, rho, f_dim=2)
    assert rep.passed
    assert nn.n_components == 2 and nn.base_group.order == 2
    assert nonnormal_aut_iso(nn, seed=3).passed
