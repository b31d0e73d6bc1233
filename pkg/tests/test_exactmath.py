from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from eqsig.errors import NonSymmetric
from eqsig.exactmath import (
    CxMatrix,
    RatMatrix,
    SignatureTriple,
    as_rational,
    cx_solve_homogeneous,
    rat_rank,
    rat_rank_kernel,
    solve_in_span,
    symmetric_signature,
)

small = st.integers(-4, 4)
fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def dense(rows, cols, elems=small):
    return st.lists(st.lists(elems, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def matrices(draw, max_dim=6, elems=small):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return draw(dense(r, c, elems))


@st.composite
def symmetric(draw, max_dim=6):
    n = draw(st.integers(1, max_dim))
    a = draw(dense(n, n, fracs))
    return [[a[i][j] if i <= j else a[j][i] for j in range(n)] for i in range(n)]


def test_as_rational():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational("4/2") == 2 and isinstance(as_rational("4/2"), int)
    assert as_rational(Fraction(6, 3)) == 2
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


def test_dense_round_trip_and_algebra():
    a = RatMatrix.from_dense([[1, "1/2"], [0, 3]])
    b = RatMatrix.identity(2).scale(2)
    assert (a @ b).to_dense() == [[2, 1], [0, 6]]
    assert (a - a).is_zero()
    assert a.T.to_dense() == [[1, 0], [Fraction(1, 2), 3]]
    with pytest.raises(ValueError):
        a @ RatMatrix.zeros(3, 1)


@given(matrices(elems=fracs))
def test_rank_matches_sympy(m):
    ours = rat_rank(RatMatrix.from_dense(m))
    assert ours == sympy.Matrix(m).rank()


@given(matrices())
def test_kernel_is_exact_and_complete(m):
    M = RatMatrix.from_dense(m)
    rank, ker = rat_rank_kernel(M)
    assert rank + len(ker) == M.cols
    for v in ker:
        assert M.apply({i: x for i, x in enumerate(v) if x}) == {}


@given(matrices(), st.lists(small, min_size=6, max_size=6))
def test_solve_in_span(m, coeffs):
    M = RatMatrix.from_dense(m)
    target = M.apply({j: coeffs[j] for j in range(M.cols) if coeffs[j]})
    c = solve_in_span(M.columns(), target)
    assert c is not None
    assert M.apply(c) == target


def _sympy_inertia(m):
    # oracle: eigenvalue signs of the exact symmetric matrix
    ev = sympy.Matrix(m).eigenvals()
    pos = sum(k for v, k in ev.items() if sympy.re(sympy.N(v, 50)) > 1e-30)
    neg = sum(k for v, k in ev.items() if sympy.re(sympy.N(v, 50)) < -1e-30)
    return pos, neg


@given(symmetric(max_dim=5))
def test_signature_matches_eigenvalue_oracle(m):
    s = symmetric_signature(RatMatrix.from_dense(m))
    assert (s.positive, s.negative) == _sympy_inertia(m)
    assert s.dim == len(m)


@given(symmetric(max_dim=5), st.lists(st.lists(small, min_size=5, max_size=5), min_size=5, max_size=5))
def test_signature_congruence_invariant(m, p):
    n = len(m)
    P = sympy.Matrix([row[:n] for row in p[:n]])
    if P.det() == 0:
        P = sympy.eye(n)
    congruent = (P.T * sympy.Matrix(m) * P).tolist()
    congruent = [[Fraction(int(x.p), int(x.q)) for x in row] for row in congruent]
    assert symmetric_signature(RatMatrix.from_dense(m)) == symmetric_signature(RatMatrix.from_dense(congruent))


def test_hyperbolic_block():
    assert symmetric_signature(RatMatrix.from_dense([[0, 1], [1, 0]])) == SignatureTriple(1, 1, 0)
    assert symmetric_signature(RatMatrix.from_dense([[0, 0], [0, 0]])) == SignatureTriple(0, 0, 2)


def test_nonsymmetric_rejected():
    with pytest.raises(NonSymmetric):
        symmetric_signature(RatMatrix.from_dense([[0, 1], [0, 0]]))


def test_triple_helpers():
    t = SignatureTriple(2, 1, 3)
    assert t.reversed() == SignatureTriple(1, 2, 3)
    assert t.signature == 1
    assert (t + t.reversed()).signature == 0


def test_complex_kernel_and_unitary():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    ker = cx_solve_homogeneous([CxMatrix(a)])
    assert len(ker) == 2
    for v in ker:
        assert np.allclose(a @ v, 0, atol=1e-9)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    assert CxMatrix(q).is_unitary()
    assert not CxMatrix(2 * q).is_unitary()
    with pytest.raises(ValueError):
        CxMatrix(q, tol=-1)
