"""Exact rational linear algebra plus a small tolerance-aware complex layer.

Rational matrices are stored sparsely by column (``dict`` row -> value) since
simplicial boundary and cap-product matrices are overwhelmingly zero.  Entries
are ``int`` or ``fractions.Fraction``; both compare exactly and ``Fraction``
keeps itself in lowest terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import NonSymmetric

DEFAULT_TOL = 1e-9

SparseVec = dict  # row index -> nonzero exact rational


def as_rational(x) -> int | Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact value."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        f = Fraction(x.strip())
        return f.numerator if f.denominator == 1 else f
    if isinstance(x, Rational):
        return as_rational(Fraction(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _div(a, b):
    if b == 1:
        return a
    if b == -1:
        return -a
    q = Fraction(a, b) if isinstance(a, int) and isinstance(b, int) else Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


def vec_axpy(y: SparseVec, c, x: SparseVec) -> None:
    """In place ``y += c * x`` dropping exact zeros."""
    for i, v in x.items():
        w = y.get(i, 0) + c * v
        if w:
            y[i] = w
        else:
            y.pop(i, None)


def vec_dot(x: SparseVec, y: SparseVec):
    if len(x) > len(y):
        x, y = y, x
    return sum((v * y[i] for i, v in x.items() if i in y), 0)


def vec_normalize(x: SparseVec) -> SparseVec:
    return {i: (v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v) for i, v in x.items() if v}


class RatMatrix:
    """Immutable sparse matrix over the rationals."""

    __slots__ = ("rows", "cols", "_cols")

    def __init__(self, rows: int, cols: int, columns: Sequence[SparseVec] | None = None):
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [{} for _ in range(cols)]
        if len(columns) != cols:
            raise ValueError("column count mismatch")
        self._cols = tuple(vec_normalize(c) for c in columns)
        for c in self._cols:
            for i in c:
                if not 0 <= i < rows:
                    raise IndexError(f"row index {i} out of range for {rows} rows")

    # constructors -----------------------------------------------------------
    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "RatMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        columns = [{} for _ in range(cols)]
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged matrix")
            for j, x in enumerate(row):
                v = as_rational(x)
                if v:
                    columns[j][i] = v
        return cls(rows, cols, columns)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: dict) -> "RatMatrix":
        columns = [{} for _ in range(cols)]
        for (i, j), x in entries.items():
            v = as_rational(x)
            if v:
                columns[j][i] = v
        return cls(rows, cols, columns)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [{i: 1} for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[SparseVec]) -> "RatMatrix":
        return cls(rows, len(columns), [dict(c) for c in columns])

    # access -----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, j: int) -> SparseVec:
        return dict(self._cols[j])

    def columns(self) -> tuple:
        return self._cols

    def __getitem__(self, ij):
        i, j = ij
        return self._cols[j].get(i, 0)

    def to_dense(self) -> list[list]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, c in enumerate(self._cols):
            for i, v in c.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self._cols)

    def is_zero(self) -> bool:
        return all(not c for c in self._cols)

    # algebra ----------------------------------------------------------------
    @property
    def T(self) -> "RatMatrix":
        columns = [{} for _ in range(self.rows)]
        for j, c in enumerate(self._cols):
            for i, v in c.items():
                columns[i][j] = v
        return RatMatrix(self.cols, self.rows, columns)

    def apply(self, x: SparseVec) -> SparseVec:
        y: SparseVec = {}
        for j, v in x.items():
            vec_axpy(y, v, self._cols[j])
        return y

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return RatMatrix(self.rows, other.cols, [self.apply(c) for c in other._cols])

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = []
        for a, b in zip(self._cols, other._cols):
            c = dict(a)
            vec_axpy(c, 1, b)
            out.append(c)
        return RatMatrix(self.rows, self.cols, out)

    def __neg__(self) -> "RatMatrix":
        return self.scale(-1)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def scale(self, c) -> "RatMatrix":
        c = as_rational(c)
        return RatMatrix(self.rows, self.cols, [{i: c * v for i, v in col.items()} for col in self._cols])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(sorted(c.items())) for c in self._cols)))

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self == self.T

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        pos = {r: k for k, r in enumerate(rows)}
        out = []
        for j in cols:
            out.append({pos[i]: v for i, v in self._cols[j].items() if i in pos})
        return RatMatrix(len(rows), len(cols), out)


# ---------------------------------------------------------------------------
# Column reduction


class ColumnReducer:
    """Incremental Gaussian elimination keyed on the lowest nonzero row.

    Each stored column carries a tag vector (an exact linear combination of
    user supplied labels) so callers can read off coordinates of a reduced
    vector.  Used both for rank/kernel computations and for homology classes.
    """

    def __init__(self):
        self.pivots: dict[int, tuple[SparseVec, SparseVec]] = {}

    def reduce(self, vec: SparseVec, tag: SparseVec | None = None):
        """Reduce ``vec`` against stored pivots; returns (remainder, tag)."""
        r = dict(vec)
        t = dict(tag) if tag is not None else {}
        while r:
            low = max(r)
            hit = self.pivots.get(low)
            if hit is None:
                break
            pv, pt = hit
            c = _div(r[low], pv[low])
            vec_axpy(r, -c, pv)
            if pt:
                vec_axpy(t, -c, pt)
        return r, t

    def add(self, vec: SparseVec, tag: SparseVec | None = None):
        """Reduce and store; returns (remainder, tag). Zero remainders are not stored."""
        r, t = self.reduce(vec, tag)
        if r:
            self.pivots[max(r)] = (r, t)
        return r, t

    @property
    def rank(self) -> int:
        return len(self.pivots)


def sparse_rank_kernel(columns: Sequence[SparseVec]) -> tuple[int, list[SparseVec]]:
    """Rank and exact kernel basis of the matrix with the given columns."""
    red = ColumnReducer()
    kernel = []
    for j, col in enumerate(columns):
        r, t = red.add(col, {j: 1})
        if not r:
            kernel.append(t)
    return red.rank, kernel


def sparse_rank(columns: Sequence[SparseVec]) -> int:
    red = ColumnReducer()
    for col in columns:
        red.add(col)
    return red.rank


def rat_rank_kernel(m: RatMatrix) -> tuple[int, list[list]]:
    """Rank and a basis of the right kernel, as dense exact vectors."""
    rank, kernel = sparse_rank_kernel(m.columns())
    dense = []
    for k in kernel:
        v = [0] * m.cols
        for i, x in k.items():
            v[i] = x
        dense.append(v)
    return rank, dense


def rat_rank(m: RatMatrix) -> int:
    return sparse_rank(m.columns())


def solve_in_span(basis: Sequence[SparseVec], target: SparseVec) -> SparseVec | None:
    """Exact coefficients c with sum c_i basis_i == target, or None."""
    red = ColumnReducer()
    for i, b in enumerate(basis):
        red.add(b, {i: 1})
    r, t = red.reduce(target, {})
    if r:
        return None
    return {i: -v for i, v in t.items()}


# ---------------------------------------------------------------------------
# Symmetric forms


@dataclass(frozen=True)
class SignatureTriple:
    positive: int
    negative: int
    null: int

    @property
    def dim(self) -> int:
        return self.positive + self.negative + self.null

    @property
    def signature(self) -> int:
        return self.positive - self.negative

    def __add__(self, other: "SignatureTriple") -> "SignatureTriple":
        return SignatureTriple(self.positive + other.positive, self.negative + other.negative, self.null + other.null)

    def reversed(self) -> "SignatureTriple":
        return SignatureTriple(self.negative, self.positive, self.null)

    def as_list(self) -> list[int]:
        return [self.positive, self.negative, self.null]


def symmetric_signature(form: RatMatrix) -> SignatureTriple:
    """Inertia of a rational symmetric form by exact congruence reduction.

    A nonzero diagonal entry is used as a 1x1 pivot; if the whole diagonal of
    the remaining block vanishes but an off-diagonal entry does not, the 2x2
    hyperbolic block it spans contributes one positive and one negative square.
    """
    if form.rows != form.cols:
        raise NonSymmetric("form is not square")
    if not form.is_symmetric():
        raise NonSymmetric("form differs from its transpose")
    a = [[Fraction(x) for x in row] for row in form.to_dense()]
    n = form.rows
    alive = list(range(n))
    p = q = 0
    while alive:
        piv = next((i for i in alive if a[i][i] != 0), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                p += 1
            else:
                q += 1
            alive.remove(piv)
            for i in alive:
                if a[i][piv]:
                    f = a[i][piv] / d
                    for j in alive:
                        if a[piv][j]:
                            a[i][j] -= f * a[piv][j]
            continue
        pair = next(((i, j) for i in alive for j in alive if i < j and a[i][j] != 0), None)
        if pair is None:
            break
        i0, j0 = pair
        # x = e_i + e_j has B(x, x) = 2 a_ij != 0; change basis e_i -> e_i + e_j.
        for k in range(n):
            a[k][i0] += a[k][j0]
        for k in range(n):
            a[i0][k] += a[j0][k]
    return SignatureTriple(p, q, n - p - q)


# ---------------------------------------------------------------------------
# Complex matrices


@dataclass(frozen=True)
class CxMatrix:
    """Complex matrix carrying its own comparison tolerance."""

    data: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=complex))
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")

    @property
    def shape(self):
        return self.data.shape

    def __matmul__(self, other: "CxMatrix") -> "CxMatrix":
        return CxMatrix(self.data @ other.data, max(self.tol, other.tol))

    def close(self, other, tol: float | None = None) -> bool:
        other = other.data if isinstance(other, CxMatrix) else np.asarray(other)
        t = self.tol if tol is None else tol
        return self.data.shape == other.shape and bool(np.all(np.abs(self.data - other) <= t))

    def is_unitary(self) -> bool:
        n = self.data.shape[0]
        return self.data.shape == (n, n) and bool(np.allclose(self.data.conj().T @ self.data, np.eye(n), atol=self.tol, rtol=0))


def cx_solve_homogeneous(blocks: Sequence[CxMatrix | np.ndarray], tol: float | None = None) -> list[np.ndarray]:
    """Orthonormal basis of the common kernel of the given constraint blocks.

    Singular values at or below ``tol * max(1, s_max)`` count as zero.
    """
    if not blocks:
        raise ValueError("at least one constraint block is required")
    mats = [b.data if isinstance(b, CxMatrix) else np.asarray(b, dtype=complex) for b in blocks]
    if tol is None:
        tol = max((b.tol for b in blocks if isinstance(b, CxMatrix)), default=DEFAULT_TOL)
    ncols = mats[0].shape[1]
    if any(m.shape[1] != ncols for m in mats):
        raise ValueError("all blocks must share the column count")
    stacked = np.vstack(mats)
    if stacked.shape[0] == 0:
        return [v for v in np.eye(ncols, dtype=complex)]
    # only the right singular vectors matter; a full U is wasted work on tall stacks
    _, s, vh = np.linalg.svd(stacked, full_matrices=stacked.shape[0] < ncols)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return [vh[k].conj() for k in range(rank, ncols)]
