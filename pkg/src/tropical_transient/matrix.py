"""Dense max-plus matrices over exact rationals.

A :class:`TropicalMatrix` stores its finite entries as int64 numerators on
a single common denominator, plus a boolean finiteness mask for -inf
entries.  Max-plus arithmetic only adds and compares entries, so products
of matrices on a common grid stay on that grid and every operation here is
exact.  Results are reduced to the smallest denominator, which makes
equality a plain array comparison.

Instances are immutable; all operations return new matrices.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import DimensionError, PivotError
from .semiring import EPSILON, Epsilon, Weight, as_weight

# Headroom bound for int64 numerators.  Operations check that the largest
# possible sum of magnitudes stays below this before running a kernel.
_GUARD = 1 << 62


def _check_magnitude(total: int, context: str) -> None:
    if total >= _GUARD:
        raise OverflowError(
            f"{context}: scaled integer magnitude {total} exceeds the int64 budget"
        )


class TropicalMatrix:
    """An r x c max-plus matrix with exact rational entries."""

    __slots__ = ("_num", "_fin", "_den")

    def __init__(self, num: np.ndarray, fin: np.ndarray, den: int = 1):
        num = np.ascontiguousarray(num, dtype=np.int64)
        fin = np.ascontiguousarray(fin, dtype=np.bool_)
        if num.ndim != 2 or num.shape != fin.shape:
            raise DimensionError("numerator and mask must be matching 2-d arrays")
        if den < 1:
            raise ValueError("denominator must be a positive integer")
        num = np.where(fin, num, np.int64(0))
        if fin.any():
            g = int(np.gcd.reduce(np.abs(num[fin])))
            g = math.gcd(g, den)
            if g > 1:
                num = num // g
                den = den // g
        else:
            den = 1
        num.setflags(write=False)
        fin.setflags(write=False)
        self._num = num
        self._fin = fin
        self._den = den

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "TropicalMatrix":
        """Build from nested values accepted by :func:`semiring.as_weight`."""
        weights = [[as_weight(v) for v in row] for row in rows]
        r = len(weights)
        if r == 0:
            raise DimensionError("matrix needs at least one row")
        c = len(weights[0])
        if c == 0 or any(len(row) != c for row in weights):
            raise DimensionError("rows must be nonempty and of equal length")
        den = 1
        for row in weights:
            for w in row:
                if not isinstance(w, Epsilon):
                    den = den * w.denominator // math.gcd(den, w.denominator)
        num = np.zeros((r, c), dtype=np.int64)
        fin = np.zeros((r, c), dtype=np.bool_)
        for i, row in enumerate(weights):
            for j, w in enumerate(row):
                if not isinstance(w, Epsilon):
                    scaled = w.numerator * (den // w.denominator)
                    _check_magnitude(abs(scaled), "matrix construction")
                    num[i, j] = scaled
                    fin[i, j] = True
        return cls(num, fin, den)

    @classmethod
    def from_column(cls, weights: Iterable) -> "TropicalMatrix":
        return cls.from_rows([[w] for w in weights])

    @classmethod
    def eps(cls, rows: int, cols: int) -> "TropicalMatrix":
        """The all -inf matrix (additive identity)."""
        return cls(np.zeros((rows, cols), np.int64), np.zeros((rows, cols), np.bool_))

    @classmethod
    def identity(cls, n: int) -> "TropicalMatrix":
        """The max-plus identity: 0 on the diagonal, -inf elsewhere."""
        num = np.zeros((n, n), dtype=np.int64)
        fin = np.eye(n, dtype=np.bool_)
        return cls(num, fin)

    # -- basic queries ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._num.shape

    @property
    def rows(self) -> int:
        return self._num.shape[0]

    @property
    def cols(self) -> int:
        return self._num.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Weight:
        """The (i, j) entry, 0-based indices."""
        if not self._fin[i, j]:
            return EPSILON
        return Fraction(int(self._num[i, j]), self._den)

    def to_rows(self) -> list[list[Weight]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def column_weights(self, j: int = 0) -> tuple[Weight, ...]:
        return tuple(self.entry(i, j) for i in range(self.rows))

    def row_weights(self, i: int = 0) -> tuple[Weight, ...]:
        return tuple(self.entry(i, j) for j in range(self.cols))

    @property
    def max_abs_numerator(self) -> int:
        if not self._fin.any():
            return 0
        return int(np.abs(self._num[self._fin]).max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropicalMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._den == other._den
            and np.array_equal(self._fin, other._fin)
            and np.array_equal(self._num, other._num)
        )

    __hash__ = None

    def __repr__(self) -> str:
        from .semiring import weight_str

        body = "; ".join(
            " ".join(weight_str(self.entry(i, j)) for j in range(self.cols))
            for i in range(self.rows)
        )
        return f"TropicalMatrix[{body}]"

    # -- scaled access for kernels -----------------------------------------

    @property
    def denominator(self) -> int:
        return self._den

    def scaled(self, den: int) -> tuple[np.ndarray, np.ndarray]:
        """Numerator grid and mask rescaled to the given denominator."""
        if den % self._den:
            raise ValueError("target denominator must be a multiple")
        factor = den // self._den
        if factor == 1:
            return self._num, self._fin
        _check_magnitude(self.max_abs_numerator * factor, "rescaling")
        return self._num * np.int64(factor), self._fin

    @staticmethod
    def common_denominator(matrices: Sequence["TropicalMatrix"]) -> int:
        den = 1
        for m in matrices:
            den = den * m._den // math.gcd(den, m._den)
        return den

    # -- algebra ------------------------------------------------------------

    def __matmul__(self, other: "TropicalMatrix") -> "TropicalMatrix":
        if not isinstance(other, TropicalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionError(
                f"cannot multiply {self.shape} by {other.shape}"
            )
        den = self.common_denominator([self, other])
        a_num, a_fin = self.scaled(den)
        b_num, b_fin = other.scaled(den)
        _check_magnitude(
            self.max_abs_numerator * (den // self._den)
            + other.max_abs_numerator * (den // other._den),
            "matrix product",
        )
        num, fin = _kernels.ACTIVE.matmul(a_num, a_fin, b_num, b_fin)
        return TropicalMatrix(num, fin, den)

    def power(self, k: int) -> "TropicalMatrix":
        """The k-th max-plus power; k = 0 gives the identity."""
        if not self.is_square:
            raise DimensionError("powers need a square matrix")
        if k < 0:
            raise ValueError("negative powers are not defined")
        if k == 0:
            return TropicalMatrix.identity(self.rows)
        out = self
        for _ in range(k - 1):
            out = out @ self
        return out

    def oplus(self, other: "TropicalMatrix") -> "TropicalMatrix":
        """Entrywise max."""
        if self.shape != other.shape:
            raise DimensionError("entrywise max needs equal shapes")
        den = self.common_denominator([self, other])
        a_num, a_fin = self.scaled(den)
        b_num, b_fin = other.scaled(den)
        take_b = b_fin & (~a_fin | (b_num > a_num))
        num = np.where(take_b, b_num, a_num)
        fin = a_fin | b_fin
        return TropicalMatrix(np.where(fin, num, np.int64(0)), fin, den)

    def emin(self, other: "TropicalMatrix") -> "TropicalMatrix":
        """Entrywise min (-inf absorbs)."""
        if self.shape != other.shape:
            raise DimensionError("entrywise min needs equal shapes")
        den = self.common_denominator([self, other])
        a_num, a_fin = self.scaled(den)
        b_num, b_fin = other.scaled(den)
        fin = a_fin & b_fin
        num = np.where(fin, np.minimum(a_num, b_num), np.int64(0))
        return TropicalMatrix(num, fin, den)

    def le(self, other: "TropicalMatrix") -> bool:
        """Entrywise order: every entry of self at most the matching entry."""
        if self.shape != other.shape:
            raise DimensionError("entrywise comparison needs equal shapes")
        den = self.common_denominator([self, other])
        a_num, a_fin = self.scaled(den)
        b_num, b_fin = other.scaled(den)
        if (a_fin & ~b_fin).any():
            return False
        both = a_fin & b_fin
        return bool((a_num[both] <= b_num[both]).all())

    def transpose(self) -> "TropicalMatrix":
        return TropicalMatrix(self._num.T, self._fin.T, self._den)

    # -- structural edits (returning new instances) -------------------------

    def with_entry(self, i: int, j: int, value) -> "TropicalMatrix":
        w = as_weight(value)
        num = self._num.copy()
        fin = self._fin.copy()
        if isinstance(w, Epsilon):
            num[i, j] = 0
            fin[i, j] = False
            return TropicalMatrix(num, fin, self._den)
        den = self._den * w.denominator // math.gcd(self._den, w.denominator)
        num, fin = (a.copy() for a in self.scaled(den))
        scaled = w.numerator * (den // w.denominator)
        _check_magnitude(abs(scaled), "entry update")
        num[i, j] = scaled
        fin[i, j] = True
        return TropicalMatrix(num, fin, den)

    def with_row_eps(self, i: int) -> "TropicalMatrix":
        num = self._num.copy()
        fin = self._fin.copy()
        num[i, :] = 0
        fin[i, :] = False
        return TropicalMatrix(num, fin, self._den)

    def with_col_eps(self, j: int) -> "TropicalMatrix":
        num = self._num.copy()
        fin = self._fin.copy()
        num[:, j] = 0
        fin[:, j] = False
        return TropicalMatrix(num, fin, self._den)

    def delete_node(self, idx: int) -> "TropicalMatrix":
        """Remove row and column idx (for node-deleted subdigraphs)."""
        if not self.is_square:
            raise DimensionError("node deletion needs a square matrix")
        keep = [i for i in range(self.rows) if i != idx]
        num = self._num[np.ix_(keep, keep)]
        fin = self._fin[np.ix_(keep, keep)]
        return TropicalMatrix(num, fin, self._den)

    def embed(self, n: int, offset: int) -> "TropicalMatrix":
        """Place this matrix into an all -inf n x n matrix at a diagonal offset."""
        num = np.zeros((n, n), dtype=np.int64)
        fin = np.zeros((n, n), dtype=np.bool_)
        r, c = self.shape
        num[offset : offset + r, offset : offset + c] = self._num
        fin[offset : offset + r, offset : offset + c] = self._fin
        return TropicalMatrix(num, fin, self._den)


def outer_product(x: TropicalMatrix, y: TropicalMatrix) -> TropicalMatrix:
    """The rank-one matrix x (x) y^T with entries x_i + y_j.

    Both arguments are column vectors of the same length.
    """
    if x.cols != 1 or y.cols != 1 or x.rows != y.rows:
        raise DimensionError("outer product needs two equal-length column vectors")
    den = TropicalMatrix.common_denominator([x, y])
    x_num, x_fin = x.scaled(den)
    y_num, y_fin = y.scaled(den)
    _check_magnitude(x.max_abs_numerator * (den // x.denominator)
                     + y.max_abs_numerator * (den // y.denominator), "outer product")
    num = x_num[:, 0][:, None] + y_num[:, 0][None, :]
    fin = x_fin[:, 0][:, None] & y_fin[:, 0][None, :]
    return TropicalMatrix(np.where(fin, num, np.int64(0)), fin, den)


def rank_one_factor(m: TropicalMatrix) -> Optional[tuple[TropicalMatrix, TropicalMatrix]]:
    """Factor m as x (x) y^T pivoting on entry (1,1), or None.

    Returns column vectors (x, y) with x_1 = m_{1,1} and y_1 = 0, so that
    m_ij = x_i + y_j wherever finite and the finiteness patterns agree.
    The test is pivot-based: m_ij must equal m_i1 + m_1j - m_11 for all
    i, j, including -inf consistency in both directions.  A general search
    over other pivots is out of scope.

    Raises :class:`PivotError` when the pivot m_{1,1} is -inf.
    """
    if not m.is_square:
        raise DimensionError("rank-one factorization needs a square matrix")
    num, fin, den = m._num, m._fin, m._den
    if not fin[0, 0]:
        raise PivotError("rank-one pivot (1,1) is -inf")
    _check_magnitude(3 * m.max_abs_numerator, "rank-one test")
    expect_fin = fin[:, 0][:, None] & fin[0, :][None, :]
    if not np.array_equal(fin, expect_fin):
        return None
    expect_num = num[:, 0][:, None] + num[0, :][None, :] - num[0, 0]
    if not np.array_equal(num[fin], expect_num[fin]):
        return None
    x = TropicalMatrix(num[:, 0][:, None].copy(), fin[:, 0][:, None].copy(), den)
    y_num = (num[0, :] - num[0, 0])[:, None].copy()
    y = TropicalMatrix(y_num, fin[0, :][:, None].copy(), den)
    return x, y


def walk_closure(m: TropicalMatrix, max_len: int) -> TropicalMatrix:
    """The sum m (+) m^2 (+) ... (+) m^max_len of positive-length powers.

    Entry (i, j) is the best weight of a walk from i to j using at most
    max_len edges (at least one).  max_len = 0 gives the all -inf matrix.
    """
    if not m.is_square:
        raise DimensionError("walk closure needs a square matrix")
    acc = TropicalMatrix.eps(m.rows, m.cols)
    cur = TropicalMatrix.identity(m.rows)
    for _ in range(max_len):
        cur = cur @ m
        acc = acc.oplus(cur)
    return acc
