"""Row-major compressed sparse matrices and the few kernels the extraction needs.

Indices are 0-based in the Python API; the Matrix Market files are 1-based as
the format requires. Products keep every structurally produced entry, including
values that cancel to exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import DimensionMismatch, MDSplineError, RankDeficient

MM_HEADER = "%%MatrixMarket matrix coordinate real general"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Compressed sparse row matrix.

    ``row_offsets[i]:row_offsets[i+1]`` delimits the stored entries of row ``i``;
    column indices are strictly increasing within a row.
    """

    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        ro = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        ci = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        va = np.ascontiguousarray(self.values, dtype=np.float64)
        if ro.shape != (self.n_rows + 1,) or ro[0] != 0 or np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be non-decreasing of length n_rows + 1 starting at 0")
        if ro[-1] != ci.size or ci.size != va.size:
            raise ValueError("row_offsets[-1] must equal the number of stored values")
        if ci.size:
            if ci.min() < 0 or ci.max() >= self.n_cols:
                raise ValueError("column index out of range")
            rows = np.repeat(np.arange(self.n_rows), np.diff(ro))
            same_row = rows[1:] == rows[:-1]
            if np.any(np.diff(ci)[same_row] <= 0):
                raise ValueError("column indices must be strictly increasing within each row")
        object.__setattr__(self, "row_offsets", _frozen(ro))
        object.__setattr__(self, "col_indices", _frozen(ci))
        object.__setattr__(self, "values", _frozen(va))

    # construction ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        return cls(n, n, np.arange(n + 1), np.arange(n), np.ones(n))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> SparseMatrix:
        return cls(n_rows, n_cols, np.zeros(n_rows + 1, dtype=np.int64), np.empty(0), np.empty(0))

    @classmethod
    def from_dense(cls, a) -> SparseMatrix:
        """Store the nonzero entries of a dense 2-D array."""
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        rows, cols = np.nonzero(a)
        return cls.from_triplets(rows, cols, a[rows, cols], a.shape)

    @classmethod
    def from_triplets(cls, rows, cols, vals, shape: tuple[int, int]) -> SparseMatrix:
        """Assemble from coordinate triplets; duplicates are summed, zeros kept."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=np.float64).ravel()
        n_rows, n_cols = int(shape[0]), int(shape[1])
        if rows.size and (rows.min() < 0 or rows.max() >= n_rows):
            raise ValueError("row index out of range")
        return _compress(rows, cols, vals, n_rows, n_cols)

    @classmethod
    def from_scipy(cls, m) -> SparseMatrix:
        m = scipy.sparse.csr_matrix(m)
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.shape[0], m.shape[1], m.indptr, m.indices, m.data)

    # views / conversion ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def row_indices(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.n_rows), np.diff(self.row_offsets))

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape)
        np.add.at(out, (self.row_indices(), self.col_indices), self.values)
        return out

    def to_scipy(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.values.copy(), self.col_indices.copy(), self.row_offsets.copy()), shape=self.shape
        )

    @property
    def T(self) -> SparseMatrix:
        return self.transpose()

    def transpose(self) -> SparseMatrix:
        return _compress(self.col_indices, self.row_indices(), self.values, self.n_cols, self.n_rows)

    def column(self, j: int) -> np.ndarray:
        """Column ``j`` as a dense vector."""
        out = np.zeros(self.n_rows)
        hit = self.col_indices == j
        out[self.row_indices()[hit]] = self.values[hit]
        return out

    # arithmetic -----------------------------------------------------------

    def matvec(self, x) -> np.ndarray:
        """``A @ x`` for a dense vector ``x``."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n_cols,):
            raise DimensionMismatch(f"vector of length {x.shape} against {self.n_cols} columns")
        out = np.zeros(self.n_rows)
        np.add.at(out, self.row_indices(), self.values * x[self.col_indices])
        return out

    def rmatvec(self, y) -> np.ndarray:
        """Row vector times matrix, ``y @ A``."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n_rows,):
            raise DimensionMismatch(f"vector of length {y.shape} against {self.n_rows} rows")
        out = np.zeros(self.n_cols)
        np.add.at(out, self.col_indices, self.values * y[self.row_indices()])
        return out

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return spmm(self, other)
        return NotImplemented

    def roll_rows(self, shift: int) -> SparseMatrix:
        """Circularly shift rows: row ``i`` moves to ``(i + shift) % n_rows``."""
        if self.n_rows == 0:
            return self
        order = np.roll(np.arange(self.n_rows), shift)  # new row r <- old row order[r]
        counts = np.diff(self.row_offsets)[order]
        offsets = np.concatenate(([0], np.cumsum(counts)))
        take = np.repeat(self.row_offsets[order], counts) + (
            np.arange(int(counts.sum())) - np.repeat(offsets[:-1], counts)
        )
        return SparseMatrix(self.n_rows, self.n_cols, offsets, self.col_indices[take], self.values[take])


def _compress(rows, cols, vals, n_rows: int, n_cols: int) -> SparseMatrix:
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    if rows.size:
        new_key = np.empty(rows.size, dtype=bool)
        new_key[0] = True
        new_key[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new_key)
        vals = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
    counts = np.bincount(rows, minlength=n_rows) if rows.size else np.zeros(n_rows, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    return SparseMatrix(n_rows, n_cols, offsets, cols, vals)


def spmm(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Exact sparse product ``a @ b``.

    Every (row, col) pair reached by some product ``a[i, k] * b[k, j]`` is
    stored, even when the accumulated value is zero.
    """
    if a.n_cols != b.n_rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    k = a.col_indices
    counts = b.row_offsets[k + 1] - b.row_offsets[k]
    total = int(counts.sum())
    if total == 0:
        return SparseMatrix.zeros(a.n_rows, b.n_cols)
    seg_start = np.cumsum(counts) - counts
    pos = np.repeat(b.row_offsets[k], counts) + (np.arange(total) - np.repeat(seg_start, counts))
    rows = np.repeat(a.row_indices(), counts)
    cols = b.col_indices[pos]
    vals = np.repeat(a.values, counts) * b.values[pos]
    return _compress(rows, cols, vals, a.n_rows, b.n_cols)


def block_diag(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    rows, cols, vals = [], [], []
    r0 = c0 = 0
    for m in blocks:
        rows.append(m.row_indices() + r0)
        cols.append(m.col_indices + c0)
        vals.append(m.values)
        r0 += m.n_rows
        c0 += m.n_cols
    if not blocks:
        return SparseMatrix.zeros(0, 0)
    return _compress(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), r0, c0)


def chain(mats: Iterable[SparseMatrix]) -> SparseMatrix:
    """Left-to-right product of a non-empty sequence."""
    it = iter(mats)
    out = next(it)
    for m in it:
        out = spmm(out, m)
    return out


def right_lsq(v, a: SparseMatrix, *, check: bool = True) -> np.ndarray:
    """Least-squares solution ``x`` of ``x @ a = v``, i.e. ``v a^T (a a^T)^{-1}``.

    The normal matrix ``a a^T`` is factorized with a banded Cholesky, which is
    cheap for extraction operators (narrow band, well conditioned). Wrapped
    (periodic) operators widen the band; the factorization stays correct but
    costs more memory.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (a.n_cols,):
        raise DimensionMismatch(f"vector of length {v.shape} against {a.n_cols} columns")
    m = a.n_rows
    if m == 0:
        return np.zeros(0)
    normal = spmm(a, a.T)
    rhs = a.matvec(v)

    rows, cols = normal.row_indices(), normal.col_indices
    upper = cols >= rows
    bw = int(np.max(cols[upper] - rows[upper])) if np.any(upper) else 0
    ab = np.zeros((bw + 1, m))
    ab[bw + rows[upper] - cols[upper], cols[upper]] = normal.values[upper]

    diag = ab[bw]
    max_diag = float(diag.max()) if diag.size else 0.0
    if max_diag <= 0.0:
        raise RankDeficient("normal matrix has no positive diagonal")
    try:
        cb = scipy.linalg.cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient(f"normal matrix is not positive definite: {exc}") from None
    pivots = cb[bw] ** 2
    if np.any(pivots < 1e-13 * max_diag):
        raise RankDeficient(f"Cholesky pivot {pivots.min():.3e} below 1e-13 * {max_diag:.3e}")
    x = scipy.linalg.cho_solve_banded((cb, False), rhs)

    if check:
        resid = normal.rmatvec(x) - rhs
        scale = max(float(np.max(np.abs(v))), np.finfo(float).tiny)
        # relative to |v|, and to |a a^T| when the operator has entries above 1
        if np.max(np.abs(resid)) > 1e-10 * scale * max(1.0, max_diag):
            raise RankDeficient(f"normal-equation residual {np.max(np.abs(resid)):.3e} too large")
    return x


# Matrix Market --------------------------------------------------------------


def write_matrix_market(path, a: SparseMatrix) -> None:
    """Write ``a`` in coordinate format, entries in row-major order, 17 significant digits."""
    lines = [MM_HEADER, f"{a.n_rows} {a.n_cols} {a.nnz}"]
    for i, j, v in zip(a.row_indices(), a.col_indices, a.values):
        lines.append(f"{i + 1} {j + 1} {v:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_market(path) -> SparseMatrix:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip().lower() != MM_HEADER.lower():
        raise MDSplineError(f"{path}: expected header '{MM_HEADER}'")
    body = [ln for ln in text[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MDSplineError(f"{path}: missing size line")
    n_rows, n_cols, nnz = (int(t) for t in body[0].split())
    entries = body[1:]
    if len(entries) != nnz:
        raise MDSplineError(f"{path}: expected {nnz} entries, found {len(entries)}")
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz)
    for k, ln in enumerate(entries):
        i, j, v = ln.split()
        rows[k], cols[k], vals[k] = int(i) - 1, int(j) - 1, float(v)
    return SparseMatrix.from_triplets(rows, cols, vals, (n_rows, n_cols))
