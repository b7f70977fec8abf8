"""Smoothness constraints at segment joins and the extraction operator.

The extraction operator ``H`` (``n x mu``) expresses each MDB-spline as a
combination of the discontinuous local B-splines: ``B = H b``. It is built one
constraint at a time: every constraint column ``l`` is eliminated by left
multiplication with an upper bidiagonal matrix whose rows span the left
null-space of ``l``, have non-negative entries and keep unit column sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core_bspline import Side, endpoint_deriv_matrix
from .errors import BlockSumNonzero, NoConstraints, NonContiguousBlock, PeriodicOrderTooHigh, ZeroVector
from .md_space import SegmentConfiguration, local_basis_table
from .sparse_linalg import SparseMatrix, spmm

BLOCK_SUM_RTOL = 1e-10
TINY_ENTRY_RTOL = 1e-14


@dataclass(frozen=True)
class ConstraintMatrix:
    join_index: int
    matrix: SparseMatrix


@dataclass(frozen=True, eq=False)
class ExtractionOperator:
    matrix: SparseMatrix
    space: SegmentConfiguration
    periodic: bool = False

    @property
    def dimension(self) -> int:
        return self.matrix.n_rows

    def evaluate_basis(self, xi, deriv: int = 0, limit: str = "right") -> np.ndarray:
        """Dense ``(len(xi), n)`` table of MDB-spline values (or derivatives)."""
        b = local_basis_table(self.space, xi, deriv, limit)
        return spmm(b, self.matrix.T).toarray()


def _join_block(cfg: SegmentConfiguration, left: int, right: int, order: int) -> SparseMatrix:
    """``mu x (order + 1)`` matrix matching derivatives of segment ``left`` at its
    right end with (negated) derivatives of segment ``right`` at its left end."""
    kl, kr = cfg.segments[left], cfg.segments[right]
    dl = endpoint_deriv_matrix(kl, order, Side.RIGHT)
    dr = endpoint_deriv_matrix(kr, order, Side.LEFT)
    rows_l = cfg.mu[left + 1] - order - 1 + np.arange(order + 1)
    rows_r = cfg.mu[right] + np.arange(order + 1)
    rows, cols, vals = [], [], []
    for r in range(order + 1):
        # order-r derivatives only involve the last / first r + 1 functions
        sl = slice(order - r, order + 1)
        rows.extend(rows_l[sl])
        cols.extend([r] * (r + 1))
        vals.extend(dl[sl, r])
        rows.extend(rows_r[: r + 1])
        cols.extend([r] * (r + 1))
        vals.extend(-dr[: r + 1, r])
    return SparseMatrix.from_triplets(rows, cols, vals, (int(cfg.mu[-1]), order + 1))


def constraint_matrix(cfg: SegmentConfiguration, i: int) -> ConstraintMatrix:
    """Constraints enforcing the prescribed smoothness at join ``i`` (0-based)."""
    if not 0 <= i < cfg.n_segments - 1:
        raise IndexError(f"join index {i} out of range for {cfg.n_segments} segments")
    kappa = cfg.continuity[i]
    if kappa < 0:
        raise NoConstraints(f"join {i} has continuity -1")
    return ConstraintMatrix(i, _join_block(cfg, i, i + 1, kappa))


def periodic_constraint_matrix(cfg: SegmentConfiguration) -> SparseMatrix:
    """Constraints coupling the right end of the last segment to the left end of the first."""
    if not cfg.periodic:
        raise NoConstraints("configuration has no periodic order")
    return _join_block(cfg, cfg.n_segments - 1, 0, cfg.periodic_order)


def nullspace_of_column(l, reference: float | None = None) -> SparseMatrix:
    """Sparse left null-space of a column vector with one zero-sum block of nonzeros.

    Returns the ``(q - 1) x q`` upper bidiagonal matrix ``Hbar`` with
    ``Hbar @ l = 0``, unit column sums and non-negative entries. Rows before
    the block are unit rows, rows inside it blend two neighbours, rows after it
    are shifted unit rows. Runs in ``O(q)``.

    The block must sum to zero up to ``BLOCK_SUM_RTOL`` times the larger of
    ``sum(|block|)`` and ``reference``. Pass the absolute size of the terms
    ``l`` was accumulated from when cancellation has shrunk the block.
    """
    l = np.asarray(l, dtype=np.float64).ravel()
    q = l.size
    nz = np.flatnonzero(l)
    if nz.size == 0:
        raise ZeroVector("constraint column is identically zero")
    i1, i2 = int(nz[0]), int(nz[-1])
    block = l[i1 : i2 + 1]
    scale = float(np.max(np.abs(block)))
    if nz.size != i2 - i1 + 1 or np.any(np.abs(block) < TINY_ENTRY_RTOL * scale):
        raise NonContiguousBlock(f"nonzero entries of the constraint column are not one block ({i1}..{i2})")
    size = max(float(np.abs(block).sum()), reference or 0.0)
    if abs(float(block.sum())) > BLOCK_SUM_RTOL * size:
        raise BlockSumNonzero(f"block {i1}..{i2} sums to {block.sum():.3e}")

    diag = np.zeros(q - 1)
    sup = np.zeros(q - 1)
    diag[: i1 + 1] = 1.0
    for j in range(i1, i2 - 1):
        sup[j] = -l[j] / l[j + 1] * diag[j]
        diag[j + 1] = 1.0 - sup[j]
    sup[i2 - 1 :] = 1.0

    rows = np.arange(q - 1)
    keep_d, keep_s = diag != 0.0, sup != 0.0
    r = np.concatenate((rows[keep_d], rows[keep_s]))
    c = np.concatenate((rows[keep_d], rows[keep_s] + 1))
    v = np.concatenate((diag[keep_d], sup[keep_s]))
    return SparseMatrix.from_triplets(r, c, v, (q - 1, q))


def _eliminate(h: SparseMatrix, lmat: SparseMatrix, col: int, reference: float, wrap: bool = False):
    """Apply one null-space step for column ``col`` of ``lmat`` to ``h`` and ``lmat``.

    ``reference`` bounds ``sum(|lmat[:, col]|)`` before cancellation: ``h`` is
    non-negative with unit column sums, so the absolute column sum of the
    constraint matrix serves.

    With ``wrap`` the rows are first rotated so that a block running over the
    last row back to the first becomes contiguous; the rotation is undone
    afterwards.
    """
    l = lmat.column(col)
    shift = 0
    if wrap:
        nonzero = l != 0.0
        starts = np.flatnonzero(nonzero & ~np.roll(nonzero, 1))
        if starts.size == 1:
            shift = (-int(starts[0])) % l.size
        l = np.roll(l, shift)
        h, lmat = h.roll_rows(shift), lmat.roll_rows(shift)
    hbar = nullspace_of_column(l, reference)
    if wrap and hbar.values.min() < 0.0:
        # the wrapped block overlaps itself through the few remaining rows
        raise PeriodicOrderTooHigh(
            f"periodic order leaves no non-negative basis (wrap-around step {col} has negative weights)"
        )
    h, lmat = spmm(hbar, h), spmm(hbar, lmat)
    if shift:
        h, lmat = h.roll_rows(-shift), lmat.roll_rows(-shift)
    return h, lmat


def _interior_extraction(cfg: SegmentConfiguration) -> SparseMatrix:
    h = SparseMatrix.identity(int(cfg.mu[-1]))
    for i, kappa in enumerate(cfg.continuity):
        if kappa < 0:
            continue
        k = constraint_matrix(cfg, i).matrix
        ref = np.bincount(k.col_indices, np.abs(k.values), minlength=k.n_cols)
        lmat = spmm(h, k)
        for j in range(kappa + 1):
            h, lmat = _eliminate(h, lmat, j, ref[j])
    return h


def extraction_operator(cfg: SegmentConfiguration) -> ExtractionOperator:
    """Extraction operator of ``cfg``; periodic configurations are handled too."""
    if cfg.periodic:
        return periodic_extraction_operator(cfg)
    return ExtractionOperator(_interior_extraction(cfg), cfg, periodic=False)


def periodic_extraction_operator(cfg: SegmentConfiguration) -> ExtractionOperator:
    """Interior joins first, then the wrap-around constraints of orders ``0..periodic_order``.

    Each wrap-around constraint column has its nonzeros at the top and bottom
    of the working operator; the rows are rotated so that this block becomes
    contiguous before the null-space step.
    """
    h = _interior_extraction(cfg)
    if not cfg.periodic:
        return ExtractionOperator(h, cfg, periodic=False)
    k = periodic_constraint_matrix(cfg)
    ref = np.bincount(k.col_indices, np.abs(k.values), minlength=k.n_cols)
    lmat = spmm(h, k)
    for j in range(cfg.periodic_order + 1):
        h, lmat = _eliminate(h, lmat, j, ref[j], wrap=True)
    return ExtractionOperator(h, cfg, periodic=True)
