"""Uniform-degree B-splines on open knot vectors.

Evaluation is right-continuous inside the interval and left-continuous at the
right end point. Knot spans are located with exact comparisons on the stored
knot values, so callers must pass a knot value exactly to land on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    IntervalMismatch,
    MultiplicityExceeded,
    NonDecreasingViolated,
    NotNested,
    NotOpen,
    OrderTooHigh,
    OutOfDomain,
    TooShort,
)
from .sparse_linalg import SparseMatrix, chain


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True, eq=False)
class OpenKnotVector:
    """Open knot vector of a given degree.

    The first and last ``degree + 1`` knots coincide with the interval end
    points and no interior knot is repeated more than ``degree + 1`` times.
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self) -> None:
        knots = np.array(self.knots, dtype=np.float64).ravel()
        p = int(self.degree)
        if p < 0:
            raise ValueError(f"degree must be non-negative, got {p}")
        if knots.size < 2 * (p + 1):
            raise TooShort(f"degree {p} needs at least {2 * (p + 1)} knots, got {knots.size}")
        if np.any(np.diff(knots) < 0):
            raise NonDecreasingViolated("knots must be non-decreasing")
        n = knots.size - p - 1
        x1, x2 = knots[0], knots[-1]
        if not x1 < x2:
            raise NotOpen("the basic interval is empty")
        if np.any(knots[: p + 1] != x1) or knots[p + 1] <= x1:
            raise NotOpen(f"first knot must appear exactly {p + 1} times")
        if np.any(knots[n:] != x2) or knots[n - 1] >= x2:
            raise NotOpen(f"last knot must appear exactly {p + 1} times")
        _, mult = np.unique(knots, return_counts=True)
        if np.any(mult[1:-1] > p + 1):
            raise MultiplicityExceeded(f"interior knot multiplicity exceeds degree + 1 = {p + 1}")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "degree", p)

    @property
    def dimension(self) -> int:
        return self.knots.size - self.degree - 1

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    @cached_property
    def breaks(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct knot values and their multiplicities."""
        return np.unique(self.knots, return_counts=True)

    def __repr__(self) -> str:
        return f"OpenKnotVector(degree={self.degree}, knots={self.knots.tolist()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpenKnotVector):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.knots, other.knots)

    def __hash__(self) -> int:
        return hash((self.degree, self.knots.tobytes()))


def validate_knot_vector(knots: Sequence[float], degree: int) -> OpenKnotVector:
    return OpenKnotVector(np.asarray(knots, dtype=np.float64), degree)


def bernstein_knots(degree: int, a: float = 0.0, b: float = 1.0) -> OpenKnotVector:
    return OpenKnotVector(np.r_[np.full(degree + 1, a), np.full(degree + 1, b)], degree)


@dataclass(frozen=True)
class LocalEval:
    """Values of the ``p + 1`` B-splines that may be nonzero at a point.

    ``first_index`` is the (0-based) index of the first of them.
    """

    first_index: int
    values: np.ndarray


def find_span(kv: OpenKnotVector, x):
    """Index ``k`` of the knot span ``[u_k, u_{k+1})`` holding ``x``.

    The right end point maps to the last non-empty span.
    """
    x = np.asarray(x, dtype=np.float64)
    x1, x2 = kv.interval
    if np.any(x < x1) or np.any(x > x2):
        raise OutOfDomain(f"points outside [{x1}, {x2}]")
    n = kv.dimension
    span = np.searchsorted(kv.knots, x, side="right") - 1
    return np.minimum(span, n - 1)


def eval_bspline_table(kv: OpenKnotVector, x, k: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized basis values and derivatives.

    Returns ``(first, ders)`` where ``first`` has the shape of ``x`` and
    ``ders[r, ..., i]`` is the ``r``-th derivative of B-spline ``first + i``.
    """
    p = kv.degree
    if k < 0 or k > p:
        raise OrderTooHigh(f"derivative order {k} not in [0, {p}]")
    x = np.asarray(x, dtype=np.float64)
    shape = x.shape
    x = x.ravel()
    span = find_span(kv, x)
    u = kv.knots
    m = x.size

    # ndu[r, j] (r <= j) holds degree-j basis values, ndu[j, r] (j > r) knot differences
    ndu = np.zeros((p + 1, p + 1, m))
    ndu[0, 0] = 1.0
    left = np.zeros((p + 1, m))
    right = np.zeros((p + 1, m))
    for j in range(1, p + 1):
        left[j] = x - u[span + 1 - j]
        right[j] = u[span + j] - x
        saved = np.zeros(m)
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((k + 1, m, p + 1))
    for j in range(p + 1):
        ders[0, :, j] = ndu[j, p]
    if k:
        a = np.zeros((2, p + 1, m))
        for r in range(p + 1):
            s1, s2 = 0, 1
            a[0, 0] = 1.0
            for kk in range(1, k + 1):
                d = np.zeros(m)
                rk, pk = r - kk, p - kk
                if r >= kk:
                    a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                    d = a[s2, 0] * ndu[rk, pk]
                j1 = 1 if rk >= -1 else -rk
                j2 = kk - 1 if r - 1 <= pk else p - r
                for j in range(j1, j2 + 1):
                    a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                    d = d + a[s2, j] * ndu[rk + j, pk]
                if r <= pk:
                    a[s2, kk] = -a[s1, kk - 1] / ndu[pk + 1, r]
                    d = d + a[s2, kk] * ndu[r, pk]
                ders[kk, :, r] = d
                s1, s2 = s2, s1
        fac = float(p)
        for kk in range(1, k + 1):
            ders[kk] *= fac
            fac *= p - kk
    first = (span - p).reshape(shape)
    return first, ders.reshape((k + 1,) + shape + (p + 1,))


def eval_bsplines(kv: OpenKnotVector, x: float) -> LocalEval:
    first, ders = eval_bspline_table(kv, float(x), 0)
    return LocalEval(int(first), ders[0])


def eval_bspline_derivs(kv: OpenKnotVector, x: float, k: int) -> list[LocalEval]:
    """One-sided derivatives of orders ``0..k`` (left-sided only at the right end)."""
    first, ders = eval_bspline_table(kv, float(x), k)
    return [LocalEval(int(first), ders[r]) for r in range(k + 1)]


def endpoint_deriv_matrix(kv: OpenKnotVector, k: int, side: Side | str) -> np.ndarray:
    """Derivatives of the first (left) or last (right) ``k + 1`` B-splines at an end point.

    Entry ``(j, r)`` is the ``r``-th derivative of the ``j``-th of these
    B-splines. Obtained from the derivative coefficient recursion: at the left
    end only the first B-spline of each reduced degree is nonzero (and equals
    one), at the right end only the last.
    """
    p, u, n = kv.degree, kv.knots, kv.dimension
    side = Side(side)
    if k < 0 or k > p:
        raise OrderTooHigh(f"derivative order {k} not in [0, {p}]")
    idx = np.arange(k + 1) if side is Side.LEFT else np.arange(n - k - 1, n)
    # coefficient rows of unit vectors e_j restricted to the window
    f = np.eye(k + 1)
    out = np.zeros((k + 1, k + 1))
    out[:, 0] = f[:, 0] if side is Side.LEFT else f[:, -1]
    for r in range(1, k + 1):
        # f[:, i] holds f_{idx[i], r-1}; the window shrinks by one each order
        g = np.zeros((k + 1, f.shape[1] - 1))
        for i in range(f.shape[1] - 1):
            j = idx[i]
            denom = u[j + p + 1] - u[j + r]
            alpha = (p - r + 1) / denom if denom != 0 else 0.0
            g[:, i] = alpha * (f[:, i + 1] - f[:, i])
        f = g
        out[:, r] = f[:, 0] if side is Side.LEFT else f[:, -1]
    return out


# refinement -------------------------------------------------------------------


def knot_insertion_matrix(kv: OpenKnotVector, new_knot: float) -> tuple[SparseMatrix, OpenKnotVector]:
    """Single knot insertion.

    Returns ``(R, refined)`` with ``f @ R`` the coefficients of the same spline
    on ``refined``.
    """
    p, u, n = kv.degree, kv.knots, kv.dimension
    t = float(new_knot)
    x1, x2 = kv.interval
    if not x1 < t < x2:
        raise OutOfDomain(f"inserted knot {t} must lie strictly inside ({x1}, {x2})")
    if np.count_nonzero(u == t) + 1 > p + 1:
        raise MultiplicityExceeded(f"knot {t} would exceed multiplicity {p + 1}")
    k = int(np.searchsorted(u, t, side="right")) - 1
    rows, cols, vals = [], [], []
    for i in range(n + 1):
        if i <= k - p:
            alpha = 1.0
        elif i >= k + 1:
            alpha = 0.0
        else:
            alpha = (t - u[i]) / (u[i + p] - u[i])
        if alpha != 0.0:
            rows.append(i)
            cols.append(i)
            vals.append(alpha)
        if alpha != 1.0:
            rows.append(i - 1)
            cols.append(i)
            vals.append(1.0 - alpha)
    refined = OpenKnotVector(np.insert(u, k + 1, t), p)
    return SparseMatrix.from_triplets(rows, cols, vals, (n, n + 1)), refined


def _blossom_weights(kv: OpenKnotVector, span: int, args: Sequence[float]) -> np.ndarray:
    """Weights ``w`` with blossom(args) = sum_i w_i c_{span-p+i} for the piece on ``span``."""
    p, u = kv.degree, kv.knots
    d = np.eye(p + 1)
    for r in range(1, p + 1):
        v = args[r - 1]
        for i in range(p, r - 1, -1):
            g = span - p + i
            a = (v - u[g]) / (u[g + p + 1 - r] - u[g])
            d[i] = (1.0 - a) * d[i - 1] + a * d[i]
    return d[p]


def degree_elevation_matrix(kv: OpenKnotVector) -> tuple[SparseMatrix, OpenKnotVector]:
    """Raise the degree by one; every distinct knot gains one multiplicity.

    Each target coefficient is the degree-(p+1) blossom of the spline at the
    target B-spline's interior knots, which is the average of the degree-p
    blossoms obtained by dropping one argument at a time.
    """
    p = kv.degree
    vals_, mult = kv.breaks
    target = OpenKnotVector(np.repeat(vals_, mult + 1), p + 1)
    q, t = p + 1, target.knots
    n_new = target.dimension
    rows, cols, vals = [], [], []
    for j in range(n_new):
        # a non-empty target span inside the support of target B-spline j,
        # taken as central as possible
        cands = [i for i in range(max(j, q), min(j + q, n_new - 1) + 1) if t[i] < t[i + 1]]
        i = cands[len(cands) // 2]
        span = int(find_span(kv, t[i]))
        args = t[j + 1 : j + q + 1]
        w = np.zeros(p + 1)
        for drop in range(q):
            w += _blossom_weights(kv, span, np.delete(args, drop))
        w /= q
        nz = np.flatnonzero(w)
        rows.extend(span - p + nz)
        cols.extend([j] * nz.size)
        vals.extend(w[nz])
    return SparseMatrix.from_triplets(rows, cols, vals, (kv.dimension, n_new)), target


def refinement_matrix(kv_old: OpenKnotVector, kv_new: OpenKnotVector) -> SparseMatrix:
    """Coefficient map from ``kv_old`` into the nested space of ``kv_new``.

    Composes degree elevations followed by single knot insertions.
    """
    if kv_old.interval != kv_new.interval:
        raise IntervalMismatch(f"interval {kv_old.interval} differs from {kv_new.interval}")
    dp = kv_new.degree - kv_old.degree
    if dp < 0:
        raise NotNested(f"target degree {kv_new.degree} below source degree {kv_old.degree}")
    old_vals, old_mult = kv_old.breaks
    new_vals, new_mult = kv_new.breaks
    have = dict(zip(new_vals.tolist(), new_mult.tolist()))
    for v, m in zip(old_vals.tolist(), old_mult.tolist()):
        if have.get(v, 0) < m + dp:
            raise NotNested(f"knot {v} needs multiplicity {m + dp} in the target, has {have.get(v, 0)}")

    mats = [SparseMatrix.identity(kv_old.dimension)]
    kv = kv_old
    for _ in range(dp):
        r, kv = degree_elevation_matrix(kv)
        mats.append(r)
    counts = dict(zip(*(a.tolist() for a in kv.breaks)))
    for v, m in zip(new_vals.tolist(), new_mult.tolist()):
        for _ in range(m - counts.get(v, 0)):
            r, kv = knot_insertion_matrix(kv, v)
            mats.append(r)
    assert kv == kv_new
    return chain(mats)
