"""Multi-degree spline spaces: segment configurations and the discontinuous local basis.

A configuration glues ``n_s`` uniform-degree spline spaces end to end. Segment
``i`` is translated so that its interval starts where segment ``i - 1`` ends;
the join points are owned by the segment on their right, except the global
right end point, which belongs to the last segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core_bspline import LocalEval, OpenKnotVector, eval_bspline_table
from .errors import InvalidConfiguration, NonPositiveDimension, OrderTooHigh, OutOfDomain, PeriodicOrderTooHigh
from .sparse_linalg import SparseMatrix


@dataclass(frozen=True)
class ComposedDomain:
    breakpoints: np.ndarray
    segment_lengths: np.ndarray

    @property
    def interval(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])


@dataclass(frozen=True, eq=False)
class SegmentConfiguration:
    """Knot vectors of the segments plus the continuity orders at the joins.

    ``continuity[i]`` is the number of derivatives (``-1`` for none, ``0`` for
    plain continuity) matched at the join between segments ``i`` and ``i + 1``.
    ``periodic_order`` does the same across the right end back to the left end;
    ``None`` or ``-1`` means no periodic coupling.
    """

    segments: tuple[OpenKnotVector, ...]
    continuity: tuple[int, ...]
    origin: float = 0.0
    periodic_order: int | None = None

    def __post_init__(self) -> None:
        segs = tuple(self.segments)
        kappa = tuple(int(k) for k in self.continuity)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "continuity", kappa)
        object.__setattr__(self, "origin", float(self.origin))
        if self.periodic_order is not None:
            object.__setattr__(self, "periodic_order", int(self.periodic_order))

        if not segs:
            raise InvalidConfiguration("at least one segment is required")
        if not all(isinstance(s, OpenKnotVector) for s in segs):
            raise InvalidConfiguration("segments must be OpenKnotVector instances")
        if len(kappa) != len(segs) - 1:
            raise InvalidConfiguration(
                f"{len(segs)} segments need {len(segs) - 1} continuity orders, got {len(kappa)}"
            )
        for i, k in enumerate(kappa):
            cap = min(segs[i].degree, segs[i + 1].degree)
            if not -1 <= k <= cap:
                raise InvalidConfiguration(f"continuity[{i}] = {k} must lie in [-1, {cap}]")
        if self.periodic:
            if len(segs) < 2:
                raise InvalidConfiguration("periodic configurations need at least two segments")
            cap = min(segs[0].degree, segs[-1].degree)
            if self.periodic_order > cap:
                raise PeriodicOrderTooHigh(f"periodic order {self.periodic_order} exceeds {cap}")
        elif self.periodic_order is not None and self.periodic_order < -1:
            raise InvalidConfiguration("periodic_order must be >= -1")
        dimension(self)

    @classmethod
    def from_knots(
        cls,
        segments: Iterable[tuple[int, Sequence[float]]],
        continuity: Sequence[int] = (),
        origin: float = 0.0,
        periodic_order: int | None = None,
    ) -> SegmentConfiguration:
        """Build from ``(degree, knots)`` pairs."""
        kvs = tuple(OpenKnotVector(np.asarray(k, dtype=np.float64), p) for p, k in segments)
        return cls(kvs, tuple(continuity), origin, periodic_order)

    @property
    def periodic(self) -> bool:
        return self.periodic_order is not None and self.periodic_order >= 0

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(s.degree for s in self.segments)

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(s.dimension for s in self.segments)

    @cached_property
    def mu(self) -> np.ndarray:
        """Cumulative local dimensions, starting at 0."""
        return np.concatenate(([0], np.cumsum(self.local_dims))).astype(np.int64)

    @cached_property
    def domain(self) -> ComposedDomain:
        return build_domain(self)

    @property
    def dimension(self) -> int:
        return dimension(self)

    def with_continuity(self, continuity: Sequence[int], periodic_order: int | None = None) -> SegmentConfiguration:
        return SegmentConfiguration(self.segments, tuple(continuity), self.origin, periodic_order)


def build_domain(cfg: SegmentConfiguration) -> ComposedDomain:
    lengths = np.array([s.interval[1] - s.interval[0] for s in cfg.segments])
    bp = np.empty(lengths.size + 1)
    bp[0] = cfg.origin
    for i, h in enumerate(lengths):
        bp[i + 1] = bp[i] + h
    return ComposedDomain(bp, lengths)


def cumulative_dims(cfg: SegmentConfiguration) -> np.ndarray:
    return cfg.mu


def dimension(cfg: SegmentConfiguration) -> int:
    dims = cfg.local_dims
    n = dims[0] + sum(dims[i] - cfg.continuity[i - 1] - 1 for i in range(1, len(dims)))
    if cfg.periodic:
        n -= cfg.periodic_order + 1
    if n <= 0:
        raise NonPositiveDimension(f"configuration has dimension {n}")
    return n


def uniform_knot_vector(cfg: SegmentConfiguration) -> OpenKnotVector:
    """Single knot vector spanning the same space when all degrees agree.

    Interior knots of each segment are translated onto the composed domain and
    join ``i`` gets multiplicity ``p - continuity[i]``.
    """
    p = cfg.degrees[0]
    if any(d != p for d in cfg.degrees) or cfg.periodic:
        raise InvalidConfiguration("needs a non-periodic configuration of equal degrees")
    bp = cfg.domain.breakpoints
    parts = [np.full(p + 1, bp[0])]
    for i, kv in enumerate(cfg.segments):
        x1 = kv.interval[0]
        parts.append(kv.knots[p + 1 : kv.dimension] - x1 + bp[i])
        if i < cfg.n_segments - 1:
            parts.append(np.full(p - cfg.continuity[i], bp[i + 1]))
    parts.append(np.full(p + 1, bp[-1]))
    return OpenKnotVector(np.concatenate(parts), p)


def segment_index(cfg: SegmentConfiguration, xi, limit: str = "right") -> np.ndarray:
    """Owning segment of each point.

    ``limit="right"`` gives join points to the segment on their right,
    ``limit="left"`` to the one on their left. The domain end points always
    belong to the first and last segment.
    """
    xi = np.asarray(xi, dtype=np.float64)
    bp = cfg.domain.breakpoints
    if np.any(xi < bp[0]) or np.any(xi > bp[-1]):
        raise OutOfDomain(f"points outside [{bp[0]}, {bp[-1]}]")
    side = {"right": "right", "left": "left"}[limit]
    seg = np.searchsorted(bp, xi, side=side) - 1
    return np.clip(seg, 0, cfg.n_segments - 1)


def _to_local(cfg: SegmentConfiguration, seg: int, xi: np.ndarray) -> np.ndarray:
    bp = cfg.domain.breakpoints
    x1, x2 = cfg.segments[seg].interval
    x = xi - bp[seg] + x1
    # breakpoints hit exactly map to the exact segment end points
    x = np.where(xi == bp[seg], x1, x)
    x = np.where(xi == bp[seg + 1], x2, x)
    return np.clip(x, x1, x2)


def local_basis_table(cfg: SegmentConfiguration, xi, deriv: int = 0, limit: str = "right") -> SparseMatrix:
    """Order-``deriv`` values of all local B-splines at the points ``xi``.

    Row ``r`` holds the (one-sided) derivatives of ``b_0 .. b_{mu-1}`` at
    ``xi[r]``; only the owning segment's window is stored.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    seg = segment_index(cfg, xi, limit)
    m = xi.size
    rows, cols, vals = [], [], []
    for s in np.unique(seg):
        kv = cfg.segments[s]
        if deriv > kv.degree:
            raise OrderTooHigh(f"derivative order {deriv} exceeds degree {kv.degree} of segment {s}")
        pts = np.flatnonzero(seg == s)
        first, ders = eval_bspline_table(kv, _to_local(cfg, s, xi[pts]), deriv)
        width = kv.degree + 1
        rows.append(np.repeat(pts, width))
        cols.append((cfg.mu[s] + first[:, None] + np.arange(width)).ravel())
        vals.append(ders[deriv].ravel())
    return SparseMatrix.from_triplets(
        np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (m, int(cfg.mu[-1]))
    )


def local_basis_eval(cfg: SegmentConfiguration, xi: float, deriv: int = 0, limit: str = "right") -> LocalEval:
    """Window of nonzero local B-spline values at a single point.

    Returns a :class:`~mdbspline.core_bspline.LocalEval` whose ``first_index``
    is global, i.e. an index into ``b_0 .. b_{mu-1}``.
    """
    s = int(segment_index(cfg, float(xi), limit))
    kv = cfg.segments[s]
    if deriv > kv.degree:
        raise OrderTooHigh(f"derivative order {deriv} exceeds degree {kv.degree} of segment {s}")
    first, ders = eval_bspline_table(kv, _to_local(cfg, s, np.asarray(float(xi))), deriv)
    return LocalEval(int(cfg.mu[s] + first), ders[deriv])
