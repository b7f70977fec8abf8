"""Independent oracles and random inputs shared by the test modules."""

from __future__ import annotations

import numpy as np

from mdbspline.core_bspline import OpenKnotVector, eval_bspline_table
from mdbspline.md_space import SegmentConfiguration, local_basis_table, segment_index


def cox_de_boor(u, j: int, p: int, x: float) -> float:
    """Literal recursive definition, with 0/0 := 0. Right-continuous everywhere."""
    if p == 0:
        return 1.0 if u[j] <= x < u[j + 1] else 0.0
    out = 0.0
    if u[j + p] != u[j]:
        out += (x - u[j]) / (u[j + p] - u[j]) * cox_de_boor(u, j, p - 1, x)
    if u[j + p + 1] != u[j + 1]:
        out += (u[j + p + 1] - x) / (u[j + p + 1] - u[j + 1]) * cox_de_boor(u, j + 1, p - 1, x)
    return out


def dense_basis(kv: OpenKnotVector, x, k: int = 0) -> np.ndarray:
    """``(len(x), n)`` table of order-``k`` derivatives of all B-splines."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    first, ders = eval_bspline_table(kv, x, k)
    out = np.zeros((x.size, kv.dimension))
    for r in range(x.size):
        out[r, first[r] : first[r] + kv.degree + 1] = ders[k, r]
    return out


def left_limit_basis(kv: OpenKnotVector, x, k: int = 0) -> np.ndarray:
    """Left-sided derivatives via the mirrored knot vector ``-u[::-1]``."""
    mirrored = OpenKnotVector(-kv.knots[::-1], kv.degree)
    return (-1.0) ** k * dense_basis(mirrored, -np.asarray(x, dtype=float), k)[:, ::-1]


def random_knot_vector(rng: np.random.Generator, p: int, length: float | None = None, max_interior: int = 3) -> OpenKnotVector:
    a = float(rng.choice([0.0, -1.0, 0.5]))
    h = float(length) if length is not None else float(rng.uniform(0.5, 3.0))
    b = a + h
    n_int = int(rng.integers(0, max_interior + 1))
    inner = np.sort(rng.uniform(a + 0.05 * h, b - 0.05 * h, n_int))
    inner = np.unique(inner)
    max_mult = max(p, 1)
    mult = rng.integers(1, max_mult + 1, inner.size)
    knots = np.r_[np.full(p + 1, a), np.repeat(inner, mult), np.full(p + 1, b)]
    return OpenKnotVector(knots, p)


def random_config(
    rng: np.random.Generator,
    max_segments: int = 6,
    max_degree: int = 8,
    degree: int | None = None,
    periodic: bool = False,
) -> SegmentConfiguration:
    while True:
        ns = int(rng.integers(2 if periodic else 1, max_segments + 1))
        degs = [degree if degree is not None else int(rng.integers(0, max_degree + 1)) for _ in range(ns)]
        segs = [random_knot_vector(rng, p) for p in degs]
        kappa = [int(rng.integers(-1, min(degs[i], degs[i + 1]) + 1)) for i in range(ns - 1)]
        per = None
        if periodic:
            per = int(rng.integers(0, min(degs[0], degs[-1]) + 1))
        try:
            return SegmentConfiguration(tuple(segs), tuple(kappa), float(rng.uniform(-2, 2)), per)
        except ValueError:
            continue


def one_sided_mdb(op, xi: float, k: int, side: str) -> np.ndarray:
    """Order-``k`` one-sided derivatives of all MDB-splines at ``xi``.

    Derivatives of order above the degree of the owning segment are zero.
    """
    cfg = op.space
    limit = "left" if side == "left" else "right"
    s = int(segment_index(cfg, xi, limit))
    if k > cfg.segments[s].degree:
        return np.zeros(op.dimension)
    b = local_basis_table(cfg, [xi], k, limit).toarray()[0]
    return op.matrix.toarray() @ b


def local_deriv_scale(cfg: SegmentConfiguration, xi: float, k: int) -> float:
    """Largest order-``k`` one-sided local B-spline derivative at ``xi``, at least 1.

    MDB-spline derivatives are combinations of these, so rounding errors in a
    derivative jump are relative to this magnitude.
    """
    out = 1.0
    for limit in ("left", "right"):
        s = int(segment_index(cfg, xi, limit))
        if k <= cfg.segments[s].degree:
            out = max(out, float(np.abs(local_basis_table(cfg, [xi], k, limit).values).max()))
    return out


def dense_constraints(cfg: SegmentConfiguration) -> np.ndarray:
    """All smoothness constraints as dense columns, built from full derivative tables."""
    mu = cfg.mu
    cols = []
    joins = [(i, i + 1, k) for i, k in enumerate(cfg.continuity)]
    if cfg.periodic:
        joins.append((cfg.n_segments - 1, 0, cfg.periodic_order))
    for left, right, kappa in joins:
        kl, kr = cfg.segments[left], cfg.segments[right]
        for r in range(kappa + 1):
            c = np.zeros(mu[-1])
            c[mu[left] : mu[left + 1]] = left_limit_basis(kl, kl.interval[1], r)[0]
            c[mu[right] : mu[right + 1]] -= dense_basis(kr, kr.interval[0], r)[0]
            cols.append(c)
    return np.array(cols).T if cols else np.zeros((mu[-1], 0))


def constraint_rank(cfg: SegmentConfiguration) -> int:
    """Rank of all smoothness constraints, each column scaled to unit max-norm.

    Derivative orders differ by many orders of magnitude; the rank does not
    depend on column scaling, the default SVD tolerance does.
    """
    k = dense_constraints(cfg)
    if k.size == 0:
        return 0
    return int(np.linalg.matrix_rank(k / np.abs(k).max(axis=0)))


def sample_points(cfg: SegmentConfiguration, m: int, rng: np.random.Generator | None = None) -> np.ndarray:
    a, b = cfg.domain.interval
    if rng is None:
        return np.linspace(a, b, m)
    return np.sort(np.r_[a, b, rng.uniform(a, b, m - 2)])
