"""Multi-degree spline functions and conversion between multi-degree spaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_bspline import refinement_matrix
from .errors import DimensionMismatch, NotNested, SegmentCountMismatch
from .extraction import ExtractionOperator, extraction_operator
from .md_space import SegmentConfiguration, local_basis_table
from .sparse_linalg import right_lsq

CONVERT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class MDSpline:
    """A spline given by its MDB-spline coefficients.

    The local B-spline coefficients ``f = s H`` are computed once at
    construction, so evaluation is a plain contraction with the local basis.
    """

    operator: ExtractionOperator
    coeffs: np.ndarray
    local_coeffs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        s = np.array(self.coeffs, dtype=np.float64).ravel()
        if s.size != self.operator.dimension:
            raise DimensionMismatch(f"{s.size} coefficients for a space of dimension {self.operator.dimension}")
        s.setflags(write=False)
        f = self.operator.matrix.rmatvec(s)
        f.setflags(write=False)
        object.__setattr__(self, "coeffs", s)
        object.__setattr__(self, "local_coeffs", f)

    @classmethod
    def from_config(cls, cfg: SegmentConfiguration, coeffs) -> MDSpline:
        return cls(extraction_operator(cfg), coeffs)

    @property
    def space(self) -> SegmentConfiguration:
        return self.operator.space

    def evaluate(self, xi, deriv: int = 0):
        """Value (or one-sided derivative) at ``xi``; scalar in, scalar out."""
        scalar = np.ndim(xi) == 0
        table = local_basis_table(self.space, np.atleast_1d(xi), deriv)
        out = table.matvec(self.local_coeffs)
        return float(out[0]) if scalar else out

    __call__ = evaluate


def to_local_coeffs(sp: MDSpline) -> np.ndarray:
    return sp.local_coeffs


def _check_superspace(src: SegmentConfiguration, dst: SegmentConfiguration) -> None:
    for i, (a, b) in enumerate(zip(src.continuity, dst.continuity)):
        if b > a:
            raise NotNested(f"target continuity {b} at join {i} exceeds source continuity {a}")
    if dst.periodic and (not src.periodic or dst.periodic_order > src.periodic_order):
        raise NotNested("target periodic order exceeds the source's")


def convert(sp: MDSpline, target: ExtractionOperator | SegmentConfiguration, allow_lossy: bool = False) -> MDSpline:
    """Represent ``sp`` in the space of ``target``.

    Local coefficients are refined segment by segment and projected onto the
    target MDB-splines by least squares. For a superspace the projection is
    exact; otherwise :class:`NotNested` is raised unless ``allow_lossy``, in
    which case the least-squares fit is returned as is. Every segment must
    still be nested in its target segment.
    """
    if isinstance(target, SegmentConfiguration):
        target = extraction_operator(target)
    src, dst = sp.space, target.space
    if src.n_segments != dst.n_segments:
        raise SegmentCountMismatch(f"{src.n_segments} source segments against {dst.n_segments} target segments")
    if not allow_lossy:
        _check_superspace(src, dst)

    f = sp.local_coeffs
    parts = []
    for i, (ka, kb) in enumerate(zip(src.segments, dst.segments)):
        r = refinement_matrix(ka, kb)
        parts.append(r.rmatvec(f[src.mu[i] : src.mu[i + 1]]))
    f_new = np.concatenate(parts)

    s_new = right_lsq(f_new, target.matrix, check=not allow_lossy)
    if not allow_lossy:
        resid = np.max(np.abs(target.matrix.rmatvec(s_new) - f_new))
        if resid > CONVERT_RTOL * max(1.0, float(np.max(np.abs(f_new)))):
            raise NotNested(f"target space does not contain the spline (residual {resid:.3e})")
    return MDSpline(target, s_new)
