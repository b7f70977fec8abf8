"""The three demonstration spaces shipped with the CLI ``examples`` command."""

from __future__ import annotations

import numpy as np

from .md_space import SegmentConfiguration

# degrees (3, 4, 5) on segments of lengths 2, 4, 3
DEGREE_345_SEGMENTS = (
    (3, [0, 0, 0, 0, 2, 2, 2, 2]),
    (4, [0, 0, 0, 0, 0, 1.5, 1.5, 4, 4, 4, 4, 4]),
    (5, [0, 0, 0, 0, 0, 0, 3, 3, 3, 3, 3, 3]),
)

# degrees (7, 2, 3) on unit segments
DEGREE_723_SEGMENTS = (
    (7, [0] * 8 + [1] * 8),
    (2, [0, 0, 0, 1, 1, 1]),
    (3, [0, 0, 0, 0, 1, 1, 1, 1]),
)

CONVERSION_COEFFS = np.array([7, 4, 10, 1, 4, 2.5, 2, 1.5, 2, 3], dtype=float)

# uniform degree-7 knot vector spanning the same space as the (7, 2, 3) host
DEGREE7_HOST_KNOTS = np.array([0] * 8 + [1] * 5 + [2] * 6 + [3] * 8, dtype=float)


def basis_space(kappa: int) -> SegmentConfiguration:
    return SegmentConfiguration.from_knots(DEGREE_345_SEGMENTS, (kappa, kappa))


def periodic_space() -> SegmentConfiguration:
    return SegmentConfiguration.from_knots(DEGREE_345_SEGMENTS, (2, 2), periodic_order=3)


def conversion_source() -> SegmentConfiguration:
    return SegmentConfiguration.from_knots(DEGREE_723_SEGMENTS, (2, 1))


def conversion_target() -> SegmentConfiguration:
    """Three degree-7 Bernstein segments with the source's join continuity."""
    return SegmentConfiguration.from_knots([(7, [0] * 8 + [1] * 8)] * 3, (2, 1))
