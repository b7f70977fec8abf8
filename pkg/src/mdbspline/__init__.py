"""Multi-degree B-splines built from local B-splines through a sparse extraction operator."""

from .core_bspline import (
    LocalEval,
    OpenKnotVector,
    Side,
    degree_elevation_matrix,
    endpoint_deriv_matrix,
    eval_bspline_derivs,
    eval_bsplines,
    knot_insertion_matrix,
    refinement_matrix,
    validate_knot_vector,
)
from .errors import MDSplineError
from .extraction import (
    ExtractionOperator,
    constraint_matrix,
    extraction_operator,
    nullspace_of_column,
    periodic_extraction_operator,
)
from .md_space import SegmentConfiguration, build_domain, dimension, local_basis_eval, local_basis_table
from .md_spline import MDSpline, convert, to_local_coeffs
from .sparse_linalg import SparseMatrix, right_lsq, spmm

__version__ = "0.1.0"
