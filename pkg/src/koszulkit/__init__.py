"""Exact arithmetic for N-homogeneous graded algebras A = T(E)/(R)."""
__version__ = "0.1.0"

from .algebra import (
    DependentRelatorWarning,
    GradedAlgebra,
    Metric,
    Presentation,
    dual_presentation,
    graded_dim,
    graded_dims,
    ideal_membership,
    mult_matrix,
    quotient_check,
    standard_section,
)
from .complexes import (
    Certificate,
    dN_zero_check,
    euler_check,
    gorenstein_certificate,
    homology,
    koszul_certificate,
    koszul_template,
    slice_at,
)
from .exactlin import QQ, FieldSpec, SparseMatrix, Subspace, rank
from .presets import (
    dual_numbers,
    free_algebra,
    heisenberg,
    polynomial,
    preset,
    self_duality,
    yang_mills,
)
from .series import TruncatedSeries, expand, lie_dims_closed_form, lie_dims_from_series
from .tensor import RelatorSpace, TensorVector

__all__ = [name for name in dir() if not name.startswith("_")]
