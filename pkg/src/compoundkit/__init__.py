"""Compound matrices and the k-generalised analyses of linear and
nonlinear dynamical systems built on them."""
from .compound import (
    CompoundMatrix,
    add_compound,
    add_compound_via_derivative,
    compound_matrix,
    det_product_rectangular,
    gram_det,
    minor,
    mult_compound,
)
from .errors import CompoundKitError
from .index_sets import enumerate_index_sets, rank, unrank
from .spectral import (
    alpha_add_compound,
    alpha_mult_compound,
    check_compound_spectrum,
    eig,
    frac_power,
    is_hurwitz,
    is_schur,
    kron,
    kron_sum,
)
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "CompoundKitError",
    "CompoundMatrix",
    "Verdict",
    "add_compound",
    "add_compound_via_derivative",
    "alpha_add_compound",
    "alpha_mult_compound",
    "check_compound_spectrum",
    "compound_matrix",
    "det_product_rectangular",
    "eig",
    "enumerate_index_sets",
    "frac_power",
    "gram_det",
    "is_hurwitz",
    "is_schur",
    "kron",
    "kron_sum",
    "minor",
    "mult_compound",
    "rank",
    "unrank",
]
