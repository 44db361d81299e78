"""Homology of set-theoretic Yang-Baxter operators, computed exactly."""

from .biquandle import (
    Biquandle,
    YBMap,
    certify,
    check_axioms,
    check_property_I,
    check_yang_baxter,
    from_tables,
    make_alexander,
    make_cyclic,
    parse_spec,
)
from .chain_complex import Variant, boundary_matrix, face_left, face_right
from .intlinalg import AbelianGroup, SparseIntMatrix, smith_normal_form

__version__ = "0.1.0"

__all__ = [
    "AbelianGroup",
    "Biquandle",
    "SparseIntMatrix",
    "Variant",
    "YBMap",
    "boundary_matrix",
    "certify",
    "check_axioms",
    "check_property_I",
    "check_yang_baxter",
    "face_left",
    "face_right",
    "from_tables",
    "make_alexander",
    "make_cyclic",
    "parse_spec",
    "smith_normal_form",
]
