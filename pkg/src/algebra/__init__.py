"""
Small-matrix Lie algebra for the GCME connections.

- lie.py: coefficient maps, commutator, su(2)/so(3) correspondence, closed-form expm
- conventions.py: SignConvention and its JSON persistence
"""

from src.algebra.conventions import (
    DEFAULT_CONVENTION,
    SignConvention,
    load_convention,
    save_convention,
)
from src.algebra.lie import (
    adjoint,
    coeffs_from_so3,
    coeffs_from_su2,
    commutator,
    expm,
    from_coeffs,
    iso_to_so3,
    norm,
    so3_basis,
    so3_from_coeffs,
    so3_to_su2,
    su2_basis,
    su2_from_coeffs,
    to_coeffs,
)

__all__ = [
    "DEFAULT_CONVENTION",
    "SignConvention",
    "load_convention",
    "save_convention",
    "adjoint",
    "coeffs_from_so3",
    "coeffs_from_su2",
    "commutator",
    "expm",
    "from_coeffs",
    "iso_to_so3",
    "norm",
    "so3_basis",
    "so3_from_coeffs",
    "so3_to_su2",
    "su2_basis",
    "su2_from_coeffs",
    "to_coeffs",
]
