"""
Embeddings of the zero-curvature system.

- ymhb.py: Higgs residuals, covariant derivative, Higgs pencils
- sdym.py: self-dual potentials, field strength and the reduction identities
"""

from src.embeddings.sdym import (
    IdentityReport,
    SdymPotentials,
    sdym_curvature,
    sdym_identities,
    sdym_potentials,
    sdym_reduction_check,
)
from src.embeddings.ymhb import (
    covariant_derivative,
    mapped_ymhb_residual,
    ymhb_pencils,
    ymhb_residual,
)

__all__ = [
    "IdentityReport",
    "SdymPotentials",
    "sdym_curvature",
    "sdym_identities",
    "sdym_potentials",
    "sdym_reduction_check",
    "covariant_derivative",
    "mapped_ymhb_residual",
    "ymhb_pencils",
    "ymhb_residual",
]
