"""
Lax representations of the 2+1 zero-curvature system.

- dressing.py: dressed linear system and its residual
- pencils.py: first-order operator pencils, commutator coefficients, lambda sweep
- calibration.py: sign-convention calibration (import it directly; it depends on
  src.embeddings, which depends on this package)
"""

from src.lax.dressing import (
    DressingSpec,
    dress,
    dressing_deviation,
    dressing_residual,
    frame_residual,
)
from src.lax.pencils import (
    OperatorPencil,
    coeffs_to_gcme,
    gcme_pencils,
    gcme_to_coeffs,
    lambda_sweep,
    pencil_commutator_at,
    pencil_commutator_coeffs,
)

__all__ = [
    "DressingSpec",
    "dress",
    "dressing_deviation",
    "dressing_residual",
    "frame_residual",
    "OperatorPencil",
    "coeffs_to_gcme",
    "gcme_pencils",
    "gcme_to_coeffs",
    "lambda_sweep",
    "pencil_commutator_at",
    "pencil_commutator_coeffs",
]
