"""
Zero-curvature residuals of the frame connection.

1+1 (axes x, t), connection U along x and W along t:

    R = U_t - W_x + [U, W]

and componentwise with U = so3(k, sigma, tau), W = so3(w3, w2, w1):

    r1 = k_t - w3_x - tau w2 + sigma w1
    r2 = tau_t - w1_x + beta (k w2 - sigma w3)
    r3 = sigma_t - w2_x - k w1 + tau w3

2+1 (axes x, y, t), connection A along x, B along y, C along t:

    R_a = A_y - B_x + [A, B]
    R_b = A_t - C_x + [A, C]
    R_c = B_t - C_y + [B, C]

``bracket_sign=-1`` flips every bracket and gives the R^- residuals the
operator pencils map onto.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention
from src.algebra.lie import coeffs_from_so3, commutator, iso_to_so3, norm
from src.errors import DomainError
from src.fields.field import ConnectionField, MatrixField

COMPONENT_LABELS = ("r1", "r2", "r3")
MATRIX_LABELS_1P1 = ("R",)
MATRIX_LABELS_2P1 = ("R_a", "R_b", "R_c")

# (label, first, second): R = first_{second axis} - second_{first axis} + [first, second]
PAIRS_2P1: Tuple[Tuple[str, str, str], ...] = (
    ("R_a", "x", "y"),
    ("R_b", "x", "t"),
    ("R_c", "y", "t"),
)
PLANE_LABELS: Dict[Tuple[str, str], str] = {
    ("x", "y"): "R_a",
    ("x", "t"): "R_b",
    ("y", "t"): "R_c",
}


def _check_bracket_sign(bracket_sign: int) -> None:
    if bracket_sign not in (1, -1):
        raise DomainError(f"bracket_sign must be +1 or -1, got {bracket_sign!r}")


def _check_same(fields: Tuple[MatrixField, ...]) -> None:
    first = fields[0]
    for other in fields[1:]:
        first.check_grid(other)


def zero_curvature(
    first: MatrixField,
    second: MatrixField,
    first_axis: str,
    second_axis: str,
    *,
    bracket_sign: int = 1,
    derivatives: str = "auto",
) -> MatrixField:
    """first_{second_axis} - second_{first_axis} + bracket_sign [first, second]."""
    _check_bracket_sign(bracket_sign)
    _check_same((first, second))
    values = (
        first.derivative(second_axis, derivatives)
        - second.derivative(first_axis, derivatives)
        + bracket_sign * commutator(first.values, second.values)
    )
    return MatrixField(first.grid, values)


def residual_1p1_matrix(
    U: MatrixField, W: MatrixField, *, bracket_sign: int = 1, derivatives: str = "auto"
) -> MatrixField:
    if U.grid.dimension != 2:
        raise DomainError("The 1+1 residual needs an (x, t) grid")
    return zero_curvature(U, W, "x", "t", bracket_sign=bracket_sign, derivatives=derivatives)


def residual_2p1(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    *,
    bracket_sign: int = 1,
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """The three residuals R_a, R_b, R_c on an (x, y, t) grid."""
    if A.grid.dimension != 3:
        raise DomainError("The 2+1 residuals need an (x, y, t) grid")
    _check_same((A, B, C))
    fields = {"x": A, "y": B, "t": C}
    return {
        label: zero_curvature(
            fields[a], fields[b], a, b, bracket_sign=bracket_sign, derivatives=derivatives
        )
        for label, a, b in PAIRS_2P1
    }


def residual_1p1_component(
    connection: ConnectionField,
    beta: Optional[int] = None,
    derivatives: str = "auto",
) -> Dict[str, np.ndarray]:
    """
    Scalar residuals r1, r2, r3 of a 1+1 connection given by its coefficients.

    They are read off the so(3)-form matrix residual: its (k, sigma, tau)
    slots hold (r1, r3, r2).
    """
    if connection.grid.dimension != 2:
        raise DomainError("The componentwise residual needs an (x, t) grid")
    beta = connection.beta if beta is None else beta
    if beta not in (1, -1):
        raise DomainError(f"beta must be +1 or -1, got {beta!r}")
    mats = connection.with_representation("so3", beta).matrices()
    R = residual_1p1_matrix(mats["x"], mats["t"], derivatives=derivatives)
    coeffs = coeffs_from_so3(R.values)
    return {"r1": coeffs[..., 0], "r2": coeffs[..., 2], "r3": coeffs[..., 1]}


def connection_residuals(
    connection: ConnectionField,
    convention: SignConvention = DEFAULT_CONVENTION,
    *,
    bracket_sign: int = 1,
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """Matrix residuals of a connection in its own representation."""
    mats = connection.matrices(convention)
    if connection.grid.dimension == 2:
        residual = residual_1p1_matrix(
            mats["x"], mats["t"], bracket_sign=bracket_sign, derivatives=derivatives
        )
        return {"R": residual}
    return residual_2p1(
        mats["x"], mats["y"], mats["t"], bracket_sign=bracket_sign, derivatives=derivatives
    )


@dataclass
class EquivalenceResult:
    so3: Dict[str, MatrixField]
    su2: Dict[str, MatrixField]
    mapped: Dict[str, MatrixField]
    deviation: float


def equivalence_su2_so3(
    connection: ConnectionField,
    convention: SignConvention = DEFAULT_CONVENTION,
    derivatives: str = "auto",
) -> EquivalenceResult:
    """
    Compare the so(3) residuals with the iso-mapped su(2) residuals built
    from the same coefficients under ``convention``'s prefactor.
    """
    if connection.beta != 1:
        raise DomainError("The su(2) comparison is only defined for beta=+1")
    grid = connection.grid
    so3 = connection_residuals(
        connection.with_representation("so3"), convention, derivatives=derivatives
    )
    su2 = connection_residuals(
        connection.with_representation("su2"), convention, derivatives=derivatives
    )
    mapped = {
        label: MatrixField(grid, iso_to_so3(field.values, convention.prefactor))
        for label, field in su2.items()
    }
    deviation = max(
        float(np.max(norm(mapped[label].values - so3[label].values))) for label in so3
    )
    logger.debug(
        f"su(2)/so(3) deviation {deviation:.3e} with prefactor {convention.su2_prefactor}"
    )
    return EquivalenceResult(so3=so3, su2=su2, mapped=mapped, deviation=deviation)


def max_difference(first: Dict[str, MatrixField], second: Dict[str, MatrixField]) -> float:
    """Largest pointwise norm of first[label] - second[label] over shared labels."""
    labels = set(first) & set(second)
    if not labels:
        raise DomainError("No residual labels in common")
    return max(
        float(np.max(norm(first[label].values - second[label].values))) for label in sorted(labels)
    )
