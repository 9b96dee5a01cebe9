"""
First-order operator pencils and their commutator.

A pencil is L(lam) = sum_a (d_a0 + lam d_a1) d/du_a + N0 + lam N1. For two
pencils the derivative parts have constant coefficients and commute, so

    [L1, L2] = D1(N2) - D2(N1) + [N1, N2]

is a matrix field polynomial of degree at most 2 in lam. For the
zero-curvature pencils

    L1 = (-d_t - d_y + lam d_x) - p (C + B - lam A)
    L2 = (lam d_t - lam d_y - d_x) - p (-lam C + lam B + A)

with p = +1 the coefficients are

    lam^0: R_a^- + R_b^-     lam^1: 2 R_c^-     lam^2: R_a^- - R_b^-

where R^- are the residuals with every bracket sign flipped. With p = -1
the same coefficients hold with R^- replaced by -R.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger

from src.algebra.conventions import PENCIL_SIGNS
from src.algebra.lie import commutator
from src.errors import DomainError
from src.fields.field import MatrixField

DEFAULT_LAMBDAS = (0.0, 1.0, -1.0)
COEFFICIENT_LABELS = ("lambda0", "lambda1", "lambda2")


@dataclass
class OperatorPencil:
    """
    ``directions[axis] = (d0, d1)`` is the coefficient d0 + lam d1 of d/du_axis;
    ``potential = (N0, N1)`` is the potential N0 + lam N1.
    """

    directions: Dict[str, Tuple[float, float]]
    potential: Tuple[MatrixField, MatrixField]

    def __post_init__(self) -> None:
        if len(self.potential) != 2:
            raise DomainError(
                f"Pencil potentials must be of degree <= 1 in lambda, got {len(self.potential)} terms"
            )
        for axis, coeffs in self.directions.items():
            if len(coeffs) != 2:
                raise DomainError(f"Direction along {axis} must be of degree <= 1 in lambda")
            self.potential[0].grid.axis_index(axis)
        self.potential[0].check_grid(self.potential[1])

    @property
    def grid(self):
        return self.potential[0].grid

    def potential_at(self, lam: float) -> MatrixField:
        N0, N1 = self.potential
        return N0 + N1.scale(lam)

    def directions_at(self, lam: float) -> Dict[str, float]:
        return {axis: d0 + lam * d1 for axis, (d0, d1) in self.directions.items()}


def _check_pencil_sign(pencil_sign: int) -> None:
    if pencil_sign not in PENCIL_SIGNS:
        raise DomainError(f"Pencil sign must be +1 or -1, got {pencil_sign!r}")


def gcme_pencils(
    A: MatrixField, B: MatrixField, C: MatrixField, pencil_sign: int = 1
) -> Tuple[OperatorPencil, OperatorPencil]:
    """The two zero-curvature pencils for the connection (A, B, C) along (x, y, t)."""
    _check_pencil_sign(pencil_sign)
    A.check_grid(B)
    A.check_grid(C)
    p = pencil_sign
    # L1 potential: -p (C + B) + lam p A
    first = OperatorPencil(
        directions={"t": (-1.0, 0.0), "y": (-1.0, 0.0), "x": (0.0, 1.0)},
        potential=((C + B).scale(-p), A.scale(p)),
    )
    # L2 potential: -p A + lam p (C - B)
    second = OperatorPencil(
        directions={"t": (0.0, 1.0), "y": (0.0, -1.0), "x": (-1.0, 0.0)},
        potential=(A.scale(-p), (C - B).scale(p)),
    )
    return first, second


def _apply(directions: Dict[str, float], field: MatrixField, derivatives: str) -> np.ndarray:
    out = np.zeros(field.values.shape, dtype=np.result_type(field.values, float))
    for axis, coefficient in directions.items():
        if coefficient != 0:
            out = out + coefficient * field.derivative(axis, derivatives)
    return out


def pencil_commutator_coeffs(
    first: OperatorPencil, second: OperatorPencil, derivatives: str = "auto"
) -> Dict[str, MatrixField]:
    """Exact lam^0, lam^1, lam^2 coefficient fields of [L1, L2]."""
    first.potential[0].check_grid(second.potential[0])
    grid = first.grid
    coeffs: List[np.ndarray] = [0, 0, 0]  # type: ignore[list-item]
    for p in (0, 1):
        d1 = {axis: c[p] for axis, c in first.directions.items()}
        d2 = {axis: c[p] for axis, c in second.directions.items()}
        for q in (0, 1):
            term = _apply(d1, second.potential[q], derivatives) - _apply(
                d2, first.potential[q], derivatives
            )
            coeffs[p + q] = coeffs[p + q] + term
    for p in (0, 1):
        for q in (0, 1):
            coeffs[p + q] = coeffs[p + q] + commutator(
                first.potential[p].values, second.potential[q].values
            )
    return {
        label: MatrixField(grid, np.asarray(c)) for label, c in zip(COEFFICIENT_LABELS, coeffs)
    }


def pencil_commutator_at(
    first: OperatorPencil, second: OperatorPencil, lam: float, derivatives: str = "auto"
) -> np.ndarray:
    """[L1, L2] evaluated at one spectral parameter value."""
    N1 = first.potential_at(lam)
    N2 = second.potential_at(lam)
    return (
        _apply(first.directions_at(lam), N2, derivatives)
        - _apply(second.directions_at(lam), N1, derivatives)
        + commutator(N1.values, N2.values)
    )


def lambda_sweep(
    first: OperatorPencil,
    second: OperatorPencil,
    lambdas: Sequence[float] = DEFAULT_LAMBDAS,
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """
    Recover the three coefficients from commutators evaluated at given lam
    values by a monomial-basis fit (exact for three distinct values).
    """
    lambdas = [float(v) for v in lambdas]
    if len(set(lambdas)) < 3:
        raise DomainError(f"The lambda sweep needs at least 3 distinct values, got {lambdas}")
    samples = np.stack([pencil_commutator_at(first, second, v, derivatives) for v in lambdas])
    vandermonde = np.vander(np.asarray(lambdas), 3, increasing=True)
    flat = samples.reshape(len(lambdas), -1)
    if len(lambdas) == 3:
        solved = np.linalg.solve(vandermonde, flat)
    else:
        solved = np.linalg.lstsq(vandermonde, flat, rcond=None)[0]
    solved = solved.reshape((3,) + samples.shape[1:])
    logger.debug(f"lambda sweep over {lambdas}")
    return {
        label: MatrixField(first.grid, solved[i]) for i, label in enumerate(COEFFICIENT_LABELS)
    }


def coeffs_to_gcme(coeffs: Dict[str, MatrixField]) -> Dict[str, MatrixField]:
    """Invert the coefficient map: (lam^0, lam^1, lam^2) -> (R_a^-, R_b^-, R_c^-)."""
    c0, c1, c2 = (coeffs[label] for label in COEFFICIENT_LABELS)
    c0.check_grid(c1)
    c0.check_grid(c2)
    grid = c0.grid
    return {
        "R_a": MatrixField(grid, 0.5 * (c0.values + c2.values)),
        "R_b": MatrixField(grid, 0.5 * (c0.values - c2.values)),
        "R_c": MatrixField(grid, 0.5 * c1.values),
    }


def gcme_to_coeffs(residuals: Dict[str, MatrixField]) -> Dict[str, MatrixField]:
    """Forward coefficient map from (R_a^-, R_b^-, R_c^-)."""
    Ra, Rb, Rc = residuals["R_a"], residuals["R_b"], residuals["R_c"]
    grid = Ra.grid
    return {
        "lambda0": MatrixField(grid, Ra.values + Rb.values),
        "lambda1": MatrixField(grid, 2.0 * Rc.values),
        "lambda2": MatrixField(grid, Ra.values - Rb.values),
    }
