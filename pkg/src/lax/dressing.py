"""
Dressed linear system.

A frame g with g_i = A_i g on every axis i is dressed by constant diagonal
matrices I_i:

    psi = g exp(eps (I_x x + I_y y + I_t t))

With eps = -1, psi solves psi_i = A_i psi - psi I_i. The residual of that
linear system equals the frame residual (g_i - A_i g) times the diagonal
factor, so a flat frame stays flat after dressing for every choice of I_i.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence

import numpy as np
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, DRESSING_SIGNS, SignConvention
from src.algebra.lie import expm_diagonal
from src.errors import DomainError
from src.fields.field import MatrixField

# frames whose |det| falls below this count as singular
SINGULAR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DressingSpec:
    """Diagonal entries of I_i per axis (missing axes mean I_i = 0) and the exponent sign."""

    diagonals: Mapping[str, Sequence[complex]] = field(default_factory=dict)
    sign: int = -1

    def __post_init__(self) -> None:
        if self.sign not in DRESSING_SIGNS:
            raise DomainError(f"Dressing sign must be +1 or -1, got {self.sign!r}")
        for axis, entries in self.diagonals.items():
            d = np.asarray(entries, dtype=complex)
            if d.ndim != 1 or not np.all(np.isfinite(d)):
                raise DomainError(f"Diagonal of I_{axis} must be a finite vector, got {entries!r}")

    @classmethod
    def from_convention(
        cls,
        diagonals: Mapping[str, Sequence[complex]],
        convention: SignConvention = DEFAULT_CONVENTION,
    ) -> "DressingSpec":
        return cls(diagonals=dict(diagonals), sign=convention.dressing_sign)

    @classmethod
    def at_lambda(
        cls,
        table: Mapping[float, Mapping[str, Sequence[complex]]],
        lam: float,
        sign: int = -1,
    ) -> "DressingSpec":
        """Pick the diagonals tabulated for one spectral parameter value."""
        if lam not in table:
            raise DomainError(f"No dressing diagonals tabulated for lambda={lam}")
        return cls(diagonals=dict(table[lam]), sign=sign)

    def diagonal(self, axis: str, n: int) -> np.ndarray:
        d = np.asarray(self.diagonals.get(axis, np.zeros(n)), dtype=complex)
        if d.shape != (n,):
            raise DomainError(f"I_{axis} needs {n} diagonal entries, got {d.shape[0]}")
        return d

    def matrix(self, axis: str, n: int) -> np.ndarray:
        return np.diag(self.diagonal(axis, n))


def dress(g: MatrixField, spec: DressingSpec) -> MatrixField:
    """
    psi = g exp(eps sum_i I_i u_i).

    Closed-form derivatives of g carry over to psi:
    psi_i = g_i E + eps g E I_i.
    """
    n = g.matrix_size
    det = np.linalg.det(g.values)
    if np.any(np.abs(det) < SINGULAR_TOLERANCE):
        raise DomainError("Cannot dress a frame that is singular somewhere on the grid")
    mesh = g.grid.mesh()
    exponent = sum(
        np.asarray(mesh[axis])[..., None] * spec.diagonal(axis, n) for axis in g.grid.axes
    )
    E = expm_diagonal(spec.sign * np.broadcast_to(exponent, g.grid.shape + (n,)))
    psi = g.values @ E
    derivatives = {
        axis: d @ E + spec.sign * (psi @ spec.matrix(axis, n))
        for axis, d in g.derivatives.items()
    }
    return MatrixField(g.grid, psi, derivatives)


def frame_residual(
    g: MatrixField, connection: Mapping[str, MatrixField], derivatives: str = "auto"
) -> Dict[str, MatrixField]:
    """g_i - A_i g for every axis."""
    out = {}
    for axis in g.grid.axes:
        A = connection[axis]
        g.check_grid(A)
        out[axis] = MatrixField(g.grid, g.derivative(axis, derivatives) - A.values @ g.values)
    return out


def dressing_residual(
    psi: MatrixField,
    connection: Mapping[str, MatrixField],
    spec: DressingSpec,
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """psi_i - A_i psi + psi I_i for every axis."""
    n = psi.matrix_size
    out = {}
    for axis in psi.grid.axes:
        A = connection[axis]
        if A.matrix_size != n:
            raise DomainError(f"Connection along {axis} is {A.matrix_size}x{A.matrix_size}, psi is {n}x{n}")
        values = (
            psi.derivative(axis, derivatives)
            - A.values @ psi.values
            + psi.values @ spec.matrix(axis, n)
        )
        out[axis] = MatrixField(psi.grid, values)
    return out


def dressing_deviation(
    g: MatrixField,
    connection: Mapping[str, MatrixField],
    spec: DressingSpec,
    derivatives: str = "auto",
) -> float:
    """Largest pointwise norm of the dressed residual on the grid."""
    psi = dress(g, spec)
    residual = dressing_residual(psi, connection, spec, derivatives)
    worst = max(float(np.max(np.linalg.norm(r.values, axis=(-2, -1)))) for r in residual.values())
    logger.debug(f"Dressing residual {worst:.3e} (sign {spec.sign})")
    return worst
