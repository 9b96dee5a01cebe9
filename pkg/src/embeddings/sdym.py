"""
Self-dual Yang-Mills reduction.

For z-independent potentials

    A_alpha = -iC,  A_alphabar = iC,  A_beta = A - iB,  A_betabar = A + iB

and field strength F_mn = d_m A_n - d_n A_m - [A_m, A_n], the standard
derivative map (d_alpha = -i d_t, d_alphabar = i d_t, d_beta = d_x - i d_y,
d_betabar = d_x + i d_y) gives

    F_ab          = F_{alpha beta}                 = -R_c - i R_b
    F_abar_bbar   = F_{alphabar betabar}           = -R_c + i R_b
    F_trace       = F_{alpha alphabar} + F_{beta betabar} = -2i R_a

in terms of the zero-curvature residuals, so the self-duality equations hold
exactly when the connection is flat.
"""

from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, SDYM_MAPS, SignConvention
from src.algebra.lie import commutator, norm
from src.curvature.residuals import residual_2p1
from src.errors import DomainError, IdentityViolation
from src.fields.field import MatrixField

INDICES = ("alpha", "alphabar", "beta", "betabar")
IDENTITY_LABELS = ("F_ab", "F_abar_bbar", "F_trace")

# index -> {grid axis: coefficient}
DERIVATIVE_MAPS: Dict[str, Dict[str, Dict[str, complex]]] = {
    "standard": {
        "alpha": {"t": -1j},
        "alphabar": {"t": 1j},
        "beta": {"x": 1.0, "y": -1j},
        "betabar": {"x": 1.0, "y": 1j},
    },
    "conjugate": {
        "alpha": {"t": 1j},
        "alphabar": {"t": -1j},
        "beta": {"x": 1.0, "y": 1j},
        "betabar": {"x": 1.0, "y": -1j},
    },
}


@dataclass
class SdymPotentials:
    potentials: Dict[str, MatrixField]
    derivative_map: Mapping[str, Mapping[str, complex]]

    def derivative(self, index: str, field: MatrixField, derivatives: str = "auto") -> np.ndarray:
        out = np.zeros(field.values.shape, dtype=complex)
        for axis, coefficient in self.derivative_map[index].items():
            out = out + coefficient * field.derivative(axis, derivatives)
        return out


def sdym_potentials(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> SdymPotentials:
    if A.grid.dimension != 3:
        raise DomainError("The SDYM reduction needs an (x, y, t) grid")
    if convention.sdym_map not in SDYM_MAPS:
        raise DomainError(f"Unknown SDYM derivative map {convention.sdym_map!r}")
    A.check_grid(B)
    A.check_grid(C)
    return SdymPotentials(
        potentials={
            "alpha": C.scale(-1j),
            "alphabar": C.scale(1j),
            "beta": A - B.scale(1j),
            "betabar": A + B.scale(1j),
        },
        derivative_map=DERIVATIVE_MAPS[convention.sdym_map],
    )


def sdym_curvature(
    p: SdymPotentials, mu: str, nu: str, derivatives: str = "auto"
) -> MatrixField:
    """F_{mu nu} = d_mu A_nu - d_nu A_mu - [A_mu, A_nu]."""
    for index in (mu, nu):
        if index not in INDICES:
            raise DomainError(f"Unknown SDYM index {index!r}; use one of {INDICES}")
    if mu == nu:
        raise DomainError("F_{mu nu} needs two different indices")
    A_mu, A_nu = p.potentials[mu], p.potentials[nu]
    values = (
        p.derivative(mu, A_nu, derivatives)
        - p.derivative(nu, A_mu, derivatives)
        - commutator(A_mu.values, A_nu.values)
    )
    return MatrixField(A_mu.grid, values)


@dataclass
class IdentityReport:
    """Self-duality combinations, their expected values and the deviations."""

    combinations: Dict[str, MatrixField]
    expected: Dict[str, MatrixField]
    deviations: Dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(d <= self.tolerance for d in self.deviations.values())

    def worst(self) -> str:
        return max(self.deviations, key=lambda label: self.deviations[label])


def sdym_identities(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    convention: SignConvention = DEFAULT_CONVENTION,
    derivatives: str = "auto",
    tolerance: float = 1e-10,
) -> IdentityReport:
    p = sdym_potentials(A, B, C, convention)
    F = lambda mu, nu: sdym_curvature(p, mu, nu, derivatives)  # noqa: E731
    combinations = {
        "F_ab": F("alpha", "beta"),
        "F_abar_bbar": F("alphabar", "betabar"),
        "F_trace": F("alpha", "alphabar") + F("beta", "betabar"),
    }
    R = residual_2p1(A, B, C, derivatives=derivatives)
    grid = A.grid
    Ra, Rb, Rc = (R[label].values for label in ("R_a", "R_b", "R_c"))
    expected = {
        "F_ab": MatrixField(grid, -Rc - 1j * Rb),
        "F_abar_bbar": MatrixField(grid, -Rc + 1j * Rb),
        "F_trace": MatrixField(grid, -2j * Ra),
    }
    deviations = {
        label: float(np.max(norm(combinations[label].values - expected[label].values)))
        for label in IDENTITY_LABELS
    }
    return IdentityReport(combinations, expected, deviations, tolerance)


def sdym_reduction_check(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    convention: SignConvention = DEFAULT_CONVENTION,
    derivatives: str = "auto",
    tolerance: float = 1e-10,
) -> IdentityReport:
    """
    Check the three reduction identities; raise IdentityViolation naming the
    worst identity when any deviation exceeds ``tolerance``.
    """
    report = sdym_identities(A, B, C, convention, derivatives, tolerance)
    logger.debug(f"SDYM identity deviations: {report.deviations}")
    if not report.passed:
        label = report.worst()
        raise IdentityViolation(label, report.deviations[label], tolerance)
    return report
