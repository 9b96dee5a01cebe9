"""
Bogomolny-type system with a Higgs field Phi.

    Y1 = Phi_t + [Phi, C] + A_y - B_x + [A, B]
    Y2 = Phi_y + [Phi, B] + A_t - C_x + [A, C]
    Y3 = Phi_x + [Phi, A] + B_t - C_y + [B, C]

With Phi = 0 these are exactly the zero-curvature residuals (R_a, R_b, R_c).

The Higgs pencils add lam Phi to the first potential and Phi to the second.
Their commutator coefficients are (with p = +1)

    lam^0: Y1'[-] + Y2'[-]     lam^1: 2 Y3'[+]     lam^2: Y1'[-] - Y2'[-]

where Y' flips every bracket sign and [-]/[+] is the sign of the Higgs
terms (Phi_axis + bracket) in that equation. ``MAPPED_HIGGS_SIGNS`` records
this once for the calibration harness and the tests.
"""

from typing import Dict, Sequence, Tuple

from src.algebra.lie import commutator
from src.curvature.residuals import residual_2p1
from src.errors import DomainError
from src.fields.field import MatrixField
from src.lax.pencils import OperatorPencil, gcme_pencils

HIGGS_TERMS: Tuple[Tuple[str, str, str], ...] = (
    # (label, derivative axis of Phi, connection axis bracketed with Phi)
    ("R_a", "t", "t"),
    ("R_b", "y", "y"),
    ("R_c", "x", "x"),
)
MAPPED_BRACKET_SIGN = -1
MAPPED_HIGGS_SIGNS = (-1, -1, 1)


def ymhb_residual(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    Phi: MatrixField,
    *,
    bracket_sign: int = 1,
    higgs_signs: Sequence[int] = (1, 1, 1),
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """Residuals Y1, Y2, Y3 keyed like the curvature residuals (R_a, R_b, R_c)."""
    if len(higgs_signs) != 3 or any(s not in (1, -1) for s in higgs_signs):
        raise DomainError(f"higgs_signs must be three entries of +1/-1, got {higgs_signs!r}")
    A.check_grid(Phi)
    residuals = residual_2p1(A, B, C, bracket_sign=bracket_sign, derivatives=derivatives)
    fields = {"x": A, "y": B, "t": C}
    out = {}
    for (label, axis, partner), sign in zip(HIGGS_TERMS, higgs_signs):
        higgs = Phi.derivative(axis, derivatives) + bracket_sign * commutator(
            Phi.values, fields[partner].values
        )
        out[label] = MatrixField(A.grid, residuals[label].values + sign * higgs)
    return out


def mapped_ymhb_residual(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    Phi: MatrixField,
    derivatives: str = "auto",
) -> Dict[str, MatrixField]:
    """The sign-flipped residuals the Higgs pencils map onto."""
    return ymhb_residual(
        A,
        B,
        C,
        Phi,
        bracket_sign=MAPPED_BRACKET_SIGN,
        higgs_signs=MAPPED_HIGGS_SIGNS,
        derivatives=derivatives,
    )


def covariant_derivative(
    Phi: MatrixField, connection: MatrixField, axis: str, derivatives: str = "auto"
) -> MatrixField:
    """D_i Phi = d_i Phi + [A_i, Phi], the gauge-covariant derivative of the Higgs field."""
    Phi.check_grid(connection)
    values = Phi.derivative(axis, derivatives) + commutator(connection.values, Phi.values)
    return MatrixField(Phi.grid, values)


def ymhb_pencils(
    A: MatrixField,
    B: MatrixField,
    C: MatrixField,
    Phi: MatrixField,
    pencil_sign: int = 1,
) -> Tuple[OperatorPencil, OperatorPencil]:
    """
    L1 = (-d_t - d_y + lam d_x) - p (C + B - lam A - lam Phi)
    L2 = (lam d_t - lam d_y - d_x) - p (-lam C + lam B + A - Phi)
    """
    first, second = gcme_pencils(A, B, C, pencil_sign)
    A.check_grid(Phi)
    p = pencil_sign
    first.potential = (first.potential[0], first.potential[1] + Phi.scale(p))
    second.potential = (second.potential[0] + Phi.scale(p), second.potential[1])
    return first, second
