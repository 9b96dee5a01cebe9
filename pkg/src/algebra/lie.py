"""
Exact small-matrix Lie algebra for the GCME connections.

Connection matrices are built from scalar coefficient triples in the slot
order (k, sigma, tau) of the first frame equation:

    so3_from_coeffs(k, sigma, tau) = [[0, k, -sigma], [-beta k, 0, tau], [beta sigma, -tau, 0]]
    su2_from_coeffs(k, sigma, tau) = s * [[tau, k + i sigma], [k - i sigma, -tau]]

Every function accepts stacked arrays: the matrix lives in the last two
axes (or the triple in the last axis) and any leading axes are grid axes.
"""

from typing import Optional, Union

import numpy as np
from scipy.linalg import polar

from src.algebra.conventions import DEFAULT_CONVENTION, SU2_PREFACTORS
from src.errors import DomainError

ArrayLike = Union[np.ndarray, list, tuple]
Prefactor = Union[str, complex]

# tolerance used to validate su(2) inputs
SPIN_TOLERANCE = 1e-12


def _as_prefactor(prefactor: Optional[Prefactor]) -> complex:
    if prefactor is None:
        return DEFAULT_CONVENTION.prefactor
    if isinstance(prefactor, str):
        if prefactor not in SU2_PREFACTORS:
            raise DomainError(f"Unknown su(2) prefactor label: {prefactor!r}")
        return SU2_PREFACTORS[prefactor]
    return complex(prefactor)


def _as_triples(coeffs: ArrayLike) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c.shape[-1:] != (3,):
        raise DomainError(f"Coefficient triples need a trailing axis of 3, got {c.shape}")
    if not np.all(np.isfinite(c)):
        raise DomainError("Coefficient triple contains non-finite entries")
    return c


def so3_from_coeffs(coeffs: ArrayLike, beta: int = 1) -> np.ndarray:
    """Build the 3x3 connection matrix of the frame equations from (k, sigma, tau)."""
    if beta not in (1, -1):
        raise DomainError(f"beta must be +1 or -1, got {beta!r}")
    c = _as_triples(coeffs)
    k, sigma, tau = c[..., 0], c[..., 1], c[..., 2]
    m = np.zeros(c.shape[:-1] + (3, 3))
    m[..., 0, 1] = k
    m[..., 0, 2] = -sigma
    m[..., 1, 0] = -beta * k
    m[..., 1, 2] = tau
    m[..., 2, 0] = beta * sigma
    m[..., 2, 1] = -tau
    return m


def su2_from_coeffs(coeffs: ArrayLike, prefactor: Optional[Prefactor] = None) -> np.ndarray:
    """Build the 2x2 traceless anti-Hermitian connection matrix from (k, sigma, tau)."""
    s = _as_prefactor(prefactor)
    c = _as_triples(coeffs)
    k, sigma, tau = c[..., 0], c[..., 1], c[..., 2]
    m = np.empty(c.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = tau
    m[..., 0, 1] = k + 1j * sigma
    m[..., 1, 0] = k - 1j * sigma
    m[..., 1, 1] = -tau
    return s * m


def coeffs_from_so3(m: ArrayLike) -> np.ndarray:
    """Read (k, sigma, tau) back from the upper triangle of a 3x3 connection matrix."""
    m = np.asarray(m)
    if m.shape[-2:] != (3, 3):
        raise DomainError(f"Expected 3x3 matrices, got {m.shape}")
    return np.stack(
        [np.real(m[..., 0, 1]), -np.real(m[..., 0, 2]), np.real(m[..., 1, 2])], axis=-1
    )


def _check_spin(m: np.ndarray, atol: float) -> None:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    trace = np.trace(m, axis1=-2, axis2=-1)
    if np.any(np.abs(trace) > atol * scale):
        raise DomainError("su(2) element is not traceless")
    hermitian_part = m + np.conj(np.swapaxes(m, -1, -2))
    if np.any(np.abs(hermitian_part) > atol * scale):
        raise DomainError("su(2) element is not anti-Hermitian")


def coeffs_from_su2(
    m: ArrayLike, prefactor: Optional[Prefactor] = None, atol: float = SPIN_TOLERANCE
) -> np.ndarray:
    """Read (k, sigma, tau) back from a 2x2 traceless anti-Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    if m.shape[-2:] != (2, 2):
        raise DomainError(f"Expected 2x2 matrices, got {m.shape}")
    _check_spin(m, atol)
    q = m / _as_prefactor(prefactor)
    return np.stack([q[..., 0, 1].real, q[..., 0, 1].imag, q[..., 0, 0].real], axis=-1)


def iso_to_so3(
    x: ArrayLike, prefactor: Optional[Prefactor] = None, atol: float = SPIN_TOLERANCE
) -> np.ndarray:
    """
    Map an su(2) element to so(3), sending su2_from_coeffs(c) to so3_from_coeffs(c).

    With the prefactor i/2 this is a Lie-algebra homomorphism; with 1/(2i)
    it reverses brackets.
    """
    return so3_from_coeffs(coeffs_from_su2(x, prefactor, atol))


def so3_to_su2(x: ArrayLike, prefactor: Optional[Prefactor] = None) -> np.ndarray:
    """Inverse of ``iso_to_so3`` on antisymmetric matrices."""
    return su2_from_coeffs(coeffs_from_so3(x), prefactor)


def commutator(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Matrix commutator XY - YX, broadcast over leading axes."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape[-2:] != y.shape[-2:] or x.shape[-1] != x.shape[-2]:
        raise DomainError(f"Commutator shape mismatch: {x.shape} vs {y.shape}")
    return x @ y - y @ x


def norm(x: ArrayLike) -> Union[float, np.ndarray]:
    """Frobenius norm over the matrix axes."""
    x = np.asarray(x)
    result = np.linalg.norm(x, axis=(-2, -1))
    return float(result) if np.ndim(result) == 0 else result


def dagger(g: ArrayLike) -> np.ndarray:
    g = np.asarray(g)
    return np.conj(np.swapaxes(g, -1, -2))


def adjoint(g: ArrayLike, x: ArrayLike) -> np.ndarray:
    """Ad_g X = g X g^{-1} for orthogonal or unitary g."""
    g = np.asarray(g)
    return g @ np.asarray(x) @ dagger(g)


def _sinc(z: np.ndarray) -> np.ndarray:
    # sin(z)/z, entire in z
    return np.sinc(z / np.pi)


def _expm3(x: np.ndarray) -> np.ndarray:
    if np.any(np.abs(np.trace(x, axis1=-2, axis2=-1)) > 1e-12 * max(1.0, np.max(np.abs(x)))):
        raise DomainError("expm on 3x3 matrices needs so(3) or so(2,1) elements")
    x2 = x @ x
    # Cayley-Hamilton: X^3 = -q X with q = -tr(X^2)/2
    q = -0.5 * np.trace(x2, axis1=-2, axis2=-1)
    root = np.sqrt(np.asarray(q, dtype=complex))
    f = np.real(_sinc(root))
    g = np.real(0.5 * _sinc(root / 2) ** 2)
    eye = np.broadcast_to(np.eye(3), x.shape)
    return eye + f[..., None, None] * x + g[..., None, None] * x2


def _expm2(x: np.ndarray) -> np.ndarray:
    half_trace = 0.5 * np.trace(x, axis1=-2, axis2=-1)
    eye = np.broadcast_to(np.eye(2), x.shape)
    y = x - half_trace[..., None, None] * eye
    # traceless Y satisfies Y^2 = -det(Y) I
    det = y[..., 0, 0] * y[..., 1, 1] - y[..., 0, 1] * y[..., 1, 0]
    mu = np.sqrt(np.asarray(det, dtype=complex))
    a = np.cos(mu)
    b = _sinc(mu)
    out = a[..., None, None] * eye + b[..., None, None] * y
    return np.exp(half_trace)[..., None, None] * out


def expm(x: ArrayLike) -> np.ndarray:
    """
    Matrix exponential by closed form.

    3x3 elements of so(3) / so(2,1) use the Rodrigues / Cayley-Hamilton
    formula; 2x2 matrices use exp(tr/2) (cos(mu) I + sin(mu)/mu Y) with Y the
    traceless part and mu^2 = det Y.
    """
    x = np.asarray(x)
    if not np.all(np.isfinite(x)):
        raise DomainError("expm input contains non-finite entries")
    if x.shape[-2:] == (3, 3):
        return _expm3(x)
    if x.shape[-2:] == (2, 2):
        return _expm2(x.astype(complex))
    raise DomainError(f"expm supports 2x2 and 3x3 matrices, got {x.shape}")


def expm_diagonal(diagonal: ArrayLike) -> np.ndarray:
    """Exponential of diagonal matrices given by their diagonals (..., n)."""
    d = np.asarray(diagonal, dtype=complex)
    out = np.zeros(d.shape + (d.shape[-1],), dtype=complex)
    idx = np.arange(d.shape[-1])
    out[..., idx, idx] = np.exp(d)
    return out


def group_drift(g: ArrayLike) -> Union[float, np.ndarray]:
    """Distance of g from the orthogonal / unitary group: ||g^dagger g - I||."""
    g = np.asarray(g)
    n = g.shape[-1]
    return norm(dagger(g) @ g - np.eye(n))


def project_to_group(g: ArrayLike) -> np.ndarray:
    """Nearest orthogonal / unitary matrix (polar factor)."""
    g = np.asarray(g)
    if g.ndim == 2:
        u, _ = polar(g)
        return u
    flat = g.reshape((-1,) + g.shape[-2:])
    projected = np.stack([polar(m)[0] for m in flat])
    return projected.reshape(g.shape)


def so3_basis(beta: int = 1) -> np.ndarray:
    """F1, F2, F3 = images of the unit triples; [F1, F2] = F3 and cyclic for beta=+1."""
    return so3_from_coeffs(np.eye(3), beta)


def su2_basis(prefactor: Optional[Prefactor] = None) -> np.ndarray:
    return su2_from_coeffs(np.eye(3), prefactor)


def from_coeffs(
    coeffs: ArrayLike,
    representation: str = "so3",
    beta: int = 1,
    prefactor: Optional[Prefactor] = None,
) -> np.ndarray:
    """Dispatch to the so(3)-form or su(2)-form builder."""
    if representation == "so3":
        return so3_from_coeffs(coeffs, beta)
    if representation == "su2":
        if beta != 1:
            raise DomainError("The su(2) form is only defined for beta=+1")
        return su2_from_coeffs(coeffs, prefactor)
    raise DomainError(f"Unknown representation: {representation!r}")


def to_coeffs(
    m: ArrayLike, representation: str = "so3", prefactor: Optional[Prefactor] = None
) -> np.ndarray:
    if representation == "so3":
        return coeffs_from_so3(m)
    if representation == "su2":
        return coeffs_from_su2(m, prefactor)
    raise DomainError(f"Unknown representation: {representation!r}")
