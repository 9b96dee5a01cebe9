"""
Sampled fields: matrix-valued fields and coefficient connection fields.

A field may carry closed-form derivatives next to its samples. Residuals
use them when asked (or when available in ``auto`` mode) and fall back to
finite differences otherwise.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention
from src.algebra.lie import from_coeffs
from src.errors import DomainError, GridMismatchError
from src.fields.grid import Grid, partial_derivative

DERIVATIVE_MODES = ("auto", "fd", "analytic")
REPRESENTATIONS = ("so3", "su2")

# coefficient name -> (axis, slot); slots follow so3_from_coeffs' (k, sigma, tau)
NAMED_COEFFICIENTS: Dict[str, Tuple[str, int]] = {
    "k": ("x", 0),
    "sigma": ("x", 1),
    "tau": ("x", 2),
    "m3": ("y", 0),
    "m2": ("y", 1),
    "m1": ("y", 2),
    "w3": ("t", 0),
    "w2": ("t", 1),
    "w1": ("t", 2),
}
COEFFICIENT_ALIASES: Dict[str, str] = {
    "σ": "sigma",
    "τ": "tau",
    "ω1": "w1",
    "ω2": "w2",
    "ω3": "w3",
    "ω₁": "w1",
    "ω₂": "w2",
    "ω₃": "w3",
    "omega1": "w1",
    "omega2": "w2",
    "omega3": "w3",
    "m₁": "m1",
    "m₂": "m2",
    "m₃": "m3",
}

Scalar = Union[int, float, complex]


def canonical_coefficient(name: str) -> str:
    name = COEFFICIENT_ALIASES.get(name.strip(), name.strip())
    if name not in NAMED_COEFFICIENTS:
        raise DomainError(f"Unknown coefficient name {name!r}")
    return name


def _check_derivative_mode(mode: str) -> None:
    if mode not in DERIVATIVE_MODES:
        raise DomainError(f"Derivative mode must be one of {DERIVATIVE_MODES}, got {mode!r}")


@dataclass
class MatrixField:
    """One square matrix per grid point, plus optional closed-form derivatives."""

    grid: Grid
    values: np.ndarray
    derivatives: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values)
        expected = self.grid.shape
        if self.values.shape[: len(expected)] != expected or self.values.ndim != len(expected) + 2:
            raise DomainError(
                f"Matrix field shape {self.values.shape} does not match grid {expected}"
            )
        if self.values.shape[-1] != self.values.shape[-2]:
            raise DomainError(f"Matrix field samples must be square: {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Matrix field contains non-finite samples")
        for axis, d in self.derivatives.items():
            self.grid.axis_index(axis)
            if np.shape(d) != self.values.shape:
                raise DomainError(f"Derivative along {axis} has shape {np.shape(d)}")

    @classmethod
    def constant(cls, grid: Grid, matrix: np.ndarray) -> "MatrixField":
        """Constant field with exact zero derivatives."""
        matrix = np.asarray(matrix)
        values = np.broadcast_to(matrix, grid.shape + matrix.shape).copy()
        zeros = np.zeros_like(values)
        return cls(grid, values, {axis: zeros for axis in grid.axes})

    @classmethod
    def zeros(cls, grid: Grid, n: int, dtype: type = float) -> "MatrixField":
        return cls.constant(grid, np.zeros((n, n), dtype=dtype))

    @property
    def matrix_size(self) -> int:
        return self.values.shape[-1]

    def has_analytic(self, axis: str) -> bool:
        return axis in self.derivatives

    def derivative(self, axis: str, mode: str = "auto") -> np.ndarray:
        """Samples of the derivative along ``axis``."""
        _check_derivative_mode(mode)
        if mode != "fd" and axis in self.derivatives:
            return self.derivatives[axis]
        if mode == "analytic":
            raise DomainError(f"No closed-form derivative along {axis!r} for this field")
        return partial_derivative(self.values, self.grid, axis)

    def without_derivatives(self) -> "MatrixField":
        return MatrixField(self.grid, self.values.copy())

    def check_grid(self, other: "MatrixField") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("Fields live on different grids")
        if self.values.shape[-2:] != other.values.shape[-2:]:
            raise DomainError(
                f"Fields hold different matrix sizes: {self.values.shape[-2:]} vs "
                f"{other.values.shape[-2:]}"
            )

    def _combine(self, other: "MatrixField", sign: int) -> "MatrixField":
        self.check_grid(other)
        shared = set(self.derivatives) & set(other.derivatives)
        derivatives = {
            axis: self.derivatives[axis] + sign * other.derivatives[axis] for axis in shared
        }
        return MatrixField(self.grid, self.values + sign * other.values, derivatives)

    def __add__(self, other: "MatrixField") -> "MatrixField":
        return self._combine(other, 1)

    def __sub__(self, other: "MatrixField") -> "MatrixField":
        return self._combine(other, -1)

    def __neg__(self) -> "MatrixField":
        return self.scale(-1)

    def scale(self, factor: Scalar) -> "MatrixField":
        derivatives = {axis: factor * d for axis, d in self.derivatives.items()}
        return MatrixField(self.grid, factor * self.values, derivatives)

    def __mul__(self, factor: Scalar) -> "MatrixField":
        return self.scale(factor)

    __rmul__ = __mul__


@dataclass
class ConnectionField:
    """
    Coefficient triples of the connection, one per grid axis.

    ``coefficients[axis]`` has shape grid.shape + (3,) in (k, sigma, tau) slot
    order, so the connection matrix along every axis is
    ``from_coeffs(coefficients[axis])``. ``derivatives[axis][wrt]`` optionally
    holds the closed-form derivative of that triple along ``wrt``.
    """

    grid: Grid
    coefficients: Dict[str, np.ndarray]
    derivatives: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)
    representation: str = "so3"
    beta: int = 1
    scenario: str = ""
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if set(self.coefficients) != set(self.grid.axes):
            raise DomainError(
                f"Connection needs coefficients for axes {self.grid.axes}, "
                f"got {sorted(self.coefficients)}"
            )
        if self.representation not in REPRESENTATIONS:
            raise DomainError(f"Unknown representation {self.representation!r}")
        if self.beta not in (1, -1):
            raise DomainError(f"beta must be +1 or -1, got {self.beta!r}")
        if self.representation == "su2" and self.beta != 1:
            raise DomainError("The su(2) form is only defined for beta=+1")
        expected = self.grid.shape + (3,)
        for axis, c in self.coefficients.items():
            c = np.asarray(c, dtype=float)
            if c.shape != expected:
                raise DomainError(f"Coefficients along {axis} have shape {c.shape}, need {expected}")
            if not np.all(np.isfinite(c)):
                raise DomainError(f"Coefficients along {axis} contain non-finite samples")
            self.coefficients[axis] = c
        for axis, per_axis in self.derivatives.items():
            if axis not in self.coefficients:
                raise DomainError(f"Derivatives given for unknown axis {axis!r}")
            for wrt, d in per_axis.items():
                self.grid.axis_index(wrt)
                if np.shape(d) != expected:
                    raise DomainError(f"Derivative d{axis}/d{wrt} has shape {np.shape(d)}")

    @property
    def axes(self) -> Tuple[str, ...]:
        return self.grid.axes

    def named(self, name: str) -> np.ndarray:
        """Samples of a named coefficient such as ``k``, ``m2`` or ``w3``."""
        axis, slot = NAMED_COEFFICIENTS[canonical_coefficient(name)]
        if axis not in self.coefficients:
            raise DomainError(f"Coefficient {name!r} needs axis {axis!r}, not in this grid")
        return self.coefficients[axis][..., slot]

    def named_derivative(self, name: str, wrt: str, mode: str = "auto") -> np.ndarray:
        _check_derivative_mode(mode)
        axis, slot = NAMED_COEFFICIENTS[canonical_coefficient(name)]
        stored = self.derivatives.get(axis, {})
        if mode != "fd" and wrt in stored:
            return stored[wrt][..., slot]
        if mode == "analytic":
            raise DomainError(f"No closed-form derivative of {name!r} along {wrt!r}")
        return partial_derivative(self.named(name), self.grid, wrt)

    def matrix(
        self, axis: str, convention: SignConvention = DEFAULT_CONVENTION
    ) -> MatrixField:
        """Connection matrix field along ``axis`` in this field's representation."""
        build = lambda c: from_coeffs(  # noqa: E731
            c, self.representation, self.beta, convention.prefactor
        )
        derivatives = {wrt: build(d) for wrt, d in self.derivatives.get(axis, {}).items()}
        return MatrixField(self.grid, build(self.coefficients[axis]), derivatives)

    def matrices(self, convention: SignConvention = DEFAULT_CONVENTION) -> Dict[str, MatrixField]:
        return {axis: self.matrix(axis, convention) for axis in self.axes}

    def with_representation(self, representation: str, beta: Optional[int] = None) -> "ConnectionField":
        return replace(
            self,
            coefficients=dict(self.coefficients),
            derivatives={a: dict(d) for a, d in self.derivatives.items()},
            representation=representation,
            beta=self.beta if beta is None else beta,
        )

    def without_derivatives(self) -> "ConnectionField":
        return replace(self, coefficients=dict(self.coefficients), derivatives={})

    def scaled(self, factor: float) -> "ConnectionField":
        """The connection multiplied by a real factor (factor=-1 negates it)."""
        return replace(
            self,
            coefficients={a: factor * c for a, c in self.coefficients.items()},
            derivatives={
                a: {w: factor * d for w, d in per.items()} for a, per in self.derivatives.items()
            },
        )

    def plus(self, other: "ConnectionField") -> "ConnectionField":
        """Pointwise sum; closed-form derivatives kept where both have them."""
        if self.grid != other.grid:
            raise GridMismatchError("Connections live on different grids")
        derivatives: Dict[str, Dict[str, np.ndarray]] = {}
        for axis in self.axes:
            mine = self.derivatives.get(axis, {})
            theirs = other.derivatives.get(axis, {})
            derivatives[axis] = {w: mine[w] + theirs[w] for w in set(mine) & set(theirs)}
        return replace(
            self,
            coefficients={a: self.coefficients[a] + other.coefficients[a] for a in self.axes},
            derivatives=derivatives,
        )


def conjugate_connection(
    fields: Mapping[str, MatrixField], G: MatrixField
) -> Dict[str, MatrixField]:
    """
    Gauge transform A_i -> G A_i G^-1 + G_i G^-1 (the frame becomes G g).

    Closed-form derivatives are carried only when G is constant; otherwise the
    transformed fields fall back to finite differences.
    """
    inverse = np.linalg.inv(G.values)
    constant = all(
        axis in G.derivatives and not np.any(G.derivatives[axis]) for axis in G.grid.axes
    )
    out = {}
    for axis, A in fields.items():
        G.check_grid(A)
        values = G.values @ A.values @ inverse
        if not constant:
            values = values + G.derivative(axis) @ inverse
        derivatives = (
            {wrt: G.values @ d @ inverse for wrt, d in A.derivatives.items()} if constant else {}
        )
        out[axis] = MatrixField(A.grid, values, derivatives)
    return out
