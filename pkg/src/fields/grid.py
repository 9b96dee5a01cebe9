"""
Uniform grids over (x, t) or (x, y, t) and second-order finite differences.
"""

from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple, Union

import numpy as np

from src.errors import DomainError

AXIS_NAMES: Dict[int, Tuple[str, ...]] = {2: ("x", "t"), 3: ("x", "y", "t")}
MIN_POINTS = 5
SCHEMES = ("central2",)


def _per_axis(value: Union[float, Sequence[float]], dimension: int, name: str) -> Tuple:
    if np.isscalar(value):
        return tuple([value] * dimension)
    values = tuple(value)  # type: ignore[arg-type]
    if len(values) != dimension:
        raise DomainError(f"{name} needs {dimension} entries, got {len(values)}")
    return values


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid; arrays on it use ``indexing='ij'`` in axis order."""

    dimension: int
    points: Tuple[int, ...]
    spacing: Tuple[float, ...]
    origin: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.dimension not in AXIS_NAMES:
            raise DomainError(f"Grid dimension must be 2 or 3, got {self.dimension}")
        for name in ("points", "spacing", "origin"):
            if len(getattr(self, name)) != self.dimension:
                raise DomainError(f"Grid {name} must have {self.dimension} entries")
        if any(int(n) < MIN_POINTS for n in self.points):
            raise DomainError(f"Every axis needs at least {MIN_POINTS} points: {self.points}")
        if any(not np.isfinite(h) or h <= 0 for h in self.spacing):
            raise DomainError(f"Grid spacing must be finite and positive: {self.spacing}")
        if any(not np.isfinite(o) for o in self.origin):
            raise DomainError(f"Grid origin must be finite: {self.origin}")

    @classmethod
    def uniform(
        cls,
        dimension: int,
        points: Union[int, Sequence[int]],
        spacing: Union[float, Sequence[float]],
        origin: Union[float, Sequence[float]] = 0.0,
    ) -> "Grid":
        return cls(
            dimension=dimension,
            points=tuple(int(n) for n in _per_axis(points, dimension, "points")),
            spacing=tuple(float(h) for h in _per_axis(spacing, dimension, "spacing")),
            origin=tuple(float(o) for o in _per_axis(origin, dimension, "origin")),
        )

    @property
    def axes(self) -> Tuple[str, ...]:
        return AXIS_NAMES[self.dimension]

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        """Sample volume: number of points times cell volume."""
        return self.size * self.cell_volume

    def axis_index(self, axis: str) -> int:
        try:
            return self.axes.index(axis)
        except ValueError:
            raise DomainError(f"Axis {axis!r} not in grid axes {self.axes}") from None

    def step(self, axis: str) -> float:
        return self.spacing[self.axis_index(axis)]

    def coordinates(self, axis: str) -> np.ndarray:
        i = self.axis_index(axis)
        return self.origin[i] + self.spacing[i] * np.arange(self.points[i])

    def mesh(self) -> Dict[str, np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        arrays = np.meshgrid(*(self.coordinates(a) for a in self.axes), indexing="ij", sparse=True)
        return dict(zip(self.axes, arrays))

    def point(self, index: Sequence[int]) -> Tuple[float, ...]:
        return tuple(o + h * i for o, h, i in zip(self.origin, self.spacing, index))

    def contains(self, index: Sequence[int]) -> bool:
        return len(index) == self.dimension and all(
            0 <= i < n for i, n in zip(index, self.points)
        )

    def interior(self) -> Tuple[slice, ...]:
        """Index excluding the one-point boundary layer on every axis."""
        return tuple(slice(1, n - 1) for n in self.points)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "axes": list(self.axes),
            "points": list(self.points),
            "spacing": list(self.spacing),
            "origin": list(self.origin),
        }


def partial_derivative(
    values: np.ndarray, grid: Grid, axis: str, scheme: str = "central2"
) -> np.ndarray:
    """
    Second-order derivative along ``axis`` of an array sampled on ``grid``.

    Central differences in the interior, second-order one-sided stencils on
    the boundary; both are exact on quadratics. Trailing axes (matrix or
    triple components) are carried through untouched.
    """
    if scheme not in SCHEMES:
        raise DomainError(f"Unknown difference scheme {scheme!r}; choose from {SCHEMES}")
    i = grid.axis_index(axis)
    values = np.asarray(values)
    if values.shape[: grid.dimension] != grid.shape:
        raise DomainError(f"Array shape {values.shape} does not start with grid shape {grid.shape}")
    return np.gradient(values, grid.spacing[i], axis=i, edge_order=2)
