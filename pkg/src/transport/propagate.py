"""
Frame transport along grid paths.

Along an edge of length h the frame obeys g' = M(s) g, with M linearly
interpolated between the connection samples at the two edge ends (negated
when the edge is walked backwards). Each edge is integrated from the
identity with classical RK4; a path's transport is the product of its edge
transfers, so g(end) = T g(start).

All edge routines are vectorised over leading axes, which lets plaquette
holonomies be computed for every corner of a plane at once.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention
from src.algebra.lie import group_drift, norm, project_to_group
from src.errors import DomainError, PathError
from src.fields.field import ConnectionField, MatrixField
from src.fields.grid import Grid

Step = Tuple[str, int]
ConnectionLike = Union[ConnectionField, Mapping[str, MatrixField]]

DEFAULT_SUBSTEPS = 4
_STEP_PATTERN = {"+": 1, "-": -1}


@dataclass(frozen=True)
class GridPath:
    """A start index and a sequence of unit steps (axis, +1 or -1)."""

    start: Tuple[int, ...]
    steps: Tuple[Step, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for axis, direction in self.steps:
            if direction not in (1, -1):
                raise PathError(f"Step along {axis} must be +1 or -1, got {direction!r}")

    @classmethod
    def parse(cls, start: Sequence[int], text: str) -> "GridPath":
        """``"x+,y+,x-"`` style step lists; ``"x+3"`` repeats a step."""
        steps: List[Step] = []
        for token in (t.strip() for t in text.split(",") if t.strip()):
            axis, sign, count = token[0], token[1:2], token[2:] or "1"
            if sign not in _STEP_PATTERN or not count.isdigit():
                raise PathError(f"Cannot parse path step {token!r}")
            steps.extend([(axis, _STEP_PATTERN[sign])] * int(count))
        return cls(tuple(int(i) for i in start), tuple(steps))

    @classmethod
    def straight(cls, start: Sequence[int], axis: str, count: int, direction: int = 1) -> "GridPath":
        return cls(tuple(start), tuple([(axis, direction)] * count))

    def then(self, other: "GridPath") -> "GridPath":
        return GridPath(self.start, self.steps + other.steps)

    def points(self, grid: Grid) -> Iterator[Tuple[int, ...]]:
        index = list(self.start)
        yield tuple(index)
        for axis, direction in self.steps:
            index[grid.axis_index(axis)] += direction
            yield tuple(index)

    def end(self, grid: Grid) -> Tuple[int, ...]:
        *_, last = self.points(grid)
        return last

    def validate(self, grid: Grid) -> None:
        for point in self.points(grid):
            if not grid.contains(point):
                raise PathError(f"Path leaves the grid at index {point}")


@dataclass
class TransportResult:
    end: np.ndarray
    drift: float
    steps: int


def _matrices(connection: ConnectionLike, convention: SignConvention) -> Dict[str, MatrixField]:
    if isinstance(connection, ConnectionField):
        if connection.beta != 1:
            raise DomainError("Frame transport needs beta=+1")
        return connection.matrices(convention)
    return dict(connection)


def edge_transfer(M0: np.ndarray, M1: np.ndarray, h: float, substeps: int) -> np.ndarray:
    """
    Transfer matrix of g' = M(s) g over [0, h] with M(s) = M0 + (M1 - M0) s / h,
    starting from the identity. Classical RK4 with ``substeps`` equal steps.
    """
    if substeps < 1:
        raise DomainError(f"substeps must be >= 1, got {substeps}")
    M0 = np.asarray(M0)
    M1 = np.asarray(M1)
    n = M0.shape[-1]
    dtype = np.result_type(M0, M1, float)
    T = np.broadcast_to(np.eye(n, dtype=dtype), M0.shape).copy()
    dt = h / substeps
    M = lambda s: M0 + (M1 - M0) * (s / h)  # noqa: E731
    for i in range(substeps):
        s = i * dt
        Ma, Mm, Mb = M(s), M(s + 0.5 * dt), M(s + dt)
        k1 = Ma @ T
        k2 = Mm @ (T + 0.5 * dt * k1)
        k3 = Mm @ (T + 0.5 * dt * k2)
        k4 = Mb @ (T + dt * k3)
        T = T + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return T


def _edge(
    mats: Mapping[str, MatrixField],
    grid: Grid,
    point: Tuple[int, ...],
    axis: str,
    direction: int,
    substeps: int,
    reproject: bool,
) -> np.ndarray:
    i = grid.axis_index(axis)
    target = list(point)
    target[i] += direction
    values = mats[axis].values
    M0 = direction * values[tuple(point)]
    M1 = direction * values[tuple(target)]
    T = edge_transfer(M0, M1, grid.spacing[i], substeps)
    return project_to_group(T) if reproject else T


def propagate(
    connection: ConnectionLike,
    path: GridPath,
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> TransportResult:
    """Transport along ``path``; ``end`` maps the frame at the start to the frame at the end."""
    mats = _matrices(connection, convention)
    grid = next(iter(mats.values())).grid
    path.validate(grid)
    n = next(iter(mats.values())).matrix_size
    first = next(iter(mats.values())).values
    end = np.eye(n, dtype=np.result_type(first, float))
    point = tuple(path.start)
    for axis, direction in path.steps:
        T = _edge(mats, grid, point, axis, direction, substeps, reproject)
        end = T @ end
        moved = list(point)
        moved[grid.axis_index(axis)] += direction
        point = tuple(moved)
    drift = float(group_drift(end))
    return TransportResult(end=end, drift=drift, steps=len(path.steps))


def path_independence(
    connection: ConnectionLike,
    first: GridPath,
    second: GridPath,
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> float:
    """norm(T_first - T_second) for two paths with the same endpoints."""
    mats = _matrices(connection, convention)
    grid = next(iter(mats.values())).grid
    if tuple(first.start) != tuple(second.start) or first.end(grid) != second.end(grid):
        raise PathError(
            f"Paths do not share endpoints: {first.start}->{first.end(grid)} vs "
            f"{second.start}->{second.end(grid)}"
        )
    a = propagate(mats, first, substeps, reproject=reproject)
    b = propagate(mats, second, substeps, reproject=reproject)
    return float(norm(a.end - b.end))


def _plane_axes(grid: Grid, plane: Sequence[str]) -> Tuple[str, str]:
    if len(plane) != 2 or plane[0] == plane[1]:
        raise DomainError(f"A plane needs two different axes, got {plane!r}")
    a, b = sorted(plane, key=grid.axis_index)
    return a, b


def plaquette_holonomy(
    connection: ConnectionLike,
    plane: Sequence[str],
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> np.ndarray:
    """
    Holonomy of every elementary plaquette in ``plane``, walked
    +a, +b, -a, -b from its lower corner. Shape: grid shape with both plane
    axes shortened by one, plus the matrix axes.
    """
    mats = _matrices(connection, convention)
    grid = next(iter(mats.values())).grid
    a, b = _plane_axes(grid, plane)
    ia, ib = grid.axis_index(a), grid.axis_index(b)
    Ma, Mb = mats[a].values, mats[b].values

    def corners(M: np.ndarray, da: int, db: int) -> np.ndarray:
        # M at corner + da e_a + db e_b, for all lower corners
        na, nb = grid.points[ia], grid.points[ib]
        index = [slice(None)] * grid.dimension
        index[ia] = slice(da, na - 1 + da)
        index[ib] = slice(db, nb - 1 + db)
        return M[tuple(index)]

    ha, hb = grid.spacing[ia], grid.spacing[ib]
    edges = [
        edge_transfer(corners(Ma, 0, 0), corners(Ma, 1, 0), ha, substeps),
        edge_transfer(corners(Mb, 1, 0), corners(Mb, 1, 1), hb, substeps),
        edge_transfer(-corners(Ma, 1, 1), -corners(Ma, 0, 1), ha, substeps),
        edge_transfer(-corners(Mb, 0, 1), -corners(Mb, 0, 0), hb, substeps),
    ]
    if reproject:
        edges = [project_to_group(T) for T in edges]
    T1, T2, T3, T4 = edges
    return T4 @ T3 @ T2 @ T1


def plaquette_defects(
    connection: ConnectionLike,
    plane: Sequence[str],
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> np.ndarray:
    """norm(H - I) for every plaquette in ``plane``."""
    H = plaquette_holonomy(connection, plane, substeps, reproject=reproject, convention=convention)
    defects = norm(H - np.eye(H.shape[-1]))
    logger.debug(f"Plaquette defects in plane {tuple(plane)}: max {np.max(defects):.3e}")
    return np.asarray(defects)


def plaquette_defect(
    connection: ConnectionLike,
    corner: Sequence[int],
    plane: Sequence[str],
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> float:
    """Defect of the single plaquette whose lower corner is ``corner``."""
    mats = _matrices(connection, convention)
    grid = next(iter(mats.values())).grid
    a, b = _plane_axes(grid, plane)
    path = GridPath(tuple(corner), ((a, 1), (b, 1), (a, -1), (b, -1)))
    try:
        path.validate(grid)
    except PathError as e:
        raise PathError(f"Plaquette at {tuple(corner)} in plane {a}{b} does not fit: {e}") from e
    H = propagate(mats, path, substeps, reproject=reproject).end
    return float(norm(H - np.eye(H.shape[-1])))
