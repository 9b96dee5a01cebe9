"""
Curves from transported frames.

The rows of a 3x3 frame are (e1, e2, e3). Transporting the frame along x at
a fixed time gives e1(x); the curve follows from r_x = sqrt(E) e1, summed
with the trapezoid rule. One curve per time slice makes a curve family.
"""

from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from src.algebra.conventions import DEFAULT_CONVENTION, SignConvention
from src.algebra.lie import project_to_group
from src.errors import ConfigError, DomainError
from src.fields.field import ConnectionField
from src.transport.propagate import DEFAULT_SUBSTEPS, edge_transfer

SqrtE = Union[float, np.ndarray]


def frame_along_axis(
    connection: ConnectionField,
    axis: str = "x",
    fixed: Optional[Dict[str, int]] = None,
    g0: Optional[np.ndarray] = None,
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> np.ndarray:
    """
    Frames at every point of a grid line, shape (N, n, n).

    ``fixed`` gives the indices of the other axes (default 0); ``g0`` is the
    frame at the first point (default identity).
    """
    if connection.beta != 1:
        raise DomainError("Frame transport needs beta=+1")
    grid = connection.grid
    fixed = dict(fixed or {})
    index = []
    for a in grid.axes:
        if a == axis:
            index.append(slice(None))
        else:
            i = int(fixed.pop(a, 0))
            if not 0 <= i < grid.points[grid.axis_index(a)]:
                raise DomainError(f"Index {i} along {a} is outside the grid")
            index.append(i)
    if fixed:
        raise DomainError(f"Unknown fixed axes {sorted(fixed)}")
    line = connection.matrix(axis, convention).values[tuple(index)]
    n = line.shape[-1]
    h = grid.step(axis)
    transfers = edge_transfer(line[:-1], line[1:], h, substeps)
    if reproject:
        transfers = project_to_group(transfers)
    frames = np.empty((line.shape[0], n, n), dtype=np.result_type(line, float))
    frames[0] = np.eye(n) if g0 is None else np.asarray(g0)
    for i, T in enumerate(transfers):
        frames[i + 1] = T @ frames[i]
    return frames


def reconstruct_curve(
    e1: np.ndarray, h: float, sqrt_e: SqrtE = 1.0, r0: Optional[Sequence[float]] = None
) -> np.ndarray:
    """r(x) = r0 + integral of sqrt(E) e1 dx, trapezoid rule. Returns (N, 3)."""
    e1 = np.real_if_close(np.asarray(e1))
    if e1.ndim != 2 or e1.shape[1] != 3:
        raise DomainError(f"e1 must have shape (N, 3), got {e1.shape}")
    weights = np.broadcast_to(np.asarray(sqrt_e, dtype=float), (e1.shape[0],))
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise DomainError("sqrt(E) must be finite and positive")
    tangent = weights[:, None] * e1
    steps = 0.5 * h * (tangent[1:] + tangent[:-1])
    start = np.zeros(3) if r0 is None else np.asarray(r0, dtype=float)
    return np.vstack([start, start + np.cumsum(steps, axis=0)])


def arc_length(points: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def fit_circle(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Least-squares circle through planar 3D points: centre and radius.

    The points are projected on their best-fit plane and fitted with the
    algebraic (Kasa) fit x^2 + y^2 = 2ax + 2by + c.
    """
    points = np.asarray(points, dtype=float)
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    u, v = vt[0], vt[1]
    local = np.stack([(points - centroid) @ u, (points - centroid) @ v], axis=1)
    design = np.column_stack([2 * local, np.ones(len(local))])
    target = np.sum(local**2, axis=1)
    (a, b, c), *_ = np.linalg.lstsq(design, target, rcond=None)
    radius = float(np.sqrt(c + a * a + b * b))
    return centroid + a * u + b * v, radius


def circle_radius_error(points: np.ndarray, expected: float) -> float:
    """Relative error of the fitted circle radius against ``expected``."""
    if not np.isfinite(expected) or expected <= 0:
        raise DomainError(f"expected radius must be finite and positive, got {expected}")
    _, radius = fit_circle(points)
    return abs(radius - expected) / expected


def curve_family(
    connection: ConnectionField,
    sqrt_e: SqrtE = 1.0,
    fixed: Optional[Dict[str, int]] = None,
    substeps: int = DEFAULT_SUBSTEPS,
    *,
    reproject: bool = True,
    convention: SignConvention = DEFAULT_CONVENTION,
) -> Dict[int, np.ndarray]:
    """One curve along x for every t index (other axes fixed by ``fixed``)."""
    if connection.representation != "so3":
        raise DomainError("Curve reconstruction needs 3x3 frames (so3 representation)")
    grid = connection.grid
    h = grid.step("x")
    fixed = dict(fixed or {})
    fixed.pop("t", None)
    family = {}
    for it in range(grid.points[grid.axis_index("t")]):
        frames = frame_along_axis(
            connection,
            "x",
            {**fixed, "t": it},
            substeps=substeps,
            reproject=reproject,
            convention=convention,
        )
        family[it] = reconstruct_curve(frames[:, 0, :], h, sqrt_e)
    logger.debug(f"Reconstructed {len(family)} curves of {grid.points[0]} points")
    return family


def family_frame(family: Dict[int, np.ndarray]) -> pd.DataFrame:
    rows = []
    for it, points in sorted(family.items()):
        for ix, (r1, r2, r3) in enumerate(points):
            rows.append({"t_slice": it, "x_index": ix, "r1": r1, "r2": r2, "r3": r3})
    return pd.DataFrame(rows, columns=["t_slice", "x_index", "r1", "r2", "r3"])


def export_family_csv(family: Dict[int, np.ndarray], path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        family_frame(family).to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e
    logger.info(f"Curve family written to {path}")
    return path


def export_family_obj(family: Dict[int, np.ndarray], path: Union[str, Path]) -> Path:
    """Polyline OBJ: all vertices, then one ``l`` element per curve (1-based indices)."""
    path = Path(path)
    lines = ["# curve family: one polyline per time slice"]
    offset = 1
    elements = []
    for it, points in sorted(family.items()):
        lines.extend(f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in points)
        elements.append("l " + " ".join(str(offset + i) for i in range(len(points))))
        offset += len(points)
    lines.extend(elements)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e
    logger.info(f"Curve family written to {path}")
    return path
