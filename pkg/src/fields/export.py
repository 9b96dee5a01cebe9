"""
CSV snapshots of grids and fields.

One row per grid point in C order (last axis fastest). Columns are the
grid coordinates followed by the values:

- connection fields: ``x,[y,]t,k,sigma,tau,m3,m2,m1,w3,w2,w1`` (2D drops
  the ``m`` columns)
- matrix fields: ``x,[y,]t,re_00,im_00,re_01,im_01,...`` row-major
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from loguru import logger

from src.errors import ConfigError
from src.fields.field import NAMED_COEFFICIENTS, ConnectionField, MatrixField
from src.fields.grid import Grid

# full-precision round trip
FLOAT_FORMAT = "%.17g"


def grid_frame(grid: Grid) -> pd.DataFrame:
    mesh = np.meshgrid(*(grid.coordinates(a) for a in grid.axes), indexing="ij")
    return pd.DataFrame({axis: m.ravel() for axis, m in zip(grid.axes, mesh)})


def connection_frame(connection: ConnectionField) -> pd.DataFrame:
    df = grid_frame(connection.grid)
    for name, (axis, _) in NAMED_COEFFICIENTS.items():
        if axis in connection.axes:
            df[name] = connection.named(name).ravel()
    return df


def matrix_frame(field: MatrixField) -> pd.DataFrame:
    df = grid_frame(field.grid)
    n = field.matrix_size
    flat = field.values.reshape(-1, n, n)
    for i in range(n):
        for j in range(n):
            df[f"re_{i}{j}"] = np.real(flat[:, i, j])
            df[f"im_{i}{j}"] = np.imag(flat[:, i, j])
    return df


def write_csv(df: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(df)} rows to {path}")
    return path


def export_connection(connection: ConnectionField, path: Union[str, Path]) -> Path:
    return write_csv(connection_frame(connection), path)


def export_matrix_field(field: MatrixField, path: Union[str, Path]) -> Path:
    return write_csv(matrix_frame(field), path)


def read_connection(path: Union[str, Path], grid: Grid, representation: str = "so3") -> ConnectionField:
    """Load a connection snapshot written by ``export_connection``."""
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError) as e:
        raise ConfigError(f"Cannot read connection snapshot {path}: {e}") from e
    if len(df) != grid.size:
        raise ConfigError(f"Snapshot {path} has {len(df)} rows, grid needs {grid.size}")
    coefficients = {a: np.zeros(grid.shape + (3,)) for a in grid.axes}
    for name, (axis, slot) in NAMED_COEFFICIENTS.items():
        if axis not in grid.axes:
            continue
        if name not in df.columns:
            raise ConfigError(f"Snapshot {path} lacks column {name!r}")
        coefficients[axis][..., slot] = df[name].to_numpy().reshape(grid.shape)
    return ConnectionField(grid=grid, coefficients=coefficients, representation=representation)
