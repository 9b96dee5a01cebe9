"""
Residual reports and their JSON form.

A report holds, per label, the max and grid-weighted L2 norms of a residual
field over the whole grid and over the interior (boundary layer removed).
Matrix-valued samples are measured with the Frobenius norm, scalar samples
with their absolute value. Sums use math.fsum, so norms do not depend on
evaluation order.

The JSON document keeps a ``metadata`` block (timestamp, tool version)
apart from the payload; ``compare_reports`` ignores it.
"""

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from loguru import logger

from src import __version__
from src.algebra.conventions import SCHEMA_VERSION, SignConvention
from src.errors import ConfigError, DomainError
from src.fields.field import MatrixField
from src.fields.grid import Grid

ResidualLike = Union[MatrixField, np.ndarray]


@dataclass(frozen=True)
class NormSummary:
    max: float
    l2: float
    interior_max: float
    interior_l2: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "max": self.max,
            "l2": self.l2,
            "interiorMax": self.interior_max,
            "interiorL2": self.interior_l2,
        }


def pointwise_norm(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Frobenius norm per grid point for matrices, |value| for scalars."""
    values = np.asarray(values)
    if values.shape == grid.shape:
        return np.abs(values)
    if values.shape[: grid.dimension] != grid.shape or values.ndim != grid.dimension + 2:
        raise DomainError(f"Residual shape {values.shape} does not fit grid {grid.shape}")
    return np.linalg.norm(values, axis=(-2, -1))


def _l2(samples: np.ndarray, cell_volume: float) -> float:
    return math.sqrt(math.fsum((samples.ravel() ** 2).tolist()) * cell_volume)


def summarize(values: ResidualLike, grid: Grid) -> NormSummary:
    if isinstance(values, MatrixField):
        values = values.values
    n = pointwise_norm(values, grid)
    inner = n[grid.interior()]
    return NormSummary(
        max=float(np.max(n)),
        l2=_l2(n, grid.cell_volume),
        interior_max=float(np.max(inner)),
        interior_l2=_l2(inner, grid.cell_volume),
    )


@dataclass
class ResidualReport:
    """
    Norms per label plus everything needed to reproduce the run.

    In the JSON document the per-label metrics sit under one ``residuals``
    key, ``{label: {max, l2, interiorMax, interiorL2}}``, next to the run
    description (``kind``, ``scenario``, ``grid``, ...), the command
    ``values`` and the ``passed`` flag.
    """

    kind: str
    grid: Grid
    norms: Dict[str, NormSummary]
    scenario: str = ""
    seed: Optional[int] = None
    representation: str = "so3"
    beta: int = 1
    derivatives: str = "auto"
    convention: Optional[SignConvention] = None
    values: Dict[str, Any] = field(default_factory=dict)
    passed: Optional[bool] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def max_norm(self, interior: bool = False) -> float:
        if not self.norms:
            return 0.0
        return max(s.interior_max if interior else s.max for s in self.norms.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "kind": self.kind,
            "scenario": self.scenario,
            "seed": self.seed,
            "representation": self.representation,
            "beta": self.beta,
            "derivatives": self.derivatives,
            "grid": self.grid.to_dict(),
            "convention": self.convention.to_dict() if self.convention else None,
            "residuals": {label: s.to_dict() for label, s in sorted(self.norms.items())},
            "values": _jsonable(self.values),
            "passed": self.passed,
            "metadata": dict(self.metadata),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def make_report(
    residuals: Mapping[str, ResidualLike],
    grid: Grid,
    *,
    kind: str = "check",
    scenario: str = "",
    seed: Optional[int] = None,
    representation: str = "so3",
    beta: int = 1,
    derivatives: str = "auto",
    convention: Optional[SignConvention] = None,
    values: Optional[Dict[str, Any]] = None,
) -> ResidualReport:
    """Summarize every residual field; see ResidualReport for the document layout."""
    norms = {label: summarize(r, grid) for label, r in residuals.items()}
    return ResidualReport(
        kind=kind,
        grid=grid,
        norms=norms,
        scenario=scenario,
        seed=seed,
        representation=representation,
        beta=beta,
        derivatives=derivatives,
        convention=convention,
        values=dict(values or {}),
        metadata={
            "createdAt": datetime.now(timezone.utc).isoformat(),
            "toolVersion": __version__,
        },
    )


def report_json(report: Union[ResidualReport, Dict[str, Any]]) -> str:
    data = report.to_dict() if isinstance(report, ResidualReport) else report
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def save_report(report: Union[ResidualReport, Dict[str, Any]], path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report_json(report), encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot write report {path}: {e}") from e
    logger.info(f"Report written to {path}")
    return path


def load_report(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read report {path}: {e}") from e
    if not isinstance(data, dict) or data.get("schemaVersion") != SCHEMA_VERSION:
        raise ConfigError(f"{path} is not a schemaVersion {SCHEMA_VERSION} report")
    return data


def compare_reports(a: Dict[str, Any], b: Dict[str, Any], prefix: str = "") -> List[str]:
    """Paths at which two report documents differ, ignoring ``metadata``."""
    differences = []
    keys = sorted((set(a) | set(b)) - ({"metadata"} if not prefix else set()))
    for key in keys:
        where = f"{prefix}.{key}" if prefix else key
        if key not in a or key not in b:
            differences.append(where)
        elif isinstance(a[key], dict) and isinstance(b[key], dict):
            differences.extend(compare_reports(a[key], b[key], where))
        elif a[key] != b[key]:
            differences.append(where)
    return differences
