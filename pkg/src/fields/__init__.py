"""
Grids, sampled fields and scenario generators.

- grid.py: Grid and second-order finite differences
- field.py: MatrixField and ConnectionField (with optional closed-form derivatives)
- scenarios.py: registered scenario generators and the scenario grammar
- export.py: CSV snapshots
"""

from src.fields.field import ConnectionField, MatrixField, conjugate_connection
from src.fields.grid import Grid, partial_derivative
from src.fields.scenarios import (
    ScenarioSample,
    make_pure_gauge,
    make_random_smooth,
    parse_scenario,
    sample_connection,
    sample_higgs,
    sample_scenario,
)

__all__ = [
    "ConnectionField",
    "MatrixField",
    "conjugate_connection",
    "Grid",
    "partial_derivative",
    "ScenarioSample",
    "make_pure_gauge",
    "make_random_smooth",
    "parse_scenario",
    "sample_connection",
    "sample_higgs",
    "sample_scenario",
]
