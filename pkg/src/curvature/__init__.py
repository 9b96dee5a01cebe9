"""
Zero-curvature residuals and residual reports.

- residuals.py: componentwise and matrix residuals, su(2)/so(3) equivalence
- reports.py: ResidualReport, JSON persistence and comparison
"""

from src.curvature.reports import (
    NormSummary,
    ResidualReport,
    compare_reports,
    load_report,
    make_report,
    save_report,
)
from src.curvature.residuals import (
    EquivalenceResult,
    connection_residuals,
    equivalence_su2_so3,
    max_difference,
    residual_1p1_component,
    residual_1p1_matrix,
    residual_2p1,
    zero_curvature,
)

__all__ = [
    "NormSummary",
    "ResidualReport",
    "compare_reports",
    "load_report",
    "make_report",
    "save_report",
    "EquivalenceResult",
    "connection_residuals",
    "equivalence_su2_so3",
    "residual_1p1_component",
    "residual_1p1_matrix",
    "residual_2p1",
    "zero_curvature",
    "max_difference",
]
