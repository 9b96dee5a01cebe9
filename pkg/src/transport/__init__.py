"""
Frame transport, plaquette holonomy and curve reconstruction.

- propagate.py: GridPath, RK4 edge transfers, plaquette defects, path independence
- curves.py: frames along a grid line, trapezoid curve reconstruction, CSV/OBJ export
"""

from src.transport.curves import (
    circle_radius_error,
    curve_family,
    export_family_csv,
    export_family_obj,
    fit_circle,
    frame_along_axis,
    reconstruct_curve,
)
from src.transport.propagate import (
    GridPath,
    TransportResult,
    edge_transfer,
    path_independence,
    plaquette_defect,
    plaquette_defects,
    plaquette_holonomy,
    propagate,
)

__all__ = [
    "circle_radius_error",
    "curve_family",
    "export_family_csv",
    "export_family_obj",
    "fit_circle",
    "frame_along_axis",
    "reconstruct_curve",
    "GridPath",
    "TransportResult",
    "edge_transfer",
    "path_independence",
    "plaquette_defect",
    "plaquette_defects",
    "plaquette_holonomy",
    "propagate",
]
