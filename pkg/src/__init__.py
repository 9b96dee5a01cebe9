"""
GCME toolkit.

Sub-packages:
- algebra: exact small-matrix Lie algebra and sign conventions
- fields: grids, sampled fields, derivatives and scenario generators
- curvature: zero-curvature residuals and residual reports
- lax: dressed and pencil Lax representations, convention calibration
- embeddings: YMHB and SDYM reductions
- transport: frame transport, plaquette holonomy and curve reconstruction
- cli: batch front-end
"""

__version__ = "0.1.0"
