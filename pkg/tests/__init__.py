"""
Test suite for the GCME toolkit.

Sub-directories follow the package layout (algebra, fields, curvature, lax,
embeddings, transport, cli); integration/ drives the command line and the
acceptance properties. Shared fixtures live in conftest.py.
"""
