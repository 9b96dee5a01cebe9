"""
Tests for the self-dual Yang-Mills reduction identities.
"""

import numpy as np
import pytest

from src.algebra.conventions import SignConvention
from src.embeddings.sdym import (
    IDENTITY_LABELS,
    IdentityReport,
    sdym_curvature,
    sdym_identities,
    sdym_potentials,
    sdym_reduction_check,
)
from src.errors import DomainError, IdentityViolation
from src.fields.field import MatrixField

CONJUGATE = SignConvention(sdym_map="conjugate")


class TestPotentials:
    """Test cases for sdym_potentials and sdym_curvature."""

    def test_potential_layout(self, random3_matrices):
        """Test A_beta = A - iB and A_alpha = -iC."""
        A, B, C = random3_matrices
        p = sdym_potentials(A, B, C)
        np.testing.assert_allclose(p.potentials["beta"].values, A.values - 1j * B.values)
        np.testing.assert_allclose(p.potentials["alpha"].values, -1j * C.values)

    def test_antisymmetry(self, random3_matrices):
        """Test F_{mu nu} = -F_{nu mu}."""
        p = sdym_potentials(*random3_matrices)
        forward = sdym_curvature(p, "beta", "alphabar")
        backward = sdym_curvature(p, "alphabar", "beta")
        np.testing.assert_allclose(forward.values, -backward.values, atol=1e-13)

    @pytest.mark.parametrize("indices", [("beta", "beta"), ("alpha", "gamma")])
    def test_bad_indices(self, random3_matrices, indices):
        """Test repeated and unknown indices."""
        p = sdym_potentials(*random3_matrices)
        with pytest.raises(DomainError):
            sdym_curvature(p, *indices)

    def test_needs_3d(self, grid2):
        """Test that 1+1 fields are refused."""
        zero = MatrixField.zeros(grid2, 3)
        with pytest.raises(DomainError):
            sdym_potentials(zero, zero, zero)


class TestIdentities:
    """Test cases for sdym_identities and sdym_reduction_check."""

    def test_standard_map_on_random_field(self, random3_matrices):
        """Test that the identities hold for a non-flat connection."""
        report = sdym_reduction_check(*random3_matrices)
        assert report.passed
        assert set(report.deviations) == set(IDENTITY_LABELS)
        assert max(report.deviations.values()) <= 1e-10

    def test_flat_field_is_self_dual(self, pure_gauge3):
        """Test that the self-duality combinations vanish on a flat connection."""
        mats = pure_gauge3.connection.matrices()
        report = sdym_identities(mats["x"], mats["y"], mats["t"])
        for label in IDENTITY_LABELS:
            assert np.max(np.abs(report.combinations[label].values)) <= 1e-12

    def test_conjugate_map_fails_on_curved_field(self, random3_matrices):
        """Test that swapping the light-cone derivatives breaks the identities."""
        with pytest.raises(IdentityViolation) as excinfo:
            sdym_reduction_check(*random3_matrices, convention=CONJUGATE)
        assert excinfo.value.label in IDENTITY_LABELS
        assert excinfo.value.deviation > excinfo.value.tolerance

    def test_report_worst(self, grid3):
        """Test that worst names the largest deviation."""
        zero = MatrixField.zeros(grid3, 3)
        report = IdentityReport({}, {}, {"F_ab": 0.1, "F_abar_bbar": 0.5, "F_trace": 0.2}, 1e-10)
        assert report.worst() == "F_abar_bbar"
        assert not report.passed
        assert sdym_identities(zero, zero, zero).passed
