"""
Tests for the 1+1 and 2+1 zero-curvature residuals.
"""

import numpy as np
import pytest

from src.algebra.conventions import SignConvention
from src.algebra.lie import coeffs_from_so3, commutator, norm, so3_basis
from src.curvature.residuals import (
    PAIRS_2P1,
    PLANE_LABELS,
    connection_residuals,
    equivalence_su2_so3,
    max_difference,
    residual_1p1_component,
    residual_1p1_matrix,
    residual_2p1,
    zero_curvature,
)
from src.errors import DomainError
from src.fields.field import MatrixField
from src.fields.grid import Grid
from src.fields.scenarios import sample_connection


class TestOnePlusOne:
    """Test cases for the 1+1 residuals."""

    def test_constant_bracket_term(self, grid2):
        """Test r1 = sigma w1 for constant sigma and w1."""
        connection = sample_connection("constants(sigma=2, w1=3)", grid2)
        residuals = residual_1p1_component(connection)
        np.testing.assert_allclose(residuals["r1"], 6.0)
        np.testing.assert_allclose(residuals["r2"], 0.0)
        np.testing.assert_allclose(residuals["r3"], 0.0)

    def test_components_match_matrix(self, grid2):
        """Test that the scalar residuals are exactly the coefficients of the matrix residual."""
        connection = sample_connection("random_smooth(seed=9)", grid2)
        matrix = connection_residuals(connection, derivatives="analytic")["R"]
        scalars = residual_1p1_component(connection, derivatives="analytic")
        coeffs = coeffs_from_so3(matrix.values)
        np.testing.assert_array_equal(coeffs[..., 0], scalars["r1"])
        np.testing.assert_array_equal(coeffs[..., 1], scalars["r3"])
        np.testing.assert_array_equal(coeffs[..., 2], scalars["r2"])

    def test_components_follow_scalar_formulas(self, grid2):
        """Test r1..r3 against the written-out scalar equations."""
        connection = sample_connection("random_smooth(seed=9)", grid2)
        scalars = residual_1p1_component(connection, derivatives="analytic")
        c = connection.named
        d = lambda name, wrt: connection.named_derivative(name, wrt, "analytic")  # noqa: E731
        k, sigma, tau, w1, w2, w3 = (c(n) for n in ("k", "sigma", "tau", "w1", "w2", "w3"))
        np.testing.assert_allclose(scalars["r1"], d("k", "t") - d("w3", "x") - tau * w2 + sigma * w1, atol=1e-12)
        np.testing.assert_allclose(scalars["r2"], d("tau", "t") - d("w1", "x") + k * w2 - sigma * w3, atol=1e-12)
        np.testing.assert_allclose(scalars["r3"], d("sigma", "t") - d("w2", "x") - k * w1 + tau * w3, atol=1e-12)

    def test_beta_enters_only_r2(self, grid2):
        """Test that flipping beta changes r2 alone."""
        connection = sample_connection("constants(k=1, w2=2, sigma=0.5)", grid2)
        plus = residual_1p1_component(connection, beta=1)
        minus = residual_1p1_component(connection, beta=-1)
        np.testing.assert_allclose(plus["r2"], 2.0)
        np.testing.assert_allclose(minus["r2"], -2.0)
        np.testing.assert_array_equal(plus["r1"], minus["r1"])
        np.testing.assert_array_equal(plus["r3"], minus["r3"])

    def test_finite_difference_order(self):
        """Test second-order convergence of the interior finite-difference residual."""
        spec = "analytic(k=sin(x)*cos(t), sigma=x*t, tau=cos(x+t), w3=exp(-x)*t, w2=sin(t), w1=x^2)"
        errors = []
        for n in (16, 32, 64):
            grid = Grid.uniform(2, n + 1, 1.0 / n)
            connection = sample_connection(spec, grid)
            fd = residual_1p1_component(connection, derivatives="fd")
            exact = residual_1p1_component(connection, derivatives="analytic")
            inner = grid.interior()
            errors.append(max(float(np.max(np.abs(fd[r] - exact[r])[inner])) for r in fd))
        orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
        assert np.all(np.abs(orders - 2.0) <= 0.2)

    def test_needs_2d(self, grid3, random3):
        """Test that 3D connections are refused."""
        with pytest.raises(DomainError):
            residual_1p1_component(random3)
        A = MatrixField.zeros(grid3, 3)
        with pytest.raises(DomainError):
            residual_1p1_matrix(A, A)

    def test_bad_beta(self, grid2):
        """Test that beta outside {+1, -1} is rejected."""
        with pytest.raises(DomainError):
            residual_1p1_component(sample_connection("zero", grid2), beta=0)


class TestTwoPlusOne:
    """Test cases for the 2+1 residuals."""

    def test_constant_generators(self, grid3):
        """Test R_a = [F1, F2] = F3 for constant A=F1, B=F2, C=0."""
        F1, F2, F3 = so3_basis()
        A = MatrixField.constant(grid3, F1)
        B = MatrixField.constant(grid3, F2)
        C = MatrixField.zeros(grid3, 3)
        residuals = residual_2p1(A, B, C)
        np.testing.assert_allclose(residuals["R_a"].values, np.broadcast_to(F3, grid3.shape + (3, 3)))
        assert not np.any(residuals["R_b"].values)
        flipped = residual_2p1(A, B, C, bracket_sign=-1)
        np.testing.assert_allclose(flipped["R_a"].values[0, 0, 0], -F3)

    def test_labels_cover_planes(self):
        """Test the plane to label table."""
        assert sorted(PLANE_LABELS.values()) == ["R_a", "R_b", "R_c"]

    def test_pure_gauge_flat_to_round_off(self):
        """Test the flat-field floor on a 32^3 grid with closed-form derivatives."""
        grid = Grid.uniform(3, 32, 1.0 / 31)
        connection = sample_connection("pure_gauge", grid)
        residuals = connection_residuals(connection, derivatives="analytic")
        worst = max(np.max(np.abs(r.values[grid.interior()])) for r in residuals.values())
        assert worst <= 1e-12

    @pytest.mark.parametrize("s", [0.5, -1.5, 3.0])
    def test_scaling_splits_derivative_and_bracket_terms(self, random3, s):
        """Test R(sA) = s (derivative terms) + s^2 (bracket terms)."""
        mats = random3.matrices()
        R = residual_2p1(mats["x"], mats["y"], mats["t"])
        scaled = random3.scaled(s).matrices()
        R_s = residual_2p1(scaled["x"], scaled["y"], scaled["t"])
        for label, a, b in PAIRS_2P1:
            bracket = commutator(mats[a].values, mats[b].values)
            expected = s * (R[label].values - bracket) + s**2 * bracket
            np.testing.assert_allclose(R_s[label].values, expected, rtol=1e-12, atol=1e-12)

    def test_bad_bracket_sign(self, random3_matrices):
        """Test that bracket signs other than +1 and -1 are rejected."""
        A, B, C = random3_matrices
        with pytest.raises(DomainError):
            residual_2p1(A, B, C, bracket_sign=0)

    def test_needs_3d(self, grid2):
        """Test that 2D fields are refused."""
        A = MatrixField.zeros(grid2, 3)
        with pytest.raises(DomainError):
            residual_2p1(A, A, A)

    def test_zero_curvature_axis_order(self, grid3):
        """Test that swapping the pair negates the residual."""
        x = np.broadcast_to(grid3.mesh()["x"], grid3.shape)
        values = np.zeros(grid3.shape + (3, 3))
        values[..., 0, 1] = x
        first = MatrixField.zeros(grid3, 3)
        second = MatrixField(grid3, values)
        forward = zero_curvature(first, second, "x", "y")
        backward = zero_curvature(second, first, "y", "x")
        np.testing.assert_allclose(forward.values, -backward.values)
        np.testing.assert_allclose(forward.values[..., 0, 1], -1.0)


class TestEquivalence:
    """Test cases for the su(2)/so(3) comparison."""

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_i_over_2_agrees(self, seed):
        """Test that i/2 makes the two representations agree on random fields."""
        grid = Grid.uniform(3, 16, 1.0 / 15)
        connection = sample_connection(f"random_smooth(seed={seed})", grid)
        assert equivalence_su2_so3(connection).deviation <= 1e-10

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_one_over_2i_disagrees(self, seed):
        """Test that 1/(2i) reverses the bracket and breaks agreement."""
        grid = Grid.uniform(3, 16, 1.0 / 15)
        connection = sample_connection(f"random_smooth(seed={seed})", grid)
        result = equivalence_su2_so3(connection, SignConvention(su2_prefactor="1/(2i)"))
        assert result.deviation >= 1e-2

    def test_one_over_2i_deviation_is_twice_the_bracket(self):
        """Test that the reversed bracket shows up as exactly 2 max |[A_i, A_j]|."""
        grid = Grid.uniform(3, 16, 1.0 / 15)
        connection = sample_connection("random_smooth(seed=1)", grid)
        mats = connection.matrices()
        bracket = max(
            float(np.max(norm(commutator(mats[a].values, mats[b].values)))) for _, a, b in PAIRS_2P1
        )
        result = equivalence_su2_so3(connection, SignConvention(su2_prefactor="1/(2i)"))
        assert result.deviation == pytest.approx(2.0 * bracket, rel=1e-10)

    def test_2d(self, grid2):
        """Test the comparison on an (x, t) grid."""
        connection = sample_connection("random_smooth(seed=4)", grid2)
        result = equivalence_su2_so3(connection)
        assert set(result.mapped) == {"R"}
        assert result.deviation <= 1e-10

    def test_needs_positive_beta(self, grid2):
        """Test that beta=-1 connections are refused."""
        connection = sample_connection("zero", grid2, beta=-1)
        with pytest.raises(DomainError):
            equivalence_su2_so3(connection)


class TestMaxDifference:
    """Test cases for max_difference."""

    def test_shared_labels(self, grid3):
        """Test that only shared labels are compared."""
        one = {"R_a": MatrixField.constant(grid3, np.eye(3)), "extra": MatrixField.zeros(grid3, 3)}
        two = {"R_a": MatrixField.zeros(grid3, 3)}
        assert max_difference(one, two) == pytest.approx(np.sqrt(3.0))

    def test_no_shared_labels(self, grid3):
        """Test that disjoint label sets raise DomainError."""
        with pytest.raises(DomainError):
            max_difference({"a": MatrixField.zeros(grid3, 3)}, {"b": MatrixField.zeros(grid3, 3)})
