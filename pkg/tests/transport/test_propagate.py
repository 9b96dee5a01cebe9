"""
Tests for grid paths, frame transport and plaquette holonomies.
"""

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from src.algebra.lie import so3_basis
from src.errors import DomainError, PathError
from src.fields.grid import Grid
from src.fields.scenarios import sample_connection
from src.transport.propagate import (
    GridPath,
    edge_transfer,
    path_independence,
    plaquette_defect,
    plaquette_defects,
    plaquette_holonomy,
    propagate,
)

CURVED = "analytic(k=sin(y)+0.5, m2=cos(x))"


class TestGridPath:
    """Test cases for GridPath."""

    def test_parse(self):
        """Test step lists with repeat counts."""
        path = GridPath.parse((0, 0, 0), "x+,y+2, t-")
        assert path.steps == (("x", 1), ("y", 1), ("y", 1), ("t", -1))

    @pytest.mark.parametrize("text", ["x*", "x+a", "x"])
    def test_parse_errors(self, text):
        """Test that malformed steps raise PathError."""
        with pytest.raises(PathError):
            GridPath.parse((0, 0), text)

    def test_points_and_end(self, grid3):
        """Test the visited indices of a path."""
        path = GridPath.straight((1, 1, 1), "x", 2).then(GridPath.parse((0, 0, 0), "t+"))
        assert list(path.points(grid3)) == [(1, 1, 1), (2, 1, 1), (3, 1, 1), (3, 1, 2)]
        assert path.end(grid3) == (3, 1, 2)

    def test_leaving_the_grid(self, grid3):
        """Test that paths stepping outside the grid are rejected."""
        with pytest.raises(PathError):
            GridPath.parse((0, 0, 0), "x-").validate(grid3)
        with pytest.raises(PathError):
            GridPath((0, 0, 0), (("x", 2),))


class TestEdgeTransfer:
    """Test cases for edge_transfer."""

    def test_constant_generator(self):
        """Test that a constant M gives exp(h M) to RK4 accuracy."""
        M = so3_basis()[2] * 0.8
        T = edge_transfer(M, M, 0.1, 4)
        np.testing.assert_allclose(T, scipy_expm(0.1 * M), atol=1e-10)

    def test_stacked(self):
        """Test vectorisation over leading axes."""
        M = np.stack([so3_basis()[0], so3_basis()[1]])
        T = edge_transfer(M, M, 0.05, 2)
        assert T.shape == (2, 3, 3)

    def test_substeps(self):
        """Test that substeps must be positive."""
        with pytest.raises(DomainError):
            edge_transfer(np.zeros((3, 3)), np.zeros((3, 3)), 0.1, 0)


class TestPropagate:
    """Test cases for propagate and path_independence."""

    def test_reproduces_frame(self, pure_gauge3, grid3):
        """Test that transport from the origin reproduces the manufactured frame."""
        path = GridPath.parse((0, 0, 0), "x+3,y+2,t+4")
        result = propagate(pure_gauge3.connection, path)
        np.testing.assert_allclose(result.end, pure_gauge3.frame.values[3, 2, 4], atol=1e-8)
        assert result.steps == 9
        assert result.drift <= 1e-13

    def test_flat_paths_agree(self, pure_gauge3):
        """Test path independence on a flat connection."""
        first = GridPath.parse((1, 1, 1), "x+2,y+3,t+1")
        second = GridPath.parse((1, 1, 1), "t+1,y+3,x+2")
        assert path_independence(pure_gauge3.connection, first, second) <= 1e-8

    def test_curved_paths_differ(self, random3):
        """Test path dependence on a curved connection."""
        first = GridPath.parse((1, 1, 1), "x+2,y+3")
        second = GridPath.parse((1, 1, 1), "y+3,x+2")
        assert path_independence(random3, first, second) > 1e-4

    def test_endpoint_mismatch(self, pure_gauge3):
        """Test that paths must share both endpoints."""
        with pytest.raises(PathError):
            path_independence(
                pure_gauge3.connection,
                GridPath.parse((0, 0, 0), "x+"),
                GridPath.parse((0, 0, 0), "y+"),
            )

    def test_without_reprojection(self, pure_gauge3):
        """Test that drift is reported when re-projection is off."""
        path = GridPath.parse((0, 0, 0), "x+7")
        result = propagate(pure_gauge3.connection, path, substeps=1, reproject=False)
        assert 0 < result.drift < 1e-4

    def test_concatenation_is_multiplicative(self, random3, grid3):
        """Test T(p -> r) = T(q -> r) T(p -> q) on a curved connection."""
        first = GridPath.parse((1, 1, 1), "x+2,y+1")
        second = GridPath.parse(first.end(grid3), "t+2,y-1,x+3")
        whole = propagate(random3, first.then(second))
        composed = propagate(random3, second).end @ propagate(random3, first).end
        np.testing.assert_allclose(whole.end, composed, atol=1e-13)
        assert whole.steps == 8

    def test_reprojection_bounds_drift(self, random3):
        """Test that re-projected transport stays orthogonal to 1e-12 on a long curved path."""
        path = GridPath.parse((0, 0, 0), "x+7,y+7,t+7,x-7")
        projected = propagate(random3, path, substeps=1)
        raw = propagate(random3, path, substeps=1, reproject=False)
        assert projected.drift <= 1e-12
        assert raw.drift > 1e-12

    def test_negative_beta(self, grid3):
        """Test that so(2,1) connections are refused."""
        connection = sample_connection("zero", grid3, beta=-1)
        with pytest.raises(DomainError):
            propagate(connection, GridPath.parse((0, 0, 0), "x+"))


class TestPlaquettes:
    """Test cases for plaquette holonomies and defects."""

    def test_flat_defects(self):
        """Test that flat connections have round-off plaquette defects."""
        grid = Grid.uniform(3, 9, 1.0 / 64)
        connection = sample_connection("pure_gauge", grid)
        for plane in (("x", "y"), ("x", "t"), ("y", "t")):
            assert np.max(plaquette_defects(connection, plane)) <= 1e-8

    def test_shape(self, random3, grid3):
        """Test the plaquette array shape."""
        H = plaquette_holonomy(random3, ("t", "x"))
        assert H.shape == (7, 8, 7, 3, 3)

    def test_vectorised_matches_single(self, random3):
        """Test that the vectorised defects agree with single-plaquette transport."""
        defects = plaquette_defects(random3, ("x", "y"))
        single = plaquette_defect(random3, (2, 3, 4), ("x", "y"))
        assert defects[2, 3, 4] == pytest.approx(single, rel=1e-10)

    def test_defect_tracks_curvature(self):
        """Test d / h^2 against |R_a| near the origin, with second-order convergence."""
        expected = np.sqrt(2.5)
        defects = []
        for h in (1 / 16, 1 / 32, 1 / 64):
            grid = Grid.uniform(3, 5, h)
            connection = sample_connection(CURVED, grid)
            d = plaquette_defect(connection, (0, 0, 0), ("x", "y"))
            assert d / h**2 == pytest.approx(expected, rel=0.15)
            defects.append(d)
        orders = np.log2(np.array(defects[:-1]) / np.array(defects[1:]))
        assert np.all(np.abs(orders - 2.0) <= 0.8)

    def test_plaquette_must_fit(self, random3):
        """Test that plaquettes at the last index are rejected."""
        with pytest.raises(PathError):
            plaquette_defect(random3, (7, 0, 0), ("x", "y"))

    def test_bad_plane(self, random3):
        """Test that a plane needs two distinct axes."""
        with pytest.raises(DomainError):
            plaquette_defects(random3, ("x", "x"))
