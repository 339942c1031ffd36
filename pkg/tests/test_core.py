"""Geometry and grid construction."""

import numpy as np
import pytest

from planeangle.core import (
    AngleGeometry,
    GridFunction,
    IncompatibleGrid,
    IndexOutOfBounds,
    NonUniformSpacing,
    OutOfRange,
    SectorGrid,
    TooFewAngles,
    make_geometry,
    node_coordinates,
)


def test_make_geometry_two_sectors():
    geo = make_geometry([np.pi / 6, np.pi / 2, 5 * np.pi / 6])
    assert geo.num_sectors == 2
    assert abs(geo.d - np.pi / 3) < 1e-15


def test_make_geometry_single_sector():
    geo = make_geometry([0.5, 1.0])
    assert geo.num_sectors == 1
    assert geo.d == 0.5


def test_make_geometry_rejects_uneven_gaps():
    with pytest.raises(NonUniformSpacing):
        make_geometry([0.5, 1.0, 1.6])


def test_make_geometry_rejects_out_of_range():
    with pytest.raises(OutOfRange):
        make_geometry([0.0, 1.0])
    with pytest.raises(OutOfRange):
        make_geometry([1.0, 2 * np.pi])
    with pytest.raises(OutOfRange):
        make_geometry([1.0, 0.5])


def test_make_geometry_rejects_short_lists():
    with pytest.raises(TooFewAngles):
        make_geometry([1.0])


def test_make_geometry_idempotent_roundtrip():
    geo = make_geometry([0.3, 1.1, 1.9, 2.7])
    again = make_geometry(list(geo.angles))
    assert again == geo


def test_node_coordinates_corners_and_midpoint():
    geo = make_geometry([0.5, 1.0, 1.5])
    grid = SectorGrid(geo, 1.0, 3.0, 4, 4)
    assert node_coordinates(grid, 0, 0) == (1.0, 0.5)
    assert node_coordinates(grid, 4, 4) == (3.0, 1.5)
    r, phi = node_coordinates(grid, 2, 2)
    assert abs(r - 2.0) < 1e-15 and abs(phi - 1.0) < 1e-15


def test_node_coordinates_bounds():
    geo = make_geometry([0.5, 1.0, 1.5])
    grid = SectorGrid(geo, 1.0, 3.0, 4, 4)
    with pytest.raises(IndexOutOfBounds):
        node_coordinates(grid, 5, 0)
    with pytest.raises(IndexOutOfBounds):
        node_coordinates(grid, 0, -1)


def test_grid_validation():
    geo = make_geometry([0.5, 1.0, 1.5])
    with pytest.raises(IncompatibleGrid):
        SectorGrid(geo, -1.0, 3.0, 4, 4)
    with pytest.raises(IncompatibleGrid):
        SectorGrid(geo, 1.0, 3.0, 4, 5)  # n_phi not divisible by R
    with pytest.raises(IncompatibleGrid):
        SectorGrid(geo, 1.0, 3.0, 2, 4)  # n_r too small


def test_column_shift_matches_sector_spacing():
    geo = make_geometry([0.4, 1.2, 2.0])
    grid = SectorGrid(geo, 0.5, 2.0, 4, 12)
    phi = grid.phi_nodes
    s = grid.shift_columns
    for p in (-2, -1, 1, 2):
        for j in range(grid.n_phi + 1):
            k = j + s * p
            if 0 <= k <= grid.n_phi:
                assert abs((phi[k] - phi[j]) - p * geo.d) < 1e-13


def test_grid_function_shape_check():
    geo = make_geometry([0.5, 1.0, 1.5])
    grid = SectorGrid(geo, 1.0, 3.0, 4, 4)
    with pytest.raises(IncompatibleGrid):
        GridFunction(grid, np.zeros((4, 4)))
    u = GridFunction.from_callable(grid, lambda r, p: r * np.cos(p))
    assert u.values.shape == (5, 5)
    assert u.values.dtype == complex


def test_geometry_is_frozen():
    geo = make_geometry([0.5, 1.0, 1.5])
    with pytest.raises(Exception):
        geo.d = 2.0
    assert isinstance(geo, AngleGeometry)
