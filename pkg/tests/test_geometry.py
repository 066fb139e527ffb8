import math

import numpy as np
import pytest

from ringphoton.geometry import (
    build_angular_grid, build_ring, chord_distances, pairwise_distances,
)
from ringphoton.models import Direction


def test_square_ring_positions():
    ring = build_ring(4, math.pi / 2)
    assert ring.radius == pytest.approx(1.0, abs=1e-15)
    expected = [(1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0)]
    np.testing.assert_allclose(ring.positions, expected, atol=1e-12)
    assert np.all(ring.positions[:, 2] == 0.0)


def test_single_site():
    ring = build_ring(1, 1.0)
    np.testing.assert_allclose(ring.positions, [[1 / (2 * math.pi), 0.0, 0.0]])
    assert pairwise_distances(ring).shape == (1, 1)
    assert pairwise_distances(ring)[0, 0] == 0.0


def test_radius_uses_arc_length():
    assert build_ring(15, 1.0).radius == pytest.approx(2.3873, abs=1e-4)


@pytest.mark.parametrize("n_sites, spacing", [(3, 0.2), (15, 1.0), (40, 0.43)])
def test_ring_invariants(n_sites, spacing):
    ring = build_ring(n_sites, spacing)
    np.testing.assert_allclose(np.linalg.norm(ring.positions, axis=1), ring.radius, rtol=1e-14)
    np.testing.assert_allclose(pairwise_distances(ring), chord_distances(ring), atol=1e-12 * ring.radius)

    # Every row sees the same multiset of distances
    rows = np.sort(pairwise_distances(ring), axis=1)
    np.testing.assert_allclose(rows, np.broadcast_to(rows[0], rows.shape), atol=1e-12 * ring.radius)


def test_build_ring_is_deterministic():
    first, second = build_ring(9, 0.7), build_ring(9, 0.7)
    assert np.array_equal(first.positions, second.positions)


@pytest.mark.parametrize("n_sites, spacing", [(0, 1.0), (-2, 1.0), (5, 0.0), (5, -0.3)])
def test_build_ring_rejects_bad_input(n_sites, spacing):
    with pytest.raises(ValueError):
        build_ring(n_sites, spacing)


def test_ring_arrays_are_read_only():
    ring = build_ring(5, 0.5)
    with pytest.raises(ValueError):
        ring.positions[0, 0] = 1.0


def test_grid_weights_and_moments():
    grid = build_angular_grid(64, 64)
    assert grid.weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)
    assert np.all(grid.weights > 0)
    assert grid.integrate(np.ones(grid.size)) == pytest.approx(4 * math.pi, abs=1e-12)
    assert grid.integrate(np.sin(grid.theta) ** 2) == pytest.approx(8 * math.pi / 3, abs=1e-8)
    assert abs(grid.integrate(np.cos(grid.theta))) < 1e-12


def test_grid_polynomial_exactness():
    n_theta = 8
    grid = build_angular_grid(n_theta, 8)
    x = np.cos(grid.theta)
    for degree in range(2 * n_theta):
        exact = 2 * math.pi * (1 + (-1) ** degree) / (degree + 1)
        assert grid.integrate(x ** degree) == pytest.approx(exact, abs=1e-10)


def test_grid_layout_is_theta_major():
    grid = build_angular_grid(6, 8)
    assert np.all(np.diff(grid.thetas) > 0)
    assert grid.shape == (6, 8)
    np.testing.assert_allclose(grid.theta[:8], grid.thetas[0])
    np.testing.assert_allclose(grid.phi[:8], 2 * math.pi * np.arange(8) / 8)
    np.testing.assert_allclose(np.linalg.norm(grid.unit_vectors, axis=1), 1.0)


@pytest.mark.parametrize("n_theta, n_phi", [(1, 8), (8, 3), (0, 0)])
def test_grid_rejects_degenerate_sizes(n_theta, n_phi):
    with pytest.raises(ValueError):
        build_angular_grid(n_theta, n_phi)


def test_direction_wraps_azimuth():
    assert Direction(theta=0.5, phi=-0.1).phi == pytest.approx(2 * math.pi - 0.1)
    assert Direction(theta=0.5, phi=2 * math.pi).phi == 0.0
    assert Direction(theta=0.5, phi=7.0).phi == pytest.approx(7.0 - 2 * math.pi)
    assert np.linalg.norm(Direction(theta=1.1, phi=4.0).unit) == pytest.approx(1.0)


def test_direction_rejects_polar_angle_out_of_range():
    with pytest.raises(ValueError):
        Direction(theta=-0.1, phi=0.0)
    with pytest.raises(ValueError):
        Direction(theta=4.0, phi=0.0)
