"""
End-to-end physics checks on the scenario parameter sets. These evaluate
full angular maps and take a few seconds each.
"""

import math

import numpy as np
import pytest

from ringphoton.analysis import (
    angular_distance, azimuthal_variation, global_maximum, local_maxima, relative_l2,
)
from ringphoton.atomic_states import pair_state, product_pair, spin_wave
from ringphoton.emission import (
    EmissionKernel, far_field_values, g2_map, intensity_map, pair_intensity_map, perpendicular_map,
    perpendicular_profile,
)
from ringphoton.geometry import build_angular_grid, build_ring
from ringphoton.models import Direction, LaserDrive

pytestmark = pytest.mark.slow

LASER = Direction(theta=math.pi / 4, phi=math.pi)


@pytest.fixture(scope="module")
def oblique():
    return LaserDrive(direction=LASER)


@pytest.fixture(scope="module")
def grid96():
    return build_angular_grid(96, 96)


@pytest.mark.parametrize("spacing, tolerance", [(1.0, 0.04), (0.5, 0.08), (1.0 / 3.0, 0.12)])
def test_spin_wave_emits_along_the_laser_and_its_mirror_image(oblique, grid96, spacing, tolerance):
    # sin²θ and the high-l modes pull the peaks towards the ring plane on smaller rings
    result = intensity_map(EmissionKernel(build_ring(15, spacing), oblique), grid96)
    first, second = local_maxima(result)[:2]
    upper, lower = sorted([first, second], key=lambda peak: peak.theta)

    assert upper.phi == pytest.approx(math.pi, abs=0.1)
    assert lower.phi == pytest.approx(math.pi, abs=0.1)
    assert upper.theta == pytest.approx(math.pi / 4, abs=tolerance)
    assert upper.theta + lower.theta == pytest.approx(math.pi, abs=1e-9)
    assert first.value == pytest.approx(second.value, rel=1e-6)


def test_larger_spacing_gives_more_side_lobes(oblique, grid96):
    wide = intensity_map(EmissionKernel(build_ring(15, 1.0), oblique), grid96)
    narrow = intensity_map(EmissionKernel(build_ring(15, 1.0 / 3.0), oblique), grid96)
    assert len(local_maxima(wide, min_relative=0.01)) > len(local_maxima(narrow, min_relative=0.01))


def _profile_maxima(thetas, values, count):
    """Polar angles of the count largest interior maxima of a profile"""
    inner = np.flatnonzero((values[1:-1] > values[:-2]) & (values[1:-1] > values[2:])) + 1
    strongest = inner[np.argsort(values[inner])[::-1][:count]]
    return np.sort(thetas[strongest])


class TestHollowPhotons:
    thetas = np.linspace(1e-3, math.pi / 2, 4001)

    def test_single_cone(self):
        kernel = EmissionKernel(build_ring(10, 0.56))
        (cone,) = _profile_maxima(self.thetas, perpendicular_profile(kernel, self.thetas), 1)
        assert cone == pytest.approx(math.pi / 4, abs=0.1)

    def test_two_cones(self):
        kernel = EmissionKernel(build_ring(20, 0.43))
        inner, outer = _profile_maxima(self.thetas, perpendicular_profile(kernel, self.thetas), 2)
        assert inner == pytest.approx(0.5, abs=0.1)
        assert outer == pytest.approx(1.0, abs=0.1)

    def test_cones_are_azimuthally_symmetric(self, grid96):
        result = perpendicular_map(EmissionKernel(build_ring(10, 0.56)), grid96)
        # J_N(k_L R) ≠ 0 leaves a weak N-fold ripple on a finite ring
        assert 0.01 < azimuthal_variation(result.as_grid()) < 0.03

    def test_small_ring_radiates_like_one_dipole(self, grid96):
        result = perpendicular_map(EmissionKernel(build_ring(10, 0.1)), grid96)
        dipole = 3 * np.sin(grid96.theta) ** 2 / (8 * math.pi)
        assert relative_l2(result.values, dipole, grid96.weights) < 0.15


def test_sparse_ring_approaches_the_far_field(oblique):
    ring = build_ring(15, 5.0)
    grid = build_angular_grid(200, 256)
    exact = intensity_map(EmissionKernel(ring, oblique), grid)
    far = far_field_values(ring, oblique, grid.unit_vectors)
    assert relative_l2(exact.values, far, grid.weights) < 0.2


def _conserving_grid(n_sites, spacing):
    # Azimuthal harmonics of |B|² reach about 2·k_L R; fewer nodes alias them
    size = max(128, 2 * math.ceil(n_sites * spacing) + 64)
    return build_angular_grid(size, size)


def test_randomized_photon_number_conservation():
    rng = np.random.default_rng(20)
    for case in range(16):
        n_sites = int(rng.integers(2, 41))
        spacing = float(rng.uniform(0.1, 3.0))
        drive = LaserDrive(direction=Direction(theta=float(rng.uniform(0, math.pi)),
                                               phi=float(rng.uniform(0, 2 * math.pi))))
        kernel = EmissionKernel(build_ring(n_sites, spacing), drive)
        grid = _conserving_grid(n_sites, spacing)
        assert intensity_map(kernel, grid).total == pytest.approx(1.0, abs=1e-5)
        # Every other case loads the darkest pair state
        p = n_sites // 2 if case % 2 else int(rng.integers(1, n_sites // 2 + 1))
        assert pair_intensity_map(kernel, pair_state(n_sites, p), grid).total == pytest.approx(2.0, abs=1e-5)


@pytest.mark.parametrize("spacing, theta_l", [(0.1, 0.0), (0.15, math.pi / 2), (0.2, 0.0)])
def test_darkest_pair_state_emits_two_photons(spacing, theta_l):
    kernel = EmissionKernel(build_ring(40, spacing), LaserDrive(direction=Direction(theta=theta_l, phi=math.pi)))
    result = pair_intensity_map(kernel, pair_state(40, 20), build_angular_grid(128, 128))
    assert result.total == pytest.approx(2.0, abs=1e-5)


class TestPhotonPairs:
    @pytest.fixture(scope="class")
    def kernel(self):
        return EmissionKernel(build_ring(15, 0.5), LaserDrive(direction=LASER))

    def test_lowest_pair_state_looks_like_two_single_photons(self, kernel, grid96):
        pair = pair_intensity_map(kernel, pair_state(15, 1), grid96)
        single = intensity_map(kernel, grid96)
        assert relative_l2(pair.values, 2 * single.values, grid96.weights) < 0.25

        peak = global_maximum(pair)
        assert angular_distance(peak.direction, Direction(theta=0.83, phi=math.pi)) < 0.15

    def test_lowest_pair_state_is_anticorrelated(self, kernel, grid96):
        psi = pair_state(15, 1)
        reference = Direction(theta=0.83, phi=math.pi)
        g2 = g2_map(kernel, psi, grid96, reference).values
        assert np.nanmax(g2) < -0.3

    def test_entangled_pair_state_has_correlated_peaks_opposite_the_reference(self, kernel, grid96):
        psi = pair_state(15, 3)
        reference = Direction(theta=math.pi / 2, phi=3.52)
        g2 = g2_map(kernel, psi, grid96, reference).values
        strongest = int(np.nanargmax(g2))
        assert g2[strongest] > 0.0
        assert 0.0 <= grid96.phi[strongest] < math.pi

    def test_product_state_g2_is_constant(self, kernel, grid96):
        psi = product_pair(spin_wave(15))
        result = g2_map(kernel, psi, grid96, Direction(theta=0.83, phi=math.pi))
        intensity = pair_intensity_map(kernel, psi, grid96).values
        bright = intensity > 1e-4 * intensity.max()
        np.testing.assert_allclose(result.values[bright], -0.5, atol=1e-8)
