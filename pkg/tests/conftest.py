"""
Shared fixtures for the ringphoton test suite
"""

import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ringphoton.emission import EmissionKernel  # noqa: E402
from ringphoton.geometry import build_angular_grid, build_ring  # noqa: E402
from ringphoton.models import Direction, LaserDrive  # noqa: E402


@pytest.fixture
def oblique_drive():
    """Laser at (π/4, π), the oblique drive used by the emission-map scenarios"""
    return LaserDrive(direction=Direction(theta=math.pi / 4, phi=math.pi))


@pytest.fixture
def axial_drive():
    return LaserDrive(direction=Direction(theta=0.0, phi=0.0))


@pytest.fixture
def ring15_half():
    return build_ring(15, 0.5)


@pytest.fixture
def kernel15_half(ring15_half, oblique_drive):
    return EmissionKernel(ring15_half, oblique_drive)


@pytest.fixture
def coarse_grid():
    return build_angular_grid(16, 20)


@pytest.fixture
def fine_grid():
    return build_angular_grid(64, 64)
