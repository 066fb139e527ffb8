"""
Ring-lattice geometry and solid-angle quadrature
"""

import logging
import math

import numpy as np

from .models import AngularGrid, RingLattice

logger = logging.getLogger(__name__)


def build_ring(n_sites: int, spacing: float) -> RingLattice:
    """
    Place N atoms on a ring in the xy-plane with arc-length spacing a.

    The radius is R = aN/2π exactly, so nearest-neighbour chords are slightly
    shorter than a.
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    if not spacing > 0.0:
        raise ValueError(f"spacing must be > 0, got {spacing}")

    radius = spacing * n_sites / (2.0 * math.pi)
    angles = 2.0 * math.pi * np.arange(n_sites) / n_sites
    positions = np.zeros((n_sites, 3))
    positions[:, 0] = radius * np.cos(angles)
    positions[:, 1] = radius * np.sin(angles)

    return RingLattice(
        n_sites=n_sites,
        spacing=spacing,
        radius=radius,
        angles=angles,
        positions=positions,
    )


def pairwise_distances(lattice: RingLattice) -> np.ndarray:
    """|r_α − r_β| for every pair, shape (N, N)"""
    diff = lattice.positions[:, None, :] - lattice.positions[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def chord_distances(lattice: RingLattice) -> np.ndarray:
    """Closed form 2R sin(π|α−β|/N)"""
    index = np.arange(lattice.n_sites)
    offset = np.abs(index[:, None] - index[None, :])
    return 2.0 * lattice.radius * np.abs(np.sin(np.pi * offset / lattice.n_sites))


def build_angular_grid(n_theta: int, n_phi: int) -> AngularGrid:
    """Gauss–Legendre nodes in cosθ crossed with uniform azimuths"""
    if n_theta < 2 or n_phi < 4:
        raise ValueError(f"Angular grid needs n_theta >= 2 and n_phi >= 4, got ({n_theta}, {n_phi})")

    x, w = np.polynomial.legendre.leggauss(n_theta)
    # leggauss returns cosθ ascending, so θ comes out descending
    order = np.argsort(np.arccos(x))
    thetas = np.arccos(x)[order]
    theta_weights = w[order]

    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    phi_weight = 2.0 * np.pi / n_phi

    theta, phi = np.meshgrid(thetas, phis, indexing="ij")
    weights = np.repeat(theta_weights * phi_weight, n_phi)

    grid = AngularGrid(
        n_theta=n_theta,
        n_phi=n_phi,
        thetas=thetas,
        phis=phis,
        theta=theta.ravel(),
        phi=phi.ravel(),
        weights=weights,
    )
    logger.debug("Angular grid %dx%d, total weight %.15f", n_theta, n_phi, weights.sum())
    return grid
