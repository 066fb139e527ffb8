"""
Brute-force reference for the closed forms.

The photon field is discretized into explicit modes (direction × detuning ×
polarization), J is diagonalized by a generic dense eigensolver and the
mapping coefficients g are summed literally. Nothing here touches the
circulant eigensystem or the frequency-integrated kernel.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from .dipole_kernel import build_decay_matrix, clamp_subradiant
from .emission import mapping_coefficients
from .errors import BandwidthError
from .models import (
    AngularGrid, CollectiveModeBasis, DecayMatrix, Direction, IntensityMap,
    LaserDrive, ModeGrid, RingLattice, SpinWave, TwoExcitationAmplitude,
)

logger = logging.getLogger(__name__)

MIN_BANDWIDTH_FACTOR = 50.0


def dense_modes(decay: DecayMatrix) -> CollectiveModeBasis:
    """Eigenvectors and eigenvalues of J with an explicitly inverted eigenvector matrix"""
    eigenvalues, vectors = np.linalg.eig(decay.j)
    return CollectiveModeBasis(vectors=vectors, eigenvalues=eigenvalues, inverse=np.linalg.inv(vectors))


def transverse_polarizations(direction: Direction) -> Tuple[np.ndarray, np.ndarray]:
    """Unit vectors θ̂ and φ̂, both orthogonal to the emission direction"""
    theta, phi = direction.theta, direction.phi
    e_theta = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
    e_phi = np.array([-math.sin(phi), math.cos(phi), 0.0])
    return e_theta, e_phi


def build_mode_grid(directions: AngularGrid, bandwidth: float, n_frequencies: int,
                    resolution: float) -> ModeGrid:
    """
    Frequency nodes ω = s·sinh(v) with Gauss–Legendre nodes in v on
    [−asinh(W/s), asinh(W/s)]. The map packs nodes around ω_L, where the
    narrowest Lorentzians live, and thins them out towards ±W.
    """
    if bandwidth <= 0.0 or resolution <= 0.0:
        raise ValueError("bandwidth and resolution must be positive")
    if n_frequencies < 2:
        raise ValueError(f"need at least two frequency nodes, got {n_frequencies}")

    v_max = math.asinh(bandwidth / resolution)
    x, w = np.polynomial.legendre.leggauss(n_frequencies)
    v = v_max * x
    frequencies = resolution * np.sinh(v)
    weights = resolution * np.cosh(v) * w * v_max

    polarizations = np.array([
        np.stack(transverse_polarizations(node)) for node in directions.nodes
    ])
    return ModeGrid(
        directions=directions,
        bandwidth=bandwidth,
        resolution=resolution,
        frequencies=frequencies,
        frequency_weights=weights,
        polarizations=polarizations,
    )


def mode_grid_for(lattice: RingLattice, drive: LaserDrive, directions: AngularGrid,
                  bandwidth_factor: float = 200.0, n_frequencies: int = 400) -> ModeGrid:
    """Mode grid whose band is bandwidth_factor·Γ_col and whose finest scale is ½ min Re D_k"""
    eigenvalues = clamp_subradiant(np.linalg.eigvals(build_decay_matrix(lattice, drive).j), drive.single_atom_rate)
    gamma_col = float(eigenvalues.real.max())
    resolution = 0.5 * float(eigenvalues.real.min())
    logger.debug("Mode grid: W=%.3f, s=%.3e, %d frequencies", bandwidth_factor * gamma_col, resolution, n_frequencies)
    return build_mode_grid(directions, bandwidth_factor * gamma_col, n_frequencies, resolution)


class DenseMapping:
    """Per-direction resolvent sums R_α(ω) = e^{ik_L·r_α} Σ_k emit_k M⁻¹_kα/(iω − D_k)"""

    def __init__(self, lattice: RingLattice, drive: LaserDrive, mode_grid: ModeGrid):
        self.lattice = lattice
        self.drive = drive
        self.mode_grid = mode_grid
        self.decay = build_decay_matrix(lattice, drive)
        self.basis = dense_modes(self.decay)

        gamma_col = float(self.basis.eigenvalues.real.max())
        if mode_grid.bandwidth < MIN_BANDWIDTH_FACTOR * gamma_col * (1.0 - 1e-12):
            raise BandwidthError(
                f"Band W={mode_grid.bandwidth:.3f} is below {MIN_BANDWIDTH_FACTOR:g}·Γ_col "
                f"= {MIN_BANDWIDTH_FACTOR * gamma_col:.3f}"
            )

    def coefficients(self, direction: Direction, polarizations=None) -> np.ndarray:
        """g for both polarizations, shape (2, n_freq, N); θ̂ and φ̂ unless another transverse pair is given"""
        if polarizations is None:
            polarizations = transverse_polarizations(direction)
        return np.stack([
            mapping_coefficients(self.lattice, self.basis, self.drive, direction.unit, e,
                                 self.mode_grid.frequencies)
            for e in polarizations
        ])


def oracle_single_intensity(lattice: RingLattice, drive: LaserDrive, wave: SpinWave,
                            mode_grid: ModeGrid) -> IntensityMap:
    """Photons per solid angle from Σ_λ ∫ dω |Σ_α a_α g_α|² at every grid direction"""
    mapping = DenseMapping(lattice, drive, mode_grid)
    weights = mode_grid.frequency_weights
    values = np.empty(mode_grid.directions.size)
    for index, direction in enumerate(mode_grid.directions.nodes):
        amplitudes = mapping.coefficients(direction, mode_grid.polarizations[index]) @ wave.amplitudes
        values[index] = float(np.sum(weights[None, :] * np.abs(amplitudes) ** 2))

    grid = mode_grid.directions
    total = grid.integrate(values)
    logger.debug("Oracle single intensity N=%d total %.6f", lattice.n_sites, total)
    return IntensityMap(
        grid=grid,
        values=values,
        total=total,
        metadata={
            "observable": "oracle_single_intensity",
            "bandwidth": mode_grid.bandwidth,
            "n_frequencies": int(mode_grid.frequencies.size),
        },
    )


def oracle_pair_correlation(lattice: RingLattice, drive: LaserDrive, psi: TwoExcitationAmplitude,
                            mode_grid: ModeGrid, first: Direction, second: Direction,
                            mapping: Optional[DenseMapping] = None) -> float:
    """
    G from the explicit two-photon amplitude T = 2 Σ_kk' ψ_kk' g_k(q) g_k'(q'),
    integrated over both detunings and summed over both polarizations.
    """
    mapping = mapping or DenseMapping(lattice, drive, mode_grid)
    weights = mode_grid.frequency_weights
    g_first = mapping.coefficients(first)
    g_second = mapping.coefficients(second)

    total = 0.0
    for lam in range(2):
        for lam2 in range(2):
            amplitude = 2.0 * g_first[lam] @ psi.psi @ g_second[lam2].T
            total += float(np.sum(weights[:, None] * weights[None, :] * np.abs(amplitude) ** 2))
    return total
