"""
Closed-form photonic observables of the atom-photon mapping.

Everything is expressed through the frequency-integrated kernel

    K_mn(Ω) = (3Γ sin²θ / 4πN) · B_m(Ω) conj(B_n(Ω)) / (D_m + conj(D_n))

in the collective-mode basis, with ∫ K_mn dΩ = δ_mn. Atomic amplitudes enter
after dressing with the laser phases and rotating into the mode basis,
L = M⁻¹ · diag(e^{i k_L·r}):

    single photon   I(Ω)     = Σ_mn ã_m conj(ã_n) K_mn(Ω),        ã = L a
    photon pair     I(Ω)     = 4 Σ_mn K_mn(Ω) (ψ̃ ψ̃†)_mn,          ψ̃ = L ψ Lᵀ
    correlation     G(Ω, Ω') = 4 Σ ψ̃_mm' conj(ψ̃_nn') K_mn(Ω) K_m'n'(Ω')

Mode indices are zero-based: mode k has φ_k = 2πk/N and k = 0 is the
symmetric mode.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.special import j0, jv

from .atomic_states import spin_wave
from .dipole_kernel import (
    bessel_reach, build_decay_matrix, circulant_modes, clamp_subradiant, degree_of_collectivity, resolve_subradiant,
)
from .errors import ConfigurationError, NegativeIntensityError
from .models import (
    AngularGrid, CollectiveModeBasis, Direction, IntensityMap, LaserDrive,
    PhotonMode, RingLattice, SpinWave, TwoExcitationAmplitude,
)

logger = logging.getLogger(__name__)

NEGATIVE_TOLERANCE = 1e-12
UNDEFINED_INTENSITY = 1e-14
CHUNK_SIZE = 512


class EmissionKernel:
    """
    Frequency-integrated emission kernel of one ring lattice under one drive.

    Construction diagonalizes J once; every observable afterwards is a pure
    function of the direction, so instances can be shared between threads.
    Subradiant decay rates come from radiative_decay_rates and the geometric
    factors from their Bessel series, so ∫ K_mm dΩ = 1 holds to relative
    precision for every mode, however dark.
    """

    def __init__(self, lattice: RingLattice, drive: Optional[LaserDrive] = None):
        self.lattice = lattice
        self.drive = drive or LaserDrive()
        self.decay = build_decay_matrix(lattice, self.drive)
        self.basis = circulant_modes(self.decay)
        self.normalization = 3.0 * self.drive.single_atom_rate / (4.0 * math.pi)

        resolved = resolve_subradiant(self.basis.eigenvalues, lattice, self.drive)
        # Resolved rates are positive; only an underflow is clamped
        self.eigenvalues = clamp_subradiant(resolved, self.drive.single_atom_rate, floor=np.finfo(float).tiny)
        self.eigenvalues.setflags(write=False)
        denominators = 1.0 / (self.eigenvalues[:, None] + self.eigenvalues[None, :].conj())
        denominators.setflags(write=False)
        self._denominators = denominators

        n = lattice.n_sites
        # B_k = N Σ_s (−i)^{k+sN} J_{k+sN}(k_L R sinθ) e^{i(k+sN)φ}
        reach = bessel_reach(n, self.drive.wavenumber * lattice.radius) // n + 1
        shifts = np.arange(-reach, reach + 1)
        self._orders = np.arange(n)[None, :] + n * shifts[:, None]
        self._order_phases = np.array([1.0, -1j, -1.0, 1j])[self._orders % 4]
        self._windings = n * shifts
        laser_phases = np.exp(1j * lattice.positions @ self.drive.wavevector)
        self.dressing = self.basis.inverse * laser_phases[None, :]
        for array in (self._orders, self._order_phases, self._windings, self.dressing):
            array.setflags(write=False)

        self.gamma_col = degree_of_collectivity(self.basis)
        logger.debug("EmissionKernel N=%d a=%.4f Γ_col=%.6f", n, lattice.spacing, self.gamma_col)

    @property
    def n_sites(self) -> int:
        return self.lattice.n_sites

    def geometric_factors(self, units: np.ndarray) -> np.ndarray:
        """B_n for every row of units, shape (n_nodes, N)"""
        units = np.atleast_2d(units)
        n = self.n_sites
        # Nodes sharing cosθ share the Bessel values
        _, first, inverse = np.unique(units[:, 2], return_index=True, return_inverse=True)
        argument = self.drive.wavenumber * self.lattice.radius * np.hypot(units[first, 0], units[first, 1])
        bessel = jv(self._orders[:, :, None], argument[None, None, :]) * self._order_phases[:, :, None]
        phi = np.arctan2(units[:, 1], units[:, 0])
        series = np.einsum("js,skj->jk", np.exp(1j * np.outer(phi, self._windings)), bessel[:, :, inverse.ravel()])
        return n * np.exp(1j * np.outer(phi, np.arange(n))) * series

    def kernel_matrix(self, direction: Direction) -> np.ndarray:
        b = self.geometric_factors(direction.unit)[0]
        prefactor = self.normalization * math.sin(direction.theta) ** 2 / self.n_sites
        return prefactor * np.outer(b, b.conj()) * self._denominators

    def dressed_amplitudes(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.dressing @ np.asarray(amplitudes, dtype=complex)

    def dressed_pair(self, psi: np.ndarray) -> np.ndarray:
        return self.dressing @ np.asarray(psi, dtype=complex) @ self.dressing.T

    # Vectorized node evaluators, values per row of units

    def _quadratic(self, units: np.ndarray, sin2: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """Σ_mn K_mn(Ω) W_mn for every node"""
        b = self.geometric_factors(units)
        form = np.einsum("im,mn,in->i", b, self._denominators * weights, b.conj())
        return self.normalization * sin2 / self.n_sites * form.real

    def single_values(self, units: np.ndarray, sin2: np.ndarray, wave: SpinWave) -> np.ndarray:
        dressed = self.dressed_amplitudes(wave.amplitudes)
        return self._quadratic(units, sin2, np.outer(dressed, dressed.conj()))

    def pair_values(self, units: np.ndarray, sin2: np.ndarray, density: np.ndarray) -> np.ndarray:
        """density is ψ̃ψ̃† for intensities, or ψ̃ K(Ω_ref) conj(ψ̃) for G"""
        return 4.0 * self._quadratic(units, sin2, density)

    def pair_density(self, psi: TwoExcitationAmplitude) -> np.ndarray:
        dressed = self.dressed_pair(psi.psi)
        return dressed @ dressed.conj().T

    def correlation_density(self, psi: TwoExcitationAmplitude, reference: Direction) -> np.ndarray:
        dressed = self.dressed_pair(psi.psi)
        return dressed @ self.kernel_matrix(reference) @ dressed.conj()


def _check_sites(kernel: EmissionKernel, n_sites: int):
    if n_sites != kernel.n_sites:
        raise ConfigurationError(f"State lives on {n_sites} sites, kernel on {kernel.n_sites}")


def _node(direction: Direction):
    return direction.unit[None, :], np.array([math.sin(direction.theta) ** 2])


def geometric_factor_B(lattice: RingLattice, drive: LaserDrive, n: int, direction: Direction) -> complex:
    """B_n(θ,φ) = Σ_γ e^{−i k_L R q̂·r̂_γ} e^{iφ_γ n} for zero-based mode n"""
    if not 0 <= n < lattice.n_sites:
        raise ValueError(f"mode index must lie in 0..{lattice.n_sites - 1}, got {n}")
    phases = np.exp(-1j * drive.wavenumber * (lattice.positions @ direction.unit))
    return complex(np.sum(phases * np.exp(1j * lattice.angles * n)))


def mapping_coefficients(lattice: RingLattice, basis: CollectiveModeBasis, drive: LaserDrive,
                         unit: np.ndarray, polarization: np.ndarray, detunings: np.ndarray,
                         t: float = 0.0) -> np.ndarray:
    """
    g_α for one direction and polarization over an array of detunings
    ω_q − ω_L, shape (n_freq, N). Works with any basis that diagonalizes J;
    decay rates below the subradiant floor are clamped.
    """
    detunings = np.atleast_1d(np.asarray(detunings, dtype=float))
    eigenvalues = clamp_subradiant(basis.eigenvalues, drive.single_atom_rate)
    coupling = math.sqrt(3.0 * drive.single_atom_rate / (8.0 * math.pi ** 2)) * float(np.dot(polarization, (0.0, 0.0, 1.0)))

    emit = np.exp(-1j * drive.wavenumber * (lattice.positions @ unit)) @ basis.vectors
    laser_phases = np.exp(1j * lattice.positions @ drive.wavevector)
    resolvent = 1.0 / (1j * detunings[:, None] - eigenvalues[None, :])
    sums = (resolvent * emit[None, :]) @ basis.inverse
    return -1j * coupling * np.exp(-1j * detunings * t)[:, None] * laser_phases[None, :] * sums


def mapping_coefficients_g(lattice: RingLattice, basis: CollectiveModeBasis, drive: LaserDrive,
                           mode: PhotonMode, alpha: int, t: float = 0.0) -> complex:
    """Coefficient with which atom α (zero-based) feeds the photon mode after decay"""
    theta, phi = mode.direction.theta, mode.direction.phi
    if mode.polarization == 0:
        polarization = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
    else:
        polarization = np.array([-math.sin(phi), math.cos(phi), 0.0])
    g = mapping_coefficients(lattice, basis, drive, mode.direction.unit, polarization, [mode.detuning], t)
    return complex(g[0, alpha])


def single_photon_intensity(kernel: EmissionKernel, direction: Direction, wave: Optional[SpinWave] = None) -> float:
    """Photons per solid angle from a single spin wave (uniform by default)"""
    wave = wave or spin_wave(kernel.n_sites)
    _check_sites(kernel, wave.n_sites)
    units, sin2 = _node(direction)
    return float(kernel.single_values(units, sin2, wave)[0])


def single_photon_double_sum(kernel: EmissionKernel, direction: Direction) -> float:
    """Uniform spin wave intensity written as the explicit double sum over mode pairs"""
    n = kernel.n_sites
    b_laser = kernel.geometric_factors(kernel.drive.direction.unit)[0]
    b = kernel.geometric_factors(direction.unit)[0]
    total = 0j
    for m in range(n):
        for k in range(n):
            total += (b_laser[k] * b_laser[m].conj() * b[k].conj() * b[m]
                      / (kernel.eigenvalues[m] + kernel.eigenvalues[k].conj()))
    prefactor = 3.0 * kernel.drive.single_atom_rate * math.sin(direction.theta) ** 2 / (4.0 * math.pi * n ** 3)
    return float((prefactor * total).real)


def far_field_values(lattice: RingLattice, drive: LaserDrive, units: np.ndarray) -> np.ndarray:
    units = np.atleast_2d(units)
    n = lattice.n_sites
    offsets = units - drive.direction.unit[None, :]
    array_factor = np.exp(1j * drive.wavenumber * (offsets @ lattice.positions.T)).sum(axis=1)
    sin2 = 1.0 - units[:, 2] ** 2
    return 3.0 * drive.single_atom_rate * sin2 / (8.0 * math.pi * n) * np.abs(array_factor) ** 2


def far_field_intensity(lattice: RingLattice, drive: LaserDrive, direction: Direction) -> float:
    """Independent-emitter limit: the array factor of the laser-imprinted phases"""
    return float(far_field_values(lattice, drive, direction.unit)[0])


def _require_perpendicular(drive: LaserDrive):
    if not drive.is_perpendicular:
        raise ConfigurationError(
            f"Perpendicular-incidence form needs θ_L ∈ {{0, π}}, got θ_L = {drive.direction.theta}"
        )


def perpendicular_values(kernel: EmissionKernel, units: np.ndarray) -> np.ndarray:
    _require_perpendicular(kernel.drive)
    units = np.atleast_2d(units)
    d1 = kernel.eigenvalues[0]
    structure = np.abs(kernel.geometric_factors(units)[:, 0]) ** 2
    sin2 = 1.0 - units[:, 2] ** 2
    return kernel.normalization / kernel.n_sites * sin2 / (2.0 * d1.real) * structure


def perpendicular_intensity(kernel: EmissionKernel, direction: Direction) -> float:
    """I₀(θ,φ) for a drive along the ring axis, where only the symmetric mode is sourced"""
    return float(perpendicular_values(kernel, direction.unit)[0])


def bessel_values(lattice: RingLattice, basis: CollectiveModeBasis, thetas,
                  drive: Optional[LaserDrive] = None) -> np.ndarray:
    drive = drive or LaserDrive()
    thetas = np.asarray(thetas, dtype=float)
    d1 = basis.eigenvalues[0]
    sin_theta = np.sin(thetas)
    n = lattice.n_sites
    return (3.0 * drive.single_atom_rate * n / (4.0 * math.pi) * sin_theta ** 2 / (2.0 * d1.real)
            * j0(drive.wavenumber * lattice.radius * sin_theta) ** 2)


def bessel_approximation(lattice: RingLattice, basis: CollectiveModeBasis, direction: Direction) -> float:
    """Continuum-ring form of I₀ with the array factor replaced by N·J₀(k_L R sinθ)"""
    return float(bessel_values(lattice, basis, direction.theta))


def pair_intensity(kernel: EmissionKernel, psi: TwoExcitationAmplitude, direction: Direction) -> float:
    """Photons per solid angle emitted by a two-excitation state (integrates to 2)"""
    _check_sites(kernel, psi.n_sites)
    units, sin2 = _node(direction)
    return float(kernel.pair_values(units, sin2, kernel.pair_density(psi))[0])


def pair_intensity_double_sum(kernel: EmissionKernel, psi: TwoExcitationAmplitude, direction: Direction) -> float:
    """Pair intensity through C = ψψ† and the explicit laser and mode phases"""
    _check_sites(kernel, psi.n_sites)
    n = kernel.n_sites
    lattice = kernel.lattice
    correlation = psi.psi @ psi.psi.conj().T
    laser = np.exp(1j * lattice.positions @ kernel.drive.wavevector)
    # phase[j, m] = e^{i k_L·r_j} e^{−iφ_j m}
    phase = laser[:, None] * np.exp(-1j * np.outer(lattice.angles, np.arange(n)))
    source = phase.T @ correlation @ phase.conj()
    b = kernel.geometric_factors(direction.unit)[0]
    total = 0j
    for m in range(n):
        for k in range(n):
            total += b[m] * b[k].conj() / (kernel.eigenvalues[m] + kernel.eigenvalues[k].conj()) * source[m, k]
    prefactor = 3.0 * kernel.drive.single_atom_rate * math.sin(direction.theta) ** 2 / (math.pi * n ** 2)
    return float((prefactor * total).real)


def pair_correlation_G(kernel: EmissionKernel, psi: TwoExcitationAmplitude,
                       first: Direction, second: Direction) -> float:
    """Joint detection density of the two photons in directions first and second"""
    _check_sites(kernel, psi.n_sites)
    units, sin2 = _node(second)
    return float(kernel.pair_values(units, sin2, kernel.correlation_density(psi, first))[0])


def pair_correlation_g2(kernel: EmissionKernel, psi: TwoExcitationAmplitude,
                        first: Direction, second: Direction) -> float:
    """G/(I·I') − 1; NaN where either intensity is below UNDEFINED_INTENSITY"""
    i_first = pair_intensity(kernel, psi, first)
    i_second = pair_intensity(kernel, psi, second)
    if i_first < UNDEFINED_INTENSITY or i_second < UNDEFINED_INTENSITY:
        logger.debug("g2 undefined at (%s, %s)", first, second)
        return math.nan
    return pair_correlation_G(kernel, psi, first, second) / (i_first * i_second) - 1.0


# Grid evaluation

def evaluate_nodes(grid: AngularGrid, evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray],
                   workers: int = 1) -> np.ndarray:
    """
    Apply evaluator(units, sin2) to consecutive node chunks. Chunks run in a
    thread pool; executor.map keeps node order so results are deterministic.
    """
    units = grid.unit_vectors
    sin2 = np.sin(grid.theta) ** 2
    bounds = [(start, min(start + CHUNK_SIZE, grid.size)) for start in range(0, grid.size, CHUNK_SIZE)]

    def run(bound):
        start, stop = bound
        return evaluator(units[start:stop], sin2[start:stop])

    if workers <= 1 or len(bounds) == 1:
        parts = [run(bound) for bound in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(run, bounds))
    return np.concatenate(parts)


def clamp_negative(values: np.ndarray, label: str) -> np.ndarray:
    """Zero out round-off negatives; anything below −NEGATIVE_TOLERANCE is a bug"""
    worst = float(np.min(values)) if values.size else 0.0
    if worst < -NEGATIVE_TOLERANCE:
        raise NegativeIntensityError(f"{label} has a negative value {worst:.3e}")
    return np.maximum(values, 0.0)


def _finish(grid: AngularGrid, values: np.ndarray, metadata: Dict[str, Any]) -> IntensityMap:
    defined = np.isfinite(values)
    total = grid.integrate(np.where(defined, values, 0.0))
    metadata = dict(metadata, total=total)
    logger.debug("%s map on %dx%d grid, total %.10f", metadata.get("observable"), grid.n_theta, grid.n_phi, total)
    return IntensityMap(grid=grid, values=values, total=total, metadata=metadata)


def _kernel_metadata(kernel: EmissionKernel) -> Dict[str, Any]:
    return {"gamma_col": kernel.gamma_col}


def intensity_map(kernel: EmissionKernel, grid: AngularGrid, wave: Optional[SpinWave] = None,
                  workers: int = 1) -> IntensityMap:
    wave = wave or spin_wave(kernel.n_sites)
    _check_sites(kernel, wave.n_sites)
    values = evaluate_nodes(grid, lambda u, s: kernel.single_values(u, s, wave), workers)
    metadata = dict(_kernel_metadata(kernel), observable="single_photon_intensity",
                    angular_momentum=wave.angular_momentum)
    return _finish(grid, clamp_negative(values, "single-photon intensity"), metadata)


def perpendicular_map(kernel: EmissionKernel, grid: AngularGrid, workers: int = 1) -> IntensityMap:
    values = evaluate_nodes(grid, lambda u, s: perpendicular_values(kernel, u), workers)
    metadata = dict(_kernel_metadata(kernel), observable="perpendicular_intensity")
    return _finish(grid, clamp_negative(values, "perpendicular intensity"), metadata)


def pair_intensity_map(kernel: EmissionKernel, psi: TwoExcitationAmplitude, grid: AngularGrid,
                       workers: int = 1) -> IntensityMap:
    _check_sites(kernel, psi.n_sites)
    density = kernel.pair_density(psi)
    values = evaluate_nodes(grid, lambda u, s: kernel.pair_values(u, s, density), workers)
    metadata = dict(_kernel_metadata(kernel), observable="pair_intensity")
    return _finish(grid, clamp_negative(values, "pair intensity"), metadata)


def correlation_map(kernel: EmissionKernel, psi: TwoExcitationAmplitude, grid: AngularGrid,
                    reference: Direction, workers: int = 1) -> IntensityMap:
    """G(Ω_ref, Ω') over the grid"""
    _check_sites(kernel, psi.n_sites)
    density = kernel.correlation_density(psi, reference)
    values = evaluate_nodes(grid, lambda u, s: kernel.pair_values(u, s, density), workers)
    metadata = dict(_kernel_metadata(kernel), observable="pair_correlation",
                    theta_ref=reference.theta, phi_ref=reference.phi)
    return _finish(grid, clamp_negative(values, "pair correlation"), metadata)


def g2_map(kernel: EmissionKernel, psi: TwoExcitationAmplitude, grid: AngularGrid,
           reference: Direction, workers: int = 1) -> IntensityMap:
    """g₂(Ω_ref, Ω') over the grid; undefined nodes are NaN and counted in metadata"""
    correlation = correlation_map(kernel, psi, grid, reference, workers)
    intensity = pair_intensity_map(kernel, psi, grid, workers)
    i_ref = pair_intensity(kernel, psi, reference)

    values = np.full(grid.size, np.nan)
    if i_ref >= UNDEFINED_INTENSITY:
        defined = intensity.values >= UNDEFINED_INTENSITY
        values[defined] = correlation.values[defined] / (i_ref * intensity.values[defined]) - 1.0
    undefined = int(np.count_nonzero(np.isnan(values)))
    if undefined:
        logger.warning("g2 undefined at %d of %d nodes", undefined, grid.size)

    metadata = dict(_kernel_metadata(kernel), observable="g2", theta_ref=reference.theta,
                    phi_ref=reference.phi, reference_intensity=i_ref, undefined_nodes=undefined)
    return _finish(grid, values, metadata)


def perpendicular_profile(kernel: EmissionKernel, thetas, phi: float = 0.0) -> np.ndarray:
    """Polar cut of I₀ at fixed azimuth"""
    thetas = np.asarray(thetas, dtype=float)
    units = np.stack([np.sin(thetas) * math.cos(phi), np.sin(thetas) * math.sin(phi), np.cos(thetas)], axis=-1)
    return perpendicular_values(kernel, units)


def bessel_profile(kernel: EmissionKernel, thetas) -> np.ndarray:
    return bessel_values(kernel.lattice, kernel.basis, thetas, kernel.drive)
