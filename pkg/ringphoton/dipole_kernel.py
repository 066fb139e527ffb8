"""
Dipole-dipole coupling kernels, the collective decay matrix J and its
circulant eigensystem.

All rates are in units of Γ and all lengths in units of λ_L, so a pair of
atoms at distance r has κ = 2πr.
"""

import logging
import math
import warnings
from math import factorial
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import jv

from .errors import NonCirculantError, SubradiantModeWarning
from .geometry import pairwise_distances
from .models import CollectiveModeBasis, DecayMatrix, LaserDrive, RingLattice

logger = logging.getLogger(__name__)

SMALL_KAPPA = 1e-2
CIRCULANT_TOLERANCE = 1e-9
SUBRADIANT_FLOOR = 1e-12
# FFT decay rates below this fraction of Γ are recomputed from the emission integral
RESOLVE_BELOW = 1e-3
DIPOLE_AXIS = (0.0, 0.0, 1.0)

# Six-term Taylor coefficients around κ = 0
#   cosκ/κ² − sinκ/κ³ = Σ_j (−1)^j 2j/(2j+1)! κ^(2j−2),  j = 1..6
#   sinκ/κ            = Σ_j (−1)^j 1/(2j+1)!  κ^(2j),    j = 0..5
_NEAR_FIELD_SERIES = np.array([(-1) ** j * 2 * j / factorial(2 * j + 1) for j in range(1, 7)])
_SINC_SERIES = np.array([(-1) ** j / factorial(2 * j + 1) for j in range(0, 6)])


def _even_series(coefficients: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    k2 = kappa * kappa
    result = np.zeros_like(kappa)
    for c in coefficients[::-1]:
        result = result * k2 + c
    return result


def _as_output(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def gamma_pair(kappa, cos_dr=0.0, rate: float = 1.0):
    """
    Dissipative pair coupling γ(κ) for dipoles at angle arccos(cos_dr) to
    the pair axis. Accepts scalars or arrays; κ = 0 gives the limit Γ.
    """
    scalar = np.ndim(kappa) == 0 and np.ndim(cos_dr) == 0
    kappa = np.asarray(kappa, dtype=float)
    c2 = np.asarray(cos_dr, dtype=float) ** 2
    if np.any(kappa < 0.0):
        raise ValueError("kappa must be non-negative")

    small = kappa < SMALL_KAPPA
    safe = np.where(small, 1.0, kappa)
    near = np.where(
        small,
        _even_series(_NEAR_FIELD_SERIES, kappa),
        np.cos(safe) / safe ** 2 - np.sin(safe) / safe ** 3,
    )
    sinc = np.where(small, _even_series(_SINC_SERIES, kappa), np.sin(safe) / safe)

    value = 1.5 * rate * ((1.0 - 3.0 * c2) * near + (1.0 - c2) * sinc)
    return _as_output(value, scalar)


def omega_pair(kappa, cos_dr=0.0, rate: float = 1.0):
    """Coherent pair coupling Ω(κ); diverges as κ⁻³ and is undefined at κ = 0"""
    scalar = np.ndim(kappa) == 0 and np.ndim(cos_dr) == 0
    kappa = np.asarray(kappa, dtype=float)
    c2 = np.asarray(cos_dr, dtype=float) ** 2
    if np.any(kappa <= 0.0):
        raise ValueError("omega_pair is undefined at kappa = 0; use the diagonal convention Ω_αα = 0")

    near = np.sin(kappa) / kappa ** 2 + np.cos(kappa) / kappa ** 3
    value = 1.5 * rate * ((1.0 - 3.0 * c2) * near - (1.0 - c2) * np.cos(kappa) / kappa)
    return _as_output(value, scalar)


def pairwise_cosines(lattice: RingLattice, dipole=DIPOLE_AXIS) -> np.ndarray:
    """d̂·r̂_αβ for every pair; zero on the diagonal"""
    dipole = np.asarray(dipole, dtype=float)
    dipole = dipole / np.linalg.norm(dipole)
    diff = lattice.positions[:, None, :] - lattice.positions[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosines = np.einsum("abi,i->ab", diff, dipole) / dist
    np.fill_diagonal(cosines, 0.0)
    return cosines


def build_decay_matrix(lattice: RingLattice, drive: Optional[LaserDrive] = None) -> DecayMatrix:
    """Assemble γ_αβ and Ω_αβ for dipoles along ẑ, perpendicular to the ring"""
    drive = drive or LaserDrive()
    n = lattice.n_sites
    kappa = drive.wavenumber * pairwise_distances(lattice)
    cosines = pairwise_cosines(lattice)

    gamma = np.full((n, n), drive.single_atom_rate)
    omega = np.zeros((n, n))
    off = ~np.eye(n, dtype=bool)
    if n > 1:
        gamma[off] = gamma_pair(kappa[off], cosines[off], drive.single_atom_rate)
        omega[off] = omega_pair(kappa[off], cosines[off], drive.single_atom_rate)

    # Exact symmetry; floating point in the distance matrix can differ in the last bit
    gamma = 0.5 * (gamma + gamma.T)
    omega = 0.5 * (omega + omega.T)
    return DecayMatrix(gamma=gamma, omega=omega)


def circulant_residual(matrix: np.ndarray) -> float:
    """Largest deviation of any row from the cyclic shift of the first row"""
    first = matrix[0]
    shifts = np.stack([np.roll(first, r) for r in range(matrix.shape[0])])
    return float(np.max(np.abs(matrix - shifts)))


def circulant_modes(decay: DecayMatrix) -> CollectiveModeBasis:
    """
    Analytic eigensystem of a circulant J.

    M[γ][k] = e^{iφ_k γ}/√N and D_k = Σ_n J_{0n} e^{iφ_k n} with φ_k = 2πk/N
    (zero-based indices), i.e. D is N times the inverse DFT of the first row.
    """
    j = decay.j
    n = j.shape[0]
    residual = circulant_residual(j)
    if residual > CIRCULANT_TOLERANCE:
        raise NonCirculantError(f"Decay matrix is not circulant (row-shift residual {residual:.3e})")

    eigenvalues = n * np.fft.ifft(j[0])
    index = np.arange(n)
    vectors = np.exp(2j * np.pi * np.outer(index, index) / n) / math.sqrt(n)

    logger.debug("Circulant modes for N=%d: Γ_col=%.6f", n, float(np.max(eigenvalues.real)))
    return CollectiveModeBasis(vectors=vectors, eigenvalues=eigenvalues, inverse=vectors.conj().T)


def degree_of_collectivity(basis: CollectiveModeBasis) -> float:
    """Γ_col, the fastest collective decay rate"""
    return float(np.max(basis.eigenvalues.real))


def dense_eigenvalues(decay: DecayMatrix) -> np.ndarray:
    """Eigenvalues of J from a generic dense solver"""
    return np.linalg.eigvals(decay.j)


def eigenvalue_mismatch(first, second) -> float:
    """Largest distance between two eigenvalue multisets after optimal matching"""
    first = np.asarray(first, dtype=complex)
    second = np.asarray(second, dtype=complex)
    if first.shape != second.shape:
        raise ValueError(f"Eigenvalue sets differ in size: {first.shape} vs {second.shape}")
    cost = np.abs(first[:, None] - second[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols])) if cost.size else 0.0


def bessel_reach(n_sites: int, argument: float) -> int:
    """Largest Bessel order |n| that still matters for J_n(x), x ≤ argument, on an N-site ring"""
    return int(math.ceil(max(n_sites, argument + 30.0 + 15.0 * np.cbrt(argument))))


def radiative_decay_rates(lattice: RingLattice, drive: Optional[LaserDrive] = None,
                          modes=None) -> np.ndarray:
    """
    Re D_k as the angular integral of the power radiated by mode k,

        Re D_k = (3ΓN/4) ∫₀^π sin³θ Σ_s J²_{k+sN}(k_L R sinθ) dθ.

    Every term is positive, so the result keeps relative precision for deeply
    subradiant modes, where the FFT of the first row of J is pure round-off.
    """
    drive = drive or LaserDrive()
    n = lattice.n_sites
    modes = np.arange(n) if modes is None else np.atleast_1d(np.asarray(modes, dtype=int))
    argument = drive.wavenumber * lattice.radius
    top = bessel_reach(n, argument)

    mu, weights = np.polynomial.legendre.leggauss(top + int(2 * argument) + 32)
    sin2 = 1.0 - mu ** 2
    squares = jv(np.arange(top + 1)[:, None], argument * np.sqrt(sin2)[None, :]) ** 2
    shifts = np.arange(-(top // n) - 1, top // n + 2)

    rates = np.empty(modes.size)
    for i, k in enumerate(modes):
        orders = np.abs(k + n * shifts)
        rates[i] = squares[orders[orders <= top]].sum(axis=0) @ (weights * sin2)
    return 0.75 * drive.single_atom_rate * n * rates


def resolve_subradiant(eigenvalues: np.ndarray, lattice: RingLattice,
                       drive: Optional[LaserDrive] = None) -> np.ndarray:
    """Circulant eigenvalues with decay rates below RESOLVE_BELOW·Γ taken from radiative_decay_rates"""
    drive = drive or LaserDrive()
    eigenvalues = np.array(eigenvalues, dtype=complex)
    dark = np.flatnonzero(eigenvalues.real < RESOLVE_BELOW * drive.single_atom_rate)
    if dark.size:
        eigenvalues[dark] = radiative_decay_rates(lattice, drive, dark) + 1j * eigenvalues[dark].imag
        logger.debug("Resolved %d subradiant decay rates, smallest %.3e", dark.size, eigenvalues.real.min())
    return eigenvalues


def clamp_subradiant(eigenvalues: np.ndarray, rate: float = 1.0, floor: Optional[float] = None) -> np.ndarray:
    """
    Raise decay rates below the floor (SUBRADIANT_FLOOR·Γ unless given) so
    that D_m + D_n* never vanishes. Warns once per call when anything is
    clamped.
    """
    eigenvalues = np.array(eigenvalues, dtype=complex)
    floor = SUBRADIANT_FLOOR * rate if floor is None else floor
    dark = eigenvalues.real < floor
    if np.any(dark):
        modes = np.flatnonzero(dark).tolist()
        message = f"Clamping non-decaying collective modes {modes} to Re D = {floor:g}"
        logger.warning(message)
        warnings.warn(message, SubradiantModeWarning, stacklevel=2)
        eigenvalues[dark] = floor + 1j * eigenvalues[dark].imag
    return eigenvalues


def mode_angular_momenta(n_sites: int) -> np.ndarray:
    """Signed winding number of each mode: k for k ≤ N/2, k − N above"""
    k = np.arange(n_sites)
    return np.where(k <= n_sites // 2, k, k - n_sites)


def mode_decay_rates(basis: CollectiveModeBasis, rate: float = 1.0,
                     eigenvalues: Optional[np.ndarray] = None) -> List[Dict]:
    """
    Per-mode decay rate, frequency shift and super/subradiant classification.
    Pass resolved eigenvalues to report subradiant rates beyond FFT precision.
    """
    eigenvalues = basis.eigenvalues if eigenvalues is None else eigenvalues
    rows = []
    for k, (d, l) in enumerate(zip(eigenvalues, mode_angular_momenta(basis.n_modes))):
        decay = float(d.real)
        rows.append({
            "k": k,
            "l": int(l),
            "decay_rate": decay,
            "frequency_shift": float(d.imag),
            "kind": _classify(decay, rate),
        })
    return rows


def _classify(decay: float, rate: float) -> str:
    if math.isclose(decay, rate, rel_tol=1e-12, abs_tol=1e-12):
        return "independent"
    return "superradiant" if decay > rate else "subradiant"
