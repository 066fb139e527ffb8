"""
Atomic resource states in the low-excitation (bosonic) picture: spin waves,
Rydberg-prepared pair states ψ^(p), opposite angular-momentum pairs Ξ_l and
their overlaps, plus the scalar preparation formulas.
"""

import logging
import math
from typing import Dict, Iterable, List, Tuple

import numpy as np

from .errors import ShapeMismatchError
from .models import AmplitudeLabel, PreparationParams, SpinWave, TwoExcitationAmplitude

logger = logging.getLogger(__name__)


def _site_angles(n_sites: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_sites) / n_sites


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def spin_wave(n_sites: int, angular_momentum: int = 0) -> SpinWave:
    """Single excitation e^{ilφ_α}/√N; l = 0 is the uniform spin wave"""
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    amplitudes = np.exp(1j * angular_momentum * _site_angles(n_sites)) / math.sqrt(n_sites)
    # Renormalize away the last-bit drift of the exponentials
    amplitudes /= np.linalg.norm(amplitudes)
    return SpinWave(amplitudes=amplitudes, angular_momentum=angular_momentum)


def pair_state(n_sites: int, p: int) -> TwoExcitationAmplitude:
    """ψ^(p)_kk' = (1/N) sin[(2π/N)(p − ½)|k − k'|]"""
    if not 1 <= p <= n_sites // 2:
        raise ValueError(f"p must lie in 1..{n_sites // 2} for N={n_sites}, got {p}")
    index = np.arange(n_sites)
    separation = np.abs(index[:, None] - index[None, :])
    psi = np.sin(2.0 * np.pi * (p - 0.5) * separation / n_sites) / n_sites
    return TwoExcitationAmplitude(psi=psi.astype(complex), label=AmplitudeLabel.PAIR, index=p)


def momentum_mode_pair(n_sites: int, l: int) -> TwoExcitationAmplitude:
    """
    Ξ_l: one boson in the +l spin wave and one in the −l spin wave.

    The symmetrized product of e^{±ilφ} is proportional to cos[l(φ_k − φ_k')],
    which is used directly so that the amplitude is real. At l = 0 and
    l = N/2 both bosons occupy the same spin wave and the amplitude picks up
    the extra 1/√2.
    """
    if not 0 <= l <= n_sites // 2:
        raise ValueError(f"l must lie in 0..{n_sites // 2} for N={n_sites}, got {l}")
    angles = _site_angles(n_sites)
    degenerate = l == 0 or 2 * l == n_sites
    scale = n_sites * math.sqrt(2.0 if degenerate else 1.0)
    psi = np.cos(l * (angles[:, None] - angles[None, :])) / scale
    return TwoExcitationAmplitude(psi=_symmetrize(psi).astype(complex), label=AmplitudeLabel.MODE, index=l)


def product_pair(wave: SpinWave) -> TwoExcitationAmplitude:
    """Both excitations in the same spin wave: ψ = u uᵀ/√2"""
    u = wave.amplitudes
    psi = np.outer(u, u) / math.sqrt(2.0)
    return TwoExcitationAmplitude(psi=_symmetrize(psi), label=AmplitudeLabel.GENERIC)


def bosonic_overlap(a: TwoExcitationAmplitude, b: TwoExcitationAmplitude) -> complex:
    """⟨a|b⟩ = 2 Σ_kk' conj(a_kk') b_kk' for symmetric two-boson amplitudes"""
    if a.psi.shape != b.psi.shape:
        raise ShapeMismatchError(f"Amplitudes act on different lattices: {a.psi.shape} vs {b.psi.shape}")
    return complex(2.0 * np.vdot(a.psi, b.psi))


def bosonic_norm(amplitude: TwoExcitationAmplitude) -> float:
    return bosonic_overlap(amplitude, amplitude).real


def overlap_spectrum(n_sites: int, p: int) -> np.ndarray:
    """ξ_pl = ⟨Ξ_l|ψ^(p)⟩ for l = 0..⌊N/2⌋"""
    state = pair_state(n_sites, p)
    return np.array([
        bosonic_overlap(momentum_mode_pair(n_sites, l), state)
        for l in range(n_sites // 2 + 1)
    ])


def overlap_table(n_sites: int, ps: Iterable[int]) -> List[Dict]:
    """Rows (p, l, ξ) with the weight |ξ|² and the completeness sum per p"""
    rows = []
    for p in ps:
        spectrum = overlap_spectrum(n_sites, p)
        completeness = float(np.sum(np.abs(spectrum) ** 2))
        if abs(completeness - 1.0) > 1e-8:
            logger.warning("Ξ_l expansion of p=%d is incomplete: Σ|ξ|² = %.10f", p, completeness)
        for l, xi in enumerate(spectrum):
            rows.append({
                "p": p,
                "l": l,
                "xi_real": float(xi.real),
                "xi_imag": float(xi.imag),
                "weight": float(abs(xi) ** 2),
            })
    return rows


def blockade_radius(params: PreparationParams) -> float:
    """r_b = (C₆/Ω_gr)^{1/6}"""
    return (params.c6 / params.rabi_gr) ** (1.0 / 6.0)


def collective_rabi(params: PreparationParams, n_sites: int) -> Tuple[float, float]:
    """Collective Rabi frequency √N·Ω_gr and the π-pulse duration"""
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    rabi = math.sqrt(n_sites) * params.rabi_gr
    return rabi, math.pi / rabi
