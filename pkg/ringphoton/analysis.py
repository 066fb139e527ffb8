"""
Map analysis helpers: peak finding, L² distances and azimuthal spread
"""

import math
from typing import List, NamedTuple, Optional

import numpy as np

from .models import Direction, IntensityMap


class Peak(NamedTuple):
    theta: float
    phi: float
    value: float
    theta_index: int
    phi_index: int

    @property
    def direction(self) -> Direction:
        return Direction(theta=self.theta, phi=self.phi)


def local_maxima(intensity: IntensityMap, min_relative: float = 0.0) -> List[Peak]:
    """
    Nodes that dominate their 3×3 neighbourhood, largest first.

    φ is periodic; θ rows at the poles only compare with the row inside.
    NaN nodes never count as maxima and are ignored as neighbours.
    """
    values = intensity.as_grid()
    filled = np.where(np.isnan(values), -np.inf, values)
    n_theta, n_phi = filled.shape

    dominant = np.isfinite(filled)
    for d_theta in (-1, 0, 1):
        for d_phi in (-1, 0, 1):
            if d_theta == 0 and d_phi == 0:
                continue
            shifted = np.roll(filled, -d_phi, axis=1)
            neighbour = np.full_like(filled, -np.inf)
            if d_theta == 0:
                neighbour = shifted
            elif d_theta == 1:
                neighbour[:-1] = shifted[1:]
            else:
                neighbour[1:] = shifted[:-1]
            dominant &= filled >= neighbour

    peak = float(np.nanmax(values)) if np.any(np.isfinite(values)) else 0.0
    thetas, phis = intensity.grid.thetas, intensity.grid.phis
    peaks = [
        Peak(float(thetas[i]), float(phis[j]), float(values[i, j]), int(i), int(j))
        for i, j in zip(*np.nonzero(dominant))
        if values[i, j] >= min_relative * peak
    ]
    return sorted(peaks, key=lambda p: (-p.value, p.theta_index, p.phi_index))


def global_maximum(intensity: IntensityMap, phi_range: Optional[tuple] = None) -> Peak:
    """Largest defined node, optionally restricted to lo ≤ φ < hi"""
    values = intensity.as_grid()
    mask = np.isfinite(values)
    if phi_range is not None:
        lo, hi = phi_range
        phis = intensity.grid.phis
        mask &= ((phis >= lo) & (phis < hi))[None, :]
    if not np.any(mask):
        raise ValueError("No defined nodes in the requested range")
    masked = np.where(mask, values, -np.inf)
    i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
    return Peak(float(intensity.grid.thetas[i]), float(intensity.grid.phis[j]), float(values[i, j]), int(i), int(j))


def angular_distance(first: Direction, second: Direction) -> float:
    """Great-circle angle between two directions"""
    cosine = float(np.dot(first.unit, second.unit))
    return math.acos(max(-1.0, min(1.0, cosine)))


def relative_l2(values, reference, weights=None) -> float:
    """‖values − reference‖ / ‖reference‖ in the (optionally weighted) L² norm"""
    values = np.asarray(values, dtype=float).ravel()
    reference = np.asarray(reference, dtype=float).ravel()
    if values.shape != reference.shape:
        raise ValueError(f"Shapes differ: {values.shape} vs {reference.shape}")
    weights = np.ones_like(reference) if weights is None else np.asarray(weights, dtype=float).ravel()
    norm = math.sqrt(float(np.sum(weights * reference ** 2)))
    if norm == 0.0:
        return 0.0 if np.allclose(values, 0.0) else math.inf
    return math.sqrt(float(np.sum(weights * (values - reference) ** 2))) / norm


def azimuthal_variation(values: np.ndarray) -> float:
    """max over (θ, φ) of |I(θ,φ) − I(θ,φ₀)|, relative to the map maximum"""
    values = np.asarray(values, dtype=float)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(values - values[:, :1]))) / peak
