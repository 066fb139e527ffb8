"""
Experiment simulator
Runs one ExperimentConfig end to end and returns a plot-ready Dataset
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from . import UNITS, __version__
from .analysis import azimuthal_variation, global_maximum, relative_l2
from .atomic_states import overlap_table, pair_state, spin_wave
from .dipole_kernel import (
    build_decay_matrix, circulant_modes, degree_of_collectivity,
    dense_eigenvalues, eigenvalue_mismatch, mode_decay_rates, resolve_subradiant,
)
from .emission import (
    EmissionKernel, bessel_values, g2_map, intensity_map, pair_intensity_map, perpendicular_map,
)
from .errors import ConfigurationError
from .geometry import build_angular_grid, build_ring
from .models import Dataset, ExperimentConfig, IntensityMap
from .oracle import mode_grid_for, oracle_single_intensity
from .registry import get_experiment

logger = logging.getLogger(__name__)

MAP_COLUMNS = ["theta", "phi", "value"]


class ExperimentSimulator:
    """Builds the lattice, kernel and grid for a configuration and runs its command"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.lattice = build_ring(config.n_sites, config.spacing)
        self.drive = config.drive
        self.grid = build_angular_grid(*config.grid)
        self._kernel: Optional[EmissionKernel] = None

    @property
    def kernel(self) -> EmissionKernel:
        if self._kernel is None:
            self._kernel = EmissionKernel(self.lattice, self.drive)
        return self._kernel

    def run(self) -> Dataset:
        method = getattr(self, get_experiment(self.config.command))
        logger.info("Running %s for N=%d, a=%g", self.config.command.value, self.config.n_sites, self.config.spacing)
        return method()

    # Metadata

    def base_metadata(self) -> Dict[str, Any]:
        metadata = self.config.model_dump(mode="json")
        metadata.update({
            "units": UNITS,
            "version": __version__,
            "radius": self.lattice.radius,
        })
        return metadata

    def map_dataset(self, intensity: IntensityMap, **extra) -> Dataset:
        rows = [
            [float(t), float(p), None if np.isnan(v) else float(v)]
            for t, p, v in zip(intensity.grid.theta, intensity.grid.phi, intensity.values)
        ]
        metadata = self.base_metadata()
        metadata.update(intensity.metadata)
        metadata.update(extra)
        return Dataset(columns=MAP_COLUMNS, rows=rows, metadata=metadata)

    # Experiments

    def run_intensity(self) -> Dataset:
        wave = spin_wave(self.config.n_sites, self.config.l)
        intensity = intensity_map(self.kernel, self.grid, wave, self.config.workers)
        logger.info("Single-photon intensity integrates to %.8f", intensity.total)
        return self.map_dataset(intensity)

    def run_intensity_perp(self) -> Dataset:
        if not self.drive.is_perpendicular:
            raise ConfigurationError(
                f"intensity-perp needs the laser along the ring axis (theta_l = 0 or pi), got {self.config.theta_l}"
            )
        intensity = perpendicular_map(self.kernel, self.grid, self.config.workers)
        bessel = bessel_values(self.lattice, self.kernel.basis, self.grid.theta, self.drive)
        return self.map_dataset(
            intensity,
            azimuthal_variation=azimuthal_variation(intensity.as_grid()),
            bessel_relative_l2=relative_l2(bessel, intensity.values, self.grid.weights),
        )

    def run_pair_intensity(self) -> Dataset:
        psi = pair_state(self.config.n_sites, self.config.p)
        intensity = pair_intensity_map(self.kernel, psi, self.grid, self.config.workers)
        logger.info("Pair intensity integrates to %.8f", intensity.total)
        return self.map_dataset(intensity)

    def run_g2_map(self) -> Dataset:
        psi = pair_state(self.config.n_sites, self.config.p)
        reference = self.config.reference
        if reference is None:
            # First photon detected at the pair-intensity maximum
            peak = global_maximum(pair_intensity_map(self.kernel, psi, self.grid, self.config.workers))
            reference = peak.direction
            logger.info("Reference direction from intensity maximum: (%.4f, %.4f)", reference.theta, reference.phi)
        correlation = g2_map(self.kernel, psi, self.grid, reference, self.config.workers)
        return self.map_dataset(correlation)

    def run_overlaps(self) -> Dataset:
        ps = [p for p in self.config.ps if 1 <= p <= self.config.n_sites // 2]
        skipped = sorted(set(self.config.ps) - set(ps))
        if skipped:
            logger.warning("Skipping p values outside 1..%d: %s", self.config.n_sites // 2, skipped)
        if not ps:
            raise ConfigurationError(f"No valid p values for N={self.config.n_sites}")
        table = overlap_table(self.config.n_sites, ps)
        columns = ["p", "l", "xi_real", "xi_imag", "weight"]
        rows = [[row[c] for c in columns] for row in table]
        completeness = {
            str(p): sum(row["weight"] for row in table if row["p"] == p) for p in ps
        }
        metadata = self.base_metadata()
        metadata.update({"observable": "overlaps", "completeness": completeness})
        return Dataset(columns=columns, rows=rows, metadata=metadata)

    def run_modes(self) -> Dataset:
        decay = build_decay_matrix(self.lattice, self.drive)
        basis = circulant_modes(decay)
        resolved = resolve_subradiant(basis.eigenvalues, self.lattice, self.drive)
        table = mode_decay_rates(basis, self.drive.single_atom_rate, resolved)
        columns = ["k", "l", "decay_rate", "frequency_shift", "kind"]
        rows = [[row[c] for c in columns] for row in table]
        metadata = self.base_metadata()
        metadata.update({
            "observable": "modes",
            "gamma_col": degree_of_collectivity(basis),
            "slowest_decay_rate": float(resolved.real.min()),
            "dense_mismatch": eigenvalue_mismatch(basis.eigenvalues, dense_eigenvalues(decay)),
        })
        return Dataset(columns=columns, rows=rows, metadata=metadata)

    def run_oracle_check(self) -> Dataset:
        wave = spin_wave(self.config.n_sites, self.config.l)
        closed = intensity_map(self.kernel, self.grid, wave, self.config.workers)
        mode_grid = mode_grid_for(self.lattice, self.drive, self.grid,
                                  self.config.bandwidth_factor, self.config.n_frequencies)
        brute = oracle_single_intensity(self.lattice, self.drive, wave, mode_grid)

        error = relative_l2(brute.values, closed.values, self.grid.weights)
        passed = error <= self.config.tolerance
        logger.info("Oracle relative L2 deviation %.4e (%s)", error, "pass" if passed else "FAIL")

        rows: List[List[Any]] = [
            [float(t), float(p), float(c), float(b)]
            for t, p, c, b in zip(self.grid.theta, self.grid.phi, closed.values, brute.values)
        ]
        metadata = self.base_metadata()
        metadata.update({
            "observable": "oracle_check",
            "gamma_col": self.kernel.gamma_col,
            "total": closed.total,
            "oracle_total": brute.total,
            "bandwidth": mode_grid.bandwidth,
            "relative_l2": error,
            "passed": passed,
        })
        return Dataset(columns=["theta", "phi", "closed_form", "oracle"], rows=rows, metadata=metadata)
