"""
Pydantic models for the ring-lattice emission library
Defines the geometry, coupling, atomic-state and output data structures
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi


def _frozen_array(value, dtype=None) -> np.ndarray:
    array = np.array(value, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class ArrayModel(BaseModel):
    """Immutable model that may carry numpy arrays"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# Geometry

class Direction(BaseModel):
    """Emission or laser direction in spherical coordinates"""
    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., ge=0.0, le=math.pi, description="Polar angle")
    phi: float = Field(0.0, description="Azimuthal angle, wrapped into [0, 2π)")

    @field_validator("phi")
    @classmethod
    def wrap_phi(cls, value: float) -> float:
        wrapped = math.fmod(value, TWO_PI)
        if wrapped < 0.0:
            wrapped += TWO_PI
        # fmod can return exactly 2π after the shift for tiny negatives
        return 0.0 if wrapped >= TWO_PI else wrapped

    @property
    def unit(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


class RingLattice(ArrayModel):
    """N atoms on a ring in the xy-plane"""
    n_sites: int = Field(..., ge=1, description="Number of atoms N")
    spacing: float = Field(..., gt=0.0, description="Arc-length spacing a in units of λ_L")
    radius: float = Field(..., gt=0.0, description="Ring radius R = aN/2π")
    angles: np.ndarray = Field(..., description="Site angles φ_α = 2πα/N, α = 0..N-1")
    positions: np.ndarray = Field(..., description="Site positions, shape (N, 3)")

    @field_validator("angles", "positions")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=float)


class AngularGrid(ArrayModel):
    """Product quadrature over the unit sphere, theta-major node order"""
    n_theta: int = Field(..., ge=2)
    n_phi: int = Field(..., ge=4)
    thetas: np.ndarray = Field(..., description="Polar nodes, ascending, shape (n_theta,)")
    phis: np.ndarray = Field(..., description="Azimuthal nodes 2πj/n_phi, shape (n_phi,)")
    theta: np.ndarray = Field(..., description="Polar angle per node, flattened")
    phi: np.ndarray = Field(..., description="Azimuthal angle per node, flattened")
    weights: np.ndarray = Field(..., description="Solid-angle weights per node, sum 4π")

    @field_validator("thetas", "phis", "theta", "phi", "weights")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=float)

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_theta, self.n_phi)

    @property
    def unit_vectors(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.stack([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)], axis=-1)

    @property
    def nodes(self) -> List[Direction]:
        return [Direction(theta=float(t), phi=float(p)) for t, p in zip(self.theta, self.phi)]

    def integrate(self, values) -> float:
        """Quadrature of node values over the full solid angle"""
        values = np.asarray(values)
        if values.shape != (self.size,):
            values = values.reshape(self.size)
        return float(np.sum(self.weights * values))


# Coupling

class LaserDrive(BaseModel):
    """Classical drive that maps the stored excitations into photons"""
    model_config = ConfigDict(frozen=True)

    direction: Direction = Field(default_factory=lambda: Direction(theta=0.0, phi=0.0),
                                 description="Direction (θ_L, φ_L) of k_L")
    wavenumber: float = Field(TWO_PI, gt=0.0, description="k_L, 2π in units of 1/λ_L")
    single_atom_rate: float = Field(1.0, gt=0.0, description="Single-atom decay rate Γ")

    @property
    def wavevector(self) -> np.ndarray:
        return self.wavenumber * self.direction.unit

    @property
    def is_perpendicular(self) -> bool:
        return math.sin(self.direction.theta) < 1e-12


class DecayMatrix(ArrayModel):
    """Dissipative (gamma) and coherent (omega) pair couplings"""
    gamma: np.ndarray = Field(..., description="Real symmetric N×N, units of Γ")
    omega: np.ndarray = Field(..., description="Real symmetric N×N, units of Γ")

    @field_validator("gamma", "omega")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=float)

    @property
    def j(self) -> np.ndarray:
        return self.gamma + 1j * self.omega

    @property
    def n_sites(self) -> int:
        return self.gamma.shape[0]


class CollectiveModeBasis(ArrayModel):
    """Eigenvectors M and eigenvalues D_k of the collective decay matrix"""
    vectors: np.ndarray = Field(..., description="Columns are the collective modes")
    eigenvalues: np.ndarray = Field(..., description="Complex eigenvalues D_k")
    inverse: np.ndarray = Field(..., description="M⁻¹; equals M† for the circulant basis")

    @field_validator("vectors", "eigenvalues", "inverse")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=complex)

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.shape[0]


# Atomic states

class AmplitudeLabel(str, Enum):
    """Origin of a two-excitation amplitude"""
    PAIR = "pair"        # ψ^(p) prepared in the weak-blockade regime
    MODE = "mode"        # Ξ_l opposite angular-momentum pair
    GENERIC = "generic"


class SpinWave(ArrayModel):
    """Single delocalized excitation"""
    amplitudes: np.ndarray = Field(..., description="Complex site amplitudes, unit norm")
    angular_momentum: int = Field(0, description="Phase winding l of the amplitudes")

    @field_validator("amplitudes")
    @classmethod
    def check_norm(cls, value):
        value = _frozen_array(value, dtype=complex)
        norm = float(np.sum(np.abs(value) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Spin wave must be normalized, got norm {norm}")
        return value

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]


class TwoExcitationAmplitude(ArrayModel):
    """Symmetric amplitude ψ_kk' of a doubly excited state"""
    psi: np.ndarray = Field(..., description="Complex symmetric N×N amplitude")
    label: AmplitudeLabel = Field(AmplitudeLabel.GENERIC)
    index: Optional[int] = Field(None, description="p for pair states, l for modes")

    @field_validator("psi")
    @classmethod
    def check_symmetric(cls, value):
        value = _frozen_array(value, dtype=complex)
        if value.ndim != 2 or value.shape[0] != value.shape[1]:
            raise ValueError(f"Amplitude must be square, got shape {value.shape}")
        if not np.array_equal(value, value.T):
            raise ValueError("Two-excitation amplitude must be symmetric")
        return value

    @property
    def n_sites(self) -> int:
        return self.psi.shape[0]


class PreparationParams(BaseModel):
    """Rydberg excitation parameters used to prepare the resource states"""
    model_config = ConfigDict(frozen=True)

    c6: float = Field(..., gt=0.0, description="van-der-Waals coefficient C₆")
    rabi_gr: float = Field(..., gt=0.0, description="Single-atom Rabi frequency Ω_gr")


# Outputs

class IntensityMap(ArrayModel):
    """Angular photon density on a quadrature grid"""
    grid: AngularGrid
    values: np.ndarray = Field(..., description="Node values, theta-major; NaN marks undefined nodes")
    total: float = Field(..., description="Quadrature of the defined values")
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=float)

    def as_grid(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


class ModeGrid(ArrayModel):
    """Explicit photon modes: directions × detunings × two polarizations"""
    directions: AngularGrid
    bandwidth: float = Field(..., gt=0.0, description="Half band W around ω_L, units of Γ")
    resolution: float = Field(..., gt=0.0, description="Narrowest resolved linewidth s")
    frequencies: np.ndarray = Field(..., description="Detunings ω - ω_L in [-W, W]")
    frequency_weights: np.ndarray = Field(..., description="Quadrature weights, sum 2W")
    polarizations: np.ndarray = Field(..., description="Shape (n_dir, 2, 3): orthonormal transverse pair per direction, θ̂ and φ̂ by default")

    @field_validator("frequencies", "frequency_weights", "polarizations")
    @classmethod
    def freeze(cls, value):
        return _frozen_array(value, dtype=float)


class PhotonMode(BaseModel):
    """A single field mode (q, λ) addressed by direction, detuning and polarization"""
    model_config = ConfigDict(frozen=True)

    direction: Direction
    detuning: float = Field(0.0, description="ω_q - ω_L in units of Γ")
    polarization: int = Field(0, ge=0, le=1, description="0: θ̂, 1: φ̂")


# Experiment configuration

class Command(str, Enum):
    """Experiments the CLI can run"""
    INTENSITY = "intensity"
    INTENSITY_PERP = "intensity-perp"
    PAIR_INTENSITY = "pair-intensity"
    G2_MAP = "g2-map"
    OVERLAPS = "overlaps"
    MODES = "modes"
    ORACLE_CHECK = "oracle-check"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


PAIR_COMMANDS = {Command.PAIR_INTENSITY, Command.G2_MAP}


class ExperimentConfig(BaseModel):
    """Complete run configuration - every parameter is written to the output metadata"""
    command: Command = Field(..., description="Experiment to run")
    n_sites: int = Field(15, ge=1, le=200, description="Number of atoms N")
    spacing: float = Field(1.0, gt=0.0, le=10.0, description="Lattice spacing a in units of λ_L")
    theta_l: float = Field(0.0, ge=0.0, le=math.pi, description="Laser polar angle θ_L")
    phi_l: float = Field(0.0, description="Laser azimuthal angle φ_L")
    p: int = Field(1, ge=1, description="Pair-state label p")
    l: int = Field(0, ge=0, description="Spin-wave angular momentum for intensity commands")
    grid: Tuple[int, int] = Field((64, 64), description="(n_theta, n_phi) quadrature sizes")
    ref_theta: Optional[float] = Field(None, ge=0.0, le=math.pi, description="First-photon polar angle")
    ref_phi: Optional[float] = Field(None, description="First-photon azimuthal angle")
    ps: List[int] = Field(default_factory=lambda: [1, 5, 10], description="p values for the overlaps table")
    out: Optional[str] = Field(None, description="Output path")
    format: OutputFormat = Field(OutputFormat.CSV, description="Output format")
    tolerance: float = Field(0.02, gt=0.0, description="Relative L² tolerance of the golden check")
    bandwidth_factor: float = Field(200.0, ge=50.0, description="Oracle band W in units of Γ_col")
    n_frequencies: int = Field(400, ge=16, description="Oracle frequency nodes")
    workers: int = Field(1, ge=1, le=64, description="Threads for grid evaluation")

    @field_validator("phi_l", "ref_phi")
    @classmethod
    def wrap_angle(cls, value):
        if value is None:
            return value
        return Direction(theta=0.0, phi=value).phi

    @field_validator("grid")
    @classmethod
    def check_grid(cls, value):
        n_theta, n_phi = value
        if n_theta < 2 or n_phi < 4:
            raise ValueError(f"grid must be at least (2, 4), got {tuple(value)}")
        return value

    @model_validator(mode="after")
    def check_consistency(self):
        if self.command in PAIR_COMMANDS:
            if self.n_sites < 2:
                raise ValueError("pair commands need at least two sites")
            if self.p > self.n_sites // 2:
                raise ValueError(f"p must lie in 1..{self.n_sites // 2} for N={self.n_sites}")
        if (self.ref_theta is None) != (self.ref_phi is None):
            raise ValueError("ref_theta and ref_phi must be given together")
        if self.l >= max(self.n_sites, 1) and self.l != 0:
            raise ValueError(f"l must lie in 0..{self.n_sites - 1}")
        return self

    @property
    def drive(self) -> LaserDrive:
        return LaserDrive(direction=Direction(theta=self.theta_l, phi=self.phi_l))

    @property
    def reference(self) -> Optional[Direction]:
        if self.ref_theta is None:
            return None
        return Direction(theta=self.ref_theta, phi=self.ref_phi)


# Datasets

class Dataset(BaseModel):
    """Tabular experiment output with a self-describing metadata block"""
    columns: List[str] = Field(..., min_length=1)
    rows: List[List[Any]] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_widths(self):
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"Row {index} has {len(row)} values, expected {width}")
        return self

    @property
    def is_map(self) -> bool:
        return self.columns[:2] == ["theta", "phi"]

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


class WorstNode(BaseModel):
    index: int
    label: str = Field(..., description="theta/phi or row key of the node")
    value: Optional[float]
    reference: Optional[float]
    deviation: float


class GoldenReport(BaseModel):
    """Outcome of comparing a dataset against a stored reference"""
    passed: bool
    error: float = Field(..., ge=0.0, description="Relative L² deviation")
    tolerance: float
    resampled: bool = False
    compared_nodes: int
    worst_nodes: List[WorstNode] = Field(default_factory=list)
