"""Parameter records and the linear drift generator of the cavity + two-ensemble system.

Modes are always ordered ``(c, A, B)``: the cavity field, then the collective
excitation of the driven (left) ensemble, then the undriven (right) ensemble.
Frequencies and rates are in units of the cavity decay rate unless
``cavity_decay`` is set otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import ConfigError

MODES = ("c", "A", "B")


def _finite(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a real number, got {value!r}", key=name) from None
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}", key=name)
    return value


@dataclass(frozen=True)
class MicroscopicParams:
    """Atom numbers and single-atom couplings before collective bosonization."""

    atom_count_a: int
    atom_count_b: int
    single_atom_coupling_a: float
    single_atom_coupling_b: float
    drive_per_atom: float

    def __post_init__(self):
        for name in ("atom_count_a", "atom_count_b"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}", key=name)
            object.__setattr__(self, name, int(value))
        for name in ("single_atom_coupling_a", "single_atom_coupling_b", "drive_per_atom"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))


@dataclass(frozen=True)
class FrequencySet:
    """Bare mode frequencies and the drive frequency."""

    omega_c: float
    omega_a: float
    omega_b: float
    omega_f: float

    def __post_init__(self):
        for f in fields(self):
            value = _finite(f.name, getattr(self, f.name))
            if value <= 0:
                raise ConfigError(f"{f.name} must be positive, got {value!r}", key=f.name)
            object.__setattr__(self, f.name, value)


@dataclass(frozen=True)
class SystemParams:
    """Effective model in the frame rotating at the drive frequency.

    Couplings are real and non-negative. ``thermal_*`` are the mean thermal
    occupations of the input noise of each mode.
    """

    detuning_cavity: float = 0.0
    detuning_a: float = 0.0
    detuning_b: float = 0.0
    coupling_a: float = 0.0
    coupling_b: float = 0.0
    drive: float = 1.0
    cavity_decay: float = 1.0
    decay_a: float = 0.0
    decay_b: float = 0.0
    thermal_c: float = 0.0
    thermal_a: float = 0.0
    thermal_b: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _finite(f.name, getattr(self, f.name)))
        if self.cavity_decay <= 0:
            raise ConfigError(f"cavity_decay must be > 0, got {self.cavity_decay!r}",
                              key="cavity_decay")
        for name in ("coupling_a", "coupling_b", "drive", "decay_a", "decay_b",
                     "thermal_c", "thermal_a", "thermal_b"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)!r}", key=name)

    @classmethod
    def from_microscopic(cls, micro: MicroscopicParams, **kwargs) -> SystemParams:
        coupling_a, coupling_b, drive = effective_from_microscopic(micro)
        return cls(coupling_a=coupling_a, coupling_b=coupling_b, drive=drive, **kwargs)

    def with_detunings(self, delta: float, degenerate: bool = True) -> SystemParams:
        """Copy with ``detuning_a`` set to ``delta`` (and the others too if degenerate)."""
        if degenerate:
            return replace(self, detuning_a=delta, detuning_b=delta, detuning_cavity=delta)
        return replace(self, detuning_a=delta)

    def swapped(self) -> SystemParams:
        """Exchange the roles of the two ensembles (node/antinode relabelling)."""
        return replace(
            self,
            detuning_a=self.detuning_b, detuning_b=self.detuning_a,
            coupling_a=self.coupling_b, coupling_b=self.coupling_a,
            decay_a=self.decay_b, decay_b=self.decay_a,
            thermal_a=self.thermal_b, thermal_b=self.thermal_a,
        )

    @property
    def noise_rates(self) -> np.ndarray:
        return np.array([self.cavity_decay, self.decay_a, self.decay_b])

    @property
    def noise_weights(self) -> np.ndarray:
        return np.array([self.thermal_c + 1.0, self.thermal_a + 1.0, self.thermal_b + 1.0])


def _frozen(array):
    array = np.array(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DriftMatrix:
    """Generator ``M`` of ``dx/dt = M x + drive_vector + noise`` for ``x = (c, A, B)``."""

    generator: np.ndarray
    noise_rates: np.ndarray
    noise_weights: np.ndarray
    drive_vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _frozen(getattr(self, f.name)))

    @property
    def noise_amplitudes(self) -> np.ndarray:
        """Diagonal of the noise input matrix, ``sqrt`` of the decay rates."""
        return np.sqrt(self.noise_rates)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.generator)


def effective_from_microscopic(micro: MicroscopicParams) -> tuple[float, float, float]:
    """Collective couplings ``(G_A, G_B, chi)`` from atom numbers and single-atom couplings."""
    root_a = math.sqrt(micro.atom_count_a)
    root_b = math.sqrt(micro.atom_count_b)
    return (root_a * micro.single_atom_coupling_a,
            root_b * micro.single_atom_coupling_b,
            root_a * micro.drive_per_atom)


def detunings(freqs: FrequencySet) -> tuple[float, float, float]:
    """Mode detunings from the drive, ``(delta_c, delta_a, delta_b)``."""
    return (freqs.omega_c - freqs.omega_f,
            freqs.omega_a - freqs.omega_f,
            freqs.omega_b - freqs.omega_f)


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation ``1/(exp(omega/T) - 1)``; exactly zero at ``T = 0``."""
    omega = float(omega)
    temperature = float(temperature)
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    # exp(-x) / (1 - exp(-x)) stays finite for large x
    return math.exp(-x) / -math.expm1(-x)


def drift_matrix(params: SystemParams) -> DriftMatrix:
    """Build the 3x3 drift generator; the two ensembles talk only through the cavity."""
    p = params
    ga, gb = p.coupling_a, p.coupling_b
    generator = np.array([
        [-1j * p.detuning_cavity - p.cavity_decay / 2, -1j * ga, -1j * gb],
        [-1j * ga, -1j * p.detuning_a - p.decay_a / 2, 0.0],
        [-1j * gb, 0.0, -1j * p.detuning_b - p.decay_b / 2],
    ], dtype=complex)
    return DriftMatrix(
        generator=generator,
        noise_rates=p.noise_rates,
        noise_weights=p.noise_weights,
        drive_vector=np.array([0.0, -1j * p.drive, 0.0]),
    )
