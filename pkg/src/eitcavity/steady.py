"""Driven steady state: closed forms, a direct linear solve, and detuning sweeps."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import LowExcitationWarning, SingularParametersError
from .linsolve import solve_pivoted
from .model import SystemParams, drift_matrix

DEFAULT_GRID = (-100.0, 100.0, 2001)


@dataclass(frozen=True)
class SteadyState:
    amp_c: complex
    amp_a: complex
    amp_b: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.amp_c, self.amp_a, self.amp_b])

    @property
    def intensities(self) -> tuple[float, float, float]:
        return abs(self.amp_c) ** 2, abs(self.amp_a) ** 2, abs(self.amp_b) ** 2


@dataclass(frozen=True)
class EffectiveCavity0:
    """Cavity dressed by both ensembles at zero fluctuation frequency."""

    detuning_eff: float
    decay_eff: float
    f_a: complex
    f_b: complex
    drive_factor: complex

    @property
    def denominator(self) -> complex:
        return self.detuning_eff - 0.5j * self.decay_eff


@dataclass(frozen=True)
class ResponseCurve:
    grid: np.ndarray
    intensity_a: np.ndarray
    intensity_b: np.ndarray
    intensity_c: np.ndarray
    params: SystemParams
    degenerate: bool = True

    def channel(self, name: str) -> np.ndarray:
        key = name.lower().removeprefix("intensity_")
        try:
            return {"a": self.intensity_a, "b": self.intensity_b, "c": self.intensity_c}[key]
        except KeyError:
            raise KeyError(f"unknown response channel {name!r}") from None


def _closed_form(p, delta_c, delta_a, delta_b):
    """Array-friendly closed forms; returns (f_a, f_b, det_eff, kappa_eff, F_A, c, A, B)."""
    den_a = delta_a - 0.5j * p.decay_a
    den_b = delta_b - 0.5j * p.decay_b
    f_a = p.coupling_a / den_a
    f_b = p.coupling_b / den_b
    lor_a = delta_a ** 2 + p.decay_a ** 2 / 4
    lor_b = delta_b ** 2 + p.decay_b ** 2 / 4
    kappa_eff = p.cavity_decay + p.coupling_a ** 2 * p.decay_a / lor_a \
        + p.coupling_b ** 2 * p.decay_b / lor_b
    det_eff = delta_c - p.coupling_a ** 2 * delta_a / lor_a - p.coupling_b ** 2 * delta_b / lor_b
    cav = det_eff - 0.5j * kappa_eff
    drive_factor = 1 + p.coupling_a * f_a / cav
    amp_a = -p.drive * drive_factor / den_a
    amp_c = p.drive * f_a / cav
    # the fixed point of the Langevin equations gives B = -f_b c
    amp_b = -p.drive * f_a * f_b / cav
    return f_a, f_b, det_eff, kappa_eff, drive_factor, amp_c, amp_a, amp_b


def _check_regular(params):
    if params.detuning_a == 0 and params.decay_a == 0:
        raise SingularParametersError("ensemble A is undamped and exactly on resonance")
    if params.detuning_b == 0 and params.decay_b == 0:
        raise SingularParametersError("ensemble B is undamped and exactly on resonance")


def susceptibilities(params: SystemParams) -> tuple[complex, complex]:
    """Ensemble susceptibilities ``f = G / (delta - i gamma/2)`` for A and B."""
    _check_regular(params)
    p = params
    return (complex(p.coupling_a / (p.detuning_a - 0.5j * p.decay_a)),
            complex(p.coupling_b / (p.detuning_b - 0.5j * p.decay_b)))


def effective_cavity_zero(params: SystemParams) -> EffectiveCavity0:
    _check_regular(params)
    p = params
    f_a, f_b, det_eff, kappa_eff, drive_factor, *_ = _closed_form(
        p, p.detuning_cavity, p.detuning_a, p.detuning_b)
    return EffectiveCavity0(float(det_eff), float(kappa_eff), complex(f_a), complex(f_b),
                            complex(drive_factor))


def check_low_excitation(state: SteadyState, atom_count_a=None, atom_count_b=None,
                         fraction: float = 0.1) -> None:
    """Warn when a mean excitation number is not small against the atom count."""
    for label, amp, count in (("A", state.amp_a, atom_count_a), ("B", state.amp_b, atom_count_b)):
        if count is not None and abs(amp) ** 2 > fraction * count:
            warnings.warn(
                f"|{label}_s|^2 = {abs(amp) ** 2:.3g} exceeds {fraction:g} of the atom "
                f"number {count}; the bosonized model is not reliable here",
                LowExcitationWarning, stacklevel=3)


def steady_state_analytic(params: SystemParams, atom_count_a=None, atom_count_b=None,
                          fraction: float = 0.1) -> SteadyState:
    """Steady-state amplitudes from the closed-form solution.

    Passing ``atom_count_a``/``atom_count_b`` enables the low-excitation check.
    """
    _check_regular(params)
    p = params
    *_, amp_c, amp_a, amp_b = _closed_form(p, p.detuning_cavity, p.detuning_a, p.detuning_b)
    state = SteadyState(complex(amp_c), complex(amp_a), complex(amp_b))
    check_low_excitation(state, atom_count_a, atom_count_b, fraction)
    return state


def steady_state_numeric(params: SystemParams, atom_count_a=None, atom_count_b=None,
                         fraction: float = 0.1) -> SteadyState:
    """Fixed point of the mean-field equations, ``M x = -drive``, by pivoted elimination."""
    drift = drift_matrix(params)
    x, _ = solve_pivoted(drift.generator, -drift.drive_vector)
    state = SteadyState(complex(x[0]), complex(x[1]), complex(x[2]))
    check_low_excitation(state, atom_count_a, atom_count_b, fraction)
    return state


def uniform_grid(start: float, stop: float, count: int) -> np.ndarray:
    return np.linspace(start, stop, int(count))


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def response_sweep(params: SystemParams, grid=None, degenerate: bool = True) -> ResponseCurve:
    """Response intensities ``|c_s|^2, |A_s|^2, |B_s|^2`` against drive detuning.

    Each grid value sets ``detuning_a`` (and, if ``degenerate``, also the cavity and
    ``B`` detunings). Singular grid points are returned as NaN.
    """
    grid = _check_grid(uniform_grid(*DEFAULT_GRID) if grid is None else grid)
    p = params
    delta_a = grid
    delta_b = grid if degenerate else np.full_like(grid, p.detuning_b)
    delta_c = grid if degenerate else np.full_like(grid, p.detuning_cavity)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        *_, amp_c, amp_a, amp_b = _closed_form(p, delta_c, delta_a, delta_b)
        out = [np.abs(np.broadcast_to(v, grid.shape)) ** 2 for v in (amp_a, amp_b, amp_c)]
    singular = ((delta_a == 0) & (p.decay_a == 0)) | ((delta_b == 0) & (p.decay_b == 0))
    for values in out:
        values[singular | ~np.isfinite(values)] = np.nan
    return ResponseCurve(grid, out[0], out[1], out[2], params, degenerate)
