"""Stochastic check of the fluctuation spectra.

The linearized fluctuation equations are linear with additive noise, so their
classical complex SDE counterpart ``dx = M x dt + F dW`` has exactly the
second moments of the quantum (anti-normally ordered) problem. Trajectories
are integrated with Euler-Maruyama and spectra estimated from averaged
periodograms.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.signal import CZT

from .errors import ConfigError, IntegrationDivergedError
from .model import SystemParams, drift_matrix
from .spectra import SpectrumCurve
from .steady import _check_grid

THREADS_ENV = "EITCAVITY_THREADS"
DIVERGENCE_FACTOR = 1e12
_CHUNK = 1 << 16
TAPERS = ("rect", "hann")


@dataclass(frozen=True)
class SimulationConfig:
    """Integration and estimator settings. Times are in units of ``1/kappa``.

    ``segments`` splits each post-burn-in record into that many contiguous
    windows whose periodograms are averaged (``1`` = one window per trajectory).
    """

    time_step: float
    duration: float
    burn_in: float = 0.0
    trajectory_count: int = 1
    seed: int = 0
    segments: int = 1
    taper: str = "rect"

    def __post_init__(self):
        for name in ("time_step", "duration", "burn_in"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite", key=name)
            object.__setattr__(self, name, value)
        if self.time_step <= 0:
            raise ConfigError("time_step must be > 0", key="time_step")
        if self.duration <= 0:
            raise ConfigError("duration must be > 0", key="duration")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0", key="burn_in")
        for name, low, high in (("trajectory_count", 1, None), ("segments", 1, None),
                                ("seed", 0, 2 ** 64 - 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < low \
                    or (high is not None and value > high):
                raise ConfigError(f"{name} must be an integer in range, got {value!r}", key=name)
            object.__setattr__(self, name, int(value))
        if self.taper not in TAPERS:
            raise ConfigError(f"taper must be one of {TAPERS}", key="taper")
        if self.kept_steps < self.segments:
            raise ConfigError("duration is shorter than one step per segment", key="duration")

    @property
    def burn_steps(self) -> int:
        return int(round(self.burn_in / self.time_step))

    @property
    def kept_steps(self) -> int:
        return int(round(self.duration / self.time_step))

    @property
    def segment_steps(self) -> int:
        return self.kept_steps // self.segments


@dataclass(frozen=True)
class TrajectorySamples:
    times: np.ndarray
    values: np.ndarray  # shape (n, 3), modes (c, A, B)

    @property
    def c(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def a(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def b(self) -> np.ndarray:
        return self.values[:, 2]


@njit(cache=True, nogil=True)
def _euler_maruyama(m, x, kicks, out, dt):
    """Record ``x`` then advance one step, for every row of ``kicks``. Returns final ``x``."""
    x0, x1, x2 = x[0], x[1], x[2]
    record = out.shape[0] > 0
    for k in range(kicks.shape[0]):
        if record:
            out[k, 0] = x0
            out[k, 1] = x1
            out[k, 2] = x2
        y0 = x0 + dt * (m[0, 0] * x0 + m[0, 1] * x1 + m[0, 2] * x2) + kicks[k, 0]
        y1 = x1 + dt * (m[1, 0] * x0 + m[1, 1] * x1 + m[1, 2] * x2) + kicks[k, 1]
        y2 = x2 + dt * (m[2, 0] * x0 + m[2, 1] * x1 + m[2, 2] * x2) + kicks[k, 2]
        x0, x1, x2 = y0, y1, y2
    res = np.empty(3, dtype=np.complex128)
    res[0] = x0
    res[1] = x1
    res[2] = x2
    return res


def _generator(seed: int, trajectory_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(seed, spawn_key=(int(trajectory_index),))
    return np.random.Generator(np.random.Philox(seq))


def _stable_rates(params):
    eig = drift_matrix(params).eigenvalues()
    return -eig.real, np.abs(eig)


def simulation_warnings(params: SystemParams, config: SimulationConfig) -> list[str]:
    """Advisory checks of step size and record length against the system's time scales."""
    decay, magnitude = _stable_rates(params)
    slowest = 1.0 / decay.min() if decay.min() > 0 else math.inf
    notes = []
    if config.time_step > 0.1 / magnitude.max():
        notes.append(f"time_step {config.time_step:g} exceeds 0.1/max|eigenvalue| = "
                     f"{0.1 / magnitude.max():.3g}; discretization bias may be visible")
    if config.duration < 50 * slowest:
        notes.append(f"duration {config.duration:g} is below 50 slowest decay times "
                     f"({50 * slowest:.3g}); wide confidence intervals expected")
    if config.burn_in < 10 * slowest:
        notes.append(f"burn_in {config.burn_in:g} is below 10 slowest decay times "
                     f"({10 * slowest:.3g}); transient may bias the estimate")
    return notes


class _Integrator:
    """Streams one trajectory: burn-in first, then post-burn-in blocks."""

    def __init__(self, params, config, trajectory_index, noise_weights=None):
        if params.decay_a <= 0 or params.decay_b <= 0:
            raise ConfigError("stochastic integration needs decay_a > 0 and decay_b > 0",
                              key="decay_a" if params.decay_a <= 0 else "decay_b")
        drift = drift_matrix(params)
        weights = drift.noise_weights if noise_weights is None else np.asarray(noise_weights, float)
        self.dt = config.time_step
        self.generator_matrix = np.ascontiguousarray(drift.generator)
        self.kick_scale = np.sqrt(drift.noise_rates * weights * self.dt / 2)
        self.limit = DIVERGENCE_FACTOR * max(float(np.sqrt(weights.max())), 1.0)
        self.rng = _generator(config.seed, trajectory_index)
        self.x = np.zeros(3, dtype=complex)
        self.step = 0
        self._empty = np.empty((0, 3), dtype=complex)

    def _kicks(self, n):
        # (n, 3, 2) float64 viewed as (n, 3) complex: independent real and imaginary parts
        z = self.rng.standard_normal((n, 3, 2)).view(complex)[..., 0]
        z *= self.kick_scale
        return z

    def _advance(self, n, out):
        for start in range(0, n, _CHUNK):
            stop = min(n, start + _CHUNK)
            target = self._empty if out is None else out[start:stop]
            self.x = _euler_maruyama(self.generator_matrix, self.x, self._kicks(stop - start),
                                     target, self.dt)
            peak = max(np.abs(self.x).max(), np.abs(target).max(initial=0.0))
            if not peak <= self.limit:
                raise IntegrationDivergedError(
                    f"trajectory diverged near t = {(self.step + stop) * self.dt:g}; "
                    f"reduce time_step (currently {self.dt:g})")
        self.step += n

    def skip(self, n):
        self._advance(n, None)

    def record(self, n) -> np.ndarray:
        out = np.empty((n, 3), dtype=complex)
        self._advance(n, out)
        return out


def simulate_trajectory(params: SystemParams, config: SimulationConfig, trajectory_index: int = 0,
                        noise_weights=None) -> TrajectorySamples:
    """Integrate one trajectory from rest and return the post-burn-in samples.

    The noise stream depends only on ``(config.seed, trajectory_index)``.
    ``noise_weights`` overrides the per-mode ``N + 1`` factors.
    """
    integ = _Integrator(params, config, trajectory_index, noise_weights)
    integ.skip(config.burn_steps)
    values = integ.record(config.kept_steps)
    times = (config.burn_steps + np.arange(config.kept_steps)) * config.time_step
    return TrajectorySamples(times, values)


def _is_uniform(grid):
    if grid.size < 2:
        return True
    step = np.diff(grid)
    return bool(np.allclose(step, step[0], rtol=1e-9, atol=0.0))


class _Dtft:
    """``sum_n x[n] exp(i w t_n) dt`` at every grid ``w`` for blocks sampled from ``t0``.

    Uniform grids use a chirp-z transform; other grids fall back to a direct sum.
    """

    def __init__(self, n, dt, grid):
        self.dt = dt
        self.grid = grid
        self.transform = None
        if _is_uniform(grid):
            step = grid[1] - grid[0] if grid.size > 1 else 0.0
            self.transform = CZT(n, m=grid.size, w=np.exp(1j * step * dt),
                                 a=np.exp(-1j * grid[0] * dt))
        else:
            self.phase = np.exp(1j * np.outer(grid, np.arange(n) * dt))

    def __call__(self, blocks, t0=0.0):
        """``blocks`` has shape (segments, n, modes); returns (segments, grid, modes)."""
        if self.transform is not None:
            out = self.transform(blocks, axis=1)
        else:
            out = np.einsum("kn,snm->skm", self.phase, blocks)
        return out * self.dt * np.exp(1j * self.grid * t0)[None, :, None]


def _trajectory_periodogram(params, config, dtft, index, window):
    integ = _Integrator(params, config, index)
    integ.skip(config.burn_steps)
    length = config.segment_steps
    values = integ.record(length * config.segments)
    blocks = values.reshape(config.segments, length, 3)
    if window is not None:
        blocks = blocks * window[None, :, None]
    spec = np.abs(dtft(blocks)) ** 2
    return spec.sum(axis=0)


def thread_count(threads=None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ConfigError(f"thread count must be >= 0, got {threads}")
    return threads or os.cpu_count() or 1


def estimate_spectrum(params: SystemParams, config: SimulationConfig, grid,
                      threads=None) -> SpectrumCurve:
    """Ensemble-averaged periodogram ``|sum_k x(t_k) exp(i w t_k) dt|^2 / T`` per mode.

    With this normalization a decoupled cavity converges to
    ``kappa (N + 1) / ((w - delta_c)^2 + kappa^2 / 4)``, the same convention as the
    closed-form spectra.
    """
    grid = _check_grid(grid)
    nyquist = math.pi / config.time_step
    if grid[0] < -nyquist or grid[-1] > nyquist:
        raise ValueError(f"grid must lie within [-{nyquist:g}, {nyquist:g}] for this time_step")
    length = config.segment_steps
    window = None
    norm = length * config.time_step
    if config.taper == "hann":
        window = np.hanning(length)
        norm *= float(np.mean(window ** 2))

    dtft = _Dtft(length, config.time_step, grid)

    def one(index):
        return _trajectory_periodogram(params, config, dtft, index, window)

    indices = range(config.trajectory_count)
    workers = min(thread_count(threads), config.trajectory_count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, indices))
    else:
        parts = [one(i) for i in indices]
    total = np.zeros((grid.size, 3))
    for part in parts:
        total += part
    mean = total / (norm * config.segments * config.trajectory_count)
    return SpectrumCurve(grid, mean[:, 0], mean[:, 1], mean[:, 2], params, "stochastic",
                         tuple(simulation_warnings(params, config)))
