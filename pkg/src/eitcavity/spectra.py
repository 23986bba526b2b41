"""Fluctuation spectra of the cavity and the two collective modes.

The closed forms follow from solving the linearized fluctuation equations in
the frequency domain. ``spectra_resolvent_oracle`` evaluates the same
quantities straight from the drift generator and serves as the cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularParametersError
from .model import SystemParams, drift_matrix
from .steady import _check_grid

METHODS = ("analytic", "resolvent", "stochastic")


@dataclass(frozen=True)
class EffectiveCavityOmega:
    detuning_eff: float
    decay_eff: float


@dataclass(frozen=True)
class SpectrumCurve:
    grid: np.ndarray
    s_c: np.ndarray
    s_a: np.ndarray
    s_b: np.ndarray
    params: SystemParams
    method: str = "analytic"
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")

    def channel(self, name: str) -> np.ndarray:
        key = name.lower().removeprefix("s_")
        try:
            return {"c": self.s_c, "a": self.s_a, "b": self.s_b}[key]
        except KeyError:
            raise KeyError(f"unknown spectrum channel {name!r}") from None


def _lorentz(omega, delta, gamma):
    return (omega - delta) ** 2 + gamma ** 2 / 4


def _terms(p: SystemParams, omega):
    """Shared pieces of all closed forms, array-friendly."""
    la = _lorentz(omega, p.detuning_a, p.decay_a)
    lb = _lorentz(omega, p.detuning_b, p.decay_b)
    ga2, gb2 = p.coupling_a ** 2, p.coupling_b ** 2
    det_eff = p.detuning_cavity + ga2 * (omega - p.detuning_a) / la \
        + gb2 * (omega - p.detuning_b) / lb
    kappa_eff = p.cavity_decay + p.decay_a * ga2 / la + p.decay_b * gb2 / lb
    cav = (omega - det_eff) ** 2 + kappa_eff ** 2 / 4
    return la, lb, det_eff, kappa_eff, cav


def _spectra(p: SystemParams, omega):
    la, lb, det_eff, kappa_eff, cav = _terms(p, omega)
    nc, na, nb = p.noise_weights
    ga2, gb2 = p.coupling_a ** 2, p.coupling_b ** 2
    s_c = (nc * p.cavity_decay + ga2 * p.decay_a * na / la + gb2 * p.decay_b * nb / lb) / cav
    k_a = ((omega - p.detuning_a) * (omega - det_eff) - p.decay_a * kappa_eff / 4) / (cav * la)
    k_b = ((omega - p.detuning_b) * (omega - det_eff) - p.decay_b * kappa_eff / 4) / (cav * lb)
    s_a = (ga2 * s_c + p.decay_a * na * (1 + 2 * ga2 * k_a)) / la
    s_b = (gb2 * s_c + p.decay_b * nb * (1 + 2 * gb2 * k_b)) / lb
    return s_c, s_a, s_b, k_a, k_b


def _check_point(p: SystemParams, omega):
    if (p.decay_a == 0 and omega == p.detuning_a) or (p.decay_b == 0 and omega == p.detuning_b):
        raise SingularParametersError(f"undamped ensemble resonant at omega = {omega!r}")


def effective_cavity_omega(params: SystemParams, omega: float) -> EffectiveCavityOmega:
    """Frequency-dependent effective cavity detuning and decay."""
    _check_point(params, omega)
    _, _, det_eff, kappa_eff, _ = _terms(params, float(omega))
    return EffectiveCavityOmega(float(det_eff), float(kappa_eff))


def cavity_spectrum(params: SystemParams, omega: float) -> float:
    _check_point(params, omega)
    return float(_spectra(params, float(omega))[0])


def k_factors(params: SystemParams, omega: float) -> tuple[float, float]:
    """Interference factors ``(K_A, K_B)`` entering the ensemble spectra."""
    _check_point(params, omega)
    _, _, _, k_a, k_b = _spectra(params, float(omega))
    return float(k_a), float(k_b)


def ensemble_spectra(params: SystemParams, omega: float) -> tuple[float, float]:
    _check_point(params, omega)
    _, s_a, s_b, _, _ = _spectra(params, float(omega))
    return float(s_a), float(s_b)


def resolvent_diagonal(params: SystemParams, omega) -> np.ndarray:
    """Diagonal of ``R D R^dagger`` with ``R = (-i omega - M)^-1 F``, shape ``omega.shape + (3,)``.

    Raises
    ------
    SingularParametersError
        If ``-i omega - M`` is singular at any requested frequency.
    """
    drift = drift_matrix(params)
    omega = np.asarray(omega, dtype=float)
    w = omega.reshape(-1)
    lhs = -1j * w[:, None, None] * np.eye(3) - drift.generator
    rhs = np.broadcast_to(np.diag(drift.noise_amplitudes).astype(complex), lhs.shape)
    try:
        with np.errstate(all="ignore"):
            r = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularParametersError(f"resolvent is singular: {exc}") from None
    if not np.all(np.isfinite(r)):
        raise SingularParametersError("resolvent is singular")
    diag = np.einsum("wij,j,wij->wi", r, drift.noise_weights, r.conj()).real
    return diag.reshape(omega.shape + (3,))


def spectra_resolvent_oracle(params: SystemParams, omega: float) -> tuple[float, float, float]:
    """``(S_c, S_A, S_B)`` evaluated from the drift generator's resolvent."""
    s_c, s_a, s_b = resolvent_diagonal(params, float(omega))
    return float(s_c), float(s_a), float(s_b)


def spectrum_sweep(params: SystemParams, grid, method: str = "analytic") -> SpectrumCurve:
    """Spectra over a frequency grid. Singular points are NaN.

    ``method`` selects the closed forms (``"analytic"``) or the resolvent
    evaluation (``"resolvent"``).
    """
    grid = _check_grid(grid)
    if method == "analytic":
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            s_c, s_a, s_b, _, _ = _spectra(params, grid)
        bad = ((params.decay_a == 0) & (grid == params.detuning_a)) \
            | ((params.decay_b == 0) & (grid == params.detuning_b))
        out = []
        for values in (s_c, s_a, s_b):
            values = np.array(values, dtype=float)
            values[bad | ~np.isfinite(values)] = np.nan
            out.append(values)
    elif method == "resolvent":
        try:
            table = resolvent_diagonal(params, grid)
        except SingularParametersError:
            table = np.full((grid.size, 3), np.nan)
            for i, w in enumerate(grid):
                try:
                    table[i] = resolvent_diagonal(params, w)
                except SingularParametersError:
                    pass
        out = [np.ascontiguousarray(table[:, k]) for k in range(3)]
    else:
        raise ValueError(f"method must be 'analytic' or 'resolvent', got {method!r}")
    return SpectrumCurve(grid, out[0], out[1], out[2], params, method)
