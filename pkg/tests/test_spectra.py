from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import solve_continuous_lyapunov

from eitcavity.analysis import detect_windows, find_extrema
from eitcavity.errors import SingularParametersError
from eitcavity.model import SystemParams, drift_matrix
from eitcavity.spectra import (
    cavity_spectrum,
    effective_cavity_omega,
    ensemble_spectra,
    k_factors,
    resolvent_diagonal,
    spectra_resolvent_oracle,
    spectrum_sweep,
)
from eitcavity.steady import effective_cavity_zero

from conftest import FIG2A, FIG2B, random_params


def analytic_triple(params, omega):
    s_a, s_b = ensemble_spectra(params, omega)
    return np.array([cavity_spectrum(params, omega), s_a, s_b])


def test_effective_cavity_on_resonance():
    p = SystemParams(coupling_a=3, coupling_b=2, decay_a=4, decay_b=5, cavity_decay=1.5)
    eff = effective_cavity_omega(p, 0.0)
    assert eff.detuning_eff == 0
    assert eff.decay_eff == pytest.approx(1.5 + 4 * 9 / 4 + 4 * 4 / 5, rel=1e-15)


def test_effective_cavity_matches_zero_frequency(rng):
    for _ in range(50):
        p = random_params(rng)
        p = replace(p, detuning_a=0.0, detuning_b=0.0, detuning_cavity=0.0)
        assert effective_cavity_omega(p, 0.0).decay_eff == pytest.approx(
            effective_cavity_zero(p).decay_eff, rel=1e-14)


def test_effective_cavity_far_off_resonance():
    p = SystemParams(detuning_cavity=2.0, coupling_a=10, coupling_b=1, decay_a=90, decay_b=9)
    eff = effective_cavity_omega(p, 1e9)
    assert eff.decay_eff == pytest.approx(1.0, rel=1e-9)
    assert eff.detuning_eff == pytest.approx(2.0, rel=1e-6)


def test_effective_decay_at_least_kappa(rng):
    for _ in range(500):
        p = random_params(rng)
        assert effective_cavity_omega(p, rng.uniform(-200, 200)).decay_eff >= p.cavity_decay


def test_empty_cavity_lorentzian():
    p = SystemParams(decay_a=1.0, decay_b=1.0, cavity_decay=2.0)
    for w in (-3.0, 0.0, 0.7, 5.0):
        assert cavity_spectrum(p, w) == pytest.approx(2.0 / (w ** 2 + 1.0), rel=1e-15)
    assert cavity_spectrum(replace(p, cavity_decay=1.0), 0.0) == pytest.approx(4.0)


def test_k_factor_symmetry():
    p = SystemParams(coupling_a=4, coupling_b=4, decay_a=3, decay_b=3)
    for w in np.linspace(-20, 20, 17):
        k_a, k_b = k_factors(p, w)
        assert k_a == k_b


def test_k_factor_at_zero(rng):
    for _ in range(50):
        p = replace(random_params(rng), detuning_a=0.0, detuning_b=0.0, detuning_cavity=0.0)
        kappa_eff = effective_cavity_omega(p, 0.0).decay_eff
        assert k_factors(p, 0.0)[0] == pytest.approx(-4 / (p.decay_a * kappa_eff), rel=1e-12)


def test_k_factor_decays():
    p = SystemParams(**FIG2A)
    assert abs(k_factors(p, 1e5)[0]) < 1e-9


def test_decoupled_ensemble_is_bare_lorentzian():
    p = SystemParams(coupling_b=2.0, decay_a=3.0, decay_b=1.0, detuning_a=1.5, thermal_a=0.5)
    for w in (-4.0, 1.5, 3.0):
        s_a, _ = ensemble_spectra(p, w)
        assert s_a == pytest.approx(3.0 * 1.5 / ((w - 1.5) ** 2 + 2.25), rel=1e-15)


def test_resolvent_uncoupled_gives_bare_lorentzians():
    p = SystemParams(detuning_cavity=1.0, detuning_a=-2.0, detuning_b=3.0, cavity_decay=1.0,
                     decay_a=2.0, decay_b=0.5, thermal_c=0.1, thermal_a=0.2, thermal_b=0.3)
    for w in (-3.0, 0.0, 2.5):
        expected = [rate * (n + 1) / ((w - d) ** 2 + rate ** 2 / 4) for rate, n, d in
                    ((1.0, 0.1, 1.0), (2.0, 0.2, -2.0), (0.5, 0.3, 3.0))]
        np.testing.assert_allclose(spectra_resolvent_oracle(p, w), expected, rtol=1e-13)


def test_closed_forms_match_resolvent(rng):
    for _ in range(1000):
        p = random_params(rng)
        w = rng.uniform(-100, 100)
        analytic = analytic_triple(p, w)
        oracle = np.array(spectra_resolvent_oracle(p, w))
        assert np.max(np.abs(analytic - oracle) / np.abs(oracle)) <= 1e-10


@pytest.mark.parametrize("kw", [FIG2A, FIG2B])
def test_fig4_sweep_matches_resolvent(kw):
    grid = np.linspace(-30, 30, 1201)
    p = SystemParams(**kw)
    a = spectrum_sweep(p, grid)
    r = spectrum_sweep(p, grid, method="resolvent")
    assert r.method == "resolvent"
    for ch in "cab":
        np.testing.assert_allclose(a.channel(ch), r.channel(ch), rtol=1e-10)


def test_positivity(rng):
    grid = np.linspace(-200, 200, 801)
    for _ in range(100):
        curve = spectrum_sweep(random_params(rng), grid)
        for ch in "cab":
            assert curve.channel(ch).min() >= -1e-12


def test_zero_detuning_evenness(rng):
    grid = np.linspace(-60, 60, 1201)
    for _ in range(50):
        p = replace(random_params(rng), detuning_a=0.0, detuning_b=0.0, detuning_cavity=0.0)
        curve = spectrum_sweep(p, grid)
        for ch in "cab":
            values = curve.channel(ch)
            np.testing.assert_allclose(values, values[::-1], rtol=1e-10)


def test_uncoupled_sweep_centres():
    p = SystemParams(detuning_cavity=-5.0, detuning_a=0.0, detuning_b=7.0, decay_a=1.0, decay_b=1.0)
    grid = np.linspace(-20, 20, 401)
    curve = spectrum_sweep(p, grid)
    for ch, centre in (("c", -5.0), ("a", 0.0), ("b", 7.0)):
        assert grid[np.argmax(curve.channel(ch))] == pytest.approx(centre)


def test_stationary_variance_sum_rule(rng):
    # integral of S_y over all frequencies equals 2 pi <y y^dagger> from the Lyapunov equation
    for _ in range(5):
        p = random_params(rng)
        drift = drift_matrix(p)
        noise = np.diag(drift.noise_rates * drift.noise_weights)
        cov = solve_continuous_lyapunov(drift.generator, -noise)
        for k, ch in enumerate("cab"):
            def s(w, k=k):
                return analytic_triple(p, w)[k]
            total = quad(s, -np.inf, np.inf, limit=500, epsabs=0, epsrel=1e-9,
                         points=None)[0]
            assert total == pytest.approx(2 * np.pi * cov[k, k].real, rel=1e-5), ch


def test_integral_stable_under_grid_doubling():
    p = SystemParams(**FIG2A)
    scale = 50 * max(p.coupling_a, p.coupling_b, p.decay_a, p.decay_b, p.cavity_decay)
    totals = []
    for extent in (scale, 2 * scale):
        grid = np.linspace(-extent, extent, 400001)
        totals.append(np.trapezoid(spectrum_sweep(p, grid).s_a, grid))
    assert np.isfinite(totals).all()
    assert abs(totals[1] - totals[0]) <= 0.01 * totals[1]


def test_fig4a_left_ensemble_split():
    grid = np.linspace(-30, 30, 1201)
    curve = spectrum_sweep(SystemParams(**FIG2A), grid)
    rep = find_extrema(grid, curve.s_a)
    assert [m.position for m in rep.maxima] == pytest.approx([-10, 10], abs=1.0)
    assert [m.position for m in rep.minima] == [0.0]


def test_fig4b_right_ensemble_split():
    grid = np.linspace(-30, 30, 1201)
    curve = spectrum_sweep(SystemParams(**FIG2B), grid)
    rep = find_extrema(grid, curve.s_b)
    assert [m.position for m in rep.maxima] == pytest.approx([-10, 10], abs=1.0)


def test_fig4_sequence_asymmetry():
    grid = np.linspace(-30, 30, 1201)
    red = spectrum_sweep(SystemParams(**FIG2A), grid)
    blue = spectrum_sweep(SystemParams(**FIG2B), grid)
    assert detect_windows(red, "s_a").window_count == 1
    assert detect_windows(red, "s_a").dip_positions == (0.0,)
    assert detect_windows(blue, "s_a").window_count == 0
    assert len(find_extrema(grid, blue.s_a).maxima) == 1


def test_singular_point():
    p = SystemParams(coupling_a=1, decay_a=0.0, decay_b=1.0, detuning_a=2.0)
    with pytest.raises(SingularParametersError):
        cavity_spectrum(p, 2.0)
    curve = spectrum_sweep(p, np.array([1.0, 2.0, 3.0]))
    assert np.isnan(curve.s_a[1]) and np.isfinite(curve.s_a[[0, 2]]).all()


def test_resolvent_singular():
    p = SystemParams(decay_a=0.0, decay_b=1.0)
    with pytest.raises(SingularParametersError):
        resolvent_diagonal(p, 0.0)
    curve = spectrum_sweep(p, np.array([-1.0, 0.0, 1.0]), method="resolvent")
    assert np.isnan(curve.s_a[1]) and np.isfinite(curve.s_a[[0, 2]]).all()
