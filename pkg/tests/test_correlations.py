import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisykerr import (NoiseComponent, NoiseModel, OscillatorModel,
                       PhysicsError, build_coherence_system, choose_truncation,
                       g1_tau, g2_tau, g2_zero, ness, spectrum)
from noisykerr.oracle import build_liouvillian, regression_correlator
from noisykerr.redfield import rate_matrix
from conftest import fig1_noise, flat_noise


# -- g2(0) ----------------------------------------------------------------------

@given(st.floats(0.05, 0.9))
def test_g2_zero_geometric_is_two(r):
    n = np.arange(400)
    rho = (1 - r) * r ** n
    assert g2_zero(rho) == pytest.approx(2.0, abs=1e-12)


def test_g2_zero_single_excitation():
    assert g2_zero(np.array([0.9, 0.1, 0.0, 0.0])) == 0.0


def test_g2_zero_poissonian():
    # direct summation of truncated Poisson weights, mean 2
    n = np.arange(41)
    log_w = n * np.log(2.0) - np.cumsum(np.concatenate([[0.0], np.log(np.maximum(n[1:], 1))]))
    rho = np.exp(log_w - log_w.max())
    rho /= rho.sum()
    assert g2_zero(rho) == pytest.approx(1.0, abs=1e-6)


def test_g2_zero_empty_state_rejected():
    with pytest.raises(PhysicsError):
        g2_zero(np.array([1.0, 0.0]))


# -- g2(tau) ----------------------------------------------------------------------

def test_g2_tau_at_zero_equals_g2_zero(fig1, kerr53):
    dist = ness(kerr53, fig1)
    series = g2_tau(kerr53, fig1, dist, np.array([0.0, 1.0]))
    assert series.values[0] == pytest.approx(g2_zero(dist), rel=1e-13)


def test_g2_tau_relaxes_to_one(fig1, kerr53):
    dist = ness(kerr53, fig1)
    series = g2_tau(kerr53, fig1, dist, np.array([0.0, 2e4]))
    assert abs(series.values[-1] - 1.0) < 1e-6


def test_g2_tau_flat_noise_single_exponential():
    # geometric steady state: g2(τ) = 1 + exp(−λτ) with λ the spectral gap,
    # exact for the untruncated ladder (linear birth-death rates make <n>
    # relax single-exponentially); r = 0.2 plus a deep ladder keeps the
    # truncation bias below the tolerance
    noise = flat_noise(3.0, 2.0, omega_max=5000.0)
    model = OscillatorModel(omega=1.0, chi=0.5)
    taus = np.linspace(0.0, 2.0, 21)
    dist = ness(model, noise, n_max=14)
    series = g2_tau(model, noise, dist, taus, n_max=14)
    gaps = np.linalg.eigvals(rate_matrix(model, noise, n_max=14))
    lam = -np.sort(gaps.real)[-2]
    np.testing.assert_allclose(series.values, 1.0 + np.exp(-lam * taus),
                               atol=1e-6)
    # and against the dense-generator regression on a small ladder, tightly
    dist8 = ness(model, noise, n_max=8)
    series8 = g2_tau(model, noise, dist8, taus, n_max=8)
    lio = build_liouvillian(model, noise, n_max=8)
    oracle = regression_correlator(lio, dist8.rho, "a", "adag", "n", taus,
                                   leak_tol=None).real / dist8.mean_n() ** 2
    np.testing.assert_allclose(series8.values, oracle, rtol=1e-8)


def test_g2_tau_memory_annotation(fig1, kerr53):
    dist = ness(kerr53, fig1)
    series = g2_tau(kerr53, fig1, dist, np.array([0.0, 1.0, 5.0]),
                    tau_memory=2.0)
    np.testing.assert_array_equal(series.valid, [False, False, True])


def test_series_validation():
    from noisykerr import CorrelationSeries
    with pytest.raises(ValueError):
        CorrelationSeries(tau=np.array([1.0, 0.5]), values=np.zeros(2), kind="g2")
    with pytest.raises(ValueError):
        CorrelationSeries(tau=np.array([-1.0, 0.5]), values=np.zeros(2), kind="g2")


# -- coherence band system ---------------------------------------------------------

def test_band_system_single_level_structure(fig1):
    model = OscillatorModel(omega=5.0, chi=3.0)
    system = build_coherence_system(model, fig1, 1)
    assert system.m.shape == (1, 1)
    assert system.a[0] == 0.0
    lio = build_liouvillian(model, fig1, n_max=1)
    from noisykerr.oracle import coherence_band_generator
    np.testing.assert_allclose(system.m, coherence_band_generator(lio),
                               atol=1e-14)


def test_band_system_free_evolution_limit():
    noise = NoiseModel(components=(), omega_min=0.01, omega_max=50.0)
    model = OscillatorModel(omega=5.0, chi=3.0)
    n_max = 4
    system = build_coherence_system(model, noise, n_max)
    freqs = model.ladder_frequencies(n_max)
    np.testing.assert_allclose(system.m, np.diag(1j * freqs[:-1]), atol=1e-15)
    # g1 is then a sum of bare phase factors at the transition frequencies
    rho = np.array([0.5, 0.3, 0.15, 0.05, 0.0])
    taus = np.linspace(0.0, 3.0, 7)
    series = g1_tau(model, noise, rho, taus, system=system)
    n = np.arange(5)
    expected = [(n * rho * np.exp(-1j * np.concatenate([[0], freqs[:-1]]) * t)).sum()
                for t in taus]
    np.testing.assert_allclose(series.values, expected, atol=1e-10)


def test_linear_oscillator_amplitude_decay_closed_form():
    # empty flat bath, χ = 0: g1(τ) = <n> e^{−(iΩ̃+Γ)τ} with Γ the detector
    # coupling; the amplitude decays at half the energy-relaxation rate
    gamma = 2e-3
    noise = NoiseModel(components=(NoiseComponent.flat(gamma, beta=np.inf),),
                       omega_min=0.01, omega_max=50.0)
    model = OscillatorModel(omega=5.0, chi=0.0)
    n_max = 6
    rho = np.zeros(7)
    rho[0], rho[1], rho[2] = 0.55, 0.3, 0.15
    taus = np.linspace(0.0, 400.0, 9)
    series = g1_tau(model, noise, rho, taus, n_max=n_max)
    mean = (np.arange(7) * rho).sum()
    np.testing.assert_allclose(np.abs(series.values),
                               mean * np.exp(-gamma * taus), rtol=1e-9)
    assert np.all(np.diff(np.abs(series.values)) < 0)


def test_g1_initial_value_is_mean_occupation(fig1, kerr53):
    dist = ness(kerr53, fig1)
    series = g1_tau(kerr53, fig1, dist, np.array([0.0, 0.5]))
    assert series.values[0] == pytest.approx(dist.mean_n(), rel=1e-12)


def test_g1_matches_oracle(fig1, kerr53):
    n_max = choose_truncation(kerr53, fig1)
    dist = ness(kerr53, fig1, n_max=n_max)
    lio = build_liouvillian(kerr53, fig1, n_max=n_max)
    taus = np.linspace(0.0, 150.0, 16)
    series = g1_tau(kerr53, fig1, dist, taus,
                    system=build_coherence_system(kerr53, fig1, n_max,
                                                  coeffs=lio.coeffs))
    oracle = regression_correlator(lio, dist.rho, "identity", "adag", "a",
                                   taus, leak_tol=None)
    np.testing.assert_allclose(series.values, oracle,
                               atol=1e-10 * np.abs(oracle).max())


# -- spectrum ----------------------------------------------------------------------

def test_spectrum_sum_rule_and_peaks(fig1, kerr53):
    dist = ness(kerr53, fig1)
    result = spectrum(kerr53, fig1, dist)
    assert result.method == "eigendecomposition"
    assert result.modes_stable
    assert result.positivity_ok
    assert result.sum_rule_integral == pytest.approx(result.mean_occupation,
                                                     rel=0.01)
    assert len(result.peaks) >= 4
    heights = [p.height for p in result.peaks[:4]]
    assert all(a > b for a, b in zip(heights, heights[1:]))


def test_spectrum_sum_rule_against_closed_form(fig1, kerr53):
    # per-mode Lorentzian integrals have exact antiderivatives; this pins the
    # Simpson grid independently of the quadrature
    dist = ness(kerr53, fig1)
    n_max = dist.n_max
    system = build_coherence_system(kerr53, fig1, n_max)
    lam, vecs = np.linalg.eig(system.m)
    n = np.arange(1, n_max + 1)
    weights = vecs.sum(axis=0) * np.linalg.solve(vecs, (n * dist.rho[1:]).astype(complex))

    def mode_integral(c, l, a, b):
        kappa, nu = l.real, l.imag
        term = (c.real * (np.arctan((b - nu) / kappa) - np.arctan((a - nu) / kappa))
                + 0.5 * c.imag * np.log((kappa ** 2 + (b - nu) ** 2)
                                        / (kappa ** 2 + (a - nu) ** 2)))
        return term

    closed = sum(mode_integral(c, l, fig1.omega_min, fig1.omega_max)
                 for c, l in zip(weights, lam)) / np.pi
    result = spectrum(kerr53, fig1, dist, system=system)
    assert result.sum_rule_integral == pytest.approx(closed, rel=1e-4)


def test_spectrum_single_lorentzian_for_linear_oscillator():
    gamma = 2e-3
    noise = NoiseModel(components=(NoiseComponent.flat(gamma, beta=np.inf),),
                       omega_min=0.01, omega_max=50.0)
    model = OscillatorModel(omega=5.0, chi=0.0)
    rho = np.zeros(5)
    rho[0], rho[1] = 0.7, 0.3
    result = spectrum(model, noise, rho, n_max=4)
    assert len(result.peaks) == 1
    peak = result.peaks[0]
    assert peak.fwhm == pytest.approx(2 * gamma, rel=0.02)
    # peak height of a Lorentzian of weight <n> and half width Γ
    assert peak.height == pytest.approx(0.3 / gamma, rel=1e-3)


def test_spectrum_resolvent_route_matches_eig(fig1, kerr53):
    dist = ness(kerr53, fig1)
    grid = np.linspace(3.0, 25.0, 400)
    a = spectrum(kerr53, fig1, dist, omega_grid=grid, method="eig")
    b = spectrum(kerr53, fig1, dist, omega_grid=grid, method="resolvent")
    assert b.method == "resolvent"
    np.testing.assert_allclose(a.s, b.s, rtol=1e-8, atol=1e-12 * a.s.max())
    # the two routes refine their internal grids around slightly different
    # mode estimates, so the integrals agree at grid accuracy only
    assert b.sum_rule_integral == pytest.approx(a.sum_rule_integral, rel=1e-4)


def test_spectrum_cutoff_collision_ladder(fig1):
    # ladder frequencies beyond the support leave unpopulated band modes and
    # park the emission line ~18 linewidths from the upper cutoff, so the
    # support-restricted sum rule degrades to the truncated-tail level
    model = OscillatorModel(omega=48.0, chi=2.0)
    n_max = choose_truncation(model, fig1)
    dist = ness(model, fig1, n_max=n_max)
    result = spectrum(model, fig1, dist, n_max=n_max)
    assert result.sum_rule_integral == pytest.approx(result.mean_occupation,
                                                     rel=0.05)
    assert abs(result.sum_rule_integral / result.mean_occupation - 1) > 0.005


def test_spectrum_empty_state_rejected(fig1, kerr53):
    with pytest.raises(PhysicsError):
        spectrum(kerr53, fig1, np.array([1.0, 0.0, 0.0]))
