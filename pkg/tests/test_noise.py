import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavity_elimination.errors import ConfigurationError
from cavity_elimination.noise import (
    NoiseSeries,
    cavity_response,
    expected_correlation,
    filter_exponential,
    mc_correlation,
    mode_count,
    mode_grid,
    one_pole_filter,
    render_noise,
    synthesize_modes,
)
from cavity_elimination.quadrature import integrate_f


def _series(t, values):
    return NoiseSeries(t, np.asarray(values, dtype=complex), omega_cap=1.0)


@settings(max_examples=50)
@given(x=st.floats(1, 1e4), d_omega=st.floats(1e-3, 0.1))
def test_mode_grid_inside_band(x, d_omega):
    d_omega = d_omega * x
    grid = mode_grid(x, d_omega)
    assert len(grid) == mode_count(x, d_omega)
    assert grid[0] >= -x * (1 + 1e-12) and grid[-1] <= x * (1 + 1e-12)
    np.testing.assert_allclose(grid, -grid[::-1], atol=1e-9 * x)


def test_synthesis_deterministic_per_stream():
    a = synthesize_modes(50, 0.5, 1.0, seed=7, stream=3)
    b = synthesize_modes(50, 0.5, 1.0, seed=7, stream=3)
    c = synthesize_modes(50, 0.5, 1.0, seed=7, stream=4)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, c.amplitudes)


def test_synthesis_zero_occupation_is_exact_zero():
    modes = synthesize_modes(50, 0.5, 0.0, seed=1)
    assert not np.any(modes.amplitudes)
    assert not np.any(render_noise(modes, np.linspace(0, 1, 5)).samples)


def test_synthesis_variance():
    n_th, d_omega = 2.0, 0.1
    modes = synthesize_modes(5e3, d_omega, n_th, seed=11)
    power = np.abs(modes.amplitudes) ** 2
    target = n_th / d_omega
    # |beta|^2 is exponential: standard deviation equals the mean
    assert abs(power.mean() - target) <= 5 * target / math.sqrt(len(power))


def test_synthesis_validation():
    with pytest.raises(ConfigurationError):
        synthesize_modes(10, 2.0, 1.0, seed=0)
    with pytest.raises(ConfigurationError):
        synthesize_modes(-1, 0.1, 1.0, seed=0)
    with pytest.raises(ConfigurationError):
        synthesize_modes(10, 0.1, -1.0, seed=0)


def test_render_fast_matches_direct():
    modes = synthesize_modes(1.2e4, 0.5, 1.0, seed=3, omega_c=1e3)
    assert len(modes.omega) > 20_000
    t = np.linspace(-3.0, 5.0, 401)
    direct = render_noise(modes, t, method="direct").samples
    fast = render_noise(modes, t, method="fast").samples
    assert np.max(np.abs(fast - direct)) <= 1e-10 * np.max(np.abs(direct))


def test_render_rejects_unknown_method_and_bad_grid():
    modes = synthesize_modes(10, 0.5, 1.0, seed=0)
    with pytest.raises(ConfigurationError):
        render_noise(modes, [0.0, 1.0], method="spectral")
    with pytest.raises(ConfigurationError):
        render_noise(modes, [0.0, 0.5, 2.0], method="fast")
    with pytest.raises(ConfigurationError):
        render_noise(modes, [1.0, 0.0])


def test_render_equal_time_power():
    # one full period 2 pi / dw sampled at K points: the time average of
    # |a_in|^2 equals (dw^2 / 2 pi) sum |beta|^2 exactly (DFT orthogonality)
    x, d_omega, n_th = 200.0, 0.25, 1.5
    modes = synthesize_modes(x, d_omega, n_th, seed=5, omega_c=30.0)
    k = len(modes.omega)
    t = np.arange(k) * (2 * math.pi / (k * d_omega))
    samples = render_noise(modes, t, method="direct").samples
    time_avg = np.mean(np.abs(samples) ** 2)
    parseval = d_omega**2 / (2 * math.pi) * np.sum(np.abs(modes.amplitudes) ** 2)
    assert time_avg == pytest.approx(parseval, rel=1e-10)
    expected = n_th * 2 * x / (2 * math.pi)
    assert abs(time_avg - expected) <= 5 * expected / math.sqrt(k)


def test_expected_correlation_matches_quadrature():
    # midpoint rule: aliasing ~exp(-pi/dw), band-edge term ~dw^2 tau / (24 x^2)
    lags = [0.0, 1.0, 2.0, 5.0]
    got = expected_correlation(100.0, 0.1, 1.0, lags, omega_c=10.0)
    want = np.array([integrate_f(dt, 10.0, 100.0) for dt in lags]) / (2 * math.pi)
    np.testing.assert_allclose(got, want, atol=1e-7)


def test_filter_dc_gain():
    h, kappa, c = 0.05, 2.0, 0.7 - 0.2j
    t = np.arange(0, 40, h)
    out = filter_exponential(_series(t, np.full(len(t), c)), kappa=kappa)
    assert np.max(np.abs(out.samples - 2 / math.sqrt(kappa) * c)) <= 1e-12
    assert out.t[0] >= 20 / kappa - 1e-9


def test_filter_zero_and_linearity():
    h = 0.1
    t = np.arange(0, 30, h)
    assert not np.any(one_pole_filter(np.zeros(len(t)), h))
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal(len(t)), rng.standard_normal(len(t))
    np.testing.assert_allclose(
        one_pole_filter(2 * u - 3 * v, h), 2 * one_pole_filter(u, h) - 3 * one_pole_filter(v, h), atol=1e-12
    )


def test_filter_exact_for_ramp():
    # dy/dt = -y/2 + t with y(0) = 0 has y = 2t - 4 + 4 exp(-t/2)
    h = 0.2
    t = np.arange(0, 10 + h / 2, h)
    np.testing.assert_allclose(one_pole_filter(t, h), 2 * t - 4 + 4 * np.exp(-t / 2), atol=1e-12)


def test_filter_follows_slow_modulation():
    h = 0.1
    t = np.arange(0, 400, h)
    u = np.cos(0.005 * t)
    out = filter_exponential(_series(t, u))
    ref = 2 * np.cos(0.005 * out.t)
    assert np.max(np.abs(out.samples - ref)) <= 0.02 * 2


def test_filter_matches_exact_cavity_response():
    modes = synthesize_modes(3.0, 0.02, 1.0, seed=9)
    h = 0.01
    t = np.arange(0, 40 + h / 2, h)
    noise = render_noise(modes, t)
    out = filter_exponential(noise)
    exact = cavity_response(modes, out.t)
    rms = np.sqrt(np.mean(np.abs(exact) ** 2))
    assert np.max(np.abs(out.samples - exact)) <= 1e-3 * rms


def test_filter_validation():
    t = np.arange(0, 30, 0.5)
    with pytest.raises(ConfigurationError):
        filter_exponential(_series(t, np.ones(len(t))))
    t = np.arange(0, 30, 0.1)
    with pytest.raises(ConfigurationError):
        filter_exponential(_series(t, np.ones(len(t))), warmup=5)
    t = np.arange(0, 10, 0.1)
    with pytest.raises(ConfigurationError):
        filter_exponential(_series(t, np.ones(len(t))))


def test_mc_agrees_with_discrete_mean():
    lags = [1.0, 2.0]
    series = mc_correlation(60.0, 0.25, 1.0, 2000, lags, seed=21, omega_c=5.0)
    want = expected_correlation(60.0, 0.25, 1.0, lags, omega_c=5.0)
    assert np.all(np.abs(series.values - want) <= 4 * series.stderr)
    assert series.method == "cutoff-mc"
    assert not series.warnings


def test_mc_stderr_scaling():
    small = mc_correlation(40.0, 0.25, 1.0, 400, [1.0], seed=2)
    large = mc_correlation(40.0, 0.25, 1.0, 1600, [1.0], seed=2)
    assert small.stderr[0] / large.stderr[0] == pytest.approx(2.0, rel=0.15)


def test_mc_grid_refinement_is_stable():
    coarse = mc_correlation(40.0, 0.25, 1.0, 1500, [0.5], seed=4)
    fine = mc_correlation(40.0, 0.125, 1.0, 1500, [0.5], seed=4)
    gap = abs(coarse.values[0] - fine.values[0])
    assert gap <= 4 * math.hypot(coarse.stderr[0], fine.stderr[0])


def test_mc_zero_occupation():
    series = mc_correlation(40.0, 0.25, 0.0, 50, [0.0, 1.0], seed=1)
    assert not np.any(series.values)
    assert not np.any(series.stderr)
    assert series.warnings


def test_mc_thread_independence():
    a = mc_correlation(40.0, 0.25, 1.0, 200, [0.5, 2.0], seed=8, threads=1)
    b = mc_correlation(40.0, 0.25, 1.0, 200, [0.5, 2.0], seed=8, threads=3)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.stderr, b.stderr)


def test_mc_validation():
    with pytest.raises(ConfigurationError):
        mc_correlation(40.0, 0.25, 1.0, 1, [0.0], seed=0)
