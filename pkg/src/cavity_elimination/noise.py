"""Classical synthesis of band-limited thermal bath noise and its cavity filtering.

The bath is discretised into modes w_k on [-Omega, Omega] with spacing dw and
independent circular complex Gaussian amplitudes beta_k,
<|beta_k|^2> = n_th / dw, so that the mode sum

    a_in(t) = (1 / sqrt(2 pi)) sum_k dw exp(i (omega_c - w_k) t) beta_k

reproduces <a_in^dag(t) a_in(t')> of a thermal bath as dw -> 0. The overall
minus sign of the input-noise definition cancels in every second moment
and is dropped.

Normally ordered moments of a thermal bath have a classical (positive-P)
representation, so sample averages of conj(a) a estimate <a^dag a>.
Commutators do NOT have such a representation; they are only ever computed
by quadrature or in closed form, never from these samples.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.signal import lfilter

from .errors import ConfigurationError
from .series import CorrelationSeries

DIRECT_MODE_LIMIT = 20_000
_BLOCK = 32


@dataclass
class BathModes:
    omega: np.ndarray
    d_omega: float
    amplitudes: np.ndarray
    n_th: float
    seed: int
    stream: int = 0
    omega_c: float = 0.0

    @property
    def omega_cap(self) -> float:
        return 0.5 * len(self.omega) * self.d_omega

    @property
    def detuning(self) -> np.ndarray:
        """Frequencies omega_c - w_k at which each mode rotates."""
        return self.omega_c - self.omega


@dataclass
class NoiseSeries:
    t: np.ndarray
    samples: np.ndarray
    omega_cap: float
    seed: int | None = None
    d_omega: float | None = None


def mode_count(x: float, d_omega: float) -> int:
    # tolerate 2x/dw landing a hair above an integer
    return max(1, math.ceil(2 * x / d_omega * (1 - 1e-12)))


def mode_grid(x: float, d_omega: float) -> np.ndarray:
    """Centred grid of ceil(2x/dw) mode frequencies, all inside [-x, x]."""
    k = mode_count(x, d_omega)
    return (np.arange(k) - (k - 1) / 2) * d_omega


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for ``stream`` derived from the master seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _draw_amplitudes(seed, stream, count, n_th, d_omega, out=None):
    out = np.empty(count, dtype=complex) if out is None else out
    if n_th == 0:
        out[:] = 0
        return out
    # interleaved (re, im) pairs, drawn straight into the complex buffer
    stream_rng(seed, stream).standard_normal(out=out.view(np.float64))
    out *= math.sqrt(n_th / (2 * d_omega))
    return out


def _check_grid(x, d_omega, n_th):
    if not x > 0:
        raise ConfigurationError(f"bandwidth ratio must be > 0, got {x}")
    if not 0 < d_omega <= x / 10:
        raise ConfigurationError(f"need 0 < d_omega <= x/10, got d_omega={d_omega}, x={x}")
    if not n_th >= 0:
        raise ConfigurationError(f"occupation must be >= 0, got {n_th}")


def synthesize_modes(x: float, d_omega: float, n_th: float, seed: int, *,
                     stream: int = 0, omega_c: float = 0.0) -> BathModes:
    """Draw bath-mode amplitudes for one realisation.

    Deterministic in (seed, stream): the same pair always yields
    bit-identical amplitudes.
    """
    _check_grid(x, d_omega, n_th)
    omega = mode_grid(x, d_omega)
    amps = _draw_amplitudes(seed, stream, len(omega), n_th, d_omega)
    return BathModes(omega, d_omega, amps, n_th, seed, stream, omega_c)


def _uniform_step(t):
    if len(t) < 2:
        return None
    h = (t[-1] - t[0]) / (len(t) - 1)
    if h > 0 and np.allclose(np.diff(t), h, rtol=1e-9, atol=0):
        return h
    return None


def _split(value, bits):
    mant, expo = math.frexp(value)
    hi = math.ldexp(round(mant * 2**bits), expo - bits)
    return hi, value - hi


def _chirp(theta, n):
    # exp(-i theta k^2 / 2), with theta split so hi * k^2 is exact in double
    k = np.arange(n, dtype=np.int64)
    k2 = k * k
    bits = max(1, 52 - int(k2[-1]).bit_length())
    hi, lo = _split(theta / 2, bits)
    k2 = k2.astype(float)
    return np.exp(-1j * (hi * k2)) * np.exp(-1j * (lo * k2))


def _bluestein(x, m, theta):
    """y_n = sum_k x_k exp(-i theta n k) for n < m (chirp-z transform)."""
    k = len(x)
    size = sfft.next_fast_len(k + m - 1)
    c = _chirp(theta, max(k, m))
    a = np.zeros(size, dtype=complex)
    a[:k] = x * c[:k]
    b = np.zeros(size, dtype=complex)
    b[:m] = np.conj(c[:m])
    if k > 1:
        b[size - k + 1:] = np.conj(c[1:k][::-1])
    return sfft.ifft(sfft.fft(a) * sfft.fft(b))[:m] * c[:m]


def _mode_sum(weights, detuning, omega, omega_c, t, method):
    """sum_k weights_k exp(i detuning_k t) on the time grid ``t``."""
    h = _uniform_step(t)
    if method == "auto":
        method = "fast" if (len(weights) > DIRECT_MODE_LIMIT and h is not None) else "direct"
    if method == "fast":
        if h is None:
            raise ConfigurationError("fast rendering needs a uniform time grid")
        d_omega = omega[1] - omega[0] if len(omega) > 1 else 1.0
        k = np.arange(len(weights))
        pre = weights * np.exp(-1j * (k * d_omega) * t[0])
        return np.exp(1j * (omega_c - omega[0]) * t) * _bluestein(pre, len(t), d_omega * h)
    if method != "direct":
        raise ConfigurationError(f"unknown rendering method {method!r}")
    out = np.empty(len(t), dtype=complex)
    rows = max(1, (1 << 21) // max(1, len(weights)))
    for lo in range(0, len(t), rows):
        phase = np.exp(1j * np.outer(t[lo:lo + rows], detuning))
        out[lo:lo + rows] = phase @ weights
    return out


def render_noise(modes: BathModes, t_grid, method: str = "auto") -> NoiseSeries:
    """Evaluate the input-noise mode sum on ``t_grid``.

    Up to ``DIRECT_MODE_LIMIT`` modes the sum is done directly; above it, and
    when the grid is uniform, a chirp-z transform is used instead.
    """
    t = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t) <= 0):
        raise ConfigurationError("t_grid must be increasing")
    weights = modes.d_omega / math.sqrt(2 * math.pi) * modes.amplitudes
    samples = _mode_sum(weights, modes.detuning, modes.omega, modes.omega_c, t, method)
    return NoiseSeries(t, samples, modes.omega_cap, modes.seed, modes.d_omega)


def cavity_transfer(detuning, kappa: float = 1.0):
    """One-pole cavity response sqrt(kappa) / (kappa/2 + i nu); DC gain 2/sqrt(kappa)."""
    return math.sqrt(kappa) / (kappa / 2 + 1j * np.asarray(detuning))


def cavity_response(modes: BathModes, t_grid, kappa: float = 1.0, method: str = "auto") -> np.ndarray:
    """Stationary cavity field driven by ``modes``, filtered exactly per mode.

    Equivalent to convolving the input noise with sqrt(kappa) exp(-kappa s/2)
    from the infinite past, with no discretisation of time.
    """
    t = np.asarray(t_grid, dtype=float)
    nu = modes.detuning
    weights = modes.d_omega / math.sqrt(2 * math.pi) * modes.amplitudes * cavity_transfer(nu, kappa)
    return _mode_sum(weights, nu, modes.omega, modes.omega_c, t, method)


def one_pole_filter(u, h: float, kappa: float = 1.0) -> np.ndarray:
    """Recursive solution of dy/dt = -(kappa/2) y + sqrt(kappa) u on a uniform grid.

    The input is taken as piecewise linear between samples, which makes the
    update exact for such inputs. Before the first sample the input is held
    at u[0], so the filter starts on its DC fixed point (2/sqrt(kappa)) u[0].
    """
    u = np.asarray(u)
    alpha = kappa / 2
    decay = math.exp(-alpha * h)
    one_minus = -math.expm1(-alpha * h)
    i0 = one_minus / alpha
    i1 = (alpha * h + math.expm1(-alpha * h)) / alpha**2
    root = math.sqrt(kappa)
    c_new = root * i1 / h
    c_old = root * (i0 - i1 / h)
    y0 = 2 / root * u[0]
    zi = [y0 - c_new * u[0]]
    y, _ = lfilter([c_new, c_old], [1.0, -decay], u, zi=zi)
    return y


def filter_exponential(noise: NoiseSeries, kappa: float = 1.0, warmup: float = 20.0) -> NoiseSeries:
    """Cavity response to ``noise`` via the one-pole recursion, warm-up discarded.

    ``warmup`` is in units of 1/kappa and must be at least 20. The grid must
    be uniform with step no larger than 0.2/kappa.
    """
    t = np.asarray(noise.t, dtype=float)
    h = _uniform_step(t)
    if h is None:
        raise ConfigurationError("filter_exponential needs a uniform time grid")
    if h > 0.2 / kappa * (1 + 1e-12):
        raise ConfigurationError(f"time step {h} exceeds 0.1 * (2/kappa)")
    if warmup < 20:
        raise ConfigurationError("warm-up must be at least 20/kappa")
    keep = t >= t[0] + warmup / kappa - 1e-9 * h
    if not np.any(keep):
        raise ConfigurationError("time grid is shorter than the warm-up span")
    y = one_pole_filter(noise.samples, h, kappa)
    return NoiseSeries(t[keep], y[keep], noise.omega_cap, noise.seed, noise.d_omega)


def expected_correlation(x: float, d_omega: float, n_th: float, lags, *,
                         omega_c: float = 0.0, kappa: float = 1.0) -> np.ndarray:
    """Exact ensemble mean of the Monte Carlo estimator for a finite mode grid.

    (kappa n_th / 2 pi) sum_k dw exp(i (w_k - omega_c) tau) / ((w_k - omega_c)^2 + kappa^2/4),
    the discrete counterpart of (kappa / 2 pi) n_th f(tau).
    """
    omega = mode_grid(x, d_omega)
    u = omega - omega_c
    weight = d_omega / (u * u + kappa**2 / 4)
    lags = np.asarray(lags, dtype=float)
    return kappa * n_th / (2 * math.pi) * np.array([np.sum(weight * np.exp(1j * u * tau)) for tau in lags])


def mc_correlation(x: float, d_omega: float, n_th: float, n_traj: int, lags, seed: int, *,
                   omega_c: float = 0.0, kappa: float = 1.0, threads: int = 1) -> CorrelationSeries:
    """Monte Carlo estimate of the cut-off cavity correlation <a^dag(t) a(t')>.

    Each trajectory draws its own bath realisation (stream = trajectory
    index), filters it exactly through the cavity, and contributes
    conj(a(0)) a(-tau) for every lag tau = t - t'. Trajectories are
    processed in fixed blocks and stored by index, so the estimate does not
    depend on ``threads``.

    The standard error per lag is sqrt((var Re + var Im) / n_traj).
    """
    _check_grid(x, d_omega, n_th)
    if n_traj < 2:
        raise ConfigurationError("need at least two trajectories for a standard error")
    lags = np.asarray(lags, dtype=float)
    omega = mode_grid(x, d_omega)
    nu = omega_c - omega
    gain = d_omega / math.sqrt(2 * math.pi) * cavity_transfer(nu, kappa)
    columns = gain[None, :] * np.exp(-1j * np.outer(np.concatenate([[0.0], lags]), nu))
    samples = np.zeros((n_traj, len(lags)), dtype=complex)

    def run_block(start):
        stop = min(start + _BLOCK, n_traj)
        beta = np.empty((stop - start, len(omega)), dtype=complex)
        for row, j in enumerate(range(start, stop)):
            _draw_amplitudes(seed, j, len(omega), n_th, d_omega, out=beta[row])
        # einsum's own loops, not BLAS: summation order is fixed
        a_vals = np.einsum("bk,lk->bl", beta, columns)
        samples[start:stop] = np.conj(a_vals[:, :1]) * a_vals[:, 1:]

    starts = range(0, n_traj, _BLOCK)
    if threads <= 1:
        for s in starts:
            run_block(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_block, starts))

    mean = samples.mean(axis=0)
    var = samples.real.var(axis=0, ddof=1) + samples.imag.var(axis=0, ddof=1)
    series = CorrelationSeries(lags=lags, values=mean, method="cutoff-mc", stderr=np.sqrt(var / n_traj))
    if n_traj < 100:
        series.warnings.append(f"only {n_traj} trajectories; standard errors are unreliable below 100")
    return series
