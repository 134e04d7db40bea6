"""Second-moment dynamics of the coupled cavity / partner-mode system.

For linear Langevin equations the normally ordered moments close exactly.
With v = (a, b), drift matrix M and diffusion D = diag(kappa n_a, gamma n_b),

    d<v>/dt = M <v>,        dN/dt = conj(M) N + N M^T + D,

where N[i, j] = <v_i^dag v_j>. M is symmetric here, so the second equation
is the familiar M^dag N + N M + D.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, solve_continuous_lyapunov

from .analytic import SystemParams, eliminated_occupation
from .errors import IntegrationError, NoSteadyStateError, PreconditionError
from .series import CorrelationSeries

_MODES = {"a": 0, "b": 1}


@dataclass
class MomentState:
    first_moments: np.ndarray
    second_moments: np.ndarray

    def __post_init__(self):
        self.first_moments = np.asarray(self.first_moments, dtype=complex).reshape(2)
        n = np.asarray(self.second_moments, dtype=complex).reshape(2, 2)
        scale = max(1.0, float(np.max(np.abs(n))))
        if np.max(np.abs(n - n.conj().T)) > 1e-9 * scale:
            raise ValueError("second-moment matrix is not Hermitian")
        self.second_moments = 0.5 * (n + n.conj().T)

    @classmethod
    def vacuum(cls):
        return cls(np.zeros(2), np.zeros((2, 2)))

    def occupation(self, mode: str) -> float:
        i = _MODES[mode]
        return float(self.second_moments[i, i].real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.second_moments)[0])


def drift_matrix(p: SystemParams) -> np.ndarray:
    g = p.g_coupling
    return np.array([[-p.kappa / 2, -1j * g], [-1j * g, -p.gamma / 2]])


def diffusion_matrix(p: SystemParams) -> np.ndarray:
    return np.diag([p.kappa * p.n_th_a, p.gamma * p.n_th_b]).astype(complex)


def _moment_rhs(m, n, drift, drift_conj, drift_t, diff):
    return drift @ m, drift_conj @ n + n @ drift_t + diff


def lyapunov_residual(p: SystemParams, n: np.ndarray) -> float:
    drift = drift_matrix(p)
    r = drift.conj() @ n + n @ drift.T + diffusion_matrix(p)
    return float(np.linalg.norm(r))


def _require_hurwitz(p: SystemParams, drift: np.ndarray):
    if p.gamma == 0 and p.g_coupling == 0:
        raise NoSteadyStateError("gamma = G = 0: mode b is undamped")
    if np.max(np.linalg.eigvals(drift).real) >= 0:
        raise NoSteadyStateError("drift matrix is not Hurwitz")


def steady_state(p: SystemParams) -> MomentState:
    """Stationary moments: zero means, N solving the Lyapunov equation."""
    drift = drift_matrix(p)
    _require_hurwitz(p, drift)
    diff = diffusion_matrix(p)
    # solve_continuous_lyapunov solves A X + X A^H = Q
    n = solve_continuous_lyapunov(drift.conj(), -diff)
    return MomentState(np.zeros(2), n)


def _project_psd(n, tol):
    n = 0.5 * (n + n.conj().T)
    vals, vecs = np.linalg.eigh(n)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if vals[0] < -tol * scale:
        return None
    if vals[0] < 0:
        vals = np.clip(vals, 0, None)
        n = (vecs * vals) @ vecs.conj().T
    return n


def evolve(p: SystemParams, initial: MomentState, t_grid, rtol: float = 1e-10,
           max_refinements: int = 6) -> list[MomentState]:
    """Integrate the moment equations with classic RK4, returning one state per time.

    The step never exceeds 0.01 / max|eigenvalue(M)|. Each output interval
    is integrated at step h and h/2; the Richardson estimate
    |y_h - y_{h/2}| / 15 must stay below ``rtol`` (relative to the state
    scale) or the step is halved, up to ``max_refinements`` times.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) == 0 or t_grid[0] != 0:
        raise PreconditionError("t_grid must be a 1-D array starting at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise PreconditionError("t_grid must be strictly increasing")

    drift = drift_matrix(p)
    drift_conj, drift_t = drift.conj(), drift.T
    diff = diffusion_matrix(p)
    h_max = 0.01 / max(np.max(np.abs(np.linalg.eigvals(drift))), 1e-300)

    def rk4(m, n, span, steps):
        h = span / steps
        for _ in range(steps):
            k1m, k1n = _moment_rhs(m, n, drift, drift_conj, drift_t, diff)
            k2m, k2n = _moment_rhs(m + 0.5 * h * k1m, n + 0.5 * h * k1n, drift, drift_conj, drift_t, diff)
            k3m, k3n = _moment_rhs(m + 0.5 * h * k2m, n + 0.5 * h * k2n, drift, drift_conj, drift_t, diff)
            k4m, k4n = _moment_rhs(m + h * k3m, n + h * k3n, drift, drift_conj, drift_t, diff)
            m = m + h / 6 * (k1m + 2 * k2m + 2 * k3m + k4m)
            n = n + h / 6 * (k1n + 2 * k2n + 2 * k3n + k4n)
        return m, n

    m, n = initial.first_moments.copy(), initial.second_moments.copy()
    states = [MomentState(m, n)]
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        span = t1 - t0
        steps = max(1, math.ceil(span / h_max))
        for _ in range(max_refinements + 1):
            coarse = rk4(m, n, span, steps)
            fine = rk4(m, n, span, 2 * steps)
            scale = 1.0 + max(np.max(np.abs(fine[0])), np.max(np.abs(fine[1])))
            err = max(np.max(np.abs(coarse[0] - fine[0])), np.max(np.abs(coarse[1] - fine[1]))) / 15
            if err <= rtol * scale:
                break
            steps *= 2
        else:
            raise IntegrationError(
                f"Richardson error {err:.3e} above tolerance on [{t0}, {t1}]",
                time=t0,
                state=states[-1],
            )
        n_next = _project_psd(fine[1], 1e-12)
        if n_next is None:
            raise IntegrationError(f"second moments lost positivity at t={t1}", time=t0, state=states[-1])
        m, n = fine[0], n_next
        states.append(MomentState(m, n))
    return states


def regression_correlation(p: SystemParams, mode: str, lags) -> CorrelationSeries:
    """Stationary <v^dag(t) v(t + tau)> for v = ``mode`` by quantum regression.

    The vector c_j(tau) = <v_mode^dag(t) v_j(t + tau)> obeys dc/dtau = M c,
    starting from row ``mode`` of the stationary N. It is propagated with
    the exact matrix exponential.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    lags = np.asarray(lags, dtype=float)
    if np.any(lags < 0):
        raise PreconditionError("lags must be non-negative")
    i = _MODES[mode]
    c0 = steady_state(p).second_moments[i, :]
    drift = drift_matrix(p)
    values = np.array([(expm(drift * tau) @ c0)[i] for tau in lags])
    return CorrelationSeries(lags=lags, values=values, method="regression")


@dataclass
class ComparisonReport:
    g_values: np.ndarray
    full_occupation: np.ndarray
    eliminated_occupation: np.ndarray
    rel_errors: np.ndarray
    scaling_exponent: float


def _occupations(p: SystemParams, g: float):
    q = dataclasses.replace(p, g_coupling=g)
    full = steady_state(q).occupation("b")
    reduced = eliminated_occupation(g, q.gamma, q.n_th_b, q.n_th_a)
    return full, reduced


def compare_eliminated(p: SystemParams, g_sweep, threads: int = 1) -> ComparisonReport:
    """Full versus eliminated steady occupation of ``b`` over a coupling sweep.

    The relative error is |full - eliminated| / eliminated. The scaling
    exponent is the least-squares slope of log(error) against log(g) over
    points with positive g and error.
    """
    g_values = np.unique(np.asarray(g_sweep, dtype=float))
    if len(g_values) == 0 or np.any(g_values < 0):
        raise PreconditionError("coupling sweep must be non-empty and non-negative")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        pairs = list(pool.map(lambda g: _occupations(p, g), g_values))
    full = np.array([f for f, _ in pairs])
    reduced = np.array([r for _, r in pairs])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(reduced > 0, np.abs(full - reduced) / reduced, np.where(full == reduced, 0.0, np.inf))
    usable = (g_values > 0) & (rel > 0) & np.isfinite(rel)
    if usable.sum() >= 2:
        exponent = float(np.polyfit(np.log(g_values[usable]), np.log(rel[usable]), 1)[0])
    else:
        exponent = math.nan
    return ComparisonReport(g_values, full, reduced, rel, exponent)
