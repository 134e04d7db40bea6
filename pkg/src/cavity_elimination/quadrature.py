"""Adaptive Gauss-Kronrod integration of the cavity's frequency integrals.

These are the numerical counterparts of the closed forms in
:mod:`cavity_elimination.analytic`: the Lorentzian commutator integral and
the oscillatory correlation kernel

    f(dt) = int_{-Omega}^{Omega} exp(i (w' - omega_c) dt) / ((w' - omega_c)^2 + 1/4) dw'

(kappa = 1). The integrator works on many panels at once with numpy, so a
lag-dependent cap on panel width keeps oscillatory integrands resolved
without a specialised oscillatory rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import CutoffSpec, f_leading, s_bound
from .errors import ConfigurationError, ConvergenceError, PreconditionError

# QUADPACK qk21 abscissae on [0, 1]; Gauss-10 nodes sit at odd indices
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(21)
_GAUSS_W[1:10:2] = _WG
_GAUSS_W[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps
_CHUNK = 65536


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 10_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigurationError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ConfigurationError("max_subdivisions must be >= 1")


def _gk21(func, a, b):
    """Kronrod estimates and QUADPACK-style error bounds on panels [a, b]."""
    values = []
    errors = []
    for lo in range(0, len(a), _CHUNK):
        pa = a[lo:lo + _CHUNK, None]
        pb = b[lo:lo + _CHUNK, None]
        half = 0.5 * (pb - pa)
        fx = func(0.5 * (pa + pb) + half * _NODES)
        resk = fx @ _KRONROD_W
        resg = fx @ _GAUSS_W
        resabs = np.abs(fx) @ _KRONROD_W
        resasc = np.abs(fx - 0.5 * resk[:, None]) @ _KRONROD_W
        half = half[:, 0]
        err = np.abs(resk - resg) * half
        resasc = resasc * half
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200 * err / np.where(resasc > 0, resasc, 1)) ** 1.5), err)
        err = np.maximum(scaled, 50 * _EPS * resabs * half)
        values.append(resk * half)
        errors.append(err)
    return np.concatenate(values), np.concatenate(errors)


def integrate_panels(func, breakpoints, cfg: QuadratureConfig | None = None):
    """Globally adaptive GK21 over the panels between sorted ``breakpoints``.

    ``func`` must accept an ndarray of abscissae and return values of the
    same shape. Each round bisects the panels carrying the largest error
    until the summed error estimate meets the tolerance.

    Returns
    -------
    (value, error) : tuple
        Integral estimate and its error estimate.
    """
    cfg = cfg or QuadratureConfig()
    edges = np.asarray(breakpoints, dtype=float)
    a, b = edges[:-1].copy(), edges[1:].copy()
    vals, errs = _gk21(func, a, b)
    used = 0
    while True:
        total = vals.sum()
        total_err = float(errs.sum())
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err
        order = np.argsort(errs, kind="stable")[::-1]
        excess = np.cumsum(errs[order])
        n_pick = int(np.searchsorted(excess, total_err - 0.5 * tol)) + 1
        pick = order[:n_pick]
        used += n_pick
        if used > cfg.max_subdivisions:
            raise ConvergenceError(
                f"no convergence within {cfg.max_subdivisions} subdivisions "
                f"(estimate {total}, error {total_err:.3e}, tolerance {tol:.3e})",
                estimate=total,
                error=total_err,
            )
        mid = 0.5 * (a[pick] + b[pick])
        new_a = np.concatenate([a[pick], mid])
        new_b = np.concatenate([mid, b[pick]])
        new_vals, new_errs = _gk21(func, new_a, new_b)
        keep = np.ones(len(a), dtype=bool)
        keep[pick] = False
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def _breakpoints(w: float, x: float, max_width: float | None = None):
    marks = {-x, x}
    for offset in (-8.0, -1.0, 0.0, 1.0, 8.0):
        if -x < w + offset < x:
            marks.add(w + offset)
    edges = sorted(marks)
    if max_width is None:
        return np.array(edges)
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((hi - lo) / max_width))
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    pieces.append([edges[-1]])
    return np.concatenate(pieces)


def integrate_lorentzian(w: float, x: float, cfg: QuadratureConfig | None = None) -> float:
    """(1 / 2 pi) int_{-x}^{x} dv / ((v - w)^2 + 1/4), the cut-off commutator by quadrature."""
    if not x > 0:
        raise PreconditionError(f"bandwidth ratio must be > 0, got {x}")

    def lorentzian(v):
        u = v - w
        return 1.0 / (u * u + 0.25)

    value, _ = integrate_panels(lorentzian, _breakpoints(w, x), cfg)
    return float(value) / (2 * math.pi)


def integrate_f(dt: float, w: float, x: float, cfg: QuadratureConfig | None = None) -> complex:
    """Cut-off correlation kernel f(dt) by quadrature, ``dt`` = kappa (t - t').

    Panels are never wider than pi / (4 |dt|), eight per oscillation period.
    """
    if not x > 0:
        raise PreconditionError(f"bandwidth ratio must be > 0, got {x}")
    cap = math.pi / (4 * abs(dt)) if dt != 0 else None

    if dt == 0:
        def kernel(v):
            u = v - w
            return 1.0 / (u * u + 0.25)
    else:
        def kernel(v):
            u = v - w
            return np.exp(1j * dt * u) / (u * u + 0.25)

    value, _ = integrate_panels(kernel, _breakpoints(w, x, cap), cfg)
    return complex(value)


@dataclass
class ResidueReport:
    """Per-lag comparison of the quadrature kernel against its pole term."""

    omega_c: float
    omega_cap: float
    lags: np.ndarray
    f_values: np.ndarray
    leading: np.ndarray
    deviations: np.ndarray
    s_bound: float
    passed: np.ndarray = field(default=None)

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations))


def residue_check(w: float, x: float, lags, cfg: QuadratureConfig | None = None) -> ResidueReport:
    """Check |f(dt) - (2 pi) exp(-|dt|/2)| <= s_bound at each lag.

    Raises
    ------
    PreconditionError
        When Omega^2 <= omega_c^2 + kappa^2/4, i.e. the lower pole would
        also fall inside the contour.
    BoundInvalidError
        When the pole condition holds but the arc bound's denominator does not.
    """
    cfg = cfg or QuadratureConfig()
    spec = CutoffSpec(omega_cap=x, omega_c=w)
    if not spec.residue_bound_valid:
        raise PreconditionError(
            f"residue bound needs Omega^2 > omega_c^2 + kappa^2/4; "
            f"got Omega/kappa={x}, omega_c/kappa={w}"
        )
    bound = s_bound(w, x)
    lags = np.asarray(lags, dtype=float)
    f_values = np.array([integrate_f(dt, w, x, cfg) for dt in lags])
    leading = np.array([f_leading(dt) for dt in lags])
    deviations = np.abs(f_values - leading)
    slack = 1e3 * cfg.rel_tol * np.abs(f_values)
    return ResidueReport(
        omega_c=w,
        omega_cap=x,
        lags=lags,
        f_values=f_values,
        leading=leading,
        deviations=deviations,
        s_bound=bound,
        passed=deviations <= bound + slack,
    )
