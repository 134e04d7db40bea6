"""Delta-function expansion of the exponential correlation kernel.

Against a smooth test function g, the kernel exp(-kappa |t - t'|/2) acts
like (4/kappa) g(t) - (8/kappa^2) g'(t) + ..., the expansion written for the
ordered region t > t'. Its leading term is what adiabatic elimination
keeps. The check compares the expansion against a numerical convolution.

Two kernels are supported:

``"retarded"``
    2 * int_{-inf}^{t} exp(-kappa (t - t')/2) g(t') dt', i.e. the t > t'
    branch carrying the full weight 4/kappa. This is the kernel the
    two-term expansion describes; the order-1 residual falls as kappa^-2.
``"symmetric"``
    int exp(-kappa |t - t'|/2) g(t') dt' over the whole line. The g' terms
    of the two branches cancel, so the order-1 residual falls as kappa^-3
    and the order-2 term does not improve it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .analytic import delta_expansion_coefficients
from .errors import ConfigurationError

KERNELS = ("retarded", "symmetric")


@dataclass(frozen=True)
class TestFunction:
    """Smooth test function with analytic value and first derivative.

    kind is ``"constant"`` (g = scale), ``"gaussian"`` (exp(-t^2 / 2 width^2))
    or ``"exponential"`` (exp(rate t); |rate| must stay below kappa/2 for
    the convolution to converge).
    """

    __test__ = False  # not a pytest class

    kind: str
    width: float = 100.0
    rate: float = 0.01
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "gaussian", "exponential"):
            raise ConfigurationError(f"unsupported test function {self.kind!r}")
        if self.kind == "gaussian" and not self.width > 0:
            raise ConfigurationError("gaussian width must be positive")

    def value(self, t: float) -> float:
        if self.kind == "constant":
            return self.scale
        if self.kind == "gaussian":
            return self.scale * math.exp(-t * t / (2 * self.width**2))
        return self.scale * math.exp(self.rate * t)

    def derivative(self, t: float) -> float:
        if self.kind == "constant":
            return 0.0
        if self.kind == "gaussian":
            return -t / self.width**2 * self.value(t)
        return self.rate * self.value(t)


@dataclass
class ExpansionReport:
    kappa: float
    order: int
    t_eval: float
    kernel: str
    convolution: float
    expansion: float

    @property
    def residual(self) -> float:
        return abs(self.convolution - self.expansion)


def kernel_convolution(g: TestFunction, t: float, kappa: float = 1.0, kernel: str = "retarded") -> float:
    """Numerical convolution of ``g`` with the chosen exponential kernel at ``t``."""
    if kernel not in KERNELS:
        raise ConfigurationError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    if g.kind == "exponential" and abs(g.rate) >= kappa / 2:
        raise ConfigurationError("exponential rate must satisfy |rate| < kappa/2")
    alpha = kappa / 2

    def weighted(s, sign):
        if g.kind == "exponential":
            # one exponent, so exp(rate * (t + s)) cannot overflow on its own
            return g.scale * math.exp(g.rate * t + (sign * g.rate - alpha) * s)
        return math.exp(-alpha * s) * g.value(t + sign * s)

    def past(s):
        return weighted(s, -1)

    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=500)
    left, _ = quad(past, 0, math.inf, **opts)
    if kernel == "retarded":
        return 2 * left

    def future(s):
        return weighted(s, 1)

    right, _ = quad(future, 0, math.inf, **opts)
    return left + right


def convolution_expansion_check(g_spec: TestFunction, order: int, t_eval: float,
                                kappa: float = 1.0, kernel: str = "retarded") -> ExpansionReport:
    """Compare the kernel convolution with its truncated delta expansion at ``t_eval``.

    Order 1 keeps (4/kappa) g(t); order 2 adds -(8/kappa^2) g'(t), which is
    how the derivative-of-delta term acts after integrating by parts.
    """
    coeffs = delta_expansion_coefficients(order, kappa)
    approx = coeffs[0] * g_spec.value(t_eval)
    if order == 2:
        approx -= coeffs[1] * g_spec.derivative(t_eval)
    conv = kernel_convolution(g_spec, t_eval, kappa, kernel)
    return ExpansionReport(kappa, order, t_eval, kernel, conv, approx)
