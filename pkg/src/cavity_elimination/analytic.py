"""Closed-form expressions for the cut-off cavity and its eliminated reduction.

All rates and frequencies are in units of the cavity damping rate, so
``kappa`` is 1 unless a function explicitly takes it for rescaling. A
frequency ratio ``w`` means omega_c / kappa and ``x`` means Omega / kappa,
where Omega is the bath bandwidth cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BoundInvalidError,
    DomainError,
    NoSteadyStateError,
    UnsupportedOrderError,
)


@dataclass(frozen=True)
class SystemParams:
    """Cavity mode ``a`` coupled to a partner mode ``b``.

    Attributes
    ----------
    omega_c : float
        Cavity resonance, omega_c / kappa.
    kappa : float
        Cavity damping. Kept at 1 by convention; it only exists so results
        can be rescaled to physical units.
    gamma : float
        Partner-mode damping, gamma / kappa.
    g_coupling : float
        Beam-splitter coupling G / kappa.
    n_th_a, n_th_b : float
        Mean thermal occupations of the cavity and partner baths.
    """

    omega_c: float = 1e3
    kappa: float = 1.0
    gamma: float = 1e-3
    g_coupling: float = 0.1
    n_th_a: float = 0.0
    n_th_b: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        if not self.omega_c > 0:
            raise DomainError(f"omega_c must be positive, got {self.omega_c}")
        for name in ("gamma", "g_coupling", "n_th_a", "n_th_b"):
            value = getattr(self, name)
            if not value >= 0:
                raise DomainError(f"{name} must be >= 0, got {value}")

    @property
    def bath_coupling(self) -> float:
        """Frequency-independent system-bath coupling sqrt(kappa / 2 pi)."""
        return math.sqrt(self.kappa / (2 * math.pi))


@dataclass(frozen=True)
class CutoffSpec:
    """Bath bandwidth Omega together with the validity domains of the bounds.

    The flags are properties so they can never go stale.
    """

    omega_cap: float
    omega_c: float = 1e3
    kappa: float = 1.0

    def __post_init__(self):
        if not self.omega_cap > 0:
            raise DomainError(f"omega_cap must be positive, got {self.omega_cap}")

    @property
    def residue_bound_valid(self) -> bool:
        # only the upper-half-plane pole may lie inside the contour
        return self.omega_cap**2 > self.omega_c**2 + self.kappa**2 / 4

    @property
    def d_bound_valid(self) -> bool:
        x = self.omega_cap / self.kappa
        w = self.omega_c / self.kappa
        return 4 * x * x - 8 * w * x - 4 * w * w - 1 > 0


def _arctan(y: float) -> float:
    # complementary form keeps the digits that matter when |y| is large
    if abs(y) > 1:
        return math.copysign(math.pi / 2, y) - math.atan(1 / y)
    return math.atan(y)


def commutator_cutoff(w: float, x: float) -> float:
    """Equal-time commutator [a, a^dag] when the bath is cut off at Omega.

    Parameters
    ----------
    w : float
        omega_c / kappa.
    x : float
        Omega / kappa, must be non-negative. ``math.inf`` gives the
        uncut value 1.

    Returns
    -------
    float
        (1/pi) [arctan(2(x - w)) + arctan(2(x + w))].
    """
    if not x >= 0:
        raise DomainError(f"bandwidth ratio must be >= 0, got {x}")
    return (_arctan(2 * (x - w)) + _arctan(2 * (x + w))) / math.pi


def correlation_exact(n_th: float, dt: float) -> float:
    """<a^dag(t) a(t')> for a white-noise bath; ``dt`` is kappa |t - t'|."""
    if not n_th >= 0:
        raise DomainError(f"occupation must be >= 0, got {n_th}")
    return n_th * math.exp(-abs(dt) / 2)


def f_leading(dt: float, kappa: float = 1.0) -> float:
    """Infinite-bandwidth limit (2 pi / kappa) exp(-|dt| / 2) of the cut-off kernel."""
    return 2 * math.pi / kappa * math.exp(-abs(dt) / 2)


def s_bound(w: float, x: float) -> float:
    """Upper bound on |S|, the arc contribution separating f from its limit.

    pi x / (x^2 - 2 w x - w^2 - 1/4). Raises :class:`BoundInvalidError`
    where that denominator is not positive.
    """
    if math.isinf(x):
        return 0.0
    if not x > 0:
        raise BoundInvalidError(f"s_bound needs Omega/kappa > 0, got {x}")
    reduced = x - 2 * w - (w * w + 0.25) / x
    if not reduced > 0:
        raise BoundInvalidError(
            f"s_bound denominator Omega^2 - 2 omega_c Omega - omega_c^2 - kappa^2/4 "
            f"is not positive at w={w}, x={x}"
        )
    return math.pi / reduced


def d_bound(w: float, x: float) -> float:
    """Bound on |D|, the cut-off minus white-noise correlation (n_th = 1).

    2x / (4x^2 - 8wx - 4w^2 - 1), refused where the denominator is <= 0.
    """
    if math.isinf(x):
        return 0.0
    if not x > 0:
        raise BoundInvalidError(f"d_bound needs Omega/kappa > 0, got {x}")
    reduced = 4 * x - 8 * w - (4 * w * w + 1) / x
    if not reduced > 0:
        raise BoundInvalidError(
            f"d_bound denominator 4x^2 - 8wx - 4w^2 - 1 is not positive at w={w}, x={x}"
        )
    return 2 / reduced


def delta_expansion_coefficients(order: int, kappa: float = 1.0) -> list[float]:
    """Weights 2(2/kappa)^k of delta and its first derivative, up to ``order``."""
    if order not in (1, 2):
        raise UnsupportedOrderError(f"expansion order must be 1 or 2, got {order}")
    return [2 * (2 / kappa) ** k for k in range(1, order + 1)]


def adiabatic_delta_coefficient(n_th: float, kappa: float = 1.0) -> float:
    """Weight 4 n_th / kappa of delta(t - t') in the eliminated correlation."""
    if not n_th >= 0:
        raise DomainError(f"occupation must be >= 0, got {n_th}")
    return n_th * delta_expansion_coefficients(1, kappa)[0]


def eliminated_rate(g: float, gamma: float) -> float:
    """Total damping gamma + 4 G^2 / kappa of ``b`` once the cavity is removed."""
    if not (g >= 0 and gamma >= 0):
        raise DomainError(f"need g >= 0 and gamma >= 0, got g={g}, gamma={gamma}")
    return gamma + 4 * g * g


def eliminated_occupation(g: float, gamma: float, n_b: float, n_a: float = 0.0) -> float:
    """Stationary <b^dag b> of the reduced single-mode model.

    The cavity noise pushed into ``b`` contributes diffusion 4 G^2 n_a, which
    is zero for a vacuum cavity input.
    """
    rate = eliminated_rate(g, gamma)
    if rate == 0:
        raise NoSteadyStateError("no damping: eliminated model has no steady state")
    return (gamma * n_b + 4 * g * g * n_a) / rate


def full_occupation_ss(g: float, gamma: float, n_b: float) -> float:
    """Exact stationary <b^dag b> of the coupled two-mode system, vacuum cavity bath.

    n_b gamma (1 + gamma + 4 G^2) / [(1 + gamma)(gamma + 4 G^2)] in units of kappa.
    """
    if not (g >= 0 and gamma >= 0 and n_b >= 0):
        raise DomainError(f"need non-negative g, gamma, n_b; got {g}, {gamma}, {n_b}")
    rate = eliminated_rate(g, gamma)
    if rate == 0:
        raise NoSteadyStateError("gamma = G = 0: the partner mode has no steady state")
    return n_b * gamma * (1 + gamma + 4 * g * g) / ((1 + gamma) * rate)
