import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavity_elimination.analytic import (
    CutoffSpec,
    SystemParams,
    adiabatic_delta_coefficient,
    commutator_cutoff,
    correlation_exact,
    d_bound,
    delta_expansion_coefficients,
    eliminated_occupation,
    eliminated_rate,
    f_leading,
    full_occupation_ss,
    s_bound,
)
from cavity_elimination.errors import (
    BoundInvalidError,
    DomainError,
    NoSteadyStateError,
    UnsupportedOrderError,
)

# 40-digit mpmath evaluations of the arctan closed form, cross-checked
# against mpmath quadrature of the Lorentzian
COMMUTATOR_FROZEN = [
    (1e3, 1e3, 0.49992042253011192),
    (1e3, 2e3, 0.99978779342296494),
    (0.0, 1.0, 0.70483276469913345),
    (1e3, 1.5e3, 0.99961802824353151),
    (1e3, 1e6, 0.99999968168979551),
]

ratios = st.floats(min_value=0, max_value=1e4, allow_nan=False)


@pytest.mark.parametrize("w, x, expected", COMMUTATOR_FROZEN)
def test_commutator_frozen_values(w, x, expected):
    assert commutator_cutoff(w, x) == pytest.approx(expected, abs=1e-15)


def test_commutator_limits():
    assert commutator_cutoff(1e3, math.inf) == 1.0
    assert commutator_cutoff(1e3, 0.0) == 0.0
    assert commutator_cutoff(1e3, 1e3) == pytest.approx(0.5 - math.atan(1 / 4000) / math.pi, abs=1e-16)


def test_commutator_rejects_negative_bandwidth():
    with pytest.raises(DomainError):
        commutator_cutoff(1e3, -1.0)


@given(w=ratios, x1=ratios, x2=ratios)
def test_commutator_monotone_and_bounded(w, x1, x2):
    lo, hi = sorted((x1, x2))
    c_lo, c_hi = commutator_cutoff(w, lo), commutator_cutoff(w, hi)
    assert 0 <= c_lo <= c_hi <= 1


@given(x=st.floats(min_value=0, max_value=1e6))
def test_commutator_zero_resonance_symmetry(x):
    assert commutator_cutoff(0.0, x) == pytest.approx(2 / math.pi * math.atan(2 * x), abs=1e-15)


@given(w=st.floats(min_value=0, max_value=1e3))
def test_commutator_reaches_one_far_above_resonance(w):
    assert commutator_cutoff(w, 1e6 * max(w, 1.0)) >= 1 - 1e-6


def test_correlation_exact_examples():
    assert correlation_exact(5, 0) == 5
    assert correlation_exact(0, 3.7) == 0
    assert correlation_exact(2, 2) == pytest.approx(2 * math.exp(-1), rel=1e-15)


@given(n=st.floats(min_value=1e-3, max_value=1e3), d1=st.floats(0, 50), d2=st.floats(0, 50))
def test_correlation_exact_symmetric_and_decreasing(n, d1, d2):
    assert correlation_exact(n, d1) == correlation_exact(n, -d1)
    if d1 <= d2:
        assert correlation_exact(n, d1) >= correlation_exact(n, d2)
    if d2 - d1 > 1e-3:
        assert correlation_exact(n, d1) > correlation_exact(n, d2)


def test_f_leading():
    assert f_leading(0) == 2 * math.pi
    assert f_leading(2) == pytest.approx(2 * math.pi / math.e)
    assert f_leading(-2) == f_leading(2)


def test_s_bound_examples():
    assert s_bound(1e3, 4e3) == pytest.approx(4000 * math.pi / 6_999_999.75, rel=1e-14)
    assert s_bound(1e3, 4e3) == pytest.approx(1.7951958661654485e-3, rel=1e-14)
    assert s_bound(1e3, math.inf) == 0.0
    with pytest.raises(BoundInvalidError):
        s_bound(1e3, 1e3)


def test_d_bound_examples():
    assert d_bound(1e3, 4e3) == pytest.approx(8000 / 27_999_999, rel=1e-14)
    assert d_bound(1e3, 1e7) == pytest.approx(5.001000250060027e-8, rel=1e-12)
    assert d_bound(1e3, math.inf) == 0.0
    with pytest.raises(BoundInvalidError):
        d_bound(1e3, 2e3)


def test_d_bound_is_scaled_s_bound():
    # D = (kappa / 2 pi) n_th S with kappa = n_th = 1
    for x in (3e3, 4e3, 1e5):
        assert d_bound(1e3, x) == pytest.approx(s_bound(1e3, x) / (2 * math.pi), rel=1e-13)


@given(w=st.floats(0, 1e3), a=st.floats(1, 100), b=st.floats(1, 100))
def test_bounds_decrease_on_validity_domain(w, a, b):
    x0 = w * (1 + math.sqrt(2)) + 1
    x1, x2 = sorted((x0 * a, x0 * b))
    if x1 == x2:
        return
    assert s_bound(w, x1) > s_bound(w, x2) > 0
    assert d_bound(w, x1) > d_bound(w, x2) > 0


def test_cutoff_spec_flags():
    assert not CutoffSpec(1e3, 1e3).residue_bound_valid
    assert CutoffSpec(1.5e3, 1e3).residue_bound_valid
    assert not CutoffSpec(2e3, 1e3).d_bound_valid
    assert CutoffSpec(4e3, 1e3).d_bound_valid
    with pytest.raises(DomainError):
        CutoffSpec(0.0)


def test_delta_coefficients():
    assert delta_expansion_coefficients(1) == [4.0]
    assert delta_expansion_coefficients(2) == [4.0, 8.0]
    assert delta_expansion_coefficients(1, kappa=2.0) == [2.0]
    with pytest.raises(UnsupportedOrderError):
        delta_expansion_coefficients(3)
    with pytest.raises(UnsupportedOrderError):
        delta_expansion_coefficients(0)


@given(n=st.floats(0, 1e3), kappa=st.floats(0.1, 10))
def test_adiabatic_coefficient_is_leading_term(n, kappa):
    assert adiabatic_delta_coefficient(n, kappa) == n * delta_expansion_coefficients(1, kappa)[0]


def test_adiabatic_coefficient_examples():
    assert adiabatic_delta_coefficient(0) == 0
    assert adiabatic_delta_coefficient(1) == 4


def test_eliminated_rate_examples():
    assert eliminated_rate(0, 1e-3) == 1e-3
    assert eliminated_rate(0.1, 1e-3) == pytest.approx(0.041, rel=1e-14)
    assert eliminated_rate(0.05, 0) == pytest.approx(0.01, rel=1e-14)


@given(g=st.floats(0, 10), gamma=st.floats(0, 10))
def test_eliminated_rate_at_least_gamma(g, gamma):
    rate = eliminated_rate(g, gamma)
    assert rate >= gamma
    if g > 1e-150:
        assert rate > gamma or 4 * g * g < gamma * 1e-16


def test_full_occupation_examples():
    assert full_occupation_ss(0, 0.3, 2.5) == pytest.approx(2.5)
    full = full_occupation_ss(0.1, 1e-3, 1.0)
    reduced = eliminated_occupation(0.1, 1e-3, 1.0)
    # ratio 1 + 4 G^2 / (kappa (kappa + gamma)), from a symbolic 2x2 Lyapunov solve
    assert full / reduced == pytest.approx(1 + 0.04 / 1.001, rel=1e-13)
    assert full / reduced - 1 == pytest.approx(4e-2, rel=1e-3)
    with pytest.raises(NoSteadyStateError):
        full_occupation_ss(0, 0, 1)


def test_system_params_validation():
    p = SystemParams()
    assert p.bath_coupling == pytest.approx(math.sqrt(1 / (2 * math.pi)))
    with pytest.raises(DomainError):
        SystemParams(kappa=0)
    with pytest.raises(DomainError):
        SystemParams(gamma=-1)
    with pytest.raises(DomainError):
        SystemParams(omega_c=0)
