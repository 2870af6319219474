import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ybx.errors import ConfigError, PoleProximity
from ybx.special import (
    DEFAULT_MODULAR,
    EllipticParams,
    ModularParams,
    TruncationConfig,
    bar_theta,
    dfunc_quantized,
    elliptic_gamma,
    format_scalar,
    load_scalar,
    parse_scalar,
    q_binomial_coefficient,
    q_pochhammer_q2,
    rising_factorial,
    shift_constant,
    theta,
)

small_complex = st.complex_numbers(max_magnitude=0.5, allow_nan=False, allow_infinity=False)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=17)


def test_parse_and_format_scalars():
    assert parse_scalar("3/2") == Fraction(3, 2)
    assert parse_scalar("0.3+0.1j") == 0.3 + 0.1j
    assert parse_scalar("1/2", exact=False) == 0.5
    assert format_scalar(Fraction(-6, 4)) == "-3/2"
    assert format_scalar(1 + 2j) == [1.0, 2.0]
    with pytest.raises(ConfigError):
        parse_scalar("abc")


@given(rationals)
def test_scalar_round_trip_exact(x):
    assert load_scalar(format_scalar(x)) == x


@given(small_complex)
def test_scalar_round_trip_complex(z):
    assert load_scalar(format_scalar(z)) == z


def test_rising_factorial_examples():
    assert rising_factorial(Fraction(7, 3), 0) == 1
    assert rising_factorial(Fraction(3, 2), 2) == Fraction(15, 4)


@given(rationals, st.integers(0, 5), st.integers(0, 5))
def test_rising_factorial_splits(a, j, k):
    assert rising_factorial(a, j + k) == rising_factorial(a, j) * rising_factorial(a + j, k)


def test_q_pochhammer():
    q = 0.3 + 0.2j
    assert q_pochhammer_q2(q, 0) == 1
    assert abs(q_pochhammer_q2(q, 1) - (1 - q * q)) < 1e-15
    assert abs(q_pochhammer_q2(0.5, 2) - 0.703125) < 1e-15


@given(st.integers(0, 8), small_complex, st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_q_binomial_theorem(m, q, x):
    lhs = np.prod([1 + x * q ** (2 * k) for k in range(m)])
    rhs = sum(q_binomial_coefficient(q, m, k) * x**k for k in range(m + 1))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_modular_params_defaults():
    P = DEFAULT_MODULAR
    assert abs(P.omega * P.omega_prime + 0.25) < 1e-15
    assert abs(P.q - math.exp(-math.pi / 2)) < 1e-15
    assert abs(P.qpow(2) - P.q) < 1e-15
    with pytest.raises(ConfigError):
        ModularParams(1.0)


def test_dfunc_quantized_small_orders():
    P = DEFAULT_MODULAR
    x = 0.3 + 0.1j
    assert dfunc_quantized(0, x, P) == 1
    X = P.xvar(x)
    assert abs(dfunc_quantized(1, x, P) - (X + 1 / X)) < 1e-14


@pytest.mark.parametrize("m", range(7))
def test_dfunc_functional_equation_and_parity(m):
    P = DEFAULT_MODULAR
    w, wp = P.omega, P.omega_prime
    for x in (0.31 + 0.07j, -0.52 + 0.11j):
        ratio = dfunc_quantized(m, x - wp, P) / dfunc_quantized(m, x + wp, P)
        ref = cmath.cos(math.pi * (x - m * wp) / (2 * w)) / cmath.cos(math.pi * (x + m * wp) / (2 * w))
        assert abs(ratio - ref) < 1e-11 * abs(ref)
        assert abs(dfunc_quantized(m, x, P) - dfunc_quantized(m, -x, P)) < 1e-11 * abs(dfunc_quantized(m, x, P))


def test_theta_basic_values():
    tau = 1j
    assert abs(theta(1, 0.0, tau)) < 1e-15
    z = 0.21 + 0.13j
    assert abs(theta(1, z + 1, tau) + theta(1, z, tau)) < 1e-13
    assert abs(theta(2, z, tau) - theta(1, z + 0.5, tau)) < 1e-15
    assert abs(bar_theta(3, -z, tau) - bar_theta(3, z, tau)) < 1e-13
    assert abs(complex(bar_theta(4, 0.0, tau)).imag) < 1e-15


@settings(max_examples=30)
@given(small_complex)
def test_theta_parity(z):
    tau = 1j
    for a, sign in ((1, -1), (2, 1), (3, 1), (4, 1)):
        assert abs(theta(a, -z, tau) - sign * theta(a, z, tau)) < 1e-12


@settings(max_examples=30)
@given(small_complex, small_complex)
def test_theta_product_identity(x, y):
    tau = 1j
    lhs = 2 * theta(1, x + y, tau) * theta(1, x - y, tau)
    rhs = bar_theta(4, x, tau) * bar_theta(3, y, tau) - bar_theta(4, y, tau) * bar_theta(3, x, tau)
    assert abs(lhs - rhs) < 1e-12


def test_theta_vectorized_matches_scalar():
    z = np.array([[0.1, 0.2 + 0.1j], [0.3j, -0.4]])
    out = theta(3, z, 1j)
    assert out.shape == (2, 2)
    assert abs(out[0, 1] - theta(3, z[0, 1], 1j)) < 1e-15


def test_theta_rejects_lower_half_plane():
    with pytest.raises(ConfigError):
        theta(1, 0.1, -1j)


@settings(max_examples=25)
@given(small_complex.filter(lambda z: abs(z) > 0.05))
def test_elliptic_gamma_reflection_and_shift(z):
    P = EllipticParams()
    assert abs(elliptic_gamma(z, P) * elliptic_gamma(-z + 2 * P.eta + P.tau, P) - 1) < 1e-10
    ref = shift_constant(P) * np.exp(1j * np.pi * z) * theta(1, z, P.tau, P.trunc) * elliptic_gamma(z, P)
    assert abs(elliptic_gamma(z + 2 * P.eta, P) - ref) < 1e-10 * max(1.0, abs(ref))


def test_elliptic_gamma_truncation_doubling(eparams):
    big = eparams.with_trunc(TruncationConfig(60, 80))
    for z in (0.1 + 0.05j, -0.3 + 0.2j, 0.45 - 0.1j):
        a, b = elliptic_gamma(z, eparams), elliptic_gamma(z, big)
        assert abs(a - b) < 1e-12 * abs(b)


def test_elliptic_gamma_pole_guard(eparams):
    # the n = m = 0 denominator factor 1 - e^{2 pi i z} vanishes at z = 0
    with pytest.raises(PoleProximity):
        elliptic_gamma(0.0, eparams)


def test_elliptic_params_validation():
    with pytest.raises(ConfigError):
        EllipticParams(tau=-1j)
    with pytest.raises(ConfigError):
        EllipticParams(trunc=TruncationConfig(3, 3))
    with pytest.raises(ConfigError):
        TruncationConfig(0, 10)
