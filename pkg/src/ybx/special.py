"""Scalars, model parameters and special functions.

Exact scalars are :class:`fractions.Fraction`; numerical scalars are
Python/numpy complex doubles. Theta functions and the elliptic gamma
function are evaluated through :mod:`ybx.kernels`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import ConfigError, PoleProximity

# ---------------------------------------------------------------- scalars


def parse_scalar(text, exact=True):
    """Parse a scalar literal.

    ``"3/2"`` and ``"2"`` become :class:`Fraction` when ``exact`` is true;
    anything else (``"0.3+0.1j"``, ``"0.25"``) becomes a complex double.
    """
    if isinstance(text, (Fraction, int)) and exact:
        return Fraction(text)
    if isinstance(text, (int, float, complex, Fraction)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    try:
        frac = Fraction(s)
        return frac if exact else complex(frac)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse scalar {text!r}") from exc


def format_scalar(x):
    """Canonical JSON form: ``"p/q"`` for rationals, ``[re, im]`` for complex."""
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"
    x = complex(x)
    return [x.real, x.imag]


def load_scalar(obj):
    """Inverse of :func:`format_scalar`."""
    if isinstance(obj, str):
        return Fraction(obj)
    return complex(obj[0], obj[1])


def is_exact(x):
    return isinstance(x, (Fraction, int))


# ------------------------------------------------------------- parameters


@dataclass(frozen=True)
class TruncationConfig:
    """Series cut-offs and the tolerance their tails must respect."""

    theta_terms: int = 30
    gamma_terms: int = 40
    target_tol: float = 1e-12

    def __post_init__(self):
        if self.theta_terms < 1 or self.gamma_terms < 1:
            raise ConfigError("truncation orders must be positive")
        if not self.target_tol > 0:
            raise ConfigError("target_tol must be positive")


@dataclass(frozen=True)
class ModularParams:
    """Quasi-periods of the modular double; only ``omega`` is free."""

    omega: complex = (1 + 1j) / 2
    omega_prime: complex = field(init=False)
    omega_dblprime: complex = field(init=False)
    q: complex = field(init=False)
    q_half: complex = field(init=False)

    def __post_init__(self):
        w = complex(self.omega)
        if w.imag <= 0:
            raise ConfigError("Im(omega) must be positive")
        wp = -1 / (4 * w)
        if wp.imag <= 0:
            raise ConfigError("Im(omega') must be positive")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "omega_prime", wp)
        object.__setattr__(self, "omega_dblprime", w + wp)
        object.__setattr__(self, "q", cmath.exp(1j * math.pi * wp / w))
        # the single definition of q^(1/2) used for every half-integer power
        object.__setattr__(self, "q_half", cmath.exp(1j * math.pi * wp / (2 * w)))
        if abs(self.q) > 1 + 1e-12:
            raise ConfigError("|q| must not exceed 1")
        if abs(abs(self.q) - 1) < 1e-12:
            ratio = (wp / w).real
            if abs(ratio - round(ratio * 720) / 720) < 1e-12:
                raise ConfigError("q is (numerically) a root of unity")

    def qpow(self, twice_exponent):
        """q raised to ``twice_exponent / 2``, via the shared q^(1/2)."""
        return self.q_half ** int(twice_exponent)

    def xvar(self, x):
        """Exponential variable exp(i pi x / (2 omega))."""
        return cmath.exp(1j * math.pi * x / (2 * self.omega))

    def spin(self, m):
        """Quantized spin s_m = -omega'' - m omega'."""
        return -self.omega_dblprime - m * self.omega_prime


@dataclass(frozen=True)
class EllipticParams:
    """Modular parameter, shift and truncation for the elliptic case.

    The constructor checks that the theta and gamma tails are below
    ``trunc.target_tol`` for arguments with ``|Im z| <= z_bound``.
    """

    tau: complex = 1j
    eta: complex = 0.17 + 0.11j
    trunc: TruncationConfig = field(default_factory=TruncationConfig)
    z_bound: float = 1.5
    p: complex = field(init=False)
    q_ell: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        eta = complex(self.eta)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "eta", eta)
        if tau.imag <= 0:
            raise ConfigError("Im(tau) must be positive")
        p = cmath.exp(2j * math.pi * tau)
        q = cmath.exp(4j * math.pi * eta)
        if abs(q) >= 1:
            raise ConfigError("|exp(4 pi i eta)| must be below 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q_ell", q)
        tail = self.tail_bound()
        if tail > self.trunc.target_tol:
            raise ConfigError(
                f"truncation tail estimate {tail:.2e} exceeds target_tol "
                f"{self.trunc.target_tol:.1e}; raise theta_terms/gamma_terms"
            )
        for a in (1, 2, 3, 4):
            if abs(theta(a, eta, tau, self.trunc)) < 1e-8:
                raise ConfigError(f"theta_{a}(eta) vanishes; eta is not generic")

    def tail_bound(self):
        """Geometric estimate of the neglected theta and gamma tails."""
        t = self.trunc
        grow = math.exp(2 * math.pi * self.z_bound)
        ap, aq = abs(self.p), abs(self.q_ell)
        gamma_tail = grow * (
            ap ** (t.gamma_terms + 1) / (1 - ap) + aq ** (t.gamma_terms + 1) / (1 - aq)
        )
        # the half-period theta (tau/2) converges slowest
        k = t.theta_terms + 0.5
        theta_tail = math.exp(-math.pi * self.tau.imag / 2 * k * k + 2 * math.pi * k * self.z_bound)
        return gamma_tail + theta_tail

    def with_trunc(self, trunc):
        return EllipticParams(self.tau, self.eta, trunc, self.z_bound)


DEFAULT_MODULAR = ModularParams()
DEFAULT_TRUNC = TruncationConfig()


def default_elliptic():
    return EllipticParams()


# ------------------------------------------------------------ elementary


def rising_factorial(a, k):
    """Pochhammer symbol (a)_k = a (a+1) ... (a+k-1); exact for rational a."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = Fraction(1) if is_exact(a) else 1.0
    for j in range(k):
        r *= a + j
    return r


def q_pochhammer_q2(q, k):
    """(q^2; q^2)_k = prod_{j=1}^{k} (1 - q^{2j})."""
    r = 1.0 + 0j
    q2 = q * q
    t = 1.0 + 0j
    for _ in range(k):
        t *= q2
        r *= 1 - t
    return r


def q_binomial_coefficient(q, m, k):
    """Coefficient of x^k in prod_{j<m} (1 + x q^{2j})."""
    return (
        q_pochhammer_q2(q, m)
        * q ** (k * (k - 1))
        / (q_pochhammer_q2(q, k) * q_pochhammer_q2(q, m - k))
    )


# ---------------------------------------------------------------- thetas


def _as_array(z):
    arr = np.asarray(z, dtype=np.complex128)
    return arr, arr.shape


def theta(a, z, tau, trunc=DEFAULT_TRUNC):
    """Jacobi theta function theta_a(z | tau), a = 1..4.

    theta_1 is the truncated series; the others follow by half-period
    shifts. Accepts scalars or arrays.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ConfigError("Im(tau) must be positive")
    arr, shape = _as_array(z)
    flat = arr.ravel()
    if a == 1:
        w = flat
    elif a == 2:
        w = flat + 0.5
    elif a == 3:
        w = flat + tau / 2 + 0.5
    elif a == 4:
        w = flat + 1.0 + tau / 2
    else:
        raise ValueError("theta index must be 1..4")
    out = kernels.theta1_series(np.ascontiguousarray(w), tau, trunc.theta_terms)
    if a >= 3:
        shift = flat if a == 3 else flat + 0.5
        out = out * np.exp(1j * np.pi * tau / 4 + 1j * np.pi * shift)
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def bar_theta(a, z, tau, trunc=DEFAULT_TRUNC):
    """theta_a(z | tau/2), the half-period thetas (a = 3 or 4)."""
    if a not in (3, 4):
        raise ValueError("bar_theta is defined for a = 3, 4")
    return theta(a, z, complex(tau) / 2, trunc)


# ---------------------------------------------------------- elliptic gamma


def elliptic_gamma(z, params):
    """Elliptic gamma function with bases p = e^{2 pi i tau}, q = e^{4 pi i eta}.

    Raises
    ------
    PoleProximity
        If a denominator factor is smaller than ``target_tol``.
    """
    arr, shape = _as_array(z)
    vals, mind = kernels.egamma_product(
        np.ascontiguousarray(arr.ravel()), params.p, params.q_ell, params.trunc.gamma_terms
    )
    if mind < params.trunc.target_tol:
        raise PoleProximity(f"elliptic gamma evaluated {mind:.1e} from a pole")
    vals = np.asarray(vals).reshape(shape)
    return vals[()] if vals.ndim == 0 else vals


def gamma4(a, b, c, params):
    """Product Gamma(+-a +-b + c) over the four sign choices."""
    return (
        elliptic_gamma(a + b + c, params)
        * elliptic_gamma(a - b + c, params)
        * elliptic_gamma(-a + b + c, params)
        * elliptic_gamma(-a - b + c, params)
    )


def p_pochhammer_inf(params):
    """(p; p)_infinity truncated at the gamma cut-off."""
    p = params.p
    return np.prod(1 - p ** np.arange(1, params.trunc.gamma_terms + 2))


def shift_constant(params):
    """R(tau) = p^{-1/8} / (i (p;p)_inf), with p^{-1/8} = exp(-i pi tau / 4)."""
    return cmath.exp(-1j * math.pi * params.tau / 4) / (1j * p_pochhammer_inf(params))


# --------------------------------------------------- quantized D-function


def dfunc_quantized(m, x, params=DEFAULT_MODULAR):
    """Finite-product value of the D-function at quantized order m omega'.

    prod_{l=0}^{m-1} (X q^{(m-1)/2 - l} + X^{-1} q^{-(m-1)/2 + l}),
    X = exp(i pi x / (2 omega)).
    """
    X = params.xvar(x)
    r = 1.0 + 0j
    for l in range(m):
        e = m - 1 - 2 * l
        r *= X * params.qpow(e) + params.qpow(-e) / X
    return r
