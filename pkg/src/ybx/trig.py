"""Trigonometric R-operators invariant under one half of the modular double.

The first space is the (m+1)-dimensional module at spin s_m with basis
e_j = X^{m+2-2j}. The second space is spanned by Laurent monomials X^a,
either in a truncated window (generic spin s) or on the finite block
X^{m2}, X^{m2-2}, ..., X^{-m2} at s = s_{m2}. Every block R_ik maps
X^a to a multiple of X^{a + 2(i-k)}.

Public builders take the physical spectral parameter u; internally
u1 = u and u2 = u - s, with s the spin of the second space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IllConditioned, InvarianceViolation
from .operators import BasisDescriptor, BlockOp, LinOp, compose, laurent_mult, laurent_shift
from .special import DEFAULT_MODULAR, q_pochhammer_q2


@dataclass(frozen=True)
class TrigSpinPair:
    """First spin s_m and either a finite second spin s_{m2} or a generic s."""

    m: int
    m2: int | None = None
    s: complex | None = None
    window: int | None = None

    def __post_init__(self):
        if self.m < 0:
            raise ConfigError("m must be nonnegative")
        if (self.m2 is None) == (self.s is None):
            raise ConfigError("give exactly one of m2 (finite) or s (generic)")
        if self.window is None:
            # Z^{-1} moves exponents by up to m and Z by up to m again
            top = self.m2 if self.m2 is not None else 2
            object.__setattr__(self, "window", top + max(self.m + 2, 2 * self.m))

    @property
    def finite(self):
        return self.m2 is not None

    def spin(self, params=DEFAULT_MODULAR):
        return params.spin(self.m2) if self.finite else complex(self.s)

    def basis(self):
        # intermediate exponents change parity when m is odd, so the
        # working window admits both parities
        return BasisDescriptor.laurent(self.window)


@dataclass(frozen=True)
class TrigSpectral:
    """u1 = u_b + s/2 and u2 = u_b - s/2 with u_b = u - s/2."""

    u: complex
    s: complex

    @property
    def u_builder(self):
        return self.u - self.s / 2

    @property
    def u1(self):
        return self.u_builder + self.s / 2

    @property
    def u2(self):
        return self.u_builder - self.s / 2

    @staticmethod
    def describe():
        return "u -> u - s/2 (s = second spin); u1 = u_b + s/2, u2 = u_b - s/2"


def _U(u, params):
    return params.xvar(u)


# -------------------------------------------------------------- generators


def modular_generators(s, basis, params=DEFAULT_MODULAR):
    """K, E, F acting on Laurent monomials X^j.

    K X^j = q^{j/2} X^j and E, F shift the exponent by +2 and -2 with
    coefficients (q^{j/2} sigma - q^{-j/2}/sigma) / (q - 1/q) and
    (q^{-j/2} sigma - q^{j/2}/sigma) / (q - 1/q), sigma = exp(i pi (s + omega'') / (2 omega)).
    """
    sigma = params.xvar(s + params.omega_dblprime)
    dq = params.q - 1 / params.q
    K = LinOp.diagonal(basis, [params.qpow(j) for j in basis.exponents])
    E = LinOp.zeros(basis, exact=False)
    F = LinOp.zeros(basis, exact=False)
    for c, j in enumerate(basis.exponents):
        if j + 2 in basis.data:
            E.entries[basis.index_of(j + 2), c] = (params.qpow(j) * sigma - params.qpow(-j) / sigma) / dq
        else:
            E.tainted[c] = True
        if j - 2 in basis.data:
            F.entries[basis.index_of(j - 2), c] = (params.qpow(-j) * sigma - params.qpow(j) / sigma) / dq
        else:
            F.tainted[c] = True
    return K, E, F


# ------------------------------------------------------------ coefficients


def _qp(params, k):
    return q_pochhammer_q2(params.q, k)


def coeff_dk(m, k, params=DEFAULT_MODULAR):
    """Shift-operator coefficients of the quantized D-function of order m."""
    if not 1 <= k <= m + 1:
        raise ValueError("k must lie in 1..m+1")
    q = params.q
    return _qp(params, m) * q ** ((k - 1) * (k - m - 1)) / (_qp(params, k - 1) * _qp(params, m - k + 1))


def _djk_sum(m, j, k, u, params, twice_const):
    U = _U(u, params)
    total = 0j
    for p in range(max(0, k + j - 2 - m), min(k - 1, j - 1) + 1):
        e2 = 2 * ((k - p - 1) ** 2 + p * (p + 2 - 2 * j)) + twice_const
        num = _qp(params, j - 1) * _qp(params, m - j + 1) * params.qpow(e2)
        den = _qp(params, p) * _qp(params, j - 1 - p) * _qp(params, k - p - 1) * _qp(params, m - j + 2 - k + p)
        total += num / den * U ** (2 * (2 * p - j - k + 2) + m)
    return total


def coeff_djk_unscaled(m, j, k, u, params=DEFAULT_MODULAR):
    """The coefficient sum with constant exponent j - m/2 - 1."""
    return _djk_sum(m, j, k, u, params, 2 * j - m - 2)


def coeff_djk(m, j, k, u, params=DEFAULT_MODULAR):
    """Coefficient of X^{m+2-2k} in D_u(x) D_{-u+m w'}(x + (2j-m-2) w').

    The constant exponent is m (j - m/2 - 1); see :func:`dd_product`.
    """
    if not (1 <= j <= m + 1 and 1 <= k <= m + 1):
        raise ValueError("indices must lie in 1..m+1")
    return _djk_sum(m, j, k, u, params, m * (2 * j - m - 2))


def coeff_dbar(m, j, k, u, params=DEFAULT_MODULAR):
    """d_j d_jk(u); symmetric in (j, k)."""
    return coeff_dk(m, j, params) * coeff_djk(m, j, k, u, params)


def dd_product(m, j, u, x, params=DEFAULT_MODULAR):
    """Finite product for D_u(x) D_{-u+m w'}(x + (2j-m-2) w').

    U^{m+2-2j} q^{m(j-m/2-1)} X^m prod_{k=0}^{m-j} (1 + q X^-2 U^-2 q^{2k})
    prod_{k=0}^{j-2} (1 + q^{3-2j} X^-2 U^2 q^{2k}).
    """
    U = _U(u, params)
    X = params.xvar(x)
    q = params.q
    r = U ** (m + 2 - 2 * j) * params.qpow(m * (2 * j - m - 2)) * X**m
    for k in range(m - j + 1):
        r *= 1 + q / (X * X * U * U) * q ** (2 * k)
    for k in range(j - 1):
        r *= 1 + q ** (3 - 2 * j) * U * U / (X * X) * q ** (2 * k)
    return r


def djk_from_product(m, j, u, params=DEFAULT_MODULAR, xs=None):
    """Recover (d_j1, ..., d_j,m+1) by sampling :func:`dd_product` and
    solving the Vandermonde system in X^{m+2-2k}."""
    if xs is None:
        xs = [0.11 + 0.07 * t + 0.05j * t for t in range(m + 1)]
    A = np.array([[params.xvar(x) ** (m + 2 - 2 * k) for k in range(1, m + 2)] for x in xs])
    cond = np.linalg.cond(A)
    if cond > 1e10:
        raise IllConditioned(f"Vandermonde condition {cond:.1e}")
    b = np.array([dd_product(m, j, u, x, params) for x in xs])
    return np.linalg.solve(A, b)


def build_M(m, u, params=DEFAULT_MODULAR):
    """The (m+1)x(m+1) hypergeometric matrix M(u) as a numerical LinOp."""
    basis = BasisDescriptor.spin(m + 1)
    M = LinOp.zeros(basis, exact=False)
    for k in range(1, m + 2):
        for j in range(1, m + 2):
            M.entries[k - 1, j - 1] = _djk_sum(m, j, k, u, params, 2 * (j - 1) * m - m * m)
    return M


def reference_M(m, u, params=DEFAULT_MODULAR):
    """Closed forms of M(u + m w') for m = 1, 2, 3."""
    U = _U(u, params)
    q = params.q
    if m == 1:
        return np.array([[U, 1 / U], [1 / U, U]])
    if m == 2:
        return np.array(
            [
                [U**2, 1, U**-2],
                [q + 1 / q, q * U**2 + U**-2 / q, q + 1 / q],
                [U**-2, 1, U**2],
            ]
        )
    if m == 3:
        a = q**2 + 1 + q**-2
        return np.array(
            [
                [U**3, U, 1 / U, U**-3],
                [a * U, q**2 * U**3 + (1 + q**-2) / U, q**-2 * U**-3 + (1 + q**2) * U, a / U],
                [a / U, q**-2 * U**-3 + (1 + q**2) * U, q**2 * U**3 + (1 + q**-2) / U, a * U],
                [U**-3, 1 / U, U, U**3],
            ]
        )
    raise ValueError("closed forms are available for m = 1, 2, 3")


# ------------------------------------------------------------- R-operators


def _sandwich(m, left, right, basis, params):
    """Z left D-bar right Z^{-1} with numerical (m+1)x(m+1) left/right."""
    outer = BasisDescriptor.laurent_block(m, "X1")
    d = m + 1
    shifts = [laurent_shift(m + 2 - 2 * j, basis, params) for j in range(1, d + 1)]
    zinv = [laurent_mult(m + 2 - 2 * k, basis) for k in range(1, d + 1)]
    z = [laurent_mult(2 * i - m - 2, basis) for i in range(1, d + 1)]

    def block(i, k):
        acc = None
        for j in range(d):
            c = left[i, j] * right[j, k]
            if c == 0:
                continue
            term = shifts[j].scale(c)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = LinOp.zeros(basis, exact=False)
        return compose(z[i], compose(acc, zinv[k]))

    return BlockOp.from_function(outer, block)


def build_R_trig_factorized(pair, u, params=DEFAULT_MODULAR):
    """Z M(u2) D-bar M(u1) Z^{-1} with the hypergeometric matrix M."""
    sp = TrigSpectral(complex(u), pair.spin(params))
    M1 = build_M(pair.m, sp.u1, params).entries
    M2 = build_M(pair.m, sp.u2, params).entries
    return _sandwich(pair.m, M2, M1, pair.basis(), params)


def build_R_trig_oracle(pair, u, params=DEFAULT_MODULAR):
    """Z M2(u2) D-bar M1(u1) Z^{-1} with M1_ik = d_ik/d_k, M2_ik = d_k d_ki."""
    m = pair.m
    sp = TrigSpectral(complex(u), pair.spin(params))
    idx = range(1, m + 2)
    dk = [coeff_dk(m, k, params) for k in idx]
    M1 = np.array([[coeff_djk(m, i, k, sp.u1, params) / dk[k - 1] for k in idx] for i in idx])
    M2 = np.array([[dk[k - 1] * coeff_djk(m, k, i, sp.u2, params) for k in idx] for i in idx])
    return _sandwich(m, M2, M1, pair.basis(), params)


def restrict_second_trig(m, m2, u, params=DEFAULT_MODULAR, tol=1e-10, builder=build_R_trig_factorized):
    """R on the (m+1)(m2+1)-dimensional space at second spin s_{m2}.

    Returns the restricted LinOp; raises InvarianceViolation if the block
    maps into window vectors outside the finite span by more than ``tol``
    (relative to the largest entry).
    """
    R, fin, inside, leak = _finite_block(m, m2, u, params, builder)
    if leak > tol:
        raise InvarianceViolation(f"finite block leaks: relative {leak:.2e}")
    out = R.map(lambda b: LinOp(fin, fin, b.entries[np.ix_(inside, inside)]))
    return out.flatten()


def _finite_block(m, m2, u, params, builder):
    pair = TrigSpinPair(m, m2=m2)
    R = builder(pair, u, params)
    basis = pair.basis()
    fin = BasisDescriptor.laurent_block(m2, "X")
    inside = [basis.index_of(a) for a in fin.exponents]
    outside = [r for r in range(basis.dimension) if r not in inside]
    scale = max(R[i, j].max_abs() for i in range(R.d) for j in range(R.d)) or 1.0
    leak = 0.0
    for row in R.blocks:
        for b in row:
            if b.tainted[inside].any():
                raise InvarianceViolation("window too small for the finite block")
            leak = max(leak, float(np.abs(b.entries[np.ix_(outside, inside)]).max()))
    return R, fin, inside, leak / scale


def invariance_leak(m, m2, u, params=DEFAULT_MODULAR, builder=build_R_trig_factorized):
    """Relative size of matrix elements leaving the finite block."""
    return _finite_block(m, m2, u, params, builder)[3]
