"""Elliptic R-operators with Sklyanin-algebra symmetry.

The first space is Theta+_{2n}, the even theta functions of order 2n, at
spin g_n = (n+1) eta + tau/2, with the monomial basis
phi_{j+1} = bar_theta_3^j bar_theta_4^{n-j} and the symmetrized basis psi.
The second space carries a generic spin g (operators act pointwise on
functions of z) or the finite spin g_{n2}.

Operators in z are finite-difference operators stored as
:class:`ShiftOp`: a map from an integer shift t to a coefficient function
c_t(z), acting as f(z) -> sum_t c_t(z) f(z + t eta). All evaluations are
vectorized over numpy arrays of sample points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IllConditioned, InvarianceViolation
from .operators import BasisDescriptor, CollocationGrid, LinOp, collocation_fit, default_grid
from .special import bar_theta, default_elliptic, elliptic_gamma, gamma4, shift_constant, theta


def g_n(n, params):
    """Quantized spin (n+1) eta + tau/2."""
    return (n + 1) * params.eta + params.tau / 2


@dataclass(frozen=True)
class EllipticSpinPair:
    """First spin g_n and either a finite second spin g_{n2} or a generic g."""

    n: int
    n2: int | None = None
    g: complex | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("n must be nonnegative")
        if (self.n2 is None) == (self.g is None):
            raise ConfigError("give exactly one of n2 (finite) or g (generic)")

    def spin(self, params):
        return g_n(self.n2, params) if self.n2 is not None else complex(self.g)


@dataclass(frozen=True)
class EllipticSpectral:
    u: complex
    g: complex

    @property
    def u1(self):
        return (self.u + self.g) / 2

    @property
    def u2(self):
        return (self.u - self.g) / 2


# ------------------------------------------------------------------ bases


def _tb(a, z, params):
    return bar_theta(a, z, params.tau, params.trunc)


def _t(a, z, params):
    return theta(a, z, params.tau, params.trunc)


@dataclass
class ThetaBases:
    """The phi and psi bases of Theta+_{2n} with a collocation grid."""

    n: int
    params: object = field(default_factory=default_elliptic)
    grid: CollocationGrid | None = None

    def __post_init__(self):
        if self.grid is None:
            self.grid = default_grid(self.n)
        zs = self.grid.all_points
        if np.abs(_t(1, 2 * zs, self.params)).min() < 1e-6:
            raise IllConditioned("grid point too close to a zero of theta_1(2z)")

    @property
    def dim(self):
        return self.n + 1

    def basis(self):
        return BasisDescriptor.theta_plus(self.n, self.grid.points)

    def phi(self, j, z):
        """phi_j(z) = bar_theta_3^{j-1} bar_theta_4^{n-j+1}, j = 1..n+1."""
        z = np.asarray(z, dtype=complex)
        return _tb(3, z, self.params) ** (j - 1) * _tb(4, z, self.params) ** (self.n - j + 1)

    def psi(self, j, z):
        """Symmetrized products of shifted bar thetas with j-1 factors bar_theta_3."""
        z = np.asarray(z, dtype=complex)
        n, eta = self.n, self.params.eta
        th3 = [_tb(3, z + (n - 1 - 2 * r) * eta, self.params) for r in range(n)]
        th4 = [_tb(4, z + (n - 1 - 2 * r) * eta, self.params) for r in range(n)]
        total = np.zeros_like(z)
        for combo in itertools.combinations(range(n), j - 1):
            term = np.ones_like(z)
            for r in range(n):
                term = term * (th3[r] if r in combo else th4[r])
            total = total + term
        return total

    def phi_matrix(self, zs):
        """Array (len(zs), n+1) of phi_j values."""
        return np.stack([self.phi(j, zs) for j in range(1, self.n + 2)], axis=-1)

    def psi_matrix(self, zs):
        return np.stack([self.psi(j, zs) for j in range(1, self.n + 2)], axis=-1)

    @property
    def antidiag(self):
        return np.eye(self.n + 1)[::-1]

    def fit(self, samples, scale=None):
        """Coefficients on phi of functions sampled on the grid."""
        return collocation_fit(samples, self.phi_matrix(self.grid.all_points), self.grid, scale)

    def psi_in_phi(self):
        """Matrix T with psi_j = sum_k T_kj phi_k."""
        coeffs, res = self.fit(self.psi_matrix(self.grid.all_points))
        if res > 1e-8:
            raise InvarianceViolation(f"psi basis not in Theta+ (residual {res:.1e})")
        return coeffs


def generating_constant(n, params):
    """c = (-2)^n R(tau)^{-2n} exp(-i pi tau n / 2)."""
    return (-2) ** n * shift_constant(params) ** (-2 * n) * np.exp(-1j * np.pi * params.tau * n / 2)


def generating_function(n, z, x, params):
    """c Gamma(+-z +-x + g_n), the generating function of Theta+_{2n}."""
    return generating_constant(n, params) * gamma4(z, x, g_n(n, params), params)


# ------------------------------------------------------- difference operators


class ShiftOp:
    """Finite-difference operator f(z) -> sum_t c_t(z) f(z + t eta)."""

    def __init__(self, terms, eta):
        self.terms = dict(terms)
        self.eta = eta

    def apply(self, f, z):
        z = np.asarray(z, dtype=complex)
        total = np.zeros_like(z)
        for t, c in self.terms.items():
            total = total + c(z) * f(z + t * self.eta)
        return total

    def compose(self, other):
        """self o other, with coefficients a_t(z) b_s(z + t eta) at shift t + s."""
        eta = self.eta
        parts = {}
        for t, a in self.terms.items():
            for s, b in other.terms.items():
                parts.setdefault(t + s, []).append((t, a, b))

        def make(items):
            def coeff(z):
                return sum(a(z) * b(z + t * eta) for t, a, b in items)

            return coeff

        return ShiftOp({k: make(v) for k, v in parts.items()}, eta)

    def coefficient(self, t, z):
        if t not in self.terms:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return self.terms[t](np.asarray(z, dtype=complex))


def _gauge(sign, z, eta):
    # e^{pi i z^2/eta} T^{+-1} e^{-pi i z^2/eta} leaves this factor
    return np.exp(-sign * 2j * np.pi * z - 1j * np.pi * eta)


def sklyanin_operator(a, g, params):
    """Generator S^a (a = 0..3) at spin g as a ShiftOp."""
    eta = params.eta
    pref = (1j if a == 2 else 1.0) * _t(a + 1, eta, params)

    def plus(z):
        return pref * _t(a + 1, 2 * z - g + eta, params) / _t(1, 2 * z, params) * _gauge(1, z, eta)

    def minus(z):
        return -pref * _t(a + 1, -2 * z - g + eta, params) / _t(1, 2 * z, params) * _gauge(-1, z, eta)

    return ShiftOp({1: plus, -1: minus}, eta)


@dataclass
class SklyaninRepresentation:
    """Matrices of S^0..S^3 on the phi basis and the membership residual."""

    matrices: list
    residual: float
    g: complex


def sklyanin_generators(g, n, params=None, bases=None, tol=1e-8):
    """Matrices of the four generators on Theta+_{2n} by collocation.

    At g = g_n the action must preserve Theta+_{2n}; a residual above
    ``tol`` then raises InvarianceViolation. At other g the residual is
    only reported.
    """
    params = params or default_elliptic()
    bases = bases or ThetaBases(n, params)
    zs = bases.grid.all_points
    samples = []
    for a in range(4):
        op = sklyanin_operator(a, g, params)
        samples.append(np.stack([op.apply(lambda w, j=j: bases.phi(j, w), zs) for j in range(1, n + 2)], axis=-1))
    scale = max(float(np.abs(s).max()) for s in samples)
    mats, worst = [], 0.0
    basis = bases.basis()
    for s in samples:
        c, res = bases.fit(s, scale)
        worst = max(worst, res)
        mats.append(LinOp(basis, basis, c))
    if abs(g - g_n(n, params)) < 1e-14 and worst > tol:
        raise InvarianceViolation(f"generators leave Theta+_{2 * n} (residual {worst:.1e})")
    return SklyaninRepresentation(mats, worst, g)


def structure_constants(params=None):
    """(J1, J2, J3) and the dict J_ab = (J_b - J_a) / J_c over ordered pairs."""
    params = params or default_elliptic()
    eta = params.eta
    J = {a - 1: _t(a, 2 * eta, params) * _t(a, 0, params) / _t(a, eta, params) ** 2 for a in (2, 3, 4)}
    Jab = {}
    for a, b in itertools.permutations((1, 2, 3), 2):
        c = 6 - a - b
        Jab[(a, b)] = (J[b] - J[a]) / J[c]
    return (J[1], J[2], J[3]), Jab


def sklyanin_residuals(rep, params=None):
    """Relative residuals of both cyclic families of commutation relations."""
    _, Jab = structure_constants(params)
    S = [m.entries for m in rep.matrices]
    scale = max(np.abs(s).max() for s in S) ** 2
    out = {}
    for al, be, ga in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        r1 = S[al] @ S[be] - S[be] @ S[al] - 1j * (S[0] @ S[ga] + S[ga] @ S[0])
        r2 = S[0] @ S[al] - S[al] @ S[0] - 1j * Jab[(be, ga)] * (S[be] @ S[ga] + S[ga] @ S[be])
        out[(al, be, ga)] = (float(np.abs(r1).max() / scale), float(np.abs(r2).max() / scale))
    return out


# ------------------------------------------------------------- intertwiner


def intertwiner_A(a, g, params):
    """First-order factor A_a(g) of the intertwiner, as a ShiftOp."""
    eta = params.eta

    def plus(z):
        return _tb(a, z + g + eta, params) / _t(1, 2 * z, params) * _gauge(1, z, eta)

    def minus(z):
        return -_tb(a, z - g - eta, params) / _t(1, 2 * z, params) * _gauge(-1, z, eta)

    return ShiftOp({1: plus, -1: minus}, eta)


LAMBDAS = tuple(0.3 + 0.15 * t for t in range(64))


class Intertwiner:
    """The intertwining operator M(n eta) = A_a((n-1) eta) ... A_a(0) bar_theta_a^{-n}."""

    def __init__(self, n, params, a=3, cond_bound=1e8):
        if a not in (3, 4):
            raise ValueError("the chain uses a = 3 or 4")
        self.n, self.params, self.a = n, params, a
        self.factors = [intertwiner_A(a, k * params.eta, params) for k in range(n)]
        self.cond_bound = cond_bound

    def apply(self, f, z):
        """Pointwise action on a function f through the factor chain."""
        n, a, params = self.n, self.a, self.params

        def level(k, w):
            if k == 0:
                return _tb(a, w, params) ** (-n) * f(w)
            return self.factors[k - 1].apply(lambda v: level(k - 1, v), w)

        return level(n, np.asarray(z, dtype=complex))

    def beta(self, z):
        """Coefficients beta_l(z), l = 0..n, of the shifts (n - 2l) eta.

        Extracted by applying M to exp(lambda z) for 2n+2 values of
        lambda and solving the overdetermined linear system.
        """
        n, eta = self.n, self.params.eta
        z = np.asarray(z, dtype=complex)
        lams = np.array(LAMBDAS[: 2 * n + 2])
        A = np.exp(lams[:, None] * (n - 2 * np.arange(n + 1))[None, :] * eta)
        cond = np.linalg.cond(A)
        if cond > self.cond_bound:
            raise IllConditioned(f"lambda system condition {cond:.1e}")
        rhs = np.stack([self.apply(lambda w, lam=lam: np.exp(lam * w), z) * np.exp(-lam * z) for lam in lams])
        flat = rhs.reshape(len(lams), -1)
        sol = np.linalg.lstsq(A, flat, rcond=None)[0]
        return sol.reshape((n + 1,) + z.shape)

    def shift_op(self):
        """The same operator by symbolic composition of the factors."""
        n, a, params = self.n, self.a, self.params
        op = ShiftOp({0: lambda z: _tb(a, z, params) ** (-n)}, params.eta)
        for fac in self.factors:
            op = fac.compose(op)
        return op


def build_intertwiner(n, params=None, a=3):
    return Intertwiner(n, params or default_elliptic(), a)


def reference_D(n, z, params):
    """Closed-form beta coefficients for n = 1, 2 (with 2 eta shifts at n = 2)."""
    eta = params.eta
    z = np.asarray(z, dtype=complex)
    t1 = lambda w: _t(1, w, params)
    if n == 1:
        return np.stack([_gauge(1, z, eta) / t1(2 * z), -_gauge(-1, z, eta) / t1(2 * z)])
    if n == 2:
        den = t1(2 * z - 2 * eta) * t1(2 * z) * t1(2 * z + 2 * eta)
        return np.stack(
            [
                t1(2 * z - 2 * eta) / den * np.exp(-4j * np.pi * z - 4j * np.pi * eta),
                -t1(4 * eta) / t1(2 * eta) * t1(2 * z) / den,
                t1(2 * z + 2 * eta) / den * np.exp(4j * np.pi * z - 4j * np.pi * eta),
            ]
        )
    raise ValueError("closed forms are shown for n = 1, 2")


# ---------------------------------------------------------------- V matrix


def _v_arguments(n, l, u, z, params):
    """Shifts w with column l's product prod theta_1(+-x + w)."""
    gn, eta = g_n(n, params), params.eta
    ws = [z - u + gn / 2 + 2 * eta * (n / 2 - l - r) for r in range(0, n - l + 1)]
    ws += [z + u - gn / 2 + 2 * eta * (n / 2 - l + r) for r in range(2, l + 1)]
    return ws


def build_V(n, u, params=None, grid=None, tol=1e-8):
    """V(u, z) as a function returning an array (len(z), n+1, n+1).

    Column l holds the phi-coefficients (in x) of the product of
    theta_1(+-x + w) factors, found by collocation in x.
    """
    params = params or default_elliptic()
    bases = ThetaBases(n, params, grid)
    xs = bases.grid.all_points
    design = bases.phi_matrix(xs)

    def V(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty((len(z), n + 1, n + 1), dtype=complex)
        for l in range(1, n + 2):
            vals = np.ones((len(xs), len(z)), dtype=complex)
            for w in _v_arguments(n, l, u, z, params):
                vals = vals * _t(1, xs[:, None] + w[None, :], params) * _t(1, -xs[:, None] + w[None, :], params)
            coeffs, res = collocation_fit(vals, design, bases.grid)
            if res > tol:
                raise InvarianceViolation(f"V column {l} not in Theta+ (residual {res:.1e})")
            out[:, :, l - 1] = coeffs.T
        return out

    return V


def v_expanded(n, u, z, params):
    """V(u, z) by multiplying out 1/2 (bar_theta_4(w) T3 - bar_theta_3(w) T4)."""
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for l in range(1, n + 2):
        poly = np.array([1.0 + 0j])
        for w in _v_arguments(n, l, u, z, params):
            new = np.zeros(len(poly) + 1, dtype=complex)
            new[1:] += 0.5 * _tb(4, w, params) * poly
            new[:-1] += -0.5 * _tb(3, w, params) * poly
            poly = new
        out[:, l - 1] = poly
    return out


def reference_V(n, u, z, params):
    """Closed forms of V for n = 1, 2 up to the normalization below."""
    tb = lambda a, w: _tb(a, w, params)
    eta = params.eta
    if n == 1:
        return np.array([[-tb(3, z - u), -tb(3, z + u)], [tb(4, z - u), tb(4, z + u)]])
    if n == 2:
        def sym(w1, w2):
            return tb(3, w1) * tb(4, w2) + tb(4, w1) * tb(3, w2)

        cols = [(z - u, z - u + 2 * eta), (z - u, z + u), (z + u, z + u - 2 * eta)]
        return np.array(
            [
                [tb(3, a) * tb(3, b) for a, b in cols],
                [sym(a, b) for a, b in cols],
                [tb(4, a) * tb(4, b) for a, b in cols],
            ]
        )
    raise ValueError("closed forms are shown for n = 1, 2")


def reference_V_argument(n, u, params):
    """Argument at which the closed forms of V hold."""
    if n == 1:
        return u + params.tau / 4
    if n == 2:
        return u - params.eta / 2 + params.tau / 4
    raise ValueError("closed forms are shown for n = 1, 2")


def reference_V_normalization(n):
    """V(shifted u) = diag(signs) * closed form / 2^n."""
    if n == 1:
        return np.eye(2) / 2
    if n == 2:
        return np.diag([1.0, -1.0, 1.0]) / 4
    raise ValueError("closed forms are shown for n = 1, 2")


# -------------------------------------------------------------- R-operators


class DifferenceBlockOp:
    """Square matrix of finite-difference operators in the second space.

    ``apply(Phi, z)`` returns the array (len(z), d, d) of the entries
    (R_lj Phi)(z).
    """

    def __init__(self, d, evaluator, meta=None):
        self.d = d
        self._eval = evaluator
        self.meta = meta or {}

    def apply(self, Phi, z):
        return self._eval(Phi, np.atleast_1d(np.asarray(z, dtype=complex)))


def build_R_elliptic_factorized(pair, u, params=None):
    """V(u1, z) D(z, d) C V^T(u2, z) C with D built from the intertwiner."""
    params = params or default_elliptic()
    n, eta = pair.n, params.eta
    sp = EllipticSpectral(complex(u), pair.spin(params))
    V1 = build_V(n, sp.u1, params)
    V2 = build_V(n, sp.u2, params)
    M = build_intertwiner(n, params, a=3)

    def evaluate(Phi, z):
        v1 = V1(z)
        beta = M.beta(z)
        out = np.zeros((len(z), n + 1, n + 1), dtype=complex)
        for k in range(n + 1):
            w = z + (n - 2 * k) * eta
            v2 = V2(w)
            ph = Phi(w)
            # (C V^T C)_{kj} = V_{n-j, n-k}
            out += v1[:, :, k, None] * (beta[k] * ph)[:, None, None] * v2[:, None, ::-1, n - k]
        return out

    return DifferenceBlockOp(n + 1, evaluate, {"u1": sp.u1, "u2": sp.u2, "g": sp.g})


@dataclass
class OracleGrids:
    z1: np.ndarray
    z3: np.ndarray


def oracle_grids(n):
    k = np.arange(n + 3)
    return OracleGrids(0.11 + 0.05 * k + 0.03j * k, -0.07 + 0.045 * k + 0.025j * k)


def build_R_elliptic_oracle(pair, u, params=None, grids=None, tol=1e-8, reflected=False):
    """Entries from the gamma-function generating formula.

    The right-hand side is evaluated pointwise in (z1, z3, z), with the
    intertwiner applied through its a = 4 factor chain. The entries are
    separated by collocation against phi_l(z1) and phi_{n+2-j}(z3).
    With ``reflected`` the denominators are replaced by their reflection
    partners (Gamma(z)^{-1} = Gamma(2 eta + tau - z)).
    """
    params = params or default_elliptic()
    n, eta, tau = pair.n, params.eta, params.tau
    g = pair.spin(params)
    gn = g_n(n, params)
    grids = grids or oracle_grids(n)
    bases = ThetaBases(n, params)
    A1 = bases.phi_matrix(grids.z1)
    A3 = bases.phi_matrix(grids.z3)[:, ::-1]
    M = build_intertwiner(n, params, a=4)
    c = generating_constant(n, params)
    k = n + 1
    for A in (A1, A3):
        cond = np.linalg.cond(A[:k])
        if cond > 1e8:
            raise IllConditioned(f"oracle collocation condition {cond:.1e}")

    def inv4(a, b, shift):
        if reflected:
            return gamma4(a, b, 2 * eta + tau - shift, params)
        return 1 / gamma4(a, b, shift, params)

    def evaluate(Phi, z):
        out = np.empty((len(z), n + 1, n + 1), dtype=complex)
        Z1, Z3 = np.meshgrid(grids.z1, grids.z3, indexing="ij")
        for s, zz in enumerate(z):
            left = gamma4(zz, Z3, -u / 2 + (gn + g) / 2, params) * inv4(Z1, zz, -u / 2 - (gn + g) / 2 + eta + tau / 2)

            def inner(w):
                w = np.asarray(w)[..., None, None]
                return (
                    gamma4(Z1, w, -u / 2 + (gn - g) / 2, params)
                    * inv4(w, Z3, -u / 2 + (g - gn) / 2 + eta + tau / 2)
                    * Phi(w)
                )

            vals = c * left * M.apply(inner, np.array([zz]))[0]
            R = np.linalg.solve(A1[:k], np.linalg.solve(A3[:k], vals[:k, :k].T).T)
            res = np.abs(A1 @ R @ A3.T - vals).max() / np.abs(vals).max()
            if res > tol:
                raise InvarianceViolation(f"oracle collocation residual {res:.1e}")
            out[s] = R
        return out

    return DifferenceBlockOp(n + 1, evaluate, {"g": g})


def restrict_second_elliptic(n, n2, u, params=None, tol=1e-8, builder=build_R_elliptic_factorized, basis="phi"):
    """R on Theta+_{2n} (x) Theta+_{2 n2} at second spin g_{n2}.

    Entries act on the phi basis of the second space and are fitted back
    onto it; the fit residual (relative to the largest sample) must stay
    below ``tol``. With ``basis="phi"`` the first space uses phi on both
    sides; ``basis="psi"`` keeps the native psi -> phi form.
    """
    params = params or default_elliptic()
    R = builder(EllipticSpinPair(n, n2=n2), u, params)
    b2 = ThetaBases(n2, params)
    zs = b2.grid.all_points
    d1, d2 = n + 1, n2 + 1
    samples = np.stack([R.apply(lambda w, b=b: b2.phi(b, w), zs) for b in range(1, d2 + 1)], axis=-1)
    coeffs, res = b2.fit(samples, float(np.abs(samples).max()))
    if res > tol:
        raise InvarianceViolation(f"restricted R leaves Theta+_{2 * n2} (residual {res:.1e})")
    # coeffs[a, l, j, b]: phi_a component of R_lj phi_b
    B = np.transpose(coeffs, (1, 2, 0, 3))
    if basis == "phi":
        T = ThetaBases(n, params).psi_in_phi()
        B = np.einsum("ljab,jk->lkab", B, np.linalg.inv(T))
    elif basis != "psi":
        raise ValueError("basis must be 'phi' or 'psi'")
    flat = B.transpose(0, 2, 1, 3).reshape(d1 * d2, d1 * d2)
    desc = BasisDescriptor.tensor(ThetaBases(n, params).basis(), b2.basis())
    return LinOp(desc, desc, flat), res
