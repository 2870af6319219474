"""Rational sl2 R-operators with a finite-dimensional first space.

The first space is the (n+1)-dimensional spin n/2 module with basis
e_j = z1^{n+1-j} (j = 1..n+1). The second space is either the Verma module
on polynomials in z (generic spin ell, truncated at degree N) or its
(m+1)-dimensional quotient at ell = m/2. Blocks act on the monomial basis
of the second space.

Every public builder takes the physical spectral parameter u; the
factorization formula is evaluated at u + n/2, with u1 = u + n/2 - ell - 1
and u2 = u + n/2 + ell.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import mpmath
import numpy as np

from .errors import BranchGuard, ConfigError, InvarianceViolation
from .operators import (
    BasisDescriptor,
    BlockOp,
    LinOp,
    compose,
    derivative,
    mult_by_coordinate,
    tensor,
)
from .special import rising_factorial


@dataclass(frozen=True)
class RationalSpinPair:
    """First spin n/2 and either a finite second spin m/2 or a generic ell."""

    n: int
    m: int | None = None
    ell: Fraction | None = None
    N: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("n must be nonnegative")
        if (self.m is None) == (self.ell is None):
            raise ConfigError("give exactly one of m (finite) or ell (generic)")
        if self.m is not None and self.m < 0:
            raise ConfigError("m must be nonnegative")
        if self.ell is not None:
            object.__setattr__(self, "ell", Fraction(self.ell))
            if self.N is None:
                object.__setattr__(self, "N", self.n + 2)

    @property
    def finite(self):
        return self.m is not None

    @property
    def spin(self):
        return Fraction(self.m, 2) if self.finite else self.ell

    @property
    def degree(self):
        """Top degree of the second-space monomial basis."""
        return self.m if self.finite else self.N


@dataclass(frozen=True)
class SpectralConvention:
    """Spectral parameters derived from the physical u."""

    u_physical: Fraction
    n: int
    ell: Fraction

    @property
    def u_formula(self):
        return self.u_physical + Fraction(self.n, 2)

    @property
    def u1(self):
        return self.u_formula - self.ell - 1

    @property
    def u2(self):
        return self.u_formula + self.ell

    @staticmethod
    def describe():
        return "u -> u + n/2; u1 = u - ell - 1, u2 = u + ell"


def outer_basis(n):
    return BasisDescriptor.monomial_desc(n, "z1")


def sl2_generators(ell, basis):
    """(S, S-, S+) = (z d - ell, d, -z^2 d + 2 ell z) on a monomial basis."""
    ell = Fraction(ell)
    z = mult_by_coordinate(basis)
    d = derivative(basis)
    one = LinOp.identity(basis)
    s = compose(z, d) - one.scale(ell)
    s_plus = compose(mult_by_coordinate(basis, 2), d).scale(-1) + z.scale(2 * ell)
    return s, d, s_plus


# --------------------------------------------------------------- factors


def _power(op, k):
    out = LinOp.identity(op.domain)
    for _ in range(k):
        out = compose(op, out)
    return out


def build_Z(n, z_op):
    """Lower unitriangular matrix with entries C(n+1-j, i-j) z^{i-j}."""
    zero = LinOp.zeros(z_op.domain)
    return BlockOp.from_function(
        outer_basis(n),
        lambda i, j: _power(z_op, i - j).scale(comb(n - j, i - j)) if i >= j else zero,
    )


def build_Dmat(n, d_op):
    """Upper unitriangular matrix with entries C(j-1, j-i) d^{j-i}."""
    zero = LinOp.zeros(d_op.domain)
    return BlockOp.from_function(
        outer_basis(n),
        lambda i, j: _power(d_op, j - i).scale(comb(j, j - i)) if j >= i else zero,
    )


def uminus_values(n, u):
    """Diagonal of U^-(u): entry k is prod_{r=k-1}^{n-1} (u - r)."""
    vals = []
    for k in range(1, n + 2):
        r = Fraction(1)
        for t in range(k - 1, n):
            r *= u - t
        vals.append(r)
    return vals


def uplus_values(n, u):
    return uminus_values(n, u)[::-1]


def _scalar_diag(n, values, basis):
    one = LinOp.identity(basis)
    zero = LinOp.zeros(basis)
    return BlockOp.diagonal(outer_basis(n), [one.scale(v) for v in values], zero)


def build_Uminus(n, u, basis):
    return _scalar_diag(n, uminus_values(n, Fraction(u)), basis)


def build_Uplus(n, u, basis):
    return _scalar_diag(n, uplus_values(n, Fraction(u)), basis)


def unitriangular_inverse(block):
    """Exact inverse of a block unitriangular operator by a Neumann series."""
    d = block.d
    one = LinOp.identity(block.inner_domain)
    zero = LinOp.zeros(block.inner_domain)
    ident = BlockOp.diagonal(block.outer, [one] * d, zero)
    nil = BlockOp.from_function(block.outer, lambda i, j: block[i, j] - ident[i, j])
    neg = nil.scale(-1)
    term = ident
    total = ident
    for _ in range(d - 1):
        term = term @ neg
        total = BlockOp.from_function(block.outer, lambda i, j: total[i, j] + term[i, j])
    return total


# ---------------------------------------------------------------- paths


def _working_basis(pair):
    return BasisDescriptor.monomial(pair.degree + 2 * pair.n)


def _crop(block, N):
    """Restrict a BlockOp from the working basis to degrees <= N.

    A column is flagged when its image has components above degree N.
    """
    dom = BasisDescriptor.monomial(N)

    def cut(op):
        ent = op.entries
        spill = (ent[N + 1:, : N + 1] != 0).any(axis=0)
        return LinOp(dom, dom, ent[: N + 1, : N + 1].copy(), op.tainted[: N + 1] | spill)

    out = block.map(cut)
    # a spill in any block taints the column in every block
    d = out.d
    for j in range(d):
        flag = np.zeros(N + 1, dtype=bool)
        for i in range(d):
            flag |= out[i, j].tainted
        for i in range(d):
            out[i, j].tainted = flag.copy()
    return out


def _conv(pair, u):
    return SpectralConvention(Fraction(u), pair.n, pair.spin)


def build_R_factorized(pair, u):
    """Z^{-1} U+(u2) D U-(u1) Z on the second-space monomials z^0..z^N."""
    c = _conv(pair, u)
    basis = _working_basis(pair)
    Z = build_Z(pair.n, mult_by_coordinate(basis))
    D = build_Dmat(pair.n, derivative(basis))
    R = unitriangular_inverse(Z) @ build_Uplus(pair.n, c.u2, basis) @ D @ build_Uminus(pair.n, c.u1, basis) @ Z
    return _crop(R, pair.degree)


def build_R_oracle(pair, u):
    """Blocks from the double-sum action on (z1 - x)^n z^t.

    Each monomial z^t is pushed through the double sum as an explicit
    polynomial in (z1, x, z); the block (i, j) is the coefficient of
    z1^{n+1-i} x^{j-1} divided by C(n, j-1) (-1)^{j-1}.
    """
    n = pair.n
    c = _conv(pair, u)
    N = pair.degree
    basis = BasisDescriptor.monomial(N)
    blocks = [[LinOp.zeros(basis) for _ in range(n + 1)] for _ in range(n + 1)]
    a1 = c.u1 + 1 - n
    a2 = c.u2 + 1 - n
    for t in range(N + 1):
        poly = {}
        for k in range(n + 1):
            ck = comb(n, k) * rising_factorial(a1, k)
            for p in range(n - k + 1):
                cp = ck * comb(n - k, p) * rising_factorial(a2, n - k - p)
                if cp == 0:
                    continue
                # d^p [(z - x)^{n-k} z^t], expanded in x
                for b in range(n - k + 1):
                    e = n - k - b + t
                    if e < p:
                        continue
                    fall = 1
                    for s in range(p):
                        fall *= e - s
                    inner = cp * comb(n - k, b) * (-1) ** b * fall
                    # (z1 - z)^{k+p}
                    for a in range(k + p + 1):
                        coef = inner * comb(k + p, a) * (-1) ** (k + p - a)
                        key = (a, b, e - p + k + p - a)
                        poly[key] = poly.get(key, 0) + coef
        for (a, b, e), coef in poly.items():
            if coef == 0:
                continue
            i = n - a
            j = b
            val = Fraction(coef) / (comb(n, j) * (-1) ** j)
            if e <= N:
                blocks[i][j].entries[e, t] = val
            else:
                for row in blocks:
                    row[j].tainted[t] = True
    return BlockOp(outer_basis(n), blocks)


def build_R_operator_path(pair, u):
    """Exponential operator form evaluated on the tensor basis z1^a (x) z^t."""
    n = pair.n
    c = _conv(pair, u)
    b1 = BasisDescriptor.monomial(n, "z1")
    b2 = _working_basis(pair)
    d1 = derivative(b1)
    z2 = mult_by_coordinate(b2)
    dz = derivative(b2)
    id1 = LinOp.identity(b1)

    def exp_series(op2, sign=1):
        total = tensor(id1, LinOp.identity(b2))
        for k in range(1, n + 1):
            coef = Fraction(sign**k, factorial(k))
            total = total + tensor(_power(d1, k).scale(coef), _power(op2, k))
        return total

    flip = LinOp.zeros(b1)
    for k in range(n + 1):
        flip.entries[n - k, k] = Fraction(1)
    flip1 = tensor(flip, LinOp.identity(b2))

    def gamma_ratio(uu):
        return tensor(
            LinOp.diagonal(b1, [rising_factorial(uu + 1 - n, k) for k in range(n + 1)]),
            LinOp.identity(b2),
        )

    ops = [
        exp_series(z2, -1),
        flip1,
        gamma_ratio(c.u2),
        exp_series(dz),
        flip1,
        gamma_ratio(c.u1),
        exp_series(z2),
    ]
    total = ops[0]
    for op in ops[1:]:
        total = compose(total, op)
    # ascending z1 powers -> e-basis ordering (descending)
    d2 = b2.dimension
    order = np.concatenate([np.arange(a * d2, (a + 1) * d2) for a in range(n, -1, -1)])
    ent = total.entries[np.ix_(order, order)]
    flat = LinOp(
        BasisDescriptor.tensor(outer_basis(n), b2),
        BasisDescriptor.tensor(outer_basis(n), b2),
        ent,
        total.tainted[order],
    )
    block = BlockOp.from_flat(flat, outer_basis(n), b2, b2)
    return _crop(block, pair.degree)


# ------------------------------------------------------- finite restriction


def restrict_second(n, m, u, path=build_R_factorized):
    """R on the (n+1)(m+1)-dimensional space V_{n/2} (x) V_{m/2}.

    Both spaces use descending monomials (z1^n..1 and z^m..1). Raises
    InvarianceViolation if the degree <= m block is not preserved.
    """
    pair = RationalSpinPair(n, m=m)
    block = path(pair, u)
    if any(b.tainted.any() for row in block.blocks for b in row):
        raise InvarianceViolation("finite block is not invariant")
    inner = BasisDescriptor.monomial_desc(m, "z")
    desc = list(range(m, -1, -1))
    out = block.map(lambda b: LinOp(inner, inner, b.entries[np.ix_(desc, desc)]))
    return out.flatten()


def finite_generators(ell, dim):
    """sl2 generators on descending monomials of the given dimension."""
    return sl2_generators(ell, BasisDescriptor.monomial_desc(dim - 1))


# ------------------------------------------------------- key identity check


def _leibniz_rhs(n, u1, u2, x, z, z1, phi):
    """(z-x)^{n-u1-1} (z1-z)^{u2+1} d^n [(z1-z)^{n-u2-1} (z-x)^{u1+1} phi(z)]."""
    al = mpmath.mpf(n) - u2 - 1
    be = mpmath.mpf(u1) + 1
    coeffs = list(phi)
    total = mpmath.mpf(0)
    for a in range(n + 1):
        for b in range(n + 1 - a):
            c = n - a - b
            mult = mpmath.factorial(n) / (mpmath.factorial(a) * mpmath.factorial(b) * mpmath.factorial(c))
            fa = (-1) ** a * mpmath.ff(al, a) * (z1 - z) ** (al - a)
            gb = mpmath.ff(be, b) * (z - x) ** (be - b)
            hc = sum(
                coeffs[k] * mpmath.ff(k, c) * z ** (k - c) for k in range(c, len(coeffs))
            )
            total += mult * fa * gb * hc
    return (z - x) ** (n - u1 - 1) * (z1 - z) ** (u2 + 1) * total


def verify_key_identity(n, ell, u, points, phi=(1,)):
    """Max deviation between the factorized R acting on (z1 - x)^n phi(z)
    and the closed differential form, at real points x < z < z1.

    ``u`` is the argument of the closed form, so the factorized operator is
    evaluated at the physical parameter u - n/2. ``phi`` lists polynomial
    coefficients in ascending degree.
    """
    ell = Fraction(ell)
    u = Fraction(u)
    phi = [Fraction(c) for c in phi]
    deg = max(len(phi) - 1, 0)
    pair = RationalSpinPair(n, ell=ell, N=deg + n + 2)
    R = build_R_factorized(pair, u - Fraction(n, 2))
    conv = _conv(pair, u - Fraction(n, 2))
    vec = np.array(phi + [Fraction(0)] * (pair.N + 1 - len(phi)), dtype=object)
    worst = 0.0
    with mpmath.workdps(40):
        for x, z, z1 in points:
            x, z, z1 = (mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator for v in (x, z, z1))
            if not (z - x > 0 and z1 - z > 0):
                raise BranchGuard("points must satisfy x < z < z1")
            lhs = mpmath.mpf(0)
            for i in range(n + 1):
                for j in range(n + 1):
                    img = R[i, j].entries.dot(vec)
                    val = sum(mpmath.mpf(c.numerator) / c.denominator * z**k for k, c in enumerate(img) if c != 0)
                    lhs += z1 ** (n - i) * comb(n, j) * (-x) ** j * val
            rhs = _leibniz_rhs(
                n,
                mpmath.mpf(conv.u1.numerator) / conv.u1.denominator,
                mpmath.mpf(conv.u2.numerator) / conv.u2.denominator,
                x,
                z,
                z1,
                [mpmath.mpf(c.numerator) / c.denominator for c in phi],
            )
            worst = max(worst, float(abs(lhs - rhs)))
    return worst


# ------------------------------------------------- small-spin closed forms

# Coefficient tables: Z_ij = c z^{i-j}, D_ij = c d^{j-i} (0-based rows).
REFERENCE_Z = {
    1: [[1, 0], [1, 1]],
    2: [[1, 0, 0], [2, 1, 0], [1, 1, 1]],
    3: [[1, 0, 0, 0], [3, 1, 0, 0], [3, 2, 1, 0], [1, 1, 1, 1]],
    4: [[1, 0, 0, 0, 0], [4, 1, 0, 0, 0], [6, 3, 1, 0, 0], [4, 3, 2, 1, 0], [1, 1, 1, 1, 1]],
}
REFERENCE_D = {
    1: [[1, 1], [0, 1]],
    2: [[1, 1, 1], [0, 1, 2], [0, 0, 1]],
    3: [[1, 1, 1, 1], [0, 1, 2, 3], [0, 0, 1, 3], [0, 0, 0, 1]],
    4: [[1, 1, 1, 1, 1], [0, 1, 2, 3, 4], [0, 0, 1, 3, 6], [0, 0, 0, 1, 4], [0, 0, 0, 0, 1]],
}


def reference_Uplus(n, u):
    """diag(1, u-n+1, (u-n+2)(u-n+1), ..., u(u-1)...(u-n+1)) listed for n <= 4."""
    u = Fraction(u)
    vals, r = [Fraction(1)], Fraction(1)
    for t in range(n - 1, -1, -1):
        r *= u - t
        vals.append(r)
    return vals


def factor_table(block, kind):
    """Read the coefficient table of a Z- or D-type BlockOp.

    Z-type entries are read from their action on 1, D-type entries from
    their action on z^{j-i} divided by (j-i)!.
    """
    d = block.d
    out = [[0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            k = i - j if kind == "Z" else j - i
            if k < 0:
                # off-pattern entries must vanish; report 1 if they do not
                out[i][j] = 0 if block[i, j].is_zero() else 1
            elif kind == "Z":
                out[i][j] = block[i, j].entries[k, 0]
            else:
                out[i][j] = block[i, j].entries[0, k] / factorial(k)
    return out


def _ops(ell, basis):
    s, sm, sp = sl2_generators(ell, basis)
    return s, sm, sp, LinOp.identity(basis), mult_by_coordinate(basis), derivative(basis)


def lax_matrix(ell, u, N=6):
    """[[u + S, S-], [S+, u - S]] at the formula argument of the physical u."""
    pair = RationalSpinPair(1, ell=ell, N=N)
    c = _conv(pair, u)
    basis = _working_basis(pair)
    s, sm, sp, one, _, _ = _ops(ell, basis)
    uf = c.u_formula
    blocks = [[one.scale(uf) + s, sm], [sp, one.scale(uf) - s]]
    return _crop(BlockOp(outer_basis(1), blocks), N)


def _product(n, factors, N):
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return _crop(out, N)


def lax_factor_product(ell, u, N=6):
    """Five triangular and diagonal 2x2 factors for n = 1."""
    pair = RationalSpinPair(1, ell=ell, N=N)
    c = _conv(pair, u)
    basis = _working_basis(pair)
    _, _, _, one, z, d = _ops(ell, basis)
    zero = LinOp.zeros(basis)
    o = outer_basis(1)
    f = [
        BlockOp(o, [[one, zero], [z.scale(-1), one]]),
        BlockOp(o, [[one, zero], [zero, one.scale(c.u2)]]),
        BlockOp(o, [[one, d], [zero, one]]),
        BlockOp(o, [[one.scale(c.u1), zero], [zero, one]]),
        BlockOp(o, [[one, zero], [z, one]]),
    ]
    return _product(1, f, N)


def spin_one_factor_product(ell, u, N=6):
    """Five triangular and diagonal 3x3 factors for n = 2."""
    pair = RationalSpinPair(2, ell=ell, N=N)
    c = _conv(pair, u)
    basis = _working_basis(pair)
    _, _, _, one, z, d = _ops(ell, basis)
    zero = LinOp.zeros(basis)
    z2, d2 = compose(z, z), compose(d, d)
    u1, u2 = c.u1, c.u2
    o = outer_basis(2)
    f = [
        BlockOp(o, [[one, zero, zero], [z.scale(-2), one, zero], [z2, z.scale(-1), one]]),
        BlockOp(o, [[one, zero, zero], [zero, one.scale(u2 - 1), zero], [zero, zero, one.scale(u2 * (u2 - 1))]]),
        BlockOp(o, [[one, d, d2], [zero, one, d.scale(2)], [zero, zero, one]]),
        BlockOp(o, [[one.scale(u1 * (u1 - 1)), zero, zero], [zero, one.scale(u1 - 1), zero], [zero, zero, one]]),
        BlockOp(o, [[one, zero, zero], [z.scale(2), one, zero], [z2, z, one]]),
    ]
    return _product(2, f, N)


def blocks_equal(A, B):
    """Exact entrywise equality on columns neither operator flags as truncated."""
    if A.d != B.d:
        return False
    for i in range(A.d):
        for j in range(A.d):
            a, b = A[i, j], B[i, j]
            ok = ~(a.tainted | b.tainted)
            if not (a.entries[:, ok] == b.entries[:, ok]).all():
                return False
    return True
