"""Function bases, dense linear operators and tensor utilities.

Operators are dense matrices that remember their domain and codomain
bases. Exact operators hold :class:`fractions.Fraction` entries in object
arrays; numerical ones hold ``complex128``. Truncated operators carry a
boolean ``tainted`` flag per domain column: the image of that basis vector
is incomplete because it left the truncated space. Flags propagate through
composition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import DimensionMismatch, IllConditioned

# ------------------------------------------------------------------ bases


@dataclass(frozen=True)
class BasisDescriptor:
    """An ordered, labelled function basis.

    ``kind`` is one of ``monomial``, ``laurent``, ``theta_plus``, ``spin``
    (abstract finite basis) or ``tensor``. ``data`` holds kind-specific
    parameters: the exponents for monomial and Laurent bases, ``(n, grid)``
    for theta bases.
    """

    kind: str
    labels: tuple
    data: tuple = ()

    @property
    def dimension(self):
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    @classmethod
    def monomial(cls, N, var="z"):
        return cls("monomial", tuple(f"{var}^{k}" for k in range(N + 1)), tuple(range(N + 1)))

    @classmethod
    def monomial_desc(cls, n, var="z1"):
        """Descending monomials z^n, ..., z^0 (the e-basis of a finite space)."""
        exps = tuple(range(n, -1, -1))
        return cls("monomial", tuple(f"{var}^{k}" for k in exps), exps)

    @classmethod
    def laurent(cls, window, parity=None, var="X"):
        """Exponents j with |j| <= window, descending, optionally of fixed parity."""
        exps = tuple(j for j in range(window, -window - 1, -1) if parity is None or (j - parity) % 2 == 0)
        return cls("laurent", tuple(f"{var}^{j}" for j in exps), exps)

    @classmethod
    def laurent_block(cls, m, var="X"):
        """Finite Laurent span X^m, X^{m-2}, ..., X^{-m}."""
        exps = tuple(m - 2 * l for l in range(m + 1))
        return cls("laurent", tuple(f"{var}^{j}" for j in exps), exps)

    @classmethod
    def theta_plus(cls, n, grid=None):
        grid = tuple(default_grid(n).points if grid is None else grid)
        return cls("theta_plus", tuple(f"phi_{j}" for j in range(1, n + 2)), (n, grid))

    @classmethod
    def spin(cls, d, name="e"):
        return cls("spin", tuple(f"{name}_{j}" for j in range(1, d + 1)))

    @classmethod
    def tensor(cls, a, b):
        labels = tuple(f"{x}(x){y}" for x, y in itertools.product(a.labels, b.labels))
        return cls("tensor", labels, (a, b))

    @property
    def exponents(self):
        if self.kind not in ("monomial", "laurent"):
            raise TypeError(f"{self.kind} basis has no exponents")
        return self.data

    def index_of(self, exponent):
        return self.data.index(exponent)


# --------------------------------------------------------------- LinOp


def _zeros(shape, exact):
    if exact:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.complex128)


def _exact_matmul(a, b):
    """Product of two object arrays of Fractions, skipping zero entries."""
    rows, inner = a.shape
    cols = b.shape[1]
    out = _zeros((rows, cols), True)
    brows = []
    for k in range(inner):
        nz = [(c, b[k, c]) for c in range(cols) if b[k, c] != 0]
        brows.append(nz)
    for i in range(rows):
        acc = {}
        for k in range(inner):
            x = a[i, k]
            if x == 0 or not brows[k]:
                continue
            for c, y in brows[k]:
                acc[c] = acc.get(c, 0) + x * y
        for c, v in acc.items():
            out[i, c] = Fraction(v)
    return out


class LinOp:
    """Dense matrix with domain/codomain bases and per-column truncation flags."""

    __slots__ = ("domain", "codomain", "entries", "tainted")

    def __init__(self, domain, codomain, entries, tainted=None):
        entries = np.asarray(entries)
        if entries.shape != (codomain.dimension, domain.dimension):
            raise DimensionMismatch(
                f"entries {entries.shape} do not match bases "
                f"({codomain.dimension}, {domain.dimension})"
            )
        if entries.dtype != object:
            entries = entries.astype(np.complex128)
        self.domain = domain
        self.codomain = codomain
        self.entries = entries
        if tainted is None:
            tainted = np.zeros(domain.dimension, dtype=bool)
        self.tainted = np.asarray(tainted, dtype=bool)

    # construction helpers
    @classmethod
    def zeros(cls, domain, codomain=None, exact=True):
        codomain = domain if codomain is None else codomain
        return cls(domain, codomain, _zeros((codomain.dimension, domain.dimension), exact))

    @classmethod
    def identity(cls, basis, exact=True):
        op = cls.zeros(basis, exact=exact)
        for i in range(basis.dimension):
            op.entries[i, i] = Fraction(1) if exact else 1.0
        return op

    @classmethod
    def diagonal(cls, basis, values):
        values = list(values)
        exact = all(isinstance(v, (Fraction, int)) for v in values)
        op = cls.zeros(basis, exact=exact)
        for i, v in enumerate(values):
            op.entries[i, i] = Fraction(v) if exact else v
        return op

    @property
    def exact(self):
        return self.entries.dtype == object

    @property
    def shape(self):
        return self.entries.shape

    def to_complex(self):
        if not self.exact:
            return self
        return LinOp(self.domain, self.codomain, self.entries.astype(np.complex128), self.tainted)

    def copy(self):
        return LinOp(self.domain, self.codomain, self.entries.copy(), self.tainted.copy())

    # algebra
    def __matmul__(self, other):
        return compose(self, other)

    def _binary(self, other, sign):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise DimensionMismatch("operands act between different bases")
        a, b = self.entries, other.entries
        if self.exact and other.exact:
            out = a.copy()
            for i, j in zip(*np.nonzero(b != 0)):
                out[i, j] = a[i, j] + b[i, j] if sign > 0 else a[i, j] - b[i, j]
        else:
            out = a.astype(np.complex128) + sign * b.astype(np.complex128)
        return LinOp(self.domain, self.codomain, out, self.tainted | other.tainted)

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return LinOp(self.domain, self.codomain, -self.entries, self.tainted)

    def scale(self, c):
        if self.exact and isinstance(c, (Fraction, int)):
            c = Fraction(c)
            ent = self.entries.copy()
            for i, j in zip(*np.nonzero(ent != 0)):
                ent[i, j] = ent[i, j] * c
        else:
            ent = self.entries.astype(np.complex128) * complex(c)
        return LinOp(self.domain, self.codomain, ent, self.tainted)

    __mul__ = scale
    __rmul__ = scale

    def is_zero(self):
        return not np.any(self.entries != 0)

    def max_abs(self):
        if self.entries.size == 0:
            return 0.0
        return float(np.abs(self.entries.astype(np.complex128)).max())

    def __repr__(self):
        return (
            f"LinOp({self.codomain.kind}[{self.codomain.dimension}] <- "
            f"{self.domain.kind}[{self.domain.dimension}], exact={self.exact})"
        )


def compose(a, b):
    """Operator product ``a @ b``; column c of the result is tainted if b's
    column c is, or if it reaches a tainted column of ``a``."""
    if a.domain.dimension != b.codomain.dimension:
        raise DimensionMismatch(
            f"cannot compose {a.domain.dimension}-dim domain with "
            f"{b.codomain.dimension}-dim codomain"
        )
    if a.exact and b.exact:
        ent = _exact_matmul(a.entries, b.entries)
    else:
        ent = a.entries.astype(np.complex128) @ b.entries.astype(np.complex128)
    reach = (b.entries[a.tainted, :] != 0).any(axis=0) if a.tainted.any() else False
    return LinOp(b.domain, a.codomain, ent, b.tainted | reach)


def tensor(a, b):
    """Kronecker product with space ``a`` slowest."""
    if a.exact and b.exact:
        ra, ca = a.shape
        rb, cb = b.shape
        ent = _zeros((ra * rb, ca * cb), True)
        for i, j in zip(*np.nonzero(a.entries != 0)):
            ent[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = a.entries[i, j] * b.entries
    else:
        ent = np.kron(a.entries.astype(np.complex128), b.entries.astype(np.complex128))
    tainted = np.logical_or.outer(a.tainted, b.tainted).ravel()
    return LinOp(
        BasisDescriptor.tensor(a.domain, b.domain),
        BasisDescriptor.tensor(a.codomain, b.codomain),
        ent,
        tainted,
    )


def _plain_basis(d):
    return BasisDescriptor.spin(d, "v")


def embed_pair(op, dims, which):
    """Embed an operator on V_i (x) V_j into V_1 (x) V_2 (x) V_3.

    ``which`` is ``"12"``, ``"13"`` or ``"23"``; the omitted factor gets the
    identity. Index order is space 1 slowest.
    """
    d1, d2, d3 = dims
    if which not in ("12", "13", "23"):
        raise ValueError("which must be '12', '13' or '23'")
    a, b = int(which[0]) - 1, int(which[1]) - 1
    da, db = dims[a], dims[b]
    if op.shape != (da * db, da * db):
        raise DimensionMismatch(f"operator shape {op.shape} does not fit spaces {da}x{db}")
    ent = op.entries
    total = d1 * d2 * d3
    big = _zeros((total, total), op.exact)
    idx = np.array(list(itertools.product(range(d1), range(d2), range(d3))))
    flat = lambda t: (t[:, 0] * d2 + t[:, 1]) * d3 + t[:, 2]
    cols = np.arange(total)
    src = idx[:, a] * db + idx[:, b]
    for xx in range(da):
        for yy in range(db):
            row_idx = idx.copy()
            row_idx[:, a] = xx
            row_idx[:, b] = yy
            rows = flat(row_idx)
            vals = ent[xx * db + yy, src]
            mask = vals != 0
            big[rows[mask], cols[mask]] = vals[mask]
    basis = _plain_basis(total)
    return LinOp(basis, basis, big)


def permutation(d, exact=True):
    """Swap operator on V_d (x) V_d."""
    basis = _plain_basis(d * d)
    op = LinOp.zeros(basis, exact=exact)
    one = Fraction(1) if exact else 1.0
    for i in range(d):
        for j in range(d):
            op.entries[j * d + i, i * d + j] = one
    return op


# ------------------------------------------------------------- block ops


class BlockOp:
    """Square matrix whose entries are LinOps on a common second space."""

    __slots__ = ("outer", "blocks")

    def __init__(self, outer, blocks):
        d = outer.dimension
        if len(blocks) != d or any(len(row) != d for row in blocks):
            raise DimensionMismatch("block array must be square of outer dimension")
        dom, cod = blocks[0][0].domain, blocks[0][0].codomain
        for row in blocks:
            for blk in row:
                if blk.domain != dom or blk.codomain != cod:
                    raise DimensionMismatch("blocks must share inner bases")
        self.outer = outer
        self.blocks = [list(row) for row in blocks]

    @property
    def d(self):
        return self.outer.dimension

    @property
    def inner_domain(self):
        return self.blocks[0][0].domain

    @property
    def inner_codomain(self):
        return self.blocks[0][0].codomain

    @property
    def exact(self):
        return all(b.exact for row in self.blocks for b in row)

    def __getitem__(self, ij):
        i, j = ij
        return self.blocks[i][j]

    @classmethod
    def from_function(cls, outer, fn):
        d = outer.dimension
        return cls(outer, [[fn(i, j) for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, outer, ops, zero):
        d = outer.dimension
        return cls(outer, [[ops[i] if i == j else zero for j in range(d)] for i in range(d)])

    def __matmul__(self, other):
        if self.d != other.d:
            raise DimensionMismatch("outer dimensions differ")
        d = self.d
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = None
                for k in range(d):
                    a, b = self.blocks[i][k], other.blocks[k][j]
                    if a.is_zero() or b.is_zero():
                        continue
                    t = compose(a, b)
                    acc = t if acc is None else acc + t
                if acc is None:
                    acc = LinOp.zeros(other.inner_domain, self.inner_codomain, self.exact and other.exact)
                row.append(acc)
            out.append(row)
        return BlockOp(self.outer, out)

    def map(self, fn):
        return BlockOp(self.outer, [[fn(b) for b in row] for row in self.blocks])

    def scale(self, c):
        return self.map(lambda b: b.scale(c))

    def to_complex(self):
        return self.map(LinOp.to_complex)

    def flatten(self):
        """LinOp on outer (x) inner with index i * d_inner + a."""
        d = self.d
        rows = [np.concatenate([self.blocks[i][j].entries for j in range(d)], axis=1) for i in range(d)]
        ent = np.concatenate(rows, axis=0)
        if not self.exact and ent.dtype == object:
            ent = ent.astype(np.complex128)
        tainted = np.zeros(d * self.inner_domain.dimension, dtype=bool)
        for j in range(d):
            t = np.zeros_like(self.blocks[0][j].tainted)
            for i in range(d):
                t = t | self.blocks[i][j].tainted
            tainted[j * len(t):(j + 1) * len(t)] = t
        return LinOp(
            BasisDescriptor.tensor(self.outer, self.inner_domain),
            BasisDescriptor.tensor(self.outer, self.inner_codomain),
            ent,
            tainted,
        )

    @classmethod
    def from_flat(cls, op, outer, inner_domain, inner_codomain):
        """Re-extract blocks from a flattened operator."""
        d = outer.dimension
        rd, cd = inner_codomain.dimension, inner_domain.dimension
        blocks = [
            [
                LinOp(
                    inner_domain,
                    inner_codomain,
                    op.entries[i * rd:(i + 1) * rd, j * cd:(j + 1) * cd].copy(),
                    op.tainted[j * cd:(j + 1) * cd],
                )
                for j in range(d)
            ]
            for i in range(d)
        ]
        return cls(outer, blocks)

    def restrict(self, domain, codomain):
        """Sub-blocks on sub-bases given by exponent/label membership."""
        ci = [self.inner_codomain.labels.index(lab) for lab in codomain.labels]
        di = [self.inner_domain.labels.index(lab) for lab in domain.labels]
        return self.map(
            lambda b: LinOp(domain, codomain, b.entries[np.ix_(ci, di)], b.tainted[di])
        )


# ----------------------------------------------------- monomial operators


def mult_by_coordinate(basis, power=1):
    """Multiplication by z^power on a truncated monomial basis."""
    exps = basis.exponents
    N = max(exps)
    op = LinOp.zeros(basis)
    for c, k in enumerate(exps):
        if k + power <= N:
            op.entries[basis.index_of(k + power), c] = Fraction(1)
        else:
            op.tainted[c] = True
    return op


def derivative(basis, order=1):
    """d^order/dz^order on a monomial basis; exact, never truncates."""
    op = LinOp.zeros(basis)
    for c, k in enumerate(basis.exponents):
        if k >= order:
            f = 1
            for t in range(order):
                f *= k - t
            op.entries[basis.index_of(k - order), c] = Fraction(f)
    return op


# ------------------------------------------------------ Laurent operators


def laurent_shift(c, basis, params):
    """Shift x -> x + c omega' acting on X^j: eigenvalue q^{c j / 2}."""
    return LinOp.diagonal(basis, [params.qpow(c * j) for j in basis.exponents])


def laurent_mult(k, basis):
    """Multiplication by X^k; exponents leaving the window are flagged.

    Odd k is allowed: it moves between the two parity classes, which the
    first-space factors do when m is odd.
    """
    op = LinOp.zeros(basis)
    for c, j in enumerate(basis.exponents):
        if j + k in basis.data:
            op.entries[basis.index_of(j + k), c] = Fraction(1)
        else:
            op.tainted[c] = True
    return op


# ---------------------------------------------------------- collocation


@dataclass(frozen=True)
class CollocationGrid:
    """Fit points followed by held-out validation points."""

    points: tuple
    n_fit: int
    cond_bound: float = 1e8

    @property
    def fit_points(self):
        return np.array(self.points[: self.n_fit])

    @property
    def validation_points(self):
        return np.array(self.points[self.n_fit:])

    @property
    def all_points(self):
        return np.array(self.points)


def default_grid(n, extra=2, start=0.13, step=0.06 + 0.02j):
    """n + 1 fit points start + s step plus ``extra`` validation points."""
    s = np.arange(n + 1 + extra)
    return CollocationGrid(tuple(complex(start + step * k) for k in s), n + 1)


def collocation_fit(samples, design, grid, scale=None):
    """Solve for basis coefficients from samples on a grid.

    Parameters
    ----------
    samples : array, shape (len(grid.points), ...)
        Function values at every grid point; trailing axes are fitted
        independently.
    design : array, shape (len(grid.points), dim)
        Basis function values at the grid points.
    grid : CollocationGrid
    scale : float, optional
        Magnitude used to normalize the residual. Defaults to the largest
        sample modulus.

    Returns
    -------
    coeffs : array, shape (dim, ...)
    residual : float
        Relative misfit at the validation points; a large value means the
        function is not in the span of the basis.
    """
    samples = np.asarray(samples, dtype=np.complex128)
    design = np.asarray(design, dtype=np.complex128)
    k = grid.n_fit
    a = design[:k]
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > grid.cond_bound:
        raise IllConditioned(f"collocation matrix condition {cond:.2e} exceeds {grid.cond_bound:.0e}")
    flat = samples.reshape(samples.shape[0], -1)
    coeffs = np.linalg.solve(a, flat[:k])
    if scale is None:
        scale = float(np.abs(flat).max()) if flat.size else 0.0
    if design.shape[0] > k and scale > 0:
        miss = design[k:] @ coeffs - flat[k:]
        residual = float(np.abs(miss).max()) / scale
    else:
        residual = 0.0
    return coeffs.reshape((design.shape[1],) + samples.shape[1:]), residual


def binomial(n, k):
    return comb(n, k) if 0 <= k <= n else 0
