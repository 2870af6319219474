"""Residual computations and the verification suite.

Every check returns a :class:`ResidualReport`. ``run_suite`` executes the
registered checks for a selection of tags and models and merges the
reports by name. Random draws are seeded per check from the suite seed
and the check name, so any single check reproduces on its own.
"""

from __future__ import annotations

import itertools
import logging
import time
import zlib
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import elliptic as ell
from . import rational as rat
from . import trig
from .errors import DimensionMismatch, NumericalGuard, ZeroMatrix
from .operators import LinOp, embed_pair, tensor
from .special import (
    DEFAULT_MODULAR,
    TruncationConfig,
    bar_theta,
    default_elliptic,
    dfunc_quantized,
    elliptic_gamma,
    q_binomial_coefficient,
    shift_constant,
    theta,
)

log = logging.getLogger(__name__)


@dataclass
class ResidualReport:
    """Outcome of one check.

    ``relative`` is ``max_abs`` divided by the largest entry of the
    reference side. In exact mode ``passed`` requires ``max_abs == 0``.
    """

    name: str
    max_abs: float
    relative: float
    passed: bool
    tol: float | None = None
    exact: bool = False
    context: dict = field(default_factory=dict)
    runtime: float = 0.0
    tags: tuple = ()
    seed: int | None = None

    def to_dict(self):
        d = asdict(self)
        d["tags"] = list(self.tags)
        return d


def _abs(x):
    return float(abs(x))


def _max_abs(arr):
    if arr.size == 0:
        return 0.0
    if arr.dtype == object:
        return max(_abs(x) for x in arr.ravel())
    return float(np.abs(arr).max())


def _report(name, max_abs, scale, tol, exact, context=None):
    rel = 0.0 if max_abs == 0 else (max_abs / scale if scale else float("inf"))
    passed = max_abs == 0 if exact else rel <= tol
    return ResidualReport(name, float(max_abs), float(rel), bool(passed), tol, exact, context or {})


# --------------------------------------------------------------- residuals


def ybe_residual(R12, R13, R23, dims, tol=1e-8, name="ybe", context=None):
    """Residual of R12 R13 R23 - R23 R13 R12 on V1 (x) V2 (x) V3.

    Exact operators give an exact residual and pass only at zero.
    """
    A = embed_pair(R12, dims, "12")
    B = embed_pair(R13, dims, "13")
    C = embed_pair(R23, dims, "23")
    lhs = (A @ B @ C).entries
    rhs = (C @ B @ A).entries
    exact = R12.exact and R13.exact and R23.exact
    return _report(name, _max_abs(lhs - rhs), _max_abs(rhs), tol, exact, context)


def _pivot(arr):
    """Flat index of the largest-modulus entry, lowest index on ties."""
    mags = np.array([_abs(x) for x in arr.ravel()]) if arr.dtype == object else np.abs(arr).ravel()
    return int(np.argmax(mags))


def equal_up_to_scalar(A, B, tol=1e-10, name="scalar_equality", context=None):
    """Compare A and B after dividing both by their entry at B's pivot.

    The pivot is B's largest-modulus entry (lowest flat index on ties).
    For exact operators the ratio is exact and equality must be exact.

    Raises
    ------
    ZeroMatrix
        If B vanishes identically.
    """
    a = A.entries if isinstance(A, LinOp) else np.asarray(A)
    b = B.entries if isinstance(B, LinOp) else np.asarray(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    exact = a.dtype == object and b.dtype == object
    p = _pivot(b)
    bp, ap = b.ravel()[p], a.ravel()[p]
    if _abs(bp) == 0:
        raise ZeroMatrix("reference operator is identically zero")
    ctx = dict(context or {})
    if _abs(ap) == 0:
        ctx["scalar"] = 0.0
        return ResidualReport(name, float("inf"), float("inf"), False, tol, exact, ctx)
    ratio = ap / bp
    ctx["scalar"] = str(ratio) if exact else [complex(ratio).real, complex(ratio).imag]
    if exact:
        diff = a - b * ratio
        return _report(name, _max_abs(diff), _max_abs(a), tol, True, ctx)
    diff = a / ap - b / bp
    # both sides are normalized, so max_abs is already relative
    m = _max_abs(diff)
    return ResidualReport(name, m, m, m <= tol, tol, False, ctx)


def commutant_residual(R, gens, tol=1e-10, multiplicative=False, name="commutant", context=None):
    """max over pairs of |[R, G1 (x) 1 + 1 (x) G2]| (or [R, G1 (x) G2]).

    ``gens`` is a list of (G1, G2) pairs acting on the two tensor factors.
    """
    worst, scale = 0.0, 0.0
    exact = R.exact
    for g1, g2 in gens:
        if multiplicative:
            delta = tensor(g1, g2)
        else:
            delta = tensor(g1, LinOp.identity(g2.domain, exact=g1.exact)) + tensor(
                LinOp.identity(g1.domain, exact=g2.exact), g2
            )
        if delta.shape != R.shape:
            raise DimensionMismatch(f"coproduct shape {delta.shape} does not match R {R.shape}")
        rd = (R @ delta).entries
        worst = max(worst, _max_abs(rd - (delta @ R).entries))
        scale = max(scale, _max_abs(rd))
        exact = exact and g1.exact and g2.exact
    return _report(name, worst, scale, tol, exact, context)


# ----------------------------------------------------------- random draws


def check_seed(seed, name):
    return (int(seed) * 1_000_003 + zlib.crc32(name.encode())) % (2**32)


def random_rational(rng, lo=-3, hi=3, max_den=17):
    den = int(rng.integers(1, max_den + 1))
    num = int(rng.integers(lo * den, hi * den + 1))
    return Fraction(num, den)


def random_complex(rng, re=(-0.4, 0.4), im=(-0.2, 0.2)):
    return complex(rng.uniform(*re), rng.uniform(*im))


# -------------------------------------------------------------- registry


@dataclass
class Check:
    name: str
    tags: tuple
    model: str
    run: object
    criterion: int | None = None


REGISTRY: dict[str, Check] = {}


def register(name, tags, model, criterion=None):
    def deco(fn):
        REGISTRY[name] = Check(name, tuple(tags), model, fn, criterion)
        return fn

    return deco


def _block_diff(A, B):
    """Largest exact difference on columns neither side flags as truncated."""
    worst = Fraction(0)
    for i in range(A.d):
        for j in range(A.d):
            a, b = A[i, j], B[i, j]
            ok = ~(a.tainted | b.tainted)
            d = a.entries[:, ok] - b.entries[:, ok]
            worst = max([worst] + [abs(x) for x in d.ravel()])
    return worst


# rational -----------------------------------------------------------------


@register("rational.three_paths", ("factorization",), "rational", 1)
def _rational_paths(rng, cfg):
    worst, cases = Fraction(0), 0
    seconds = [dict(m=m) for m in range(1, 5)] + [dict(ell=Fraction(e), N=8) for e in ("1/3", "5/2", "7/4")]
    for n in range(1, 5):
        for sec in seconds:
            pair = rat.RationalSpinPair(n, **sec)
            for _ in range(5):
                u = random_rational(rng, -5, 5)
                A = rat.build_R_factorized(pair, u)
                worst = max(worst, _block_diff(A, rat.build_R_oracle(pair, u)), _block_diff(A, rat.build_R_operator_path(pair, u)))
                cases += 1
    return _report("rational.three_paths", float(worst), 1.0, 0.0, True, {"cases": cases})


@register("rational.reference_forms", ("factorization",), "rational", 2)
def _rational_reference(rng, cfg):
    from .operators import BasisDescriptor, derivative, mult_by_coordinate

    worst, checked = Fraction(0), 0
    b = BasisDescriptor.monomial(6)
    for n in range(1, 5):
        z_tab = rat.factor_table(rat.build_Z(n, mult_by_coordinate(b)), "Z")
        d_tab = rat.factor_table(rat.build_Dmat(n, derivative(b)), "D")
        for tab, ref in ((z_tab, rat.REFERENCE_Z[n]), (d_tab, rat.REFERENCE_D[n])):
            worst = max([worst] + [abs(Fraction(x) - y) for r1, r2 in zip(tab, ref) for x, y in zip(r1, r2)])
        u = random_rational(rng)
        ref_plus = rat.reference_Uplus(n, u)
        worst = max([worst] + [abs(x - y) for x, y in zip(rat.uplus_values(n, u), ref_plus)])
        worst = max([worst] + [abs(x - y) for x, y in zip(rat.uminus_values(n, u), ref_plus[::-1])])
        checked += 4
    for _ in range(3):
        ell_, u = random_rational(rng), random_rational(rng)
        A1 = rat.build_R_factorized(rat.RationalSpinPair(1, ell=ell_, N=6), u)
        A2 = rat.build_R_factorized(rat.RationalSpinPair(2, ell=ell_, N=6), u)
        worst = max(
            worst,
            _block_diff(A1, rat.lax_matrix(ell_, u)),
            _block_diff(A1, rat.lax_factor_product(ell_, u)),
            _block_diff(A2, rat.spin_one_factor_product(ell_, u)),
        )
        checked += 3
    return _report("rational.reference_forms", float(worst), 1.0, 0.0, True, {"instances": checked})


def _rational_uv(rng):
    return random_rational(rng), random_rational(rng)


@register("rational.ybe", ("ybe",), "rational", 3)
def _rational_ybe(rng, cfg):
    worst, pairs = 0.0, []
    for _ in range(3):
        u, v = _rational_uv(rng)
        pairs.append([str(u), str(v)])
        for n, m, k in itertools.product((1, 2), repeat=3):
            rep = ybe_residual(
                rat.restrict_second(n, m, u - v),
                rat.restrict_second(n, k, u),
                rat.restrict_second(m, k, v),
                (n + 1, m + 1, k + 1),
            )
            worst = max(worst, rep.max_abs)
    return _report("rational.ybe", worst, 1.0, 0.0, True, {"uv": pairs, "spins": "{1,2}^3"})


@register("rational.sl2_invariance", ("algebra",), "rational", 4)
def _rational_invariance(rng, cfg):
    worst = 0.0
    for n, m in itertools.product((1, 2), repeat=2):
        u = random_rational(rng)
        R = rat.restrict_second(n, m, u)
        g1 = rat.finite_generators(Fraction(n, 2), n + 1)
        g2 = rat.finite_generators(Fraction(m, 2), m + 1)
        rep = commutant_residual(R, list(zip(g1, g2)))
        worst = max(worst, rep.max_abs)
    return _report("rational.sl2_invariance", worst, 1.0, 0.0, True, {"spins": "{1,2}^2"})


@register("rational.key_identity", ("identities",), "rational", 5)
def _rational_key(rng, cfg):
    worst = 0.0
    phis = {1: (1,), 2: (0, 1), 3: (1, 2, -1)}
    for n in (1, 2, 3):
        for _ in range(2):
            ell_ = Fraction(int(rng.integers(1, 12)), int(rng.integers(2, 8)))
            u = random_rational(rng, -1, 1)
            x = Fraction(int(rng.integers(-10, 0)), 10)
            z = Fraction(int(rng.integers(1, 10)), 10)
            z1 = z + Fraction(int(rng.integers(5, 20)), 10)
            worst = max(worst, rat.verify_key_identity(n, ell_, u, [(x, z, z1)], phi=phis[n]))
    return _report("rational.key_identity", worst, 1.0, 1e-10, False)


# trigonometric -------------------------------------------------------------


@register("trig.special_functions", ("identities",), "trig", 6)
def _trig_special(rng, cfg):
    P = cfg.get("modular", DEFAULT_MODULAR)
    qb = 0.0
    for m in range(0, 9):
        q = complex(*rng.uniform(-0.7, 0.7, 2))
        x = random_complex(rng, (-2, 2), (-2, 2))
        lhs = np.prod([1 + x * q ** (2 * k) for k in range(m)])
        rhs = sum(q_binomial_coefficient(q, m, k) * x**k for k in range(m + 1))
        qb = max(qb, abs(lhs - rhs) / max(1.0, abs(lhs)))
    fe = 0.0
    w, wp = P.omega, P.omega_prime
    for m in range(0, 7):
        x = random_complex(rng, (-1, 1), (-0.3, 0.3))
        ratio = dfunc_quantized(m, x - wp, P) / dfunc_quantized(m, x + wp, P)
        ref = np.cos(np.pi * (x - m * wp) / (2 * w)) / np.cos(np.pi * (x + m * wp) / (2 * w))
        even = abs(dfunc_quantized(m, x, P) - dfunc_quantized(m, -x, P)) / abs(dfunc_quantized(m, x, P))
        fe = max(fe, abs(ratio - ref) / abs(ref), even)
    ok = qb < 1e-12 and fe < 1e-11
    return ResidualReport(
        "trig.special_functions", max(qb, fe), max(qb, fe), ok, 1e-11, False, {"q_binomial": qb, "functional_eq": fe}
    )


@register("trig.reference_M", ("factorization",), "trig", 7)
def _trig_reference(rng, cfg):
    P = cfg.get("modular", DEFAULT_MODULAR)
    worst = 0.0
    for m in (1, 2, 3):
        for _ in range(10):
            u = random_complex(rng)
            ref = trig.reference_M(m, u, P)
            got = trig.build_M(m, u + m * P.omega_prime, P).entries
            worst = max(worst, float(np.abs(got - ref).max() / np.abs(ref).max()))
    return _report("trig.reference_M", worst, 1.0, 1e-10, False)


@register("trig.coefficients", ("identities",), "trig", 8)
def _trig_coeffs(rng, cfg):
    P = cfg.get("modular", DEFAULT_MODULAR)
    sym = 0.0
    for m in range(0, 7):
        u = random_complex(rng)
        D = np.array([[trig.coeff_dbar(m, j, k, u, P) for k in range(1, m + 2)] for j in range(1, m + 2)])
        sym = max(sym, float(np.abs(D - D.T).max() / np.abs(D).max()))
    van = 0.0
    for m in range(0, 6):
        u = random_complex(rng)
        for j in range(1, m + 2):
            a = trig.djk_from_product(m, j, u, P)
            b = np.array([trig.coeff_djk(m, j, k, u, P) for k in range(1, m + 2)])
            van = max(van, float(np.abs(a - b).max() / np.abs(b).max()))
    ok = sym < 1e-12 and van < 1e-10
    return ResidualReport("trig.coefficients", max(sym, van), max(sym, van), ok, 1e-10, False, {"symmetry": sym, "vandermonde": van})


@register("trig.paths", ("factorization",), "trig", 9)
def _trig_paths(rng, cfg):
    P = cfg.get("modular", DEFAULT_MODULAR)
    worst = 0.0
    for m in range(0, 4):
        s, u = random_complex(rng), random_complex(rng)
        pair = trig.TrigSpinPair(m, s=s)
        A = trig.build_R_trig_factorized(pair, u, P).flatten().entries
        B = trig.build_R_trig_oracle(pair, u, P).flatten().entries
        worst = max(worst, float(np.abs(A - B).max() / np.abs(A).max()))
    return _report("trig.paths", worst, 1.0, 1e-11, False)


@register("trig.ybe", ("ybe",), "trig", 9)
def _trig_ybe(rng, cfg):
    P = cfg.get("modular", DEFAULT_MODULAR)
    worst, uvs = 0.0, []
    for _ in range(3):
        u, v = random_complex(rng), random_complex(rng)
        uvs.append([[u.real, u.imag], [v.real, v.imag]])
        for n, m, k in itertools.product(range(3), repeat=3):
            rep = ybe_residual(
                trig.restrict_second_trig(n, m, u - v, P),
                trig.restrict_second_trig(n, k, u, P),
                trig.restrict_second_trig(m, k, v, P),
                (n + 1, m + 1, k + 1),
            )
            worst = max(worst, rep.relative)
    return _report("trig.ybe", worst, 1.0, 1e-8, False, {"uv": uvs, "spins": "{0,1,2}^3"})


@register("trig.weight_conservation", ("algebra",), "trig")
def _trig_weight(rng, cfg):
    from .operators import BasisDescriptor

    P = cfg.get("modular", DEFAULT_MODULAR)
    worst = 0.0
    x = 1.3 + 0.2j
    for m, m2 in itertools.product(range(3), repeat=2):
        R = trig.restrict_second_trig(m, m2, random_complex(rng), P)
        b1, b2 = BasisDescriptor.laurent_block(m), BasisDescriptor.laurent_block(m2)
        K1 = LinOp.diagonal(b1, [x**a for a in b1.exponents])
        K2 = LinOp.diagonal(b2, [x**a for a in b2.exponents])
        rep = commutant_residual(R, [(K1, K2)], multiplicative=True)
        worst = max(worst, rep.relative)
    return _report("trig.weight_conservation", worst, 1.0, 1e-12, False)


# elliptic ------------------------------------------------------------------


def _eparams(cfg):
    return cfg.get("elliptic") or default_elliptic()


@register("elliptic.special_functions", ("identities",), "elliptic", 10)
def _ell_special(rng, cfg):
    P = _eparams(cfg)
    tau, tr = P.tau, P.trunc
    pts = [random_complex(rng, (-0.5, 0.5), (-0.3, 0.3)) for _ in range(20)]
    th, refl, shift = 0.0, 0.0, 0.0
    Rt = shift_constant(P)
    for x in pts:
        y = random_complex(rng, (-0.5, 0.5), (-0.3, 0.3))
        lhs = 2 * theta(1, x + y, tau, tr) * theta(1, x - y, tau, tr)
        rhs = bar_theta(4, x, tau, tr) * bar_theta(3, y, tau, tr) - bar_theta(4, y, tau, tr) * bar_theta(3, x, tau, tr)
        th = max(th, abs(lhs - rhs))
        refl = max(refl, abs(elliptic_gamma(x, P) * elliptic_gamma(-x + 2 * P.eta + tau, P) - 1))
        g = elliptic_gamma(x, P)
        ref = Rt * np.exp(1j * np.pi * x) * theta(1, x, tau, tr) * g
        shift = max(shift, abs(elliptic_gamma(x + 2 * P.eta, P) - ref) / max(1.0, abs(ref)))
    big = P.with_trunc(TruncationConfig(2 * tr.theta_terms, 2 * tr.gamma_terms, tr.target_tol))
    stab = 0.0
    for x in pts:
        for a in (1, 2, 3, 4):
            stab = max(stab, abs(theta(a, x, tau, tr) - theta(a, x, tau, big.trunc)))
        stab = max(stab, abs(elliptic_gamma(x, P) - elliptic_gamma(x, big)) / abs(elliptic_gamma(x, big)))
    ok = th < 1e-10 and refl < 1e-10 and shift < 1e-10 and stab < 1e-12
    worst = max(th, refl, shift)
    return ResidualReport(
        "elliptic.special_functions",
        max(worst, stab),
        max(worst, stab),
        ok,
        1e-10,
        False,
        {"theta_identity": th, "reflection": refl, "shift": shift, "truncation_doubling": stab},
    )


@register("elliptic.sklyanin", ("algebra",), "elliptic", 11)
def _ell_sklyanin(rng, cfg):
    P = _eparams(cfg)
    worst, member = 0.0, 0.0
    for n in (1, 2):
        rep = ell.sklyanin_generators(ell.g_n(n, P), n, P)
        member = max(member, rep.residual)
        worst = max([worst] + [max(v) for v in ell.sklyanin_residuals(rep, P).values()])
    return _report("elliptic.sklyanin", worst, 1.0, 1e-8, False, {"membership": member})


def _zs(rng, k=3):
    return np.array([random_complex(rng, (0.15, 0.35), (-0.08, 0.08)) for _ in range(k)])


@register("elliptic.intertwiner", ("factorization",), "elliptic", 12)
def _ell_intertwiner(rng, cfg):
    P = _eparams(cfg)
    z = _zs(rng)
    path, ref = 0.0, 0.0
    for n in (1, 2, 3):
        b3 = ell.build_intertwiner(n, P, 3).beta(z)
        b4 = ell.build_intertwiner(n, P, 4).beta(z)
        path = max(path, float(np.abs(b3 - b4).max() / np.abs(b3).max()))
        if n <= 2:
            D = ell.reference_D(n, z, P)
            ref = max(ref, float(np.abs(b3 - D).max() / np.abs(D).max()))
    return ResidualReport(
        "elliptic.intertwiner", max(path, ref), max(path, ref), max(path, ref) < 1e-9, 1e-9, False,
        {"a3_vs_a4": path, "reference_D": ref},
    )


@register("elliptic.V", ("factorization",), "elliptic", 12)
def _ell_V(rng, cfg):
    P = _eparams(cfg)
    z = _zs(rng)
    parity, ref = 0.0, 0.0
    for n in (1, 2, 3):
        u = random_complex(rng)
        V = ell.build_V(n, u, P)
        a, b = V(-z), V(z)[:, :, ::-1]
        parity = max(parity, float(np.abs(a - b).max() / np.abs(b).max()))
    for n in (1, 2):
        u = random_complex(rng)
        got = ell.build_V(n, ell.reference_V_argument(n, u, P), P)(z)
        for s, zz in enumerate(z):
            want = ell.reference_V_normalization(n) @ ell.reference_V(n, u, zz, P)
            ref = max(ref, float(np.abs(got[s] - want).max() / np.abs(want).max()))
    worst = max(parity, ref)
    return ResidualReport("elliptic.V", worst, worst, worst < 1e-9, 1e-9, False, {"parity": parity, "reference_V": ref})


def _test_functions():
    return [lambda w: np.exp(0.4 * w), lambda w: np.cos(2 * np.pi * w) + 0.3 * np.exp(0.7j * w), lambda w: w**2 + 0.5]


@register("elliptic.paths", ("factorization",), "elliptic", 13)
def _ell_paths(rng, cfg):
    P = _eparams(cfg)
    worst = 0.0
    scalars = []
    for n in (1, 2):
        for _ in range(3):
            u = random_complex(rng)
            g = random_complex(rng, (0.2, 0.45), (0.1, 0.25))
            pair = ell.EllipticSpinPair(n, g=g)
            z = _zs(rng, 2)
            Rf = ell.build_R_elliptic_factorized(pair, u, P)
            Ro = ell.build_R_elliptic_oracle(pair, u, P)
            A = np.concatenate([Rf.apply(f, z).ravel() for f in _test_functions()])
            B = np.concatenate([Ro.apply(f, z).ravel() for f in _test_functions()])
            rep = equal_up_to_scalar(B[None, :], A[None, :], 1e-8)
            worst = max(worst, rep.relative)
            scalars.append(rep.context["scalar"])
    return _report("elliptic.paths", worst, 1.0, 1e-8, False, {"scalars": scalars})


@register("elliptic.ybe", ("ybe",), "elliptic", 14)
def _ell_ybe(rng, cfg):
    P = _eparams(cfg)
    worst, member, uvs = 0.0, 0.0, []
    for _ in range(2):
        u, v = random_complex(rng), random_complex(rng)
        uvs.append([[u.real, u.imag], [v.real, v.imag]])
        for n, m, k in ((1, 1, 1), (1, 1, 2)):
            ops = []
            for a, b, w in ((n, m, u - v), (n, k, u), (m, k, v)):
                op, res = ell.restrict_second_elliptic(a, b, w, P)
                member = max(member, res)
                ops.append(op)
            rep = ybe_residual(*ops, (n + 1, m + 1, k + 1))
            worst = max(worst, rep.relative)
    return _report("elliptic.ybe", worst, 1.0, 1e-7, False, {"uv": uvs, "membership": member})


# ---------------------------------------------------------------- suite

SUITES = ("identities", "factorization", "ybe", "algebra")
MODELS = ("rational", "trig", "elliptic")


def select_checks(suites=("all",), models=None, names=None):
    """Registered checks matching the tag and model selection, by name."""
    suites = tuple(suites or ())
    if "all" in suites:
        suites = SUITES
    models = tuple(models) if models else MODELS
    out = []
    for name in sorted(REGISTRY):
        c = REGISTRY[name]
        if names is not None and name not in names:
            continue
        if c.model in models and set(c.tags) & set(suites):
            out.append(c)
    return out


def run_check(check, seed=0, cfg=None):
    s = check_seed(seed, check.name)
    rng = np.random.default_rng(s)
    t0 = time.perf_counter()
    try:
        rep = check.run(rng, cfg or {})
    except NumericalGuard as exc:
        rep = ResidualReport(check.name, float("inf"), float("inf"), False, None, False, {"error": repr(exc)})
    rep.runtime = time.perf_counter() - t0
    rep.tags = check.tags
    rep.seed = s
    rep.context.setdefault("model", check.model)
    if check.criterion is not None:
        rep.context.setdefault("criterion", check.criterion)
    log.info("%s seed=%d passed=%s rel=%.3g", check.name, s, rep.passed, rep.relative)
    return rep


def run_suite(config=None):
    """Run the selected checks; returns reports sorted by name.

    ``config`` keys: ``suites`` (tags or ``"all"``), ``models``,
    ``names``, ``seed``, ``modular`` (ModularParams), ``elliptic``
    (EllipticParams).
    """
    config = dict(config or {})
    checks = select_checks(config.get("suites", ("all",)), config.get("models"), config.get("names"))
    seed = int(config.get("seed", 0))
    return [run_check(c, seed, config) for c in checks]
