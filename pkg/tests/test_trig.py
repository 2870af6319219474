import itertools

import numpy as np
import pytest

from ybx import trig
from ybx.errors import ConfigError
from ybx.operators import BasisDescriptor, LinOp
from ybx.special import DEFAULT_MODULAR as P
from ybx.verification import commutant_residual, ybe_residual

U = 0.23 + 0.11j


def test_spin_pair_validation():
    with pytest.raises(ConfigError):
        trig.TrigSpinPair(1)
    pair = trig.TrigSpinPair(3, m2=2)
    assert pair.window == 2 + 6
    assert trig.TrigSpinPair(1, s=0.3).window == 2 + 3


def test_spectral_split():
    sp = trig.TrigSpectral(0.4 + 0.1j, 0.2 - 0.3j)
    assert abs(sp.u1 - sp.u) < 1e-15
    assert abs(sp.u2 - (sp.u - sp.s)) < 1e-15


def test_generators_weights():
    basis = BasisDescriptor.laurent(4)
    K, E, F = trig.modular_generators(0.3 + 0.1j, basis, P)
    j = basis.index_of(2)
    assert abs(K.entries[j, j] - P.qpow(2)) < 1e-15
    assert E.entries[basis.index_of(4), j] != 0
    assert F.entries[basis.index_of(0), j] != 0


@pytest.mark.parametrize("m", range(7))
def test_dbar_symmetry(m):
    D = np.array([[trig.coeff_dbar(m, j, k, U) for k in range(1, m + 2)] for j in range(1, m + 2)])
    assert np.abs(D - D.T).max() < 1e-12 * np.abs(D).max()


@pytest.mark.parametrize("m", range(6))
def test_djk_matches_vandermonde(m):
    for j in range(1, m + 2):
        a = trig.djk_from_product(m, j, U)
        b = np.array([trig.coeff_djk(m, j, k, U) for k in range(1, m + 2)])
        assert np.abs(a - b).max() < 1e-10 * np.abs(b).max()


def test_unscaled_coefficient_agrees_only_at_m1():
    assert abs(trig.coeff_djk_unscaled(1, 2, 1, U) - trig.coeff_djk(1, 2, 1, U)) < 1e-14
    assert abs(trig.coeff_djk_unscaled(2, 3, 1, U) - trig.coeff_djk(2, 3, 1, U)) > 1e-3


def test_coefficient_index_guard():
    with pytest.raises(ValueError):
        trig.coeff_dk(2, 4)
    with pytest.raises(ValueError):
        trig.coeff_djk(2, 0, 1, U)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_M_closed_forms(m):
    rng = np.random.default_rng(m)
    for _ in range(10):
        u = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.2, 0.2))
        ref = trig.reference_M(m, u)
        got = trig.build_M(m, u + m * P.omega_prime).entries
        assert np.abs(got - ref).max() < 1e-10 * np.abs(ref).max()


@pytest.mark.parametrize("m", range(4))
def test_paths_agree(m):
    pair = trig.TrigSpinPair(m, s=0.4 - 0.3j)
    A = trig.build_R_trig_factorized(pair, 0.2 + 0.1j).flatten().entries
    B = trig.build_R_trig_oracle(pair, 0.2 + 0.1j).flatten().entries
    assert np.abs(A - B).max() < 1e-11 * np.abs(A).max()


@pytest.mark.parametrize("m,m2", list(itertools.product(range(4), range(4))))
def test_finite_block_invariant(m, m2):
    assert trig.invariance_leak(m, m2, 0.3 + 0.1j) < 1e-12


def test_weight_conservation():
    x = 1.3 + 0.2j
    R = trig.restrict_second_trig(2, 1, U)
    b1, b2 = BasisDescriptor.laurent_block(2), BasisDescriptor.laurent_block(1)
    K1 = LinOp.diagonal(b1, [x**a for a in b1.exponents])
    K2 = LinOp.diagonal(b2, [x**a for a in b2.exponents])
    assert commutant_residual(R, [(K1, K2)], tol=1e-12, multiplicative=True).passed


def test_ybe_all_small_spins():
    u, v = 0.31 + 0.12j, -0.17 + 0.05j
    for n, m, k in itertools.product(range(3), repeat=3):
        rep = ybe_residual(
            trig.restrict_second_trig(n, m, u - v),
            trig.restrict_second_trig(n, k, u),
            trig.restrict_second_trig(m, k, v),
            (n + 1, m + 1, k + 1),
            tol=1e-8,
        )
        assert rep.passed, (n, m, k, rep.relative)
