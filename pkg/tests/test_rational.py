from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ybx import rational as rat
from ybx.errors import BranchGuard, ConfigError
from ybx.operators import BasisDescriptor, LinOp, compose, derivative, mult_by_coordinate
from ybx.verification import commutant_residual, ybe_residual

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=17)


def test_spin_pair_validation():
    with pytest.raises(ConfigError):
        rat.RationalSpinPair(1)
    with pytest.raises(ConfigError):
        rat.RationalSpinPair(1, m=1, ell=Fraction(1, 2))
    assert rat.RationalSpinPair(2, ell=Fraction(1, 3)).N == 4


def test_spectral_convention():
    c = rat.SpectralConvention(Fraction(1, 3), 2, Fraction(1, 2))
    assert c.u_formula == Fraction(4, 3)
    assert c.u1 + c.u2 == 2 * c.u_formula - 1


def test_sl2_commutators():
    basis = BasisDescriptor.monomial(8)
    s, sm, sp = rat.sl2_generators(Fraction(2, 3), basis)
    lhs = compose(sp, sm) - compose(sm, sp)
    rhs = s.scale(2)
    # compare on degrees <= N - 2 where nothing is truncated
    assert (lhs.entries[:, :7] == rhs.entries[:, :7]).all()
    assert s.entries[0, 0] == Fraction(-2, 3)


def test_highest_vector_decouples():
    basis = BasisDescriptor.monomial(4)
    _, _, sp = rat.sl2_generators(Fraction(3, 2), basis)
    assert all(x == 0 for x in sp.entries[:, 3])


@pytest.mark.parametrize("n", range(1, 5))
def test_factor_tables(n):
    b = BasisDescriptor.monomial(6)
    assert rat.factor_table(rat.build_Z(n, mult_by_coordinate(b)), "Z") == rat.REFERENCE_Z[n]
    assert rat.factor_table(rat.build_Dmat(n, derivative(b)), "D") == rat.REFERENCE_D[n]
    u = Fraction(5, 7)
    assert rat.uplus_values(n, u) == rat.reference_Uplus(n, u)
    assert rat.uminus_values(n, u) == rat.reference_Uplus(n, u)[::-1]


def test_u_minus_small_case():
    u = Fraction(3, 5)
    assert rat.uminus_values(2, u) == [u * (u - 1), u - 1, 1]
    assert rat.uplus_values(2, u) == [1, u - 1, u * (u - 1)]


@settings(max_examples=8, deadline=None)
@given(rationals, rationals)
def test_lax_forms(ell, u):
    A1 = rat.build_R_factorized(rat.RationalSpinPair(1, ell=ell, N=5), u)
    assert rat.blocks_equal(A1, rat.lax_matrix(ell, u, N=5))
    assert rat.blocks_equal(A1, rat.lax_factor_product(ell, u, N=5))
    A2 = rat.build_R_factorized(rat.RationalSpinPair(2, ell=ell, N=5), u)
    assert rat.blocks_equal(A2, rat.spin_one_factor_product(ell, u, N=5))


def test_z_inverse():
    b = BasisDescriptor.monomial(5)
    Z = rat.build_Z(3, mult_by_coordinate(b))
    P = rat.unitriangular_inverse(Z) @ Z
    for i in range(4):
        for j in range(4):
            ok = ~P[i, j].tainted
            want = 1 if i == j else 0
            assert all(x == (want if r == c else 0) for c in range(6) if ok[c] for r, x in enumerate(P[i, j].entries[:, c]))


@settings(max_examples=6, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), rationals)
def test_three_paths_agree(n, m, u):
    pair = rat.RationalSpinPair(n, m=m)
    A = rat.build_R_factorized(pair, u)
    assert rat.blocks_equal(A, rat.build_R_oracle(pair, u))
    assert rat.blocks_equal(A, rat.build_R_operator_path(pair, u))


def test_three_paths_generic_spin():
    pair = rat.RationalSpinPair(2, ell=Fraction(5, 2), N=6)
    u = Fraction(-3, 7)
    A = rat.build_R_factorized(pair, u)
    assert rat.blocks_equal(A, rat.build_R_oracle(pair, u))
    assert rat.blocks_equal(A, rat.build_R_operator_path(pair, u))


def test_lax_action_on_second_vector():
    # R e_2 = e_1 d + e_2 (u + ell - z d) at the formula argument
    ell, u = Fraction(2, 5), Fraction(1, 3)
    pair = rat.RationalSpinPair(1, ell=ell, N=4)
    R = rat.build_R_oracle(pair, u)
    uf = u + Fraction(1, 2)
    basis = BasisDescriptor.monomial(4)
    assert (R[0, 1].entries == derivative(basis).entries).all()
    want = LinOp.identity(basis).scale(uf + ell) - compose(mult_by_coordinate(basis), derivative(basis))
    assert (R[1, 1].entries == want.entries).all()


def test_restriction_small_case():
    R = rat.restrict_second(1, 1, Fraction(3, 2))
    assert R.shape == (4, 4)
    # e_2 (x) z has eigenvalue u_formula - 1/2 on the diagonal
    assert R.entries[2, 2] == Fraction(3, 2)


@pytest.mark.parametrize("spins", [(1, 1, 1), (1, 2, 1), (2, 2, 1), (2, 1, 2)])
def test_ybe_exact(spins):
    n, m, k = spins
    u, v = Fraction(2, 7), Fraction(-5, 3)
    rep = ybe_residual(
        rat.restrict_second(n, m, u - v), rat.restrict_second(n, k, u), rat.restrict_second(m, k, v), (n + 1, m + 1, k + 1)
    )
    assert rep.exact and rep.max_abs == 0 and rep.passed


def test_ybe_scaling_invariance():
    u, v = Fraction(1, 3), Fraction(3, 4)
    R12, R13, R23 = rat.restrict_second(1, 1, u - v), rat.restrict_second(1, 2, u), rat.restrict_second(1, 2, v)
    a = ybe_residual(R12, R13, R23, (2, 2, 3))
    b = ybe_residual(R12, R13.scale(7), R23, (2, 2, 3))
    assert a.relative == b.relative == 0


@pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_sl2_invariance(n, m):
    R = rat.restrict_second(n, m, Fraction(4, 9))
    g1 = rat.finite_generators(Fraction(n, 2), n + 1)
    g2 = rat.finite_generators(Fraction(m, 2), m + 1)
    rep = commutant_residual(R, list(zip(g1, g2)))
    assert rep.max_abs == 0 and rep.passed


@pytest.mark.parametrize("n,phi", [(1, (1,)), (2, (0, 1)), (3, (1, 2, -1))])
def test_key_identity(n, phi):
    res = rat.verify_key_identity(n, Fraction(5, 3), Fraction(3, 7), [(Fraction(-1, 10), Fraction(1, 2), Fraction(3, 2))], phi=phi)
    assert res < 1e-10


def test_key_identity_zero_function():
    assert rat.verify_key_identity(1, Fraction(1, 3), Fraction(1, 2), [(0, Fraction(1, 2), 1)], phi=(0,)) == 0


def test_key_identity_branch_guard():
    with pytest.raises(BranchGuard):
        rat.verify_key_identity(1, Fraction(1, 3), Fraction(1, 2), [(1, Fraction(1, 2), 2)])
