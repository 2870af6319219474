import numpy as np
import pytest

from ybx import elliptic as ell
from ybx.errors import ConfigError, InvarianceViolation
from ybx.verification import equal_up_to_scalar, ybe_residual

Z = np.array([0.21 + 0.07j, 0.33 - 0.04j])
U = 0.23 + 0.05j


def phi_test(w):
    return np.exp(0.4 * w) + w**2


def test_spin_pair_and_spectral(eparams):
    with pytest.raises(ConfigError):
        ell.EllipticSpinPair(1)
    pair = ell.EllipticSpinPair(1, n2=2)
    assert abs(pair.spin(eparams) - (3 * eparams.eta + eparams.tau / 2)) < 1e-15
    sp = ell.EllipticSpectral(0.3, 0.1 + 0.2j)
    assert abs(sp.u1 + sp.u2 - sp.u) < 1e-15


def test_bases(eparams):
    b1 = ell.ThetaBases(1, eparams)
    assert np.abs(b1.psi_in_phi() - np.eye(2)).max() < 1e-12
    assert (b1.antidiag @ b1.antidiag == np.eye(2)).all()
    b2 = ell.ThetaBases(2, eparams)
    T = b2.psi_in_phi()
    assert T.shape == (3, 3) and abs(np.linalg.det(T)) > 1e-6


@pytest.mark.parametrize("n", [1, 2])
def test_generating_function_expansion(n, eparams):
    b = ell.ThetaBases(n, eparams)
    x, z = 0.17 + 0.03j, 0.29 - 0.02j
    lhs = ell.generating_function(n, z, x, eparams)
    rhs = sum(b.phi(n + 2 - j, x) * b.psi(j, z) for j in range(1, n + 2))
    assert abs(lhs - rhs) < 1e-10 * abs(lhs)


@pytest.mark.parametrize("n", [1, 2])
def test_sklyanin_relations(n, eparams):
    rep = ell.sklyanin_generators(ell.g_n(n, eparams), n, eparams)
    assert rep.residual < 1e-10
    assert all(len(m.entries) == n + 1 for m in rep.matrices)
    for r1, r2 in ell.sklyanin_residuals(rep, eparams).values():
        assert r1 < 1e-8 and r2 < 1e-8


def test_sklyanin_generic_spin_leaves_space(eparams):
    rep = ell.sklyanin_generators(0.3 + 0.2j, 1, eparams)
    assert rep.residual > 1e-6


def test_structure_constants(eparams):
    (J1, J2, J3), Jab = ell.structure_constants(eparams)
    assert abs(Jab[(1, 2)] - (J2 - J1) / J3) < 1e-14
    assert abs(Jab[(1, 2)] + Jab[(2, 1)]) < 1e-14


def test_shift_op_composition(eparams):
    A = ell.intertwiner_A(3, 0.0, eparams)
    B = ell.intertwiner_A(3, eparams.eta, eparams)
    f = lambda w: np.cos(w) + 0.5 * w
    direct = B.apply(lambda w: A.apply(f, w), Z)
    assert np.abs(B.compose(A).apply(f, Z) - direct).max() < 1e-12 * np.abs(direct).max()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_intertwiner_chains_agree(n, eparams):
    b3 = ell.build_intertwiner(n, eparams, 3).beta(Z)
    b4 = ell.build_intertwiner(n, eparams, 4).beta(Z)
    assert np.abs(b3 - b4).max() < 1e-9 * np.abs(b3).max()
    sym = ell.build_intertwiner(n, eparams, 3).shift_op()
    for l in range(n + 1):
        assert np.abs(sym.coefficient(n - 2 * l, Z) - b3[l]).max() < 1e-9 * np.abs(b3).max()


@pytest.mark.parametrize("n", [1, 2])
def test_beta_closed_forms(n, eparams):
    b = ell.build_intertwiner(n, eparams).beta(Z)
    D = ell.reference_D(n, Z, eparams)
    assert np.abs(b - D).max() < 1e-9 * np.abs(D).max()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_V_parity(n, eparams):
    V = ell.build_V(n, U, eparams)
    assert np.abs(V(-Z) - V(Z)[:, :, ::-1]).max() < 1e-10 * np.abs(V(Z)).max()


@pytest.mark.parametrize("n", [1, 2])
def test_V_closed_forms(n, eparams):
    V = ell.build_V(n, ell.reference_V_argument(n, U, eparams), eparams)(Z)
    for s, z in enumerate(Z):
        want = ell.reference_V_normalization(n) @ ell.reference_V(n, U, z, eparams)
        assert np.abs(V[s] - want).max() < 1e-9 * np.abs(want).max()


@pytest.mark.parametrize("n", [1, 2])
def test_V_collocation_matches_expansion(n, eparams):
    V = ell.build_V(n, U, eparams)(Z)
    for s, z in enumerate(Z):
        assert np.abs(V[s] - ell.v_expanded(n, U, z, eparams)).max() < 1e-10 * np.abs(V[s]).max()


@pytest.mark.parametrize("n", [1, 2])
def test_factorized_matches_oracle(n, eparams):
    pair = ell.EllipticSpinPair(n, g=0.3 + 0.2j)
    A = ell.build_R_elliptic_factorized(pair, U, eparams).apply(phi_test, Z)
    B = ell.build_R_elliptic_oracle(pair, U, eparams).apply(phi_test, Z)
    rep = equal_up_to_scalar(B.reshape(1, -1), A.reshape(1, -1), 1e-8)
    assert rep.passed, rep.relative


def test_oracle_reflection_form(eparams):
    pair = ell.EllipticSpinPair(2, g=0.3 + 0.2j)
    a = ell.build_R_elliptic_oracle(pair, U, eparams).apply(phi_test, Z)
    b = ell.build_R_elliptic_oracle(pair, U, eparams, reflected=True).apply(phi_test, Z)
    assert np.abs(a - b).max() < 1e-9 * np.abs(a).max()


def test_zero_function_maps_to_zero(eparams):
    pair = ell.EllipticSpinPair(1, g=0.3 + 0.2j)
    zero = lambda w: np.zeros_like(np.asarray(w, dtype=complex))
    assert np.abs(ell.build_R_elliptic_factorized(pair, U, eparams).apply(zero, Z)).max() == 0


@pytest.mark.parametrize("n,n2", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_restriction_membership(n, n2, eparams):
    op, res = ell.restrict_second_elliptic(n, n2, U, eparams)
    assert op.shape == ((n + 1) * (n2 + 1),) * 2
    assert res < 1e-8


def test_restriction_needs_quantized_spin(eparams):
    def wrong_spin(pair, u, params):
        return ell.build_R_elliptic_factorized(ell.EllipticSpinPair(pair.n, g=0.3 + 0.2j), u, params)

    with pytest.raises(InvarianceViolation):
        ell.restrict_second_elliptic(1, 1, U, eparams, builder=wrong_spin)


@pytest.mark.parametrize("spins", [(1, 1, 1), (1, 1, 2)])
def test_ybe(spins, eparams):
    n, m, k = spins
    u, v = 0.23 + 0.05j, 0.11 - 0.03j
    ops = [ell.restrict_second_elliptic(a, b, w, eparams)[0] for a, b, w in ((n, m, u - v), (n, k, u), (m, k, v))]
    rep = ybe_residual(*ops, (n + 1, m + 1, k + 1), tol=1e-7)
    assert rep.passed, rep.relative
