from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ybx.errors import DimensionMismatch, IllConditioned
from ybx.operators import (
    BasisDescriptor,
    BlockOp,
    CollocationGrid,
    LinOp,
    collocation_fit,
    compose,
    default_grid,
    derivative,
    embed_pair,
    laurent_mult,
    mult_by_coordinate,
    permutation,
    tensor,
)

ints = st.integers(-5, 5)


def _exact(rows):
    b = BasisDescriptor.spin(len(rows))
    return LinOp(b, b, np.array([[Fraction(x) for x in r] for r in rows], dtype=object))


@settings(max_examples=30)
@given(st.lists(st.lists(ints, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.lists(ints, min_size=3, max_size=3), min_size=3, max_size=3))
def test_exact_matmul_matches_integer_product(a, b):
    A, B = _exact(a), _exact(b)
    got = (A @ B).entries.astype(float)
    assert (got == np.array(a) @ np.array(b)).all()


def test_linop_shape_check_and_algebra():
    b2, b3 = BasisDescriptor.spin(2), BasisDescriptor.spin(3)
    with pytest.raises(DimensionMismatch):
        LinOp(b2, b2, np.zeros((3, 2)))
    A = LinOp.identity(b3)
    assert (A + A).entries[0, 0] == 2 and (A + A).entries[0, 1] == 0
    assert (A - A).is_zero()
    assert (A * 3).entries[1, 1] == 3
    with pytest.raises(DimensionMismatch):
        compose(LinOp.identity(b2), LinOp.identity(b3))


def test_truncation_flags_propagate():
    basis = BasisDescriptor.monomial(3)
    z = mult_by_coordinate(basis)
    assert list(z.tainted) == [False, False, False, True]
    zz = compose(z, z)
    # z^2 reaches the top degree from z^2 and z^3
    assert list(zz.tainted) == [False, False, True, True]
    d = derivative(basis)
    assert not d.tainted.any()
    # d z maps z^2 -> 3 z^2 but z^3 was truncated first
    assert list(compose(d, z).tainted) == [False, False, False, True]


def test_derivative_and_multiplication():
    basis = BasisDescriptor.monomial(4)
    d2 = derivative(basis, 2)
    assert d2.entries[1, 3] == 6
    z2 = mult_by_coordinate(basis, 2)
    assert z2.entries[3, 1] == 1


def test_tensor_and_embedding():
    a = _exact([[1, 2], [3, 4]])
    b = _exact([[0, 1], [1, 0]])
    k = tensor(a, b).entries.astype(float)
    assert (k == np.kron([[1, 2], [3, 4]], [[0, 1], [1, 0]])).all()
    P = permutation(2)
    big = embed_pair(P, (2, 2, 2), "13").entries.astype(float)
    # swapping spaces 1 and 3 maps e_0 (x) e_0 (x) e_1 to e_1 (x) e_0 (x) e_0
    v = np.zeros(8)
    v[1] = 1
    assert (big @ v)[4] == 1
    with pytest.raises(DimensionMismatch):
        embed_pair(P, (3, 2, 2), "12")


@given(st.sampled_from(["12", "13", "23"]))
def test_embedding_of_identity(which):
    I = LinOp.identity(BasisDescriptor.spin(6))
    dims = {"12": (2, 3, 2), "13": (2, 2, 3), "23": (2, 2, 3)}[which]
    big = embed_pair(I, dims, which)
    assert (big.entries.astype(float) == np.eye(12)).all()


def test_laurent_mult_allows_odd_shifts():
    basis = BasisDescriptor.laurent(3)
    op = laurent_mult(1, basis)
    assert op.entries[basis.index_of(2), basis.index_of(1)] == 1
    assert op.tainted[basis.index_of(3)]


def test_blockop_flatten_round_trip():
    outer = BasisDescriptor.spin(2)
    inner = BasisDescriptor.spin(3)
    rng = np.random.default_rng(0)
    blocks = [[LinOp(inner, inner, rng.normal(size=(3, 3))) for _ in range(2)] for _ in range(2)]
    B = BlockOp(outer, blocks)
    flat = B.flatten()
    again = BlockOp.from_flat(flat, outer, inner, inner)
    for i in range(2):
        for j in range(2):
            assert np.allclose(again[i, j].entries, B[i, j].entries)
    prod = (B @ B).flatten().entries
    assert np.allclose(prod, flat.entries @ flat.entries)


def test_collocation_recovers_coefficients():
    grid = default_grid(3)
    pts = grid.all_points
    design = np.stack([pts**k for k in range(4)], axis=-1)
    coeffs = np.array([1.0, -2.0, 0.5j, 3.0])
    c, res = collocation_fit(design @ coeffs, design, grid)
    assert np.allclose(c, coeffs) and res < 1e-12
    # a function outside the span shows up in the validation residual
    _, res = collocation_fit(pts**5, design, grid)
    assert res > 1e-6


def test_collocation_condition_guard():
    grid = CollocationGrid((0.1, 0.1 + 1e-12, 0.3), 2)
    design = np.stack([grid.all_points**k for k in range(2)], axis=-1)
    with pytest.raises(IllConditioned):
        collocation_fit(np.ones(3), design, grid)
