import numpy as np
import pytest

from smbmm import (
    FieldMatrix,
    PrimeField,
    desired_positions,
    ep_encode_A,
    ep_encode_B,
    partition,
    product_coefficients,
)
from smbmm.blocks import product_block_index
from smbmm.errors import ShapeError


def _scalars(f, values):
    return FieldMatrix(f, [[v % f.modulus for v in row] for row in values])


def test_encode_A_trivial():
    f = PrimeField(7)
    M = f.rand_matrix(2, 3, np.random.default_rng(0))
    assert ep_encode_A(partition(M, 1, 1), 5) == M


def test_encode_A_column_split():
    f = PrimeField(7)
    grid = partition(_scalars(f, [[2, 3]]), 1, 2)
    # exponents 0 and 1: A1 + x A2
    assert ep_encode_A(grid, 3).item() == (2 + 3 * 3) % 7


def test_encode_A_full_grid_gf7():
    # m = 2, p = 2 at x = 3: weights 1, 3, 2, 6 on blocks (1,1), (1,2), (2,1), (2,2)
    f = PrimeField(7)
    grid = partition(_scalars(f, [[1, 0], [0, 0]]), 2, 2)
    vals = {}
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        g = partition(_scalars(f, [[1 if (r + 1, c + 1) == (i, j) else 0 for c in range(2)]
                                   for r in range(2)]), 2, 2)
        vals[(i, j)] = ep_encode_A(g, 3).item()
    assert vals == {(1, 1): 1, (1, 2): 3, (2, 1): 2, (2, 2): 6}


def test_encode_B_column_split_gf7():
    # p = 2, m = 1, n = 2 at x = 3: weights 3, 1, 6, 2 on blocks (1,1), (2,1), (1,2), (2,2)
    f = PrimeField(7)
    vals = {}
    for (i, j) in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        g = partition(_scalars(f, [[1 if (r + 1, c + 1) == (i, j) else 0 for c in range(2)]
                                   for r in range(2)]), 2, 2)
        vals[(i, j)] = ep_encode_B(g, 3, 1).item()
    assert vals == {(1, 1): 3, (2, 1): 1, (1, 2): 6, (2, 2): 2}


def test_product_coefficients_inner_split():
    # p = 2, m = n = 1: coefficients [A1 B2, A1 B1 + A2 B2, A2 B1]
    f = PrimeField(13)
    rng = np.random.default_rng(1)
    A = f.rand_matrix(2, 4, rng)
    B = f.rand_matrix(4, 2, rng)
    ga = partition(A, 1, 2)
    gb = partition(B, 2, 1)
    coeffs = product_coefficients(ga, gb)
    assert len(coeffs) == 3
    assert coeffs[0] == ga.block(1, 1) @ gb.block(2, 1)
    assert coeffs[1] == ga.block(1, 1) @ gb.block(1, 1) + ga.block(1, 2) @ gb.block(2, 1)
    assert coeffs[2] == ga.block(1, 2) @ gb.block(1, 1)


def test_product_coefficients_trivial():
    f = PrimeField(13)
    rng = np.random.default_rng(2)
    A = f.rand_matrix(2, 2, rng)
    B = f.rand_matrix(2, 2, rng)
    coeffs = product_coefficients(partition(A, 1, 1), partition(B, 1, 1))
    assert len(coeffs) == 1
    assert coeffs[0] == A @ B


def test_product_coefficients_inner_mismatch():
    f = PrimeField(13)
    ga = partition(FieldMatrix.zeros(f, 2, 2), 1, 2)
    gb = partition(FieldMatrix.zeros(f, 3, 3), 3, 1)
    with pytest.raises(ShapeError):
        product_coefficients(ga, gb)


def test_coefficients_evaluate_to_share_product():
    # sum_i C_i x^i must equal encode_A(x) @ encode_B(x) at every x
    f = PrimeField(97)
    rng = np.random.default_rng(3)
    A = f.rand_matrix(4, 4, rng)
    B = f.rand_matrix(4, 4, rng)
    ga = partition(A, 2, 2)
    gb = partition(B, 2, 2)
    coeffs = product_coefficients(ga, gb)
    assert len(coeffs) == 2 * 2 * 2 + 2 - 1
    for x in range(1, 20):
        want = ep_encode_A(ga, x) @ ep_encode_B(gb, x, 2)
        acc = FieldMatrix.zeros(f, 2, 2)
        for i, C in enumerate(coeffs):
            acc = acc + f.pow(x, i) * C
        assert acc == want


def test_desired_positions_carry_product_blocks():
    f = PrimeField(65537)
    rng = np.random.default_rng(4)
    for (p, m, n) in [(1, 1, 1), (2, 1, 1), (1, 2, 2), (2, 2, 1), (2, 2, 2), (3, 2, 2)]:
        A = f.rand_matrix(m * 2, p * 3, rng)
        B = f.rand_matrix(p * 3, n * 2, rng)
        ga = partition(A, m, p)
        gb = partition(B, p, n)
        coeffs = product_coefficients(ga, gb)
        prod_grid = partition(A @ B, m, n)
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                pos = product_block_index(i, j, p, m, n)
                assert coeffs[pos - 1] == prod_grid.block(i, j)
        assert len(desired_positions(p, m, n)) == m * n
