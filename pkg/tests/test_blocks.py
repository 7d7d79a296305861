import numpy as np
import pytest

from smbmm import (
    FieldMatrix,
    PrimeField,
    concat,
    desired_positions,
    partition,
    product_block_index,
    reassemble,
)
from smbmm.errors import IncompleteError, PartitionError


def test_partition_row_of_columns():
    f = PrimeField(7)
    M = FieldMatrix(f, [[1, 2], [3, 4]])
    grid = partition(M, 1, 2)
    assert grid.block_shape == (2, 1)
    assert grid.block(1, 1) == FieldMatrix(f, [[1], [3]])
    assert grid.block(1, 2) == FieldMatrix(f, [[2], [4]])


def test_partition_trivial():
    f = PrimeField(7)
    M = FieldMatrix(f, [[1, 2], [3, 4]])
    assert partition(M, 1, 1).block(1, 1) == M


def test_partition_concat_round_trip():
    f = PrimeField(7)
    M = f.rand_matrix(4, 6, np.random.default_rng(0))
    assert concat(partition(M, 2, 3)) == M


def test_partition_not_divisible():
    f = PrimeField(7)
    with pytest.raises(PartitionError):
        partition(FieldMatrix.zeros(f, 4, 6), 3, 2)


def test_block_index_out_of_range():
    f = PrimeField(7)
    grid = partition(FieldMatrix.zeros(f, 4, 4), 2, 2)
    with pytest.raises(IndexError):
        grid.block(3, 1)
    with pytest.raises(IndexError):
        grid.block(0, 1)


def test_product_block_index_examples():
    assert product_block_index(1, 1, 2, 1, 1) == 2
    assert product_block_index(1, 1, 1, 1, 1) == 1
    assert desired_positions(2, 2, 2) == (2, 4, 6, 8)


def test_product_block_index_range_checks():
    with pytest.raises(IndexError):
        product_block_index(3, 1, 2, 2, 2)
    with pytest.raises(IndexError):
        product_block_index(1, 0, 2, 2, 2)


def test_product_block_index_injective():
    for p in (1, 2, 3):
        for m in (1, 2, 3):
            for n in (1, 2, 3):
                seen = desired_positions(p, m, n)
                assert len(set(seen)) == m * n
                assert all(1 <= pos <= p * m * n + p - 1 for pos in seen)


def test_reassemble_matches_partition():
    f = PrimeField(11)
    M = f.rand_matrix(4, 6, np.random.default_rng(1))
    grid = partition(M, 2, 3)
    by_pos = {(i, j): grid.block(i, j) for i in (1, 2) for j in (1, 2, 3)}
    assert reassemble(by_pos, 2, 3) == M


def test_reassemble_missing_block():
    f = PrimeField(11)
    with pytest.raises(IncompleteError):
        reassemble({(1, 1): FieldMatrix.zeros(f, 1, 1)}, 1, 2)


def test_blockwise_product_reassembles():
    # multiplying block rows by block columns and pasting equals the full product
    f = PrimeField(65537)
    rng = np.random.default_rng(2)
    A = f.rand_matrix(4, 6, rng)
    B = f.rand_matrix(6, 4, rng)
    ga = partition(A, 2, 3)
    gb = partition(B, 3, 2)
    by_pos = {}
    for i in (1, 2):
        for j in (1, 2):
            acc = FieldMatrix.zeros(f, 2, 2)
            for k in (1, 2, 3):
                acc = acc + ga.block(i, k) @ gb.block(k, j)
            by_pos[(i, j)] = acc
    assert reassemble(by_pos, 2, 2) == A @ B
