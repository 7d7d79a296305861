"""Polynomial encoding of partitioned matrix pairs.

The left factor, cut m x p, is encoded with exponents p'-1 + p(m'-1); the
right factor, cut p x n, with exponents p-p'' + pm(n''-1).  The coefficient
of the product at position p + p(m'-1) + pm(n''-1) is then exactly block
(m', n'') of the true product, with every other position carrying cross
terms the decoder treats as interference.
"""

from .blocks import product_block_index
from .errors import ShapeError
from .field import FieldMatrix


def exponent_a(p, m_idx, p_idx):
    return (p_idx - 1) + p * (m_idx - 1)


def exponent_b(p, m, p_idx, n_idx):
    return (p - p_idx) + p * m * (n_idx - 1)


def ep_encode_A(grid, x):
    """Evaluate the left-factor encoding of an m x p grid at x."""
    field = grid.blocks[0][0].field
    p = grid.grid_cols
    bh, bw = grid.block_shape
    acc = FieldMatrix.zeros(field, bh, bw)
    for m_idx in range(1, grid.grid_rows + 1):
        for p_idx in range(1, p + 1):
            w = field.pow(x, exponent_a(p, m_idx, p_idx))
            acc = acc + w * grid.block(m_idx, p_idx)
    return acc


def ep_encode_B(grid, x, m):
    """Evaluate the right-factor encoding of a p x n grid at x.

    The left grid's row count m fixes the exponent spacing, so it must be
    passed alongside.
    """
    field = grid.blocks[0][0].field
    p = grid.grid_rows
    bh, bw = grid.block_shape
    acc = FieldMatrix.zeros(field, bh, bw)
    for p_idx in range(1, p + 1):
        for n_idx in range(1, grid.grid_cols + 1):
            w = field.pow(x, exponent_b(p, m, p_idx, n_idx))
            acc = acc + w * grid.block(p_idx, n_idx)
    return acc


def product_coefficients(grid_a, grid_b):
    """All pmn + p - 1 coefficients of the encoded product, by direct convolution.

    Index i of the returned list is the coefficient of x**i (position i+1).
    """
    m, p = grid_a.grid_rows, grid_a.grid_cols
    pb, n = grid_b.grid_rows, grid_b.grid_cols
    if pb != p:
        raise ShapeError(f"inner grid mismatch: {p} columns vs {pb} rows")
    field = grid_a.blocks[0][0].field
    bh = grid_a.block_shape[0]
    bw = grid_b.block_shape[1]
    count = p * m * n + p - 1
    coeffs = [FieldMatrix.zeros(field, bh, bw) for _ in range(count)]
    for m_idx in range(1, m + 1):
        for pa in range(1, p + 1):
            for pbk in range(1, p + 1):
                for n_idx in range(1, n + 1):
                    e = exponent_a(p, m_idx, pa) + exponent_b(p, m, pbk, n_idx)
                    coeffs[e] = coeffs[e] + grid_a.block(m_idx, pa) @ grid_b.block(pbk, n_idx)
    return coeffs


def desired_coefficient(coeffs, m_idx, n_idx, p, m, n):
    """The product block (m_idx, n_idx) out of a coefficient list."""
    return coeffs[product_block_index(m_idx, n_idx, p, m, n) - 1]
