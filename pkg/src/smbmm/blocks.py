"""Block partitioning of matrices and indexing of product blocks."""

from dataclasses import dataclass

import numpy as np

from .errors import IncompleteError, PartitionError
from .field import FieldMatrix


@dataclass(frozen=True)
class BlockGrid:
    """A matrix cut into an even grid of equally sized blocks."""

    grid_rows: int
    grid_cols: int
    blocks: tuple  # tuple of row-tuples of FieldMatrix

    def block(self, i, j):
        """Block (i, j), 1-indexed."""
        if not (1 <= i <= self.grid_rows and 1 <= j <= self.grid_cols):
            raise IndexError(f"block ({i}, {j}) outside {self.grid_rows}x{self.grid_cols} grid")
        return self.blocks[i - 1][j - 1]

    @property
    def block_shape(self):
        return self.blocks[0][0].shape


def partition(M, grid_rows, grid_cols):
    """Cut M into grid_rows x grid_cols equal blocks."""
    if grid_rows < 1 or grid_cols < 1:
        raise PartitionError(f"grid must be positive, got {grid_rows}x{grid_cols}")
    if M.rows % grid_rows or M.cols % grid_cols:
        raise PartitionError(
            f"cannot cut a {M.rows}x{M.cols} matrix into a {grid_rows}x{grid_cols} grid"
        )
    bh = M.rows // grid_rows
    bw = M.cols // grid_cols
    rows = []
    for i in range(grid_rows):
        row = []
        for j in range(grid_cols):
            sub = M.data[i * bh : (i + 1) * bh, j * bw : (j + 1) * bw]
            row.append(FieldMatrix(M.field, sub.copy(), _reduced=True))
        rows.append(tuple(row))
    return BlockGrid(grid_rows, grid_cols, tuple(rows))


def concat(grid):
    """Inverse of partition: paste the grid back into one matrix."""
    field = grid.blocks[0][0].field
    data = np.block([[b.data for b in row] for row in grid.blocks])
    return FieldMatrix(field, data, _reduced=True)


def product_block_index(m_idx, n_idx, p, m, n):
    """1-indexed coefficient position carrying product block (m_idx, n_idx).

    The product of the two encodings has pmn + p - 1 coefficients; block
    (m', n'') of the true product sits at position p + p(m'-1) + pm(n''-1).
    """
    if not 1 <= m_idx <= m:
        raise IndexError(f"row block index {m_idx} outside [1, {m}]")
    if not 1 <= n_idx <= n:
        raise IndexError(f"column block index {n_idx} outside [1, {n}]")
    return p + p * (m_idx - 1) + p * m * (n_idx - 1)


def desired_positions(p, m, n):
    """Sorted positions of all mn product blocks among the coefficients."""
    return tuple(
        sorted(
            product_block_index(i, j, p, m, n)
            for i in range(1, m + 1)
            for j in range(1, n + 1)
        )
    )


def reassemble(blocks_by_pos, grid_rows, grid_cols):
    """Assemble a matrix from blocks keyed by 1-indexed (row, col) pairs."""
    rows = []
    for i in range(1, grid_rows + 1):
        row = []
        for j in range(1, grid_cols + 1):
            if (i, j) not in blocks_by_pos:
                raise IncompleteError(f"missing block ({i}, {j})")
            row.append(blocks_by_pos[(i, j)])
        rows.append(tuple(row))
    return concat(BlockGrid(grid_rows, grid_cols, tuple(rows)))
