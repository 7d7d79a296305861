"""Square-system solving and the structured matrices the decoders are built from."""

import numpy as np

from .errors import DegeneratePoints, ShapeError, SingularMatrix
from .field import FieldMatrix, _count


def _eliminate(field, a, y):
    """Forward elimination with first-nonzero pivoting; mutates a and y in place.

    Returns the pivot column of every row, or raises SingularMatrix.
    """
    q = field.modulus
    n = a.shape[0]
    for col in range(n):
        hits = np.nonzero(a[col:, col])[0]
        if hits.size == 0:
            raise SingularMatrix(f"no pivot in column {col}")
        piv = col + int(hits[0])
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            y[[col, piv]] = y[[piv, col]]
        lead = int(a[col, col])
        if lead != 1:
            inv = field.inv(lead)
            a[col] = a[col] * inv % q
            y[col] = y[col] * inv % q
            _count("mul", a.shape[1] + y.shape[1])
        below = np.nonzero(a[col + 1 :, col])[0]
        if below.size:
            rows = col + 1 + below
            f = a[rows, col][:, None]
            a[rows] = (a[rows] - f * a[col]) % q
            y[rows] = (y[rows] - f * y[col]) % q
            _count("mul", below.size * (a.shape[1] + y.shape[1]))
            _count("add", below.size * (a.shape[1] + y.shape[1]))


def solve_square(M, Y):
    """Solve M X = Y over M's field by Gaussian elimination.

    M must be square and nonsingular; pivoting picks the first nonzero
    entry in each column, so the run is deterministic.
    """
    if not isinstance(M, FieldMatrix) or not isinstance(Y, FieldMatrix):
        raise ShapeError("solve_square expects FieldMatrix operands")
    if M.rows != M.cols:
        raise ShapeError(f"coefficient matrix must be square, got {M.rows}x{M.cols}")
    M._compat(Y)
    if Y.rows != M.rows:
        raise ShapeError(f"right-hand side has {Y.rows} rows, expected {M.rows}")
    field = M.field
    q = field.modulus
    a = M.data.copy()
    y = Y.data.copy()
    _eliminate(field, a, y)
    for col in range(M.rows - 1, 0, -1):
        above = np.nonzero(a[:col, col])[0]
        if above.size:
            f = a[above, col][:, None]
            y[above] = (y[above] - f * y[col]) % q
            a[above, col] = 0
            _count("mul", above.size * y.shape[1])
            _count("add", above.size * y.shape[1])
    return FieldMatrix(field, y, _reduced=True)


def invert(M):
    return solve_square(M, FieldMatrix.identity(M.field, M.rows))


def is_invertible(M):
    if M.rows != M.cols:
        return False
    try:
        solve_square(M, FieldMatrix.identity(M.field, M.rows))
    except SingularMatrix:
        return False
    return True


def rref(M):
    """Reduced row echelon form; returns (matrix, pivot column tuple)."""
    field = M.field
    q = field.modulus
    a = M.data.copy()
    rows, cols = a.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, col])[0]
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, col])
        if lead != 1:
            a[r] = a[r] * field.inv(lead) % q
        others = np.nonzero(a[:, col])[0]
        others = others[others != r]
        if others.size:
            f = a[others, col][:, None]
            a[others] = (a[others] - f * a[r]) % q
        pivots.append(col)
        r += 1
    return FieldMatrix(field, a, _reduced=True), tuple(pivots)


def matrix_rank(M):
    return len(rref(M)[1])


def nullspace(M):
    """Basis of the right null space, one column per free variable."""
    field = M.field
    reduced, pivots = rref(M)
    cols = M.cols
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for r, pc in enumerate(pivots):
            basis[pc, j] = (-int(reduced.data[r, fc])) % field.modulus
    return FieldMatrix(field, basis, _reduced=True)


def _check_distinct(label, values):
    if len(set(values)) != len(values):
        raise DegeneratePoints(f"{label} must be pairwise distinct, got {list(values)}")


def vandermonde(field, points, width):
    """Rows [1, x, ..., x**(width-1)] for each point x."""
    pts = [p % field.modulus for p in points]
    _check_distinct("points", pts)
    if width < 1:
        raise ShapeError("width must be at least 1")
    out = np.empty((len(pts), width), dtype=np.int64)
    col = np.ones(len(pts), dtype=np.int64)
    base = np.asarray(pts, dtype=np.int64)
    for j in range(width):
        out[:, j] = col
        col = col * base % field.modulus
    _count("mul", len(pts) * max(width - 1, 0))
    return FieldMatrix(field, out, _reduced=True)


def lower_toeplitz(field, first_column):
    """Lower-triangular Toeplitz matrix with the given first column."""
    c = np.asarray([v % field.modulus for v in first_column], dtype=np.int64)
    n = c.size
    out = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        out[j:, j] = c[: n - j]
    return FieldMatrix(field, out, _reduced=True)


def cauchy_power(field, points, poles, max_power):
    """Inverse-power block rows of the decoder matrix.

    Row i holds, for each pole f in order, the run
    [(f-x_i)^-max_power, ..., (f-x_i)^-1].
    """
    q = field.modulus
    pts = [p % q for p in points]
    pls = [p % q for p in poles]
    _check_distinct("points", pts)
    if max_power < 1:
        raise ShapeError("max_power must be at least 1")
    out = np.empty((len(pts), len(pls) * max_power), dtype=np.int64)
    for i, x in enumerate(pts):
        for j, f in enumerate(pls):
            d = (f - x) % q
            if d == 0:
                raise DegeneratePoints(f"pole {f} coincides with point {x}")
            dinv = field.inv(d)
            acc = 1
            for t in range(max_power):
                acc = acc * dinv % q
                out[i, (j + 1) * max_power - 1 - t] = acc
    _count("mul", len(pts) * len(pls) * max_power)
    return FieldMatrix(field, out, _reduced=True)


def block_diag(field, blocks):
    """Block-diagonal matrix from square FieldMatrix blocks."""
    n = sum(b.rows for b in blocks)
    out = np.zeros((n, n), dtype=np.int64)
    at = 0
    for b in blocks:
        if b.rows != b.cols:
            raise ShapeError("block_diag expects square blocks")
        out[at : at + b.rows, at : at + b.cols] = b.data
        at += b.rows
    return FieldMatrix(field, out, _reduced=True)


def hstack(blocks):
    """Concatenate FieldMatrix blocks left to right."""
    field = blocks[0].field
    for b in blocks[1:]:
        blocks[0]._compat(b)
    return FieldMatrix(field, np.hstack([b.data for b in blocks]), _reduced=True)
