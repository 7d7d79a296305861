"""Prime-field scalars and dense matrices.

Scalars are plain ints in [0, q); matrices are numpy int64 arrays reduced
mod q.  The modulus is capped below 2**31 so the product of two residues
always fits in an int64; longer accumulations are reduced in chunks.
"""

import hashlib
from contextlib import contextmanager

import numpy as np

from .errors import DivisionByZero, ShapeError

_MAX_MODULUS = 1 << 31

# Stack of counters filled in by tally_ops().  Counting is best-effort
# instrumentation for reports, not part of any correctness contract.
_tally_stack = []


@contextmanager
def tally_ops():
    """Collect {add, mul, inv} field-operation counts for the enclosed block."""
    counts = {"add": 0, "mul": 0, "inv": 0}
    _tally_stack.append(counts)
    try:
        yield counts
    finally:
        _tally_stack.pop()


def _count(kind, n):
    for frame in _tally_stack:
        frame[kind] += n


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def stream_rng(seed, name):
    """Deterministic generator for the named randomness stream.

    Streams with different names are independent; the same (seed, name)
    pair always yields the same draws.
    """
    tag = int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "little")
    return np.random.default_rng([int(seed) % (1 << 63), tag])


class PrimeField:
    """Arithmetic mod a prime q."""

    __slots__ = ("modulus",)

    def __init__(self, modulus):
        if not isinstance(modulus, int) or not (2 <= modulus < _MAX_MODULUS):
            raise ValueError(f"modulus must be an int in [2, 2**31), got {modulus!r}")
        if not _is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        self.modulus = modulus

    def add(self, a, b):
        _count("add", 1)
        return (a + b) % self.modulus

    def sub(self, a, b):
        _count("add", 1)
        return (a - b) % self.modulus

    def mul(self, a, b):
        _count("mul", 1)
        return (a * b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def inv(self, a):
        a %= self.modulus
        if a == 0:
            raise DivisionByZero(f"0 has no inverse mod {self.modulus}")
        _count("inv", 1)
        return pow(a, self.modulus - 2, self.modulus)

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.modulus)
        _count("mul", max(e.bit_length() - 1, 0) + bin(e).count("1"))
        return pow(a % self.modulus, e, self.modulus)

    def rand(self, rng):
        return int(rng.integers(0, self.modulus))

    def rand_matrix(self, rows, cols, rng):
        data = rng.integers(0, self.modulus, size=(rows, cols), dtype=np.int64)
        return FieldMatrix(self, data, _reduced=True)

    # Chunk length for which a partial inner product cannot overflow int64.
    def _matmul_chunk(self):
        return max(1, (1 << 62) // max((self.modulus - 1) ** 2, 1))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(("PrimeField", self.modulus))

    def __repr__(self):
        return f"PrimeField({self.modulus})"


class FieldMatrix:
    """Dense matrix over a PrimeField."""

    __slots__ = ("field", "data")

    def __init__(self, field, data, *, _reduced=False):
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got ndim={arr.ndim}")
        self.field = field
        self.data = arr if _reduced else arr % field.modulus

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols), dtype=np.int64), _reduced=True)

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64), _reduced=True)

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def _compat(self, other):
        if not isinstance(other, FieldMatrix):
            raise ShapeError(f"expected FieldMatrix, got {type(other).__name__}")
        if other.field.modulus != self.field.modulus:
            raise ShapeError(
                f"field mismatch: mod {self.field.modulus} vs {other.field.modulus}"
            )

    def __add__(self, other):
        self._compat(other)
        if other.shape != self.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        _count("add", self.data.size)
        return FieldMatrix(
            self.field, (self.data + other.data) % self.field.modulus, _reduced=True
        )

    def __sub__(self, other):
        self._compat(other)
        if other.shape != self.shape:
            raise ShapeError(f"cannot subtract {other.shape} from {self.shape}")
        _count("add", self.data.size)
        return FieldMatrix(
            self.field, (self.data - other.data) % self.field.modulus, _reduced=True
        )

    def __neg__(self):
        return FieldMatrix(self.field, -self.data, _reduced=False)

    def __mul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        _count("mul", self.data.size)
        return FieldMatrix(
            self.field,
            (scalar % self.field.modulus) * self.data % self.field.modulus,
            _reduced=True,
        )

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._compat(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        q = self.field.modulus
        inner = self.cols
        step = self.field._matmul_chunk()
        if inner <= step:
            out = (self.data @ other.data) % q
        else:
            out = np.zeros((self.rows, other.cols), dtype=np.int64)
            for lo in range(0, inner, step):
                out = (out + self.data[:, lo : lo + step] @ other.data[lo : lo + step]) % q
        _count("mul", self.rows * inner * other.cols)
        _count("add", self.rows * max(inner - 1, 0) * other.cols)
        return FieldMatrix(self.field, out, _reduced=True)

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and other.field.modulus == self.field.modulus
            and np.array_equal(other.data, self.data)
        )

    __hash__ = None

    def item(self):
        """The single entry of a 1x1 matrix, as an int."""
        if self.shape != (1, 1):
            raise ShapeError(f"item() needs a 1x1 matrix, got {self.shape}")
        return int(self.data[0, 0])

    def tobytes(self):
        """Canonical byte serialization (shape header plus little-endian entries)."""
        head = np.array(self.shape, dtype="<i8").tobytes()
        return head + self.data.astype("<i8").tobytes()

    def __repr__(self):
        return f"FieldMatrix(mod {self.field.modulus}, {self.data.tolist()})"


def digest(payload):
    """Short hex digest of one FieldMatrix or a sequence of them."""
    h = hashlib.sha256()
    if isinstance(payload, FieldMatrix):
        payload = [payload]
    for mat in payload:
        h.update(mat.tobytes())
    return h.hexdigest()[:16]
