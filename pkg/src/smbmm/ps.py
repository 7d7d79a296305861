"""Polynomial-sharing baseline for a single matrix pair.

Only the inner dimension is partitioned.  After the sharing phase every
server re-shares its extraction-weighted share product to every other
server under fresh polynomial masks, so each server ends up holding the
product plus noise and the master decodes from any X+1 answers.  The
price is S(S-1) inter-server messages and no straggler tolerance; the
messages themselves also determine the product, which is the point of
comparison for the aligned scheme.
"""

from dataclasses import dataclass

import numpy as np

from . import blocks as blk
from .errors import (
    FieldTooSmall,
    InsufficientServers,
    MissingServer,
    NotEnoughAnswers,
    ShapeError,
    UnsupportedPartition,
)
from .field import FieldMatrix, PrimeField, stream_rng
from .linalg import solve_square, vandermonde


@dataclass(frozen=True)
class PsInstance:
    """Fixed data of one baseline run: partitioning, points, extraction weights."""

    p: int
    X: int
    S: int
    modulus: int
    alphas: tuple
    r: tuple  # weights pulling the product coefficient out of the evaluations

    @property
    def field(self):
        return PrimeField(self.modulus)

    def alpha(self, s):
        return self.alphas[s - 1]


def ps_setup(q, p, X, S=None, alphas=None, m=1, n=1):
    """Build a baseline instance; the compute round needs exactly R = 2p+2X-1 servers."""
    if m != 1 or n != 1:
        raise UnsupportedPartition("baseline only partitions the inner dimension")
    if p < 1 or X < 1:
        raise ValueError(f"p and X must be positive, got p={p}, X={X}")
    field = PrimeField(q)
    R = 2 * p + 2 * X - 1
    if S is None:
        S = R
    if S < R:
        raise InsufficientServers(f"need S={R} servers, got {S}")
    if S > R:
        raise ValueError(f"baseline runs with exactly {R} participants, got S={S}")
    if alphas is None:
        if q < S:
            raise FieldTooSmall(f"need {S} distinct points, field has {q}")
        alphas = tuple((i + 1) % q for i in range(S))
    else:
        alphas = tuple(a % q for a in alphas)
        if len(alphas) != S or len(set(alphas)) != S:
            raise ValueError(f"need {S} distinct evaluation points")
    # Row p of the inverse Vandermonde pulls out the coefficient of t**(p-1).
    V = vandermonde(field, alphas, S)
    e = np.zeros((S, 1), dtype=np.int64)
    e[p - 1, 0] = 1
    Vt = FieldMatrix(field, V.data.T.copy(), _reduced=True)
    r = solve_square(Vt, FieldMatrix(field, e, _reduced=True))
    return PsInstance(p=p, X=X, S=S, modulus=q, alphas=alphas,
                      r=tuple(int(v) for v in r.data[:, 0]))


def ps_share(inst, A, B, seed=0, noise_a=None, noise_b=None):
    """One share pair per server.

    The left factor is cut into p column blocks at exponents p'-1, the right
    into p row blocks at exponents p-p''; noise terms sit at exponents
    p-1+x for x in [X] on both sides.  Returns (shares, noise_a, noise_b)
    where shares[s-1] is server s's pair.
    """
    field = inst.field
    q = inst.modulus
    if A.cols != B.rows:
        raise ShapeError(f"inner dimensions differ: {A.shape} vs {B.shape}")
    grid_a = blk.partition(A, 1, inst.p)
    grid_b = blk.partition(B, inst.p, 1)
    if noise_a is None:
        rng = stream_rng(seed, "source-A")
        noise_a = [field.rand_matrix(*grid_a.block_shape, rng) for _ in range(inst.X)]
    if noise_b is None:
        rng = stream_rng(seed, "source-B")
        noise_b = [field.rand_matrix(*grid_b.block_shape, rng) for _ in range(inst.X)]
    shares = []
    for s in range(1, inst.S + 1):
        alpha = inst.alpha(s)
        sa = FieldMatrix.zeros(field, *grid_a.block_shape)
        sb = FieldMatrix.zeros(field, *grid_b.block_shape)
        for pi in range(1, inst.p + 1):
            sa = sa + field.pow(alpha, pi - 1) * grid_a.block(1, pi)
            sb = sb + field.pow(alpha, inst.p - pi) * grid_b.block(pi, 1)
        for x in range(1, inst.X + 1):
            w = field.pow(alpha, inst.p - 1 + x)
            sa = sa + w * noise_a[x - 1]
            sb = sb + w * noise_b[x - 1]
        shares.append((sa, sb))
    return shares, noise_a, noise_b


def ps_round(inst, shares, seed=0, noise=None):
    """The all-to-all re-sharing round.

    Server s weights its share product by r_s and sends it to every other
    server j masked at exponents alpha_j**x, x in [X]; each server sums what
    it received with its own term.  Returns (answers, transcript): answers
    is a list of (server, matrix) pairs ready for ps_decode, the transcript
    lists (sender, receiver, matrix) for all S(S-1) messages.
    """
    field = inst.field
    if len(shares) != inst.S:
        raise MissingServer(f"round needs all {inst.S} share pairs, got {len(shares)}")
    out_shape = (shares[0][0].rows, shares[0][1].cols)
    if noise is None:
        rng = stream_rng(seed, "server")
        noise = [[field.rand_matrix(*out_shape, rng) for _ in range(inst.X)]
                 for _ in range(inst.S)]
    weighted = [inst.r[s - 1] * (shares[s - 1][0] @ shares[s - 1][1])
                for s in range(1, inst.S + 1)]

    def masked(sender, receiver):
        acc = weighted[sender - 1]
        alpha = inst.alpha(receiver)
        for x in range(1, inst.X + 1):
            acc = acc + field.pow(alpha, x) * noise[sender - 1][x - 1]
        return acc

    transcript = []
    answers = []
    for s in range(1, inst.S + 1):
        acc = masked(s, s)  # own term, computed locally
        for j in range(1, inst.S + 1):
            if j != s:
                acc = acc + masked(j, s)
        answers.append((s, acc))
    for s in range(1, inst.S + 1):
        for j in range(1, inst.S + 1):
            if j != s:
                transcript.append((s, j, masked(s, j)))
    return answers, transcript


def ps_decode(inst, answers):
    """Recover the product from any X+1 (server, answer) pairs.

    Each answer is the product plus a degree-X polynomial in the server's
    point with zero constant term, so interpolation's constant row is AB.
    """
    if len(answers) < inst.X + 1:
        raise NotEnoughAnswers(f"need {inst.X + 1} answers, got {len(answers)}")
    field = inst.field
    chosen = sorted(answers, key=lambda t: t[0])[: inst.X + 1]
    pts = [inst.alpha(s) for s, _ in chosen]
    V = vandermonde(field, pts, inst.X + 1)
    rhs = FieldMatrix(
        field, np.stack([y.data.reshape(-1) for _, y in chosen]), _reduced=True
    )
    coeffs = solve_square(V, rhs)
    shape = chosen[0][1].shape
    return FieldMatrix(field, coeffs.data[0].reshape(shape), _reduced=True)


def transcript_product(inst, transcript):
    """Recover the product from the inter-server messages alone.

    Each sender's outgoing messages interpolate to a degree-X polynomial
    whose constant term is its weighted share product; the sum over senders
    is AB.  This is the witness that the baseline's round leaks the result.
    """
    field = inst.field
    by_sender = {}
    for s, j, M in transcript:
        by_sender.setdefault(s, []).append((j, M))
    total = None
    for s in range(1, inst.S + 1):
        rows = sorted(by_sender.get(s, []), key=lambda t: t[0])[: inst.X + 1]
        if len(rows) < inst.X + 1:
            raise NotEnoughAnswers(f"sender {s} has too few messages to interpolate")
        pts = [inst.alpha(j) for j, _ in rows]
        V = vandermonde(field, pts, inst.X + 1)
        rhs = FieldMatrix(
            field, np.stack([M.data.reshape(-1) for _, M in rows]), _reduced=True
        )
        const = solve_square(V, rhs).data[0]
        shape = rows[0][1].shape
        w = FieldMatrix(field, const.reshape(shape), _reduced=True)
        total = w if total is None else total + w
    return total
