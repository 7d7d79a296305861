"""Batch secure matrix multiplication with aligned server-side noise.

Sources hold L = ell*Kc matrix pairs.  Shares place each pair behind its own
pole so all L products fit into one answer polynomial; one server generates
every noise term the answers need, aligned so that a single masked matrix
per server suffices, and ships it before any data exists.  The master solves
one structured linear system per matrix entry and reads the product blocks
off fixed coefficient positions.
"""

from dataclasses import dataclass

import numpy as np

from . import blocks as blk
from . import ep_code
from .errors import (
    DegeneratePoints,
    FieldTooSmall,
    InsufficientServers,
    InternalError,
    NotDivisible,
    NotEnoughAnswers,
    ShapeError,
    SingularMatrix,
)
from .field import FieldMatrix, PrimeField, stream_rng
from .linalg import block_diag, cauchy_power, hstack, lower_toeplitz, solve_square, vandermonde

_FIELD_CACHE = {}


def _field(q):
    if q not in _FIELD_CACHE:
        _FIELD_CACHE[q] = PrimeField(q)
    return _FIELD_CACHE[q]


@dataclass(frozen=True)
class SchemeParams:
    """Validated scheme parameters plus the quantities derived from them."""

    S: int
    X: int
    ell: int
    Kc: int
    p: int
    m: int
    n: int
    lam: int
    kappa: int
    mu: int
    modulus: int
    R_prime: int
    R: int
    D_E: int
    L: int
    desired: tuple

    @property
    def field(self):
        return _field(self.modulus)

    @property
    def a_block(self):
        return (self.lam // self.m, self.kappa // self.p)

    @property
    def b_block(self):
        return (self.kappa // self.p, self.mu // self.n)

    @property
    def y_block(self):
        return (self.lam // self.m, self.mu // self.n)

    @property
    def n_zprime(self):
        """Number of polynomial-aligned noise matrices one server draws."""
        return self.R_prime * (self.Kc - 1) + self.X + self.D_E

    def pair_indices(self):
        """(l, k) pairs in the fixed order l-major, k-minor."""
        return [(l, k) for l in range(1, self.ell + 1) for k in range(1, self.Kc + 1)]


def derive_params(S, X, ell, Kc, p, m, n, lam, kappa, mu, q):
    """Validate a parameter set and compute every derived quantity."""
    for name, v in (("S", S), ("X", X), ("ell", ell), ("Kc", Kc), ("p", p),
                    ("m", m), ("n", n), ("lam", lam), ("kappa", kappa), ("mu", mu)):
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")
    if lam % m:
        raise NotDivisible(f"m={m} does not divide lam={lam}")
    if kappa % p:
        raise NotDivisible(f"p={p} does not divide kappa={kappa}")
    if mu % n:
        raise NotDivisible(f"n={n} does not divide mu={mu}")
    r_prime = p * m * n
    r = p * m * n * (ell + 1) * Kc + 2 * X - 1
    if r > S:
        raise InsufficientServers(f"threshold R={r} exceeds S={S}")
    L = ell * Kc
    field = _field(q)  # validates primality and the int64 bound
    if q < S + L:
        raise FieldTooSmall(f"need at least S+L={S + L} distinct points, field has {q}")
    d_e = max(p * m, p * m * n - p * m + p) - 1
    return SchemeParams(
        S=S, X=X, ell=ell, Kc=Kc, p=p, m=m, n=n, lam=lam, kappa=kappa, mu=mu,
        modulus=field.modulus, R_prime=r_prime, R=r, D_E=d_e, L=L,
        desired=blk.desired_positions(p, m, n),
    )


@dataclass(frozen=True)
class EvalPoints:
    """The L pole points (one per matrix pair) and the S server points."""

    f: tuple  # ell-tuple of Kc-tuples
    alphas: tuple

    def __post_init__(self):
        flat = [v for row in self.f for v in row] + list(self.alphas)
        if len(set(flat)) != len(flat):
            raise DegeneratePoints(f"evaluation points repeat: {flat}")

    def f_at(self, l, k):
        return self.f[l - 1][k - 1]

    def alpha(self, s):
        return self.alphas[s - 1]

    def flat_f(self):
        return [v for row in self.f for v in row]


def choose_points(params, seed=0, policy="sequential"):
    """Pick S + L distinct field points.

    The sequential policy numbers poles 1..L and servers L+1..L+S; the
    random policy samples a seeded permutation of the field.
    """
    q = params.modulus
    L, S = params.L, params.S
    if policy == "sequential":
        flat = [(i + 1) % q for i in range(L + S)]
    elif policy == "random":
        rng = stream_rng(seed, "point-selection")
        flat = [int(v) for v in rng.permutation(q)[: L + S]]
    else:
        raise ValueError(f"unknown point policy {policy!r}")
    f = tuple(
        tuple(flat[(l - 1) * params.Kc + (k - 1)] for k in range(1, params.Kc + 1))
        for l in range(1, params.ell + 1)
    )
    return EvalPoints(f=f, alphas=tuple(flat[L:]))


def psi_coeffs(params, points, l, k):
    """Coefficients of prod_{k' != k} (t + f_{l,k'} - f_{l,k})**R', low order first.

    The constant coefficient is never zero, which keeps the per-pair
    Toeplitz factor of the decoding matrix invertible.
    """
    field = params.field
    q = params.modulus
    fk = points.f_at(l, k)
    coeffs = [1]
    for kp in range(1, params.Kc + 1):
        if kp == k:
            continue
        d = (points.f_at(l, kp) - fk) % q
        for _ in range(params.R_prime):
            nxt = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] = (nxt[i] + c * d) % q
                nxt[i + 1] = (nxt[i + 1] + c) % q
            coeffs = nxt
    if coeffs[0] == 0:
        raise InternalError("constant alignment coefficient vanished")
    return coeffs


@dataclass
class ShareBundle:
    """Per-server shares: A[s-1][l-1] and B[s-1][l-1] are server s's pair l."""

    A: list
    B: list


def _grids(mats, rows, cols, expect_shape, what):
    grids = []
    for i, M in enumerate(mats):
        if M.shape != expect_shape:
            raise ShapeError(f"{what} {i + 1} has shape {M.shape}, expected {expect_shape}")
        grids.append(blk.partition(M, rows, cols))
    return grids


def draw_source_noise(params, seed):
    """The X noise matrices per group that each source folds into its shares."""
    field = params.field
    rng_a = stream_rng(seed, "source-A")
    rng_b = stream_rng(seed, "source-B")
    za = [[field.rand_matrix(*params.a_block, rng_a) for _ in range(params.X)]
          for _ in range(params.ell)]
    zb = [[field.rand_matrix(*params.b_block, rng_b) for _ in range(params.X)]
          for _ in range(params.ell)]
    return za, zb


def make_shares(A, B, params, points, seed=0, noise_a=None, noise_b=None):
    """Encode the L input pairs into one share pair per server.

    A and B list the inputs in pair order (l, k) -> Kc(l-1) + k.  Noise is
    drawn from the source streams of `seed` unless explicit matrices are
    passed (tests inject zeros this way).  Returns (bundle, noise_a, noise_b).
    """
    field = params.field
    q = params.modulus
    if len(A) != params.L or len(B) != params.L:
        raise ShapeError(f"expected {params.L} input pairs, got {len(A)} and {len(B)}")
    grids_a = _grids(A, params.m, params.p, (params.lam, params.kappa), "left input")
    grids_b = _grids(B, params.p, params.n, (params.kappa, params.mu), "right input")
    if noise_a is None or noise_b is None:
        za, zb = draw_source_noise(params, seed)
        noise_a = za if noise_a is None else noise_a
        noise_b = zb if noise_b is None else noise_b
    shares_a = []
    shares_b = []
    for s in range(1, params.S + 1):
        alpha = points.alpha(s)
        row_a = []
        row_b = []
        for l in range(1, params.ell + 1):
            d = [(points.f_at(l, k) - alpha) % q for k in range(1, params.Kc + 1)]
            dR = [field.pow(v, params.R_prime) for v in d]
            a_acc = FieldMatrix.zeros(field, *params.a_block)
            b_acc = FieldMatrix.zeros(field, *params.b_block)
            delta = 1
            for v in dR:
                delta = delta * v % q
            for k in range(1, params.Kc + 1):
                others = 1
                for kp, v in enumerate(dR, start=1):
                    if kp != k:
                        others = others * v % q
                idx = (l - 1) * params.Kc + (k - 1)
                a_acc = a_acc + others * ep_code.ep_encode_A(grids_a[idx], d[k - 1])
                b_acc = b_acc + field.inv(dR[k - 1]) * ep_code.ep_encode_B(
                    grids_b[idx], d[k - 1], params.m
                )
            apow = 1
            for x in range(params.X):
                a_acc = a_acc + (delta * apow % q) * noise_a[l - 1][x]
                b_acc = b_acc + apow * noise_b[l - 1][x]
                apow = apow * alpha % q
            row_a.append(a_acc)
            row_b.append(b_acc)
        shares_a.append(row_a)
        shares_b.append(row_b)
    return ShareBundle(A=shares_a, B=shares_b), noise_a, noise_b


@dataclass
class NoiseBundle:
    """Everything the noise-generating server draws.

    z_prime has R'(Kc-1) + X + D_E random matrices; z_pair[l-1][k-1][i-1]
    holds R' matrices per pair, zero exactly at the desired positions.
    """

    z_prime: list
    z_pair: list


def gen_server_noise(params, seed):
    field = params.field
    rng = stream_rng(seed, "server")
    shape = params.y_block
    z_prime = [field.rand_matrix(*shape, rng) for _ in range(params.n_zprime)]
    z_pair = []
    for _l in range(params.ell):
        per_l = []
        for _k in range(params.Kc):
            per_l.append([
                FieldMatrix.zeros(field, *shape) if i in params.desired
                else field.rand_matrix(*shape, rng)
                for i in range(1, params.R_prime + 1)
            ])
        z_pair.append(per_l)
    return NoiseBundle(z_prime=z_prime, z_pair=z_pair)


def noise_share(noise, params, points, s):
    """The single masked matrix server s adds to its answer.

    Built purely from the noise bundle and the points, never from input
    data, so it can be computed and shipped before the inputs exist.
    """
    field = params.field
    q = params.modulus
    alpha = points.alpha(s)
    acc = FieldMatrix.zeros(field, *params.y_block)
    apow = 1
    for z in noise.z_prime:
        acc = acc + apow * z
        apow = apow * alpha % q
    for l in range(1, params.ell + 1):
        for k in range(1, params.Kc + 1):
            c = psi_coeffs(params, points, l, k)
            zs = noise.z_pair[l - 1][k - 1]
            d = (points.f_at(l, k) - alpha) % q
            for i in range(params.R_prime):
                num = FieldMatrix.zeros(field, *params.y_block)
                for ip in range(i + 1):
                    if i - ip < len(c) and c[i - ip]:
                        num = num + c[i - ip] * zs[ip]
                acc = acc + field.pow(d, -(params.R_prime - i)) * num
    return acc


def server_answer(shares_a, shares_b, m_tilde):
    """What one server returns: the sum of its share products plus its mask."""
    acc = m_tilde
    for sa, sb in zip(shares_a, shares_b):
        acc = acc + sa @ sb
    return acc


@dataclass(frozen=True)
class Answer:
    s: int
    Y: object  # FieldMatrix when responsive
    responsive: bool = True

    def __post_init__(self):
        if self.responsive and self.Y is None:
            raise ValueError(f"responsive answer from server {self.s} carries no data")


def decoding_matrix(params, points, alphas):
    """The coefficient matrix of the master's linear system for the given servers.

    Cauchy-power columns (one run of R' per pair) and a Vandermonde tail,
    right-multiplied by the block-diagonal of per-pair lower-triangular
    Toeplitz alignment factors.
    """
    field = params.field
    rp = params.R_prime
    left = cauchy_power(field, alphas, points.flat_f(), rp)
    tail_width = rp * params.Kc + 2 * params.X - 1
    right = vandermonde(field, alphas, tail_width)
    v_hat = hstack([left, right])
    t_blocks = []
    for l, k in params.pair_indices():
        c = psi_coeffs(params, points, l, k)
        col = (c + [0] * rp)[:rp]
        t_blocks.append(lower_toeplitz(field, col))
    t_blocks.append(FieldMatrix.identity(field, tail_width))
    return v_hat @ block_diag(field, t_blocks)


def reconstruct(answers, params, points, servers=None):
    """Decode all L products from R answers.

    Uses the first R responsive servers by index, or exactly the given
    `servers` subset.  Raises NotEnoughAnswers when fewer than R answers
    are available.
    """
    field = params.field
    responsive = sorted((a for a in answers if a.responsive), key=lambda a: a.s)
    if servers is None:
        if len(responsive) < params.R:
            raise NotEnoughAnswers(
                f"need {params.R} answers, only {len(responsive)} responsive"
            )
        chosen = responsive[: params.R]
    else:
        by_s = {a.s: a for a in responsive}
        missing = [s for s in servers if s not in by_s]
        if missing or len(set(servers)) != params.R:
            raise NotEnoughAnswers(
                f"requested subset {sorted(set(servers))} does not give {params.R} "
                f"responsive answers (missing {missing})"
            )
        chosen = [by_s[s] for s in sorted(set(servers))]
    alphas = [points.alpha(a.s) for a in chosen]
    M = decoding_matrix(params, points, alphas)
    rhs = FieldMatrix(
        field,
        np.stack([a.Y.data.reshape(-1) for a in chosen]),
        _reduced=True,
    )
    try:
        U = solve_square(M, rhs)
    except SingularMatrix as exc:  # distinct points guarantee solvability
        raise InternalError("decoding system was singular despite distinct points") from exc
    bh, bw = params.y_block
    products = []
    for pair_idx, (_l, _k) in enumerate(params.pair_indices()):
        got = {}
        for m_idx in range(1, params.m + 1):
            for n_idx in range(1, params.n + 1):
                pos = blk.product_block_index(m_idx, n_idx, params.p, params.m, params.n)
                row = pair_idx * params.R_prime + pos - 1
                got[(m_idx, n_idx)] = FieldMatrix(
                    field, U.data[row].reshape(bh, bw), _reduced=True
                )
        products.append(blk.reassemble(got, params.m, params.n))
    return products


def collusion_matrix(params, points, subset, l):
    """Coefficient matrix mapping one group's X left-noise terms onto a server subset.

    Entry (i, x) is Delta_{s_i} * alpha_{s_i}**(x-1).  Invertibility for every
    X-subset is what makes any X colluding servers see uniform noise.
    """
    field = params.field
    q = params.modulus
    if len(subset) != params.X:
        raise ShapeError(f"subset size {len(subset)} != X={params.X}")
    out = np.empty((params.X, params.X), dtype=np.int64)
    for i, s in enumerate(sorted(subset)):
        alpha = points.alpha(s)
        delta = 1
        for k in range(1, params.Kc + 1):
            delta = delta * field.pow((points.f_at(l, k) - alpha) % q, params.R_prime) % q
        apow = 1
        for x in range(params.X):
            out[i, x] = delta * apow % q
            apow = apow * alpha % q
    return FieldMatrix(field, out, _reduced=True)
