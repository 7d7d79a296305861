import numpy as np
import pytest

from smbmm import (
    FieldMatrix,
    PrimeField,
    ps_decode,
    ps_round,
    ps_setup,
    ps_share,
    transcript_product,
    vandermonde,
)
from smbmm.errors import (
    FieldTooSmall,
    InsufficientServers,
    MissingServer,
    NotEnoughAnswers,
    UnsupportedPartition,
)


def _random_instance(q, p, X, seed):
    inst = ps_setup(q, p, X)
    f = PrimeField(q)
    rng = np.random.default_rng(seed)
    A = f.rand_matrix(2 * p, 2, rng)
    B = f.rand_matrix(2, 2, rng)
    return inst, f, A, B


# ---------------- setup ----------------

def test_setup_basics():
    inst = ps_setup(13, 2, 1)
    assert inst.S == 5
    assert inst.alphas == (1, 2, 3, 4, 5)
    assert inst.r == (12, 7, 0, 8, 12)


def test_setup_recombination_row():
    # r is row p of the inverse Vandermonde: sum_s r_s alpha_s^i = [i == p-1]
    inst = ps_setup(65537, 3, 2)
    f = PrimeField(65537)
    for i in range(inst.S):
        total = sum(r * pow(a, i, 65537) for r, a in zip(inst.r, inst.alphas)) % 65537
        assert total == (1 if i == inst.p - 1 else 0)


def test_setup_rejections():
    with pytest.raises(UnsupportedPartition):
        ps_setup(13, 2, 1, m=2)
    with pytest.raises(InsufficientServers):
        ps_setup(13, 2, 1, S=4)
    with pytest.raises(ValueError):
        ps_setup(13, 2, 1, S=6)
    with pytest.raises(FieldTooSmall):
        ps_setup(3, 2, 1)


# ---------------- shares ----------------

def test_share_formulas_scalar():
    # p = 1, X = 1: left share a + alpha za, right share b + alpha zb
    inst = ps_setup(13, 1, 1)
    f = PrimeField(13)
    one = lambda v: FieldMatrix(f, [[v]])
    shares, _, _ = ps_share(inst, one(3), one(5),
                            noise_a=[one(2)], noise_b=[one(4)])
    for s, (sa, sb) in enumerate(shares, start=1):
        a = inst.alphas[s - 1]
        assert sa.item() == (3 + a * 2) % 13
        assert sb.item() == (5 + a * 4) % 13


def test_share_exponents_inner_split():
    # p = 2 splits the inner dimension: A = [A1 | A2] enters as
    # A1 + A2 alpha + Z alpha^2, B = [B1; B2] as B1 alpha + B2 + Z alpha^2
    inst = ps_setup(65537, 2, 1)
    f = PrimeField(65537)
    rng = np.random.default_rng(0)
    A = f.rand_matrix(4, 2, rng)
    B = f.rand_matrix(2, 2, rng)
    za = [f.rand_matrix(4, 1, rng)]
    zb = [f.rand_matrix(1, 2, rng)]
    shares, _, _ = ps_share(inst, A, B, noise_a=za, noise_b=zb)
    A1 = FieldMatrix(f, A.data[:, :1].copy())
    A2 = FieldMatrix(f, A.data[:, 1:].copy())
    B1 = FieldMatrix(f, B.data[:1].copy())
    B2 = FieldMatrix(f, B.data[1:].copy())
    for s, (sa, sb) in enumerate(shares, start=1):
        a = inst.alphas[s - 1]
        assert sa == A1 + a * A2 + pow(a, 2, 65537) * za[0]
        assert sb == a * B1 + B2 + pow(a, 2, 65537) * zb[0]


def test_share_noise_drawn_per_seed():
    inst = ps_setup(65537, 2, 2)
    f = PrimeField(65537)
    rng = np.random.default_rng(1)
    A = f.rand_matrix(4, 2, rng)
    B = f.rand_matrix(2, 2, rng)
    s1, na1, nb1 = ps_share(inst, A, B, seed=3)
    s2, na2, nb2 = ps_share(inst, A, B, seed=3)
    s3, _, _ = ps_share(inst, A, B, seed=4)
    assert s1 == s2 and na1 == na2 and nb1 == nb2
    assert s1 != s3
    assert len(na1) == len(nb1) == inst.X


# ---------------- exchange round ----------------

def test_round_message_count_and_shape():
    inst, f, A, B = _random_instance(13, 2, 1, seed=2)
    shares, _, _ = ps_share(inst, A, B, seed=0)
    answers, transcript = ps_round(inst, shares, seed=0)
    assert len(answers) == inst.S
    assert len(transcript) == inst.S * (inst.S - 1)  # 20 for S = 5
    pairs = {(s, j) for s, j, _ in transcript}
    assert len(pairs) == len(transcript)
    assert all(s != j for s, j in pairs)


def test_round_answer_algebra():
    # Y_s = AB + sum_x alpha_s^x W_x for mask totals W_x, so subtracting the
    # mask polynomial recovers AB at every server
    inst, f, A, B = _random_instance(13, 2, 1, seed=3)
    shares, _, _ = ps_share(inst, A, B, seed=1)
    noise = [[f.rand_matrix(A.rows, B.cols, np.random.default_rng(100 + s * 10 + x))
              for x in range(inst.X)] for s in range(inst.S)]
    answers, _ = ps_round(inst, shares, noise=noise)
    want = A @ B
    totals = [sum((noise[s][x] for s in range(inst.S)),
                  FieldMatrix.zeros(f, A.rows, B.cols)) for x in range(inst.X)]
    for s, (sid, Y) in enumerate(answers, start=1):
        assert sid == s
        a = inst.alphas[s - 1]
        masked = Y
        for x in range(inst.X):
            masked = masked - pow(a, x + 1, 13) * totals[x]
        assert masked == want


def test_round_requires_all_shares():
    inst, f, A, B = _random_instance(13, 2, 1, seed=4)
    shares, _, _ = ps_share(inst, A, B, seed=2)
    with pytest.raises(MissingServer):
        ps_round(inst, shares[:-1], seed=0)


# ---------------- decoding ----------------

def test_decode_from_x_plus_one():
    inst, f, A, B = _random_instance(13, 2, 1, seed=5)
    shares, _, _ = ps_share(inst, A, B, seed=3)
    answers, _ = ps_round(inst, shares, seed=1)
    want = A @ B
    assert ps_decode(inst, answers[: inst.X + 1]) == want
    assert ps_decode(inst, answers[2 : 2 + inst.X + 1]) == want
    assert ps_decode(inst, [answers[0], answers[4]]) == want


def test_decode_not_enough():
    inst, f, A, B = _random_instance(13, 2, 1, seed=6)
    shares, _, _ = ps_share(inst, A, B, seed=4)
    answers, _ = ps_round(inst, shares, seed=2)
    with pytest.raises(NotEnoughAnswers):
        ps_decode(inst, answers[:1])


@pytest.mark.parametrize("p", [1, 2])
@pytest.mark.parametrize("X", [1, 2])
def test_end_to_end(p, X):
    q = 65537
    inst = ps_setup(q, p, X)
    f = PrimeField(q)
    rng = np.random.default_rng(p * 10 + X)
    A = f.rand_matrix(3 * p, 4, rng)
    B = f.rand_matrix(4, 2, rng)
    shares, _, _ = ps_share(inst, A, B, seed=p + X)
    answers, _ = ps_round(inst, shares, seed=p * X)
    assert ps_decode(inst, answers[: X + 1]) == A @ B


# ---------------- transcript leakage witness ----------------

def test_transcript_reveals_product():
    # the inter-server messages alone determine AB: each sender's X+1
    # messages interpolate to a polynomial whose constant term is
    # r_s Y'_s, and those constants sum to AB
    inst, f, A, B = _random_instance(13, 2, 1, seed=7)
    shares, _, _ = ps_share(inst, A, B, seed=5)
    _, transcript = ps_round(inst, shares, seed=3)
    assert transcript_product(inst, transcript) == A @ B


def test_transcript_witness_larger_field():
    inst = ps_setup(65537, 2, 2)
    f = PrimeField(65537)
    rng = np.random.default_rng(8)
    A = f.rand_matrix(4, 4, rng)
    B = f.rand_matrix(4, 3, rng)
    shares, _, _ = ps_share(inst, A, B, seed=6)
    _, transcript = ps_round(inst, shares, seed=4)
    assert transcript_product(inst, transcript) == A @ B
