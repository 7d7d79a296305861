"""Secure multi-party batch matrix multiplication over prime fields.

A batch of matrix pairs is secret-shared to S servers so that no X of them
learn anything about the inputs, server-side noise generated by one server
is aligned and shipped in S-1 messages before any data exists, and the
master decodes all products from any R answers while learning nothing
beyond them.  A polynomial-sharing baseline, a seven-product bilinear
variant, exact cost accounting, and a deterministic simulator round out
the package.
"""

from . import errors
from .blocks import BlockGrid, concat, desired_positions, partition, product_block_index, reassemble
from .costs import (
    CSV_COLUMNS,
    CostReport,
    gcsa_na_costs,
    measured_costs,
    ps_costs,
    sweep,
    theoretical_costs,
    write_csv,
)
from .ep_code import ep_encode_A, ep_encode_B, product_coefficients
from .field import FieldMatrix, PrimeField, stream_rng, tally_ops
from .gcsa import (
    Answer,
    EvalPoints,
    NoiseBundle,
    SchemeParams,
    ShareBundle,
    choose_points,
    collusion_matrix,
    decoding_matrix,
    derive_params,
    gen_server_noise,
    make_shares,
    noise_share,
    psi_coeffs,
    reconstruct,
    server_answer,
)
from .linalg import (
    block_diag,
    cauchy_power,
    invert,
    is_invertible,
    lower_toeplitz,
    matrix_rank,
    nullspace,
    solve_square,
    vandermonde,
)
from .ps import PsInstance, ps_decode, ps_round, ps_setup, ps_share, transcript_product
from .simulator import SimConfig, SimResult, run_simulation, run_with_params
from .strassen import (
    A_COMBO,
    B_COMBO,
    N_PRODUCTS,
    PRINTED_NOISE,
    RECON,
    THRESHOLD,
    NoiseDesign,
    noise_design,
    strassen_bilinear,
    strassen_na_run,
)
from .trace import TraceReport

__all__ = [
    "errors",
    "BlockGrid", "concat", "desired_positions", "partition", "product_block_index", "reassemble",
    "CSV_COLUMNS", "CostReport", "gcsa_na_costs", "measured_costs", "ps_costs", "sweep",
    "theoretical_costs", "write_csv",
    "ep_encode_A", "ep_encode_B", "product_coefficients",
    "FieldMatrix", "PrimeField", "stream_rng", "tally_ops",
    "Answer", "EvalPoints", "NoiseBundle", "SchemeParams", "ShareBundle",
    "choose_points", "collusion_matrix", "decoding_matrix", "derive_params",
    "gen_server_noise", "make_shares", "noise_share", "psi_coeffs",
    "reconstruct", "server_answer",
    "block_diag", "cauchy_power", "invert", "is_invertible", "lower_toeplitz",
    "matrix_rank", "nullspace", "solve_square", "vandermonde",
    "PsInstance", "ps_decode", "ps_round", "ps_setup", "ps_share", "transcript_product",
    "SimConfig", "SimResult", "run_simulation", "run_with_params",
    "A_COMBO", "B_COMBO", "N_PRODUCTS", "PRINTED_NOISE", "RECON", "THRESHOLD",
    "NoiseDesign", "noise_design", "strassen_bilinear", "strassen_na_run",
    "TraceReport",
]
