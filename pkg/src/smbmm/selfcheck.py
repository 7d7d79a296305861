"""Exhaustive security and correctness checks small enough to run on demand.

Each check returns a CheckResult; the CLI `selftest` prints one line per
check and the test suite asserts on the same functions.
"""

from collections import defaultdict
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from . import gcsa
from .errors import ProtocolError
from .field import FieldMatrix, PrimeField
from .linalg import is_invertible, matrix_rank, vandermonde
from .simulator import SimConfig, run_simulation
from .strassen import PRINTED_NOISE, RECON, noise_design, strassen_na_run


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _scalar_setup(q=5):
    params = gcsa.derive_params(S=3, X=1, ell=1, Kc=1, p=1, m=1, n=1,
                                lam=1, kappa=1, mu=1, q=q)
    points = gcsa.choose_points(params)
    return params, points


def _scalar_cube(params, points):
    """Yield (a, b, draws) over all scalar inputs; draws lists, for each of
    the q**3 noise assignments, the per-server tuple (A-share, B-share,
    mask, answer), all driven through the protocol operations."""
    field = params.field
    q = params.modulus
    consts = [FieldMatrix(field, [[v]]) for v in range(q)]
    zero = FieldMatrix.zeros(field, 1, 1)
    servers = range(1, params.S + 1)
    masks = []
    for zp in range(q):
        noise = gcsa.NoiseBundle(z_prime=[consts[zp]], z_pair=[[[zero]]])
        masks.append([gcsa.noise_share(noise, params, points, s) for s in servers])
    for a in range(q):
        for b in range(q):
            draws = []
            for za in range(q):
                for zb in range(q):
                    bundle, _, _ = gcsa.make_shares(
                        [consts[a]], [consts[b]], params, points,
                        noise_a=[[consts[za]]], noise_b=[[consts[zb]]])
                    for zp in range(q):
                        row = []
                        for s in servers:
                            sa = bundle.A[s - 1]
                            sb = bundle.B[s - 1]
                            y = gcsa.server_answer(sa, sb, masks[zp][s - 1])
                            row.append((sa[0].item(), sb[0].item(),
                                        masks[zp][s - 1].item(), y.item()))
                        draws.append(tuple(row))
            yield a, b, draws


def check_master_privacy():
    """Exhaustive GF(5) check that the answer tuple's distribution given AB
    is the same for every input pair with that product."""
    params, points = _scalar_setup()
    q = params.modulus
    dist = defaultdict(dict)  # product -> (a, b) -> sorted answer tuples
    for a, b, draws in _scalar_cube(params, points):
        dist[a * b % q][(a, b)] = sorted(tuple(y for _, _, _, y in row) for row in draws)
    for prod, by_input in dist.items():
        reference = next(iter(by_input.values()))
        for pair, multiset in by_input.items():
            if multiset != reference:
                return CheckResult(
                    "master-privacy", False,
                    f"answer distribution for inputs {pair} differs within product {prod}")
    return CheckResult("master-privacy", True,
                       f"{q * q} input pairs x {q ** 3} noise draws, "
                       "conditional answer distributions identical")


def check_collusion_uniformity():
    """Exhaustive GF(5) check that each server's view is uniform and input-free."""
    params, points = _scalar_setup()
    q = params.modulus
    full = {(x, y, z) for x in range(q) for y in range(q) for z in range(q)}
    for a, b, draws in _scalar_cube(params, points):
        for s in range(params.S):
            view = {row[s][:3] for row in draws}
            if view != full:
                return CheckResult(
                    "collusion-uniformity", False,
                    f"server {s + 1} view not uniform for inputs ({a}, {b})")
    return CheckResult("collusion-uniformity", True,
                       "every single-server view is exactly uniform over GF(5)^3 "
                       "for all 25 input pairs")


def check_collusion_rank(max_S=12, max_X=3):
    """Invertibility of the noise-coefficient matrix for every X-subset."""
    cases = [
        dict(X=1, ell=1, Kc=1, p=1, m=1, n=1),
        dict(X=2, ell=1, Kc=1, p=2, m=1, n=1),
        dict(X=2, ell=2, Kc=1, p=1, m=1, n=1),
        dict(X=3, ell=1, Kc=1, p=1, m=1, n=1),
        dict(X=3, ell=1, Kc=2, p=1, m=1, n=1),
    ]
    total = 0
    for case in cases:
        R = case["p"] * case["m"] * case["n"] * (case["ell"] + 1) * case["Kc"] \
            + 2 * case["X"] - 1
        S = max_S
        if R > S or case["X"] > max_X:
            continue
        params = gcsa.derive_params(S=S, lam=2, kappa=2, mu=2, q=65537, **case)
        points = gcsa.choose_points(params)
        for subset in combinations(range(1, S + 1), params.X):
            for l in range(1, params.ell + 1):
                E = gcsa.collusion_matrix(params, points, subset, l)
                if not is_invertible(E):
                    return CheckResult(
                        "collusion-rank", False,
                        f"singular noise matrix for subset {subset}, case {case}")
                total += 1
            V = vandermonde(params.field, [points.alpha(s) for s in subset], params.X)
            if not is_invertible(V):
                return CheckResult(
                    "collusion-rank", False,
                    f"singular right-side noise matrix for subset {subset}, case {case}")
    return CheckResult("collusion-rank", True,
                       f"{total} subset matrices invertible at S={max_S}, X<={max_X}")


def check_strong_security():
    """Noise masks are input-independent and travel before any share."""
    base = SimConfig(scheme="gcsa-na", p=1, m=1, n=1, ell=1, Kc=1, X=1,
                     lam=2, kappa=2, mu=2, S=3, modulus=5, seed=11, input_seed=1)
    other = replace(base, input_seed=2)
    r1 = run_simulation(base)
    r2 = run_simulation(other)
    noise1 = [m.digest for m in r1.trace.phase_messages("offline-noise")]
    noise2 = [m.digest for m in r2.trace.phase_messages("offline-noise")]
    if noise1 != noise2:
        return CheckResult("strong-security", False,
                           "noise masks changed when only the inputs changed")
    share1 = [m.digest for m in r1.trace.phase_messages("sharing")]
    share2 = [m.digest for m in r2.trace.phase_messages("sharing")]
    if share1 == share2:
        return CheckResult("strong-security", False,
                           "expected different shares for different inputs")
    phases = [m.phase for m in r1.trace.messages]
    last_noise = max(i for i, ph in enumerate(phases) if ph == "offline-noise")
    first_share = min(i for i, ph in enumerate(phases) if ph == "sharing")
    if last_noise > first_share:
        return CheckResult("strong-security", False,
                           "a noise message was logged after a share upload")
    if not (r1.ok and r2.ok):
        return CheckResult("strong-security", False, "decode failed")
    return CheckResult("strong-security", True,
                       "identical noise digests across input datasets; "
                       "all noise messages precede share uploads")


def check_strassen(trials=100, q=101, seed=3):
    """Random-instance correctness plus the null-space properties of the design."""
    field = PrimeField(q)
    design = noise_design(RECON, field)
    prod = FieldMatrix(field, RECON) @ design.N
    if prod != FieldMatrix.zeros(field, *prod.shape):
        return CheckResult("strassen", False, "reconstruction does not kill the noise basis")
    if matrix_rank(design.N) != 3:
        return CheckResult("strassen", False, "noise basis rank is not 3")
    rng = np.random.default_rng(seed)
    for t in range(trials):
        A = field.rand_matrix(2, 2, rng)
        B = field.rand_matrix(2, 2, rng)
        try:
            got, _ = strassen_na_run(A, B, S=15, seed=int(rng.integers(1 << 30)))
        except ProtocolError as exc:
            return CheckResult("strassen", False, f"trial {t} raised {exc!r}")
        if got != A @ B:
            return CheckResult("strassen", False, f"trial {t} decoded the wrong product")
    printed = FieldMatrix(field, RECON) @ FieldMatrix(field, PRINTED_NOISE)
    printed_ok = printed == FieldMatrix.zeros(field, *printed.shape)
    if printed_ok:
        return CheckResult("strassen", False,
                           "printed sign pattern unexpectedly cancels; desk check stale")
    return CheckResult("strassen", True,
                       f"{trials} random GF({q}) instances decode; noise basis has "
                       "rank 3 and is killed by reconstruction "
                       "(printed pattern leaves the known residue)")


def run_all():
    return [
        check_master_privacy(),
        check_collusion_uniformity(),
        check_collusion_rank(),
        check_strong_security(),
        check_strassen(),
    ]
