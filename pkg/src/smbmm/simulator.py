"""Deterministic three-phase protocol simulator.

Phase 0 routes the aligned noise from its generating server over a spanning
tree of the server graph; phase 1 uploads shares; phase 2 collects answers
with straggler injection and decodes.  Identical configs and seeds produce
byte-identical trace reports.
"""

import json
from collections import deque
from dataclasses import dataclass, field, replace

from . import gcsa, ps
from .errors import ConfigError, MissingServer, NotEnoughAnswers
from .field import stream_rng, tally_ops
from .strassen import THRESHOLD, strassen_na_run
from .trace import TraceReport

SCHEMES = ("gcsa-na", "ps", "strassen-na")
TOPOLOGIES = ("complete", "star", "line")


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "gcsa-na"
    p: int = 1
    m: int = 1
    n: int = 1
    ell: int = 1
    Kc: int = 1
    X: int = 1
    lam: int = 4
    kappa: int = 4
    mu: int = 4
    S: int = None
    modulus: int = 65537
    seed: int = 0
    input_seed: int = None
    stragglers: object = 0  # count, or an explicit list of server ids
    topology: str = "complete"
    edges: tuple = None  # explicit edge list overrides `topology`
    point_policy: str = "sequential"

    @classmethod
    def from_dict(cls, raw):
        known = {f.name for f in cls.__dataclass_fields__.values()}
        bad = set(raw) - known
        if bad:
            raise ConfigError(f"unknown config keys: {sorted(bad)}")
        cfg = cls(**raw)
        if isinstance(cfg.edges, list):
            cfg = replace(cfg, edges=tuple(tuple(e) for e in cfg.edges))
        if isinstance(cfg.stragglers, list):
            cfg = replace(cfg, stragglers=tuple(cfg.stragglers))
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_topology(kind, S, edges=None):
    """Adjacency sets over servers 1..S; must come out connected."""
    adj = {s: set() for s in range(1, S + 1)}

    def link(u, v):
        if not (1 <= u <= S and 1 <= v <= S) or u == v:
            raise ConfigError(f"bad edge ({u}, {v}) for {S} servers")
        adj[u].add(v)
        adj[v].add(u)

    if edges is not None:
        for u, v in edges:
            link(int(u), int(v))
    elif kind == "complete":
        for u in range(1, S + 1):
            for v in range(u + 1, S + 1):
                link(u, v)
    elif kind == "star":
        for v in range(2, S + 1):
            link(1, v)
    elif kind == "line":
        for v in range(2, S + 1):
            link(v - 1, v)
    else:
        raise ConfigError(f"unknown topology {kind!r}")
    return adj


def spanning_tree_parents(adj, root=1):
    """BFS parents from the root; raises if the graph is disconnected."""
    parents = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in parents:
                parents[v] = u
                queue.append(v)
    if len(parents) != len(adj):
        unreached = sorted(set(adj) - set(parents))
        raise ConfigError(f"topology is disconnected; unreachable servers {unreached}")
    return parents


@dataclass
class SimResult:
    trace: TraceReport
    products: list
    expected: list
    ok: bool


def _pick_stragglers(config, S):
    spec = config.stragglers
    if isinstance(spec, (list, tuple)):
        chosen = sorted(set(int(s) for s in spec))
        if any(not 1 <= s <= S for s in chosen):
            raise ConfigError(f"straggler ids {chosen} outside 1..{S}")
        return chosen
    count = int(spec)
    if count < 0:
        raise ConfigError(f"straggler count must be nonnegative, got {count}")
    if count == 0:
        return []
    rng = stream_rng(config.seed, "straggler-selection")
    return sorted(int(v) + 1 for v in rng.choice(S, size=count, replace=False))


def _rand_inputs(config, count, lam, kappa, mu, fld):
    seed = config.seed if config.input_seed is None else config.input_seed
    rng_a = stream_rng(seed, "input-A")
    rng_b = stream_rng(seed, "input-B")
    A = [fld.rand_matrix(lam, kappa, rng_a) for _ in range(count)]
    B = [fld.rand_matrix(kappa, mu, rng_b) for _ in range(count)]
    return A, B


def _run_gcsa(config):
    S = config.S
    if S is None:
        R = config.p * config.m * config.n * (config.ell + 1) * config.Kc + 2 * config.X - 1
        extra = len(config.stragglers) if isinstance(config.stragglers, (list, tuple)) \
            else int(config.stragglers)
        S = R + extra
    params = gcsa.derive_params(S, config.X, config.ell, config.Kc, config.p,
                                config.m, config.n, config.lam, config.kappa,
                                config.mu, config.modulus)
    points = gcsa.choose_points(params, seed=config.seed, policy=config.point_policy)
    fld = params.field
    trace = TraceReport(
        scheme="gcsa-na",
        meta={"S": params.S, "R": params.R, "L": params.L, "seed": config.seed,
              "topology": config.topology if config.edges is None else "custom"},
    )

    adj = build_topology(config.topology, params.S, config.edges)
    parents = spanning_tree_parents(adj, root=1)
    with tally_ops() as noise_ops:
        noise = gcsa.gen_server_noise(params, config.seed)
        masks = {s: gcsa.noise_share(noise, params, points, s)
                 for s in range(1, params.S + 1)}
    for s in range(2, params.S + 1):
        trace.log("offline-noise", f"server:{parents[s]}", f"server:{s}", masks[s])
    trace.op_counts["offline-noise"] = noise_ops

    with tally_ops() as share_ops:
        A, B = _rand_inputs(config, params.L, params.lam, params.kappa, params.mu, fld)
        bundle, _, _ = gcsa.make_shares(A, B, params, points, seed=config.seed)
    for s in range(1, params.S + 1):
        trace.log("sharing", "source-A", f"server:{s}", bundle.A[s - 1])
        trace.log("sharing", "source-B", f"server:{s}", bundle.B[s - 1])
    trace.op_counts["sharing"] = share_ops

    straggler_ids = set(_pick_stragglers(config, params.S))
    with tally_ops() as answer_ops:
        answers = []
        for s in range(1, params.S + 1):
            if s in straggler_ids:
                answers.append(gcsa.Answer(s=s, Y=None, responsive=False))
            else:
                y = gcsa.server_answer(bundle.A[s - 1], bundle.B[s - 1], masks[s])
                answers.append(gcsa.Answer(s=s, Y=y))
    responsive = [a for a in answers if a.responsive]
    if len(responsive) < params.R:
        raise NotEnoughAnswers(
            f"{len(straggler_ids)} stragglers leave {len(responsive)} answers, "
            f"threshold is {params.R}"
        )
    for a in responsive[: params.R]:
        trace.log("answer", f"server:{a.s}", "master", a.Y)
    trace.op_counts["answer"] = answer_ops

    with tally_ops() as decode_ops:
        products = gcsa.reconstruct(answers, params, points)
        expected = [A[i] @ B[i] for i in range(params.L)]
    trace.op_counts["reconstruction"] = decode_ops
    ok = products == expected
    trace.decode_ok = ok
    return SimResult(trace=trace, products=products, expected=expected, ok=ok), params


def _run_ps(config):
    straggler_count = len(config.stragglers) if isinstance(config.stragglers, (list, tuple)) \
        else int(config.stragglers)
    if straggler_count:
        raise MissingServer("baseline has no straggler tolerance; every server must answer")
    inst = ps.ps_setup(config.modulus, config.p, config.X, S=config.S)
    fld = inst.field
    trace = TraceReport(
        scheme="ps",
        meta={"S": inst.S, "R": inst.S, "L": 1, "seed": config.seed,
              "topology": config.topology if config.edges is None else "custom"},
    )
    build_topology(config.topology, inst.S, config.edges)  # validates connectivity

    with tally_ops() as share_ops:
        A, B = _rand_inputs(config, 1, config.lam, config.kappa, config.mu, fld)
        shares, _, _ = ps.ps_share(inst, A[0], B[0], seed=config.seed)
    for s in range(1, inst.S + 1):
        trace.log("sharing", "source-A", f"server:{s}", shares[s - 1][0])
        trace.log("sharing", "source-B", f"server:{s}", shares[s - 1][1])
    trace.op_counts["sharing"] = share_ops

    with tally_ops() as round_ops:
        answers, transcript = ps.ps_round(inst, shares, seed=config.seed)
    for s, j, M in transcript:
        trace.log("exchange", f"server:{s}", f"server:{j}", M)
    trace.op_counts["exchange"] = round_ops

    with tally_ops() as decode_ops:
        used = answers[: inst.X + 1]
        for s, y in used:
            trace.log("answer", f"server:{s}", "master", y)
        product = ps.ps_decode(inst, used)
        expected = A[0] @ B[0]
    trace.op_counts["reconstruction"] = decode_ops
    ok = product == expected
    trace.decode_ok = ok
    params = gcsa.derive_params(inst.S, config.X, 1, 1, config.p, 1, 1,
                                config.lam, config.kappa, config.mu, config.modulus)
    return SimResult(trace=trace, products=[product], expected=[expected], ok=ok), params


def _run_strassen(config):
    S = THRESHOLD if config.S is None else config.S
    straggler_ids = _pick_stragglers(config, S)
    fld = gcsa._field(config.modulus)
    A, B = _rand_inputs(config, 1, config.lam, config.kappa, config.mu, fld)
    trace = TraceReport(scheme="strassen-na",
                        meta={"S": S, "R": THRESHOLD, "L": 1, "seed": config.seed,
                              "topology": config.topology})
    product, trace = strassen_na_run(A[0], B[0], S=S, seed=config.seed,
                                     stragglers=straggler_ids, trace=trace)
    expected = A[0] @ B[0]
    ok = product == expected
    trace.decode_ok = ok
    return SimResult(trace=trace, products=[product], expected=[expected], ok=ok), None


def run_simulation(config):
    """Run one configured protocol instance; returns a SimResult."""
    if config.scheme == "gcsa-na":
        result, _ = _run_gcsa(config)
    elif config.scheme == "ps":
        result, _ = _run_ps(config)
    elif config.scheme == "strassen-na":
        result, _ = _run_strassen(config)
    else:
        raise ConfigError(f"unknown scheme {config.scheme!r}; pick one of {SCHEMES}")
    return result


def run_with_params(config):
    """Like run_simulation but also returns the derived parameter set (or None)."""
    if config.scheme == "gcsa-na":
        return _run_gcsa(config)
    if config.scheme == "ps":
        return _run_ps(config)
    if config.scheme == "strassen-na":
        return _run_strassen(config)
    raise ConfigError(f"unknown scheme {config.scheme!r}; pick one of {SCHEMES}")
