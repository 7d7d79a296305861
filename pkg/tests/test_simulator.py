import json

import pytest

from smbmm import SimConfig, run_simulation, run_with_params
from smbmm.errors import ConfigError, MissingServer, NotEnoughAnswers
from smbmm.simulator import build_topology, spanning_tree_parents


def _scalar_cfg(**kw):
    base = dict(scheme="gcsa-na", p=1, m=1, n=1, ell=1, Kc=1, X=1,
                lam=2, kappa=2, mu=2, modulus=65537, seed=0)
    base.update(kw)
    return SimConfig(**base)


# ---------------- config handling ----------------

def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        SimConfig.from_dict({"scheme": "gcsa-na", "servers": 9})


def test_config_from_dict_normalizes_lists():
    cfg = SimConfig.from_dict({"stragglers": [3, 1], "edges": [[1, 2], [2, 3]]})
    assert cfg.stragglers == (3, 1)
    assert cfg.edges == ((1, 2), (2, 3))


def test_config_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"scheme": "ps", "p": 2, "X": 1}))
    cfg = SimConfig.from_file(path)
    assert cfg.scheme == "ps" and cfg.p == 2


# ---------------- topology ----------------

def test_topologies_and_tree():
    for kind, want_edges in [("complete", 3), ("star", 2), ("line", 2)]:
        adj = build_topology(kind, 3)
        assert sum(len(v) for v in adj.values()) == 2 * want_edges
        parents = spanning_tree_parents(adj)
        assert parents[1] is None and set(parents) == {1, 2, 3}


def test_custom_edges():
    adj = build_topology("complete", 4, edges=[(1, 2), (2, 3), (3, 4)])
    assert adj[1] == {2} and adj[4] == {3}
    parents = spanning_tree_parents(adj)
    assert parents == {1: None, 2: 1, 3: 2, 4: 3}


def test_disconnected_topology_rejected():
    adj = build_topology("complete", 4, edges=[(1, 2), (3, 4)])
    with pytest.raises(ConfigError):
        spanning_tree_parents(adj)


def test_bad_edges_rejected():
    with pytest.raises(ConfigError):
        build_topology("complete", 3, edges=[(1, 5)])
    with pytest.raises(ConfigError):
        build_topology("complete", 3, edges=[(2, 2)])
    with pytest.raises(ConfigError):
        build_topology("ring", 3)


# ---------------- aligned scheme runs ----------------

def test_scalar_run_structure():
    result = run_simulation(_scalar_cfg(modulus=5, S=3))
    assert result.ok
    t = result.trace
    assert t.meta["S"] == 3 and t.meta["R"] == 3
    assert len(t.phase_messages("offline-noise")) == 2
    assert len(t.phase_messages("sharing")) == 6
    assert len(t.phase_messages("answer")) == 3
    phases = [m.phase for m in t.messages]
    order = {"offline-noise": 0, "sharing": 1, "answer": 2}
    assert phases == sorted(phases, key=order.__getitem__)


def test_batch_run_with_stragglers():
    cfg = SimConfig(scheme="gcsa-na", p=2, m=1, n=1, ell=1, Kc=2, X=1,
                    lam=2, kappa=2, mu=2, modulus=13, seed=3, stragglers=2)
    result = run_simulation(cfg)
    assert result.ok
    assert result.trace.meta["S"] == 11 and result.trace.meta["R"] == 9
    assert len(result.trace.phase_messages("answer")) == 9
    assert len(result.products) == 2


def test_explicit_straggler_ids_absent_from_answers():
    cfg = _scalar_cfg(S=5, stragglers=[2, 4], modulus=65537)
    result = run_simulation(cfg)
    assert result.ok
    senders = {m.sender for m in result.trace.phase_messages("answer")}
    assert senders.isdisjoint({"server:2", "server:4"})


def test_too_many_stragglers():
    with pytest.raises(NotEnoughAnswers):
        run_simulation(_scalar_cfg(S=3, stragglers=[1, 2], modulus=5))


def test_straggler_ids_validated():
    with pytest.raises(ConfigError):
        run_simulation(_scalar_cfg(S=3, stragglers=[7]))
    with pytest.raises(ConfigError):
        run_simulation(_scalar_cfg(S=3, stragglers=-1))


def test_determinism_same_seed_same_bytes():
    cfg = SimConfig(scheme="gcsa-na", p=2, m=1, n=1, ell=1, Kc=2, X=1,
                    lam=2, kappa=2, mu=2, modulus=13, seed=5)
    a = run_simulation(cfg).trace.to_json()
    b = run_simulation(cfg).trace.to_json()
    assert a == b
    c = run_simulation(SimConfig(scheme="gcsa-na", p=2, m=1, n=1, ell=1, Kc=2,
                                 X=1, lam=2, kappa=2, mu=2, modulus=13,
                                 seed=6)).trace.to_json()
    assert a != c


def test_topology_changes_routing_not_totals():
    base = dict(scheme="gcsa-na", p=2, m=1, n=1, ell=1, Kc=2, X=1,
                lam=2, kappa=2, mu=2, modulus=13, seed=7)
    traces = {}
    for topo in ("complete", "star", "line"):
        r = run_simulation(SimConfig(topology=topo, **base))
        assert r.ok
        traces[topo] = r.trace
    sym = lambda t: (t.symbols(phase="offline-noise"), t.symbols(phase="sharing"),
                     t.symbols(phase="answer"))
    assert sym(traces["complete"]) == sym(traces["star"]) == sym(traces["line"])
    senders = lambda t: [m.sender for m in t.phase_messages("offline-noise")]
    assert senders(traces["star"]) == ["server:1"] * 8
    assert senders(traces["line"]) == [f"server:{s}" for s in range(1, 9)]


def test_custom_edge_routing():
    cfg = _scalar_cfg(S=3, modulus=5, edges=((1, 3), (3, 2)))
    r = run_simulation(cfg)
    assert r.ok
    deliveries = [(m.sender, m.recipient) for m in r.trace.phase_messages("offline-noise")]
    assert deliveries == [("server:3", "server:2"), ("server:1", "server:3")]
    assert r.trace.meta["topology"] == "custom"


def test_input_seed_changes_product_not_masks():
    base = dict(modulus=5, S=3, seed=11)
    r1 = run_simulation(_scalar_cfg(input_seed=1, **base))
    r2 = run_simulation(_scalar_cfg(input_seed=2, **base))
    assert r1.ok and r2.ok
    off = lambda r: [m.digest for m in r.trace.phase_messages("offline-noise")]
    sh = lambda r: [m.digest for m in r.trace.phase_messages("sharing")]
    assert off(r1) == off(r2)
    assert sh(r1) != sh(r2)
    assert r1.products != r2.products


# ---------------- baseline runs ----------------

def test_ps_run_and_exchange_count():
    cfg = SimConfig(scheme="ps", p=2, X=1, lam=4, kappa=4, mu=4,
                    modulus=65537, seed=0)
    r = run_simulation(cfg)
    assert r.ok
    t = r.trace
    S = t.meta["S"]
    assert S == 5
    assert len(t.phase_messages("exchange")) == S * (S - 1)
    assert len(t.phase_messages("offline-noise")) == 0
    assert len(t.phase_messages("answer")) == cfg.X + 1


def test_ps_rejects_stragglers():
    cfg = SimConfig(scheme="ps", p=2, X=1, lam=4, kappa=4, mu=4,
                    modulus=65537, stragglers=1)
    with pytest.raises(MissingServer):
        run_simulation(cfg)


# ---------------- recursive variant runs ----------------

def test_strassen_sim():
    cfg = SimConfig(scheme="strassen-na", lam=4, kappa=4, mu=4,
                    modulus=65537, seed=1)
    r, params = run_with_params(cfg)
    assert r.ok and params is None
    assert r.trace.meta["R"] == 15
    assert len(r.trace.phase_messages("answer")) == 15


def test_unknown_scheme():
    with pytest.raises(ConfigError):
        run_simulation(SimConfig(scheme="shamir"))


# ---------------- op accounting ----------------

def test_op_counts_per_phase():
    cfg = SimConfig(scheme="gcsa-na", p=2, m=1, n=1, ell=1, Kc=2, X=1,
                    lam=2, kappa=2, mu=2, modulus=13, seed=9)
    t = run_simulation(cfg).trace
    assert set(t.op_counts) == {"offline-noise", "sharing", "answer", "reconstruction"}
    assert t.op_counts["answer"].get("mul", 0) > 0
    assert t.op_counts["reconstruction"].get("mul", 0) > 0
    d = t.to_dict()
    assert d["op_counts"]["sharing"]["mul"] > 0
