import copy
from collections import Counter

import pytest

from amlgraph.config import TYPOLOGIES
from amlgraph.errors import PatternInjectionFailed
from amlgraph.model import CASH_NODE_ID
from amlgraph.patterns import generate_instances, inject_all
from amlgraph.population import generate_population
from amlgraph.rng import POPULATION, substream
from amlgraph.validate import validate_instance, validate_instances

from .conftest import desk_graph, patterns

HOUR = 3600


def fresh(seed=5, n=3000):
    g = desk_graph(seed=seed, individual_count=n)
    return g, generate_population(g, g.risk_weights, substream(seed, POPULATION))


def by_type(instances, name):
    return [i for i in instances if i.typology == name]


def test_counts(small_world):
    _, _, _, instances = small_world
    assert Counter(i.typology for i in instances) == {t: 10 for t in TYPOLOGIES}


def test_every_instance_validates(small_world):
    _, _, _, instances = small_world
    reports = validate_instances(instances)
    failed = [(r.typology, r.instance_id, r.violations) for r in reports if not r.passed]
    assert not failed


def test_labels(small_world):
    _, _, graph, instances = small_world
    for inst in instances:
        assert all(e.is_fraud for e in inst.transactions)
        for e in inst.transactions:
            for nid in (e.source_id, e.target_id):
                if nid != CASH_NODE_ID:
                    node = graph.nodes[nid]
                    assert node.is_fraudulent
                    if node.node_type == "account":
                        assert graph.nodes[node.owner_id].is_fraudulent
                    assert "legit" not in graph.clusters_of(node.owner_id or nid)


def test_chains_strictly_decrease(small_world):
    _, _, _, instances = small_world
    for inst in instances:
        legs = {}
        for e, leg, hop, role in zip(inst.transactions, inst.edge_legs, inst.edge_hops, inst.edge_roles):
            # a leg also groups the deposits that fund it
            if leg >= 0 and role != "deposit":
                legs.setdefault(leg, []).append((hop, e.amount))
        for chain in legs.values():
            amounts = [a for _, a in sorted(chain)]
            assert all(b < a for a, b in zip(amounts, amounts[1:]))


def test_overseas_examples(small_world):
    g, _, graph, instances = small_world
    thr = g.reporting_threshold * 100
    for inst in by_type(instances, "overseas_transfers"):
        deposits = [e for e in inst.transactions if e.source_id == CASH_NODE_ID]
        assert deposits and all(e.amount < thr for e in deposits)
        dests = inst.role_bindings["destinations"]
        assert 2 <= len(dests) <= 5 and len(set(dests)) == len(dests)
        home = graph.nodes[inst.role_bindings["source"][0]].country_code
        assert all(graph.nodes[d].country_code != home for d in dests)


def test_rapid_examples(small_world):
    _, _, _, instances = small_world
    for inst in by_type(instances, "rapid_movement"):
        ts = [e.timestamp for e in inst.transactions]
        assert max(ts) - min(ts) < 128 * HOUR
        ben = inst.role_bindings["beneficiary_account"][0]
        inflow = sum(e.amount for r, e in zip(inst.edge_roles, inst.transactions)
                     if r != "withdrawal" and e.target_id == ben)
        outflow = sum(e.amount for r, e in zip(inst.edge_roles, inst.transactions) if r == "withdrawal")
        assert 0.85 - 1e-4 <= outflow / inflow <= 0.95 + 1e-4


def test_front_business_examples(small_world):
    _, _, _, instances = small_world
    for inst in by_type(instances, "front_business"):
        deps = [e for r, e in zip(inst.edge_roles, inst.transactions) if r == "deposit"]
        assert 5 <= len(deps) <= 15
        assert all(1_500_000 <= e.amount <= 7_500_000 for e in deps)


def test_synchronised_examples(small_world):
    _, _, _, instances = small_world
    for inst in by_type(instances, "synchronised"):
        assert 3 <= len(inst.role_bindings["coordinators"]) <= 8
        deps = [e.timestamp for r, e in zip(inst.edge_roles, inst.transactions) if r == "deposit"]
        assert max(deps) - min(deps) <= inst.params_used["sync_window"]
        assert all(h == 0 for h in inst.edge_hops)


def test_u_turn_examples(small_world):
    _, _, _, instances = small_world
    for inst in by_type(instances, "u_turn"):
        chain = [e for _, e in sorted(zip(inst.edge_hops, inst.transactions), key=lambda x: x[0])]
        assert 4 <= len(chain) <= 7
        initial, remaining, back = chain[0].amount, chain[-2].amount, chain[-1].amount
        for a, b in zip(chain[:-2], chain[1:-1]):
            assert 0.01 - 1e-4 <= 1 - b.amount / a.amount <= 0.03 + 1e-4
        assert 0.70 <= back / initial <= 0.90 and 0.70 <= back / remaining <= 0.90


def test_zero_instances():
    g, graph = fresh(n=300)
    instances, warnings = inject_all(graph, g, patterns(0), 5)
    assert instances == []
    assert not any(n.is_fraudulent for n in graph.node_list)
    assert len(graph.edges.columns()["fraud"].nonzero()[0]) == 0


def test_same_seed_same_instances():
    g, graph_a = fresh(n=1500)
    _, graph_b = fresh(n=1500)
    a, _ = generate_instances(graph_a, g, patterns(3), 5)
    b, _ = generate_instances(graph_b, g, patterns(3), 5)
    assert [i.fingerprint() for i in a] == [i.fingerprint() for i in b]


def test_substream_isolation():
    g, graph = fresh(n=1500)
    base, _ = generate_instances(graph, g, patterns(3), 5)
    raw = {t: {"instance_count": 3} for t in TYPOLOGIES}
    raw["u_turn"] = {"instance_count": 6}
    from amlgraph.config import pattern_config_from_dict

    more, _ = generate_instances(graph, g, pattern_config_from_dict(raw), 5)
    fp = lambda xs, t: [i.fingerprint() for i in xs if i.typology == t]  # noqa: E731
    for t in TYPOLOGIES:
        if t != "u_turn":
            assert fp(base, t) == fp(more, t)
    assert fp(more, "u_turn")[:3] == fp(base, "u_turn")


def test_per_typology_exclusivity(small_world):
    _, _, _, instances = small_world
    for t in TYPOLOGIES:
        seen = set()
        for inst in by_type(instances, t):
            ids = set(inst.entity_ids())
            assert not ids & seen
            seen |= ids


def test_global_exclusivity():
    g, graph = fresh(n=1500)
    instances, _ = generate_instances(graph, g, patterns(2, exclusivity="global"), 5)
    seen = set()
    for inst in instances:
        ids = set(inst.entity_ids())
        assert not ids & seen
        seen |= ids


def test_strict_mode_aborts_on_impossible_population():
    g, graph = fresh(n=3)
    with pytest.raises(PatternInjectionFailed):
        inject_all(graph, g, patterns(5, strict=True), 5)


def test_lenient_mode_warns():
    g, graph = fresh(n=3)
    instances, warnings = inject_all(graph, g, patterns(5), 5)
    assert warnings


def test_u_turn_excess_fee_is_flagged(small_world):
    _, _, _, instances = small_world
    inst = copy.deepcopy(by_type(instances, "u_turn")[0])
    k = inst.edge_roles.index("chain_hop")
    inst.transactions[k].amount = int(inst.transactions[k - 1].amount * 0.90)
    report = validate_instance(inst)
    assert not report.passed


def test_rapid_overlong_span_is_flagged(small_world):
    _, _, _, instances = small_world
    inst = copy.deepcopy(by_type(instances, "rapid_movement")[0])
    t0 = inst.transactions[0].timestamp
    inst.transactions[-1].timestamp = t0 + 200 * HOUR
    report = validate_instance(inst)
    assert not report.passed
    assert any(v["constraint"] == "total_span" for v in report.violations)


def test_layering_disabled_reduces_to_two_party():
    g, graph = fresh(n=1500)
    p = patterns(2, layering={"enabled": False})
    instances, failures = generate_instances(graph, g, p, 5)
    assert not failures
    for inst in instances:
        assert "layer_hop" not in inst.edge_roles
        assert validate_instance(inst).passed
