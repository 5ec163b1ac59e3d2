from collections import Counter

import numpy as np
import pytest

from amlgraph.errors import UnknownOwner
from amlgraph.model import CASH_NODE_ID, RELATIONS
from amlgraph.population import attach_accounts, generate_population
from amlgraph.rng import POPULATION, substream

from .conftest import desk_graph

OWNERSHIP = RELATIONS.index("ownership")


def build(cfg):
    return generate_population(cfg, cfg.risk_weights, substream(cfg.master_seed, POPULATION))


@pytest.fixture(scope="module")
def desk():
    return build(desk_graph())


def test_counts(desk):
    cfg = desk_graph()
    c = desk.population_summary.counts
    assert c["individual"] == cfg.individual_count
    assert c["business"] == round(cfg.individual_count * cfg.business_ratio)
    assert c["institution"] == cfg.institution_count
    assert c["cash"] == 1
    assert sum(c.values()) == len(desk.node_list)


def test_every_owner_has_current_and_cash_account(desk):
    for e in desk.entities():
        cats = [desk.nodes[a].account_category for a in desk.accounts_of[e.node_id]]
        assert "current" in cats and cats.count("cash") == 1
        assert desk.cash_account_of[e.node_id] in desk.accounts_of[e.node_id]


def test_one_ownership_edge_per_account(desk):
    cols = desk.edges.columns()
    own = cols["relation"] == OWNERSHIP
    dst = Counter(cols["dst"][own].tolist())
    for n in desk.node_list:
        if n.node_type == "account":
            assert dst[n.index] == 1
            assert desk.nodes[n.owner_id].node_type in ("individual", "business")
            assert desk.nodes[n.institution_id].node_type == "institution"
            assert n.country_code == desk.nodes[n.owner_id].country_code
    assert not cols["fraud"][own].any() and not cols["amount"][own].any()


def test_clusters_cover_all_entities(desk):
    covered = set().union(*desk.clusters.values())
    assert {e.node_id for e in desk.entities()} <= covered


def test_risk_in_range(desk):
    assert all(0 <= e.risk_score <= 0.9 for e in desk.entities())


def test_endpoints_resolve(desk):
    cols = desk.edges.columns()
    n = len(desk.node_list)
    assert cols["src"].min() >= 0 and cols["dst"].max() < n


def test_deterministic():
    a, b = build(desk_graph(individual_count=200)), build(desk_graph(individual_count=200))
    assert a.population_summary.seed_fingerprint == b.population_summary.seed_fingerprint
    c = build(desk_graph(seed=43, individual_count=200))
    assert c.population_summary.seed_fingerprint != a.population_summary.seed_fingerprint


def test_minimal_population():
    g = build(desk_graph(individual_count=1, business_ratio=0))
    c = g.population_summary.counts
    assert c["individual"] == 1 and c["cash"] == 1 and c.get("business", 0) == 0
    assert c["account"] >= 2


def test_attach_accounts_spreads_institutions_and_is_idempotent_on_cash(desk):
    owner = "I000001"
    cash_before = desk.cash_account_of[owner]
    n_edges = len(desk.edges)
    new = attach_accounts(desk, owner, 2, np.random.default_rng(3))
    assert len(new) == 2 and len(desk.edges) == n_edges + 2
    assert len({desk.nodes[a].institution_id for a in new}) == 2
    assert desk.cash_account_of[owner] == cash_before
    assert [desk.nodes[a].account_category for a in desk.accounts_of[owner]].count("cash") == 1


def test_attach_accounts_unknown_owner(desk):
    with pytest.raises(UnknownOwner):
        attach_accounts(desk, "I999999", 1, np.random.default_rng(0))
    with pytest.raises(UnknownOwner):
        attach_accounts(desk, CASH_NODE_ID, 1, np.random.default_rng(0))


def test_li_node_count_order_of_magnitude():
    # [PAPER] 8,000 individuals -> 36,629 nodes; we only assert the same order of magnitude
    g = build(desk_graph(individual_count=8000))
    assert 10_000 <= len(g.node_list) <= 100_000


@pytest.mark.slow
def test_country_shares_match_weights():
    cfg = desk_graph(individual_count=100_000, business_ratio=0, institution_count=5)
    g = build(cfg)
    people = [n for n in g.node_list if n.node_type == "individual"]
    share = Counter(n.country_code for n in people)
    total_w = sum(c.weight for c in cfg.country_table)
    for c in cfg.country_table:
        assert abs(share[c.code] / len(people) - c.weight / total_w) <= 0.02
