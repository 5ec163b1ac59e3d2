"""Entities, accounts, institutions and ownership links."""

from __future__ import annotations

import hashlib
from collections import Counter

import numpy as np

from .errors import UnknownOwner
from .model import (
    CASH_NODE_ID,
    NO_CATEGORY,
    RELATIONS,
    EntityNode,
    Graph,
    PopulationSummary,
    make_id,
    risk_score,
)

FIRST_NAMES = (
    "Anna", "Bram", "Chloe", "Daan", "Emma", "Finn", "Grace", "Hugo", "Iris", "Jesse", "Julia", "Lars",
    "Lotte", "Milan", "Noah", "Olivia", "Pieter", "Quinn", "Roos", "Sam", "Sara", "Thijs", "Tess", "Vera",
    "Wout", "Yara", "Zoe", "Luca", "Mila", "Sem",
)
LAST_NAMES = (
    "Bakker", "Visser", "Smit", "Meijer", "de Boer", "Mulder", "de Groot", "Bos", "Vos", "Peters",
    "Hendriks", "van Leeuwen", "Dekker", "Brouwer", "de Wit", "Dijkstra", "Smits", "de Graaf", "van der Meer",
    "Kok", "Jacobs", "de Haan", "Vermeulen", "van den Heuvel", "van der Veen", "van den Broek", "Schouten",
    "Willems", "van Dam", "Hoekstra",
)
BANK_WORDS = ("Harbour", "Northern", "Civic", "Meridian", "Union", "Lowland", "Crown", "Delta", "Atlas", "Keystone")
BANK_KINDS = ("Bank", "Savings Bank", "Trust", "Credit Union")
GENDERS = ("F", "M")
OWNERSHIP = RELATIONS.index("ownership")


def _weighted(table):
    names = [k for k, _ in table]
    w = np.array([v for _, v in table], dtype=np.float64)
    return names, w / w.sum()


def _seed_fingerprint(graph):
    h = hashlib.sha256()
    for n in graph.node_list:
        h.update(
            f"{n.node_id}|{n.node_type}|{n.country_code}|{n.age_group}|{n.occupation}|{n.business_category}|"
            f"{n.number_of_employees}|{n.owner_id}|{n.institution_id}|{n.account_category}\n".encode()
        )
    return h.hexdigest()


def summarize(graph):
    counts = Counter(n.node_type for n in graph.node_list)
    sizes = {k: len(v) for k, v in sorted(graph.clusters.items())}
    return PopulationSummary(counts=dict(sorted(counts.items())), cluster_sizes=sizes,
                             seed_fingerprint=_seed_fingerprint(graph))


def attach_accounts(graph, owner, n, rng):
    """Open ``n`` current/savings accounts for ``owner`` plus its cash account."""
    node = graph.nodes.get(owner)
    if node is None or node.node_type not in ("individual", "business"):
        raise UnknownOwner(f"{owner!r} is not an individual or business in this graph")
    meta = graph.meta
    insts = meta["institutions"]
    n_inst = len(insts)
    if n <= n_inst:
        picks = rng.choice(n_inst, size=n, replace=False)
    else:
        picks = rng.integers(0, n_inst, size=n)
    years = rng.integers(meta["creation_year_min"], meta["creation_year_max"] + 1, size=n)
    savings = rng.random(n) < 0.5
    created = []
    for j in range(n):
        category = "current" if j == 0 or not savings[j] else "savings"
        created.append(_new_account(graph, node, insts[picks[j]], category, int(years[j])))
    if owner not in graph.cash_account_of:
        inst = graph.nodes[created[0]].institution_id if created else insts[0]
        cash = _new_account(graph, node, inst, "cash", int(years[0]) if n else meta["creation_year_max"])
        graph.cash_account_of[owner] = cash
    return created


def _new_account(graph, owner, institution_id, category, year):
    meta = graph.meta
    meta["account_counter"] += 1
    acc = EntityNode(
        node_id=make_id("account", meta["account_counter"]),
        node_type="account",
        country_code=owner.country_code,
        account_category=category,
        currency=graph.currency,
        owner_id=owner.node_id,
        institution_id=institution_id,
        creation_year=year,
    )
    graph.add_node(acc)
    graph.accounts_of.setdefault(owner.node_id, []).append(acc.node_id)
    graph.edges.append(owner.index, acc.index, OWNERSHIP, 0, graph.start_ts, NO_CATEGORY, False)
    return acc.node_id


def generate_population(cfg, weights, rng):
    """Build the entity graph for ``cfg``: institutions, people, businesses, accounts."""
    pop = cfg.population
    graph = Graph(cfg.start_ts, cfg.end_ts, cfg.currency)
    start_year = cfg.simulation_start.year
    graph.meta = {
        "institutions": [],
        "account_counter": 0,
        "creation_year_min": min(2000, start_year),
        "creation_year_max": start_year,
    }

    codes = [c.code for c in cfg.country_table]
    cw = np.array([c.weight for c in cfg.country_table], dtype=np.float64)
    cw /= cw.sum()
    hrj = {c.code for c in cfg.country_table if c.high_risk}

    graph.add_node(EntityNode(node_id=CASH_NODE_ID, node_type="cash", country_code=""))

    n_inst = cfg.institution_count
    inst_country = rng.choice(len(codes), size=n_inst, p=cw)
    inst_words = rng.integers(0, len(BANK_WORDS), size=n_inst)
    inst_kinds = rng.integers(0, len(BANK_KINDS), size=n_inst)
    for i in range(n_inst):
        node = EntityNode(
            node_id=make_id("institution", i + 1),
            node_type="institution",
            country_code=codes[inst_country[i]],
            institution_name=f"{BANK_WORDS[inst_words[i]]} {BANK_KINDS[inst_kinds[i]]} {i + 1}",
        )
        graph.add_node(node)
        graph.meta["institutions"].append(node.node_id)

    # individuals
    n_ind = cfg.individual_count
    ages, age_p = _weighted(pop.age_groups)
    occs, occ_p = _weighted(pop.occupations)
    country = rng.choice(len(codes), size=n_ind, p=cw)
    age = rng.choice(len(ages), size=n_ind, p=age_p)
    occ = rng.choice(len(occs), size=n_ind, p=occ_p)
    gender = rng.integers(0, 2, size=n_ind)
    first = rng.integers(0, len(FIRST_NAMES), size=n_ind)
    last = rng.integers(0, len(LAST_NAMES), size=n_ind)
    hr_ages = set(pop.high_risk_age_groups)
    hr_occs = set(pop.high_risk_occupations)
    individuals = []
    for i in range(n_ind):
        a, o, c = ages[age[i]], occs[occ[i]], codes[country[i]]
        node = EntityNode(
            node_id=make_id("individual", i + 1),
            node_type="individual",
            country_code=c,
            high_risk_jurisdiction=c in hrj,
            name=f"{FIRST_NAMES[first[i]]} {LAST_NAMES[last[i]]}",
            age_group=a,
            occupation=o,
            gender=GENDERS[gender[i]],
            high_risk_age=a in hr_ages,
            high_risk_occupation=o in hr_occs,
            young_adult=a == pop.young_age_group,
            elderly=a == pop.elderly_age_group,
        )
        graph.add_node(node)
        individuals.append(node)

    # businesses, each owned by a sampled individual
    n_bus = int(round(n_ind * cfg.business_ratio))
    cats, cat_p = _weighted(pop.business_categories)
    b_owner = rng.integers(0, n_ind, size=n_bus)
    b_cat = rng.choice(len(cats), size=n_bus, p=cat_p)
    b_country = rng.choice(len(codes), size=n_bus, p=cw)
    b_emp = np.clip(np.ceil(np.exp(rng.normal(1.8, 1.2, size=n_bus))), 1, 5000).astype(np.int64)
    b_year = rng.integers(1980, start_year + 1, size=n_bus)
    cash_cats = set(pop.cash_intensive_categories)
    businesses = []
    for i in range(n_bus):
        cat, c = cats[b_cat[i]], codes[b_country[i]]
        owner = individuals[b_owner[i]]
        node = EntityNode(
            node_id=make_id("business", i + 1),
            node_type="business",
            country_code=c,
            high_risk_jurisdiction=c in hrj,
            business_category=cat,
            incorporation_year=int(b_year[i]),
            number_of_employees=int(b_emp[i]),
            is_high_risk_category=cat in cash_cats,
            very_small=int(b_emp[i]) <= pop.very_small_max_employees,
            owner_of_business=owner.node_id,
        )
        graph.add_node(node)
        graph.businesses_of.setdefault(owner.node_id, []).append(node.node_id)
        graph.edges.append(owner.index, node.index, OWNERSHIP, 0, graph.start_ts, NO_CATEGORY, False)
        businesses.append(node)

    lo, hi = pop.accounts_per_individual
    n_acc_ind = rng.integers(lo, hi + 1, size=n_ind)
    lo, hi = pop.accounts_per_business
    n_acc_bus = rng.integers(lo, hi + 1, size=n_bus)
    for node, n in zip(individuals, n_acc_ind):
        attach_accounts(graph, node.node_id, int(n), rng)
    for node, n in zip(businesses, n_acc_bus):
        attach_accounts(graph, node.node_id, int(n), rng)

    for node in individuals + businesses:
        node.risk_score = risk_score(node, weights)
        graph.index_clusters(node)

    graph.population_summary = summarize(graph)
    return graph
