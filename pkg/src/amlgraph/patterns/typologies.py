"""Role selection and transaction emission for the five laundering typologies.

Each ``inject_*`` function reads the graph but never mutates it; the caller
inserts the returned edges and applies fraud labels.  All amounts are integer
minor units.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import (
    InsufficientCoordinators,
    InsufficientOverseasBusinesses,
    InvalidPeriod,
    InvalidWindow,
    NoEligibleBeneficiary,
    NoEligibleBusiness,
    NoEligibleSource,
    NoOverseasDestinations,
    PoolExhausted,
)
from ..model import CASH_NODE_ID, CLUSTER_LABELS, HIGH_RISK_CLUSTERS, TransactionEdge, select_from_cluster
from .scheduling import apply_layering, layering_span, schedule_burst, schedule_periodic

ALL_CLUSTERS = CLUSTER_LABELS
MULE_CLUSTERS = ("young_adult_18_24", "elderly_65_plus", "high_risk_occupation", "high_risk_jurisdiction")
FRONT_BUSINESS_CLUSTERS = (
    "cash_intensive_and_very_small", "cash_intensive_business", "very_small_company", "high_risk_jurisdiction",
)


@dataclass
class PatternInstance:
    typology: str
    instance_id: int
    role_bindings: dict
    transactions: list
    params_used: dict
    edge_roles: list = field(default_factory=list)
    edge_legs: list = field(default_factory=list)
    edge_hops: list = field(default_factory=list)

    def entity_ids(self):
        out = []
        for ids in self.role_bindings.values():
            out.extend(ids)
        return out

    def fingerprint(self):
        h = hashlib.sha256()
        for e in self.transactions:
            h.update(f"{e.source_id}|{e.target_id}|{e.amount}|{e.timestamp}|{e.category}\n".encode())
        return h.hexdigest()


class _Builder:
    def __init__(self):
        self.edges, self.roles, self.legs, self.hops = [], [], [], []
        self.next_leg = 0

    def add(self, edge, role, leg=-1, hop=0):
        self.edges.append(edge)
        self.roles.append(role)
        self.legs.append(leg)
        self.hops.append(hop)

    def add_chain(self, chain, role):
        leg = self.next_leg
        self.next_leg += 1
        for k, e in enumerate(chain):
            self.add(e, role if k == 0 else "layer_hop", leg, k)
        return leg

    def finish(self, typology, instance_id, roles, params):
        order = sorted(range(len(self.edges)), key=lambda i: (self.edges[i].timestamp, i))
        return PatternInstance(
            typology=typology,
            instance_id=instance_id,
            role_bindings=roles,
            transactions=[self.edges[i] for i in order],
            params_used=params,
            edge_roles=[self.roles[i] for i in order],
            edge_legs=[self.legs[i] for i in order],
            edge_hops=[self.hops[i] for i in order],
        )


# -- helpers -------------------------------------------------------------------


def _cents(x):
    return int(round(x * 100))


def _uniform_cents(rng, lo, hi, size=None):
    """Uniform amount in [lo, hi] currency units, as integer cents."""
    return rng.integers(_cents(lo), _cents(hi) + 1, size=size)


def _ri(rng, pair):
    return int(rng.integers(pair[0], pair[1] + 1))


def _has_noncash(graph):
    return lambda n: bool(graph.noncash_accounts(n.node_id))


def _is_individual_with_account(graph):
    return lambda n: n.node_type == "individual" and bool(graph.noncash_accounts(n.node_id))


def _pick_account(graph, entity_id, rng):
    accts = graph.noncash_accounts(entity_id)
    return accts[int(rng.integers(0, len(accts)))]


def _place(graph, rng, lead, duration):
    """Start time ``t0`` so that ``[t0 - lead, t0 + duration]`` fits the window."""
    lo = graph.start_ts + lead
    hi = graph.end_ts - duration
    if hi < lo:
        raise InvalidWindow(f"pattern needs {lead + duration}s but the window has {graph.end_ts - graph.start_ts}s")
    return int(rng.integers(lo, hi + 1))


def _structured_deposits(rng, target, threshold):
    """Sub-threshold cash amounts whose sum covers ``target`` cents."""
    lo, hi = int(math.ceil(0.70 * threshold)), int(math.floor(0.9999 * threshold))
    hi = min(hi, threshold - 1)
    out, total = [], 0
    while total < target:
        a = int(rng.integers(lo, hi + 1))
        out.append(a)
        total += a
    return out


def _layering_dict(lp):
    return asdict(lp)


def _country_map(graph, ids):
    return {i: graph.nodes[i].country_code for i in ids}


def _hrj_codes(cfg):
    return sorted(c.code for c in cfg.country_table if c.high_risk)


def _base_params(p, cfg):
    d = asdict(p)
    d.pop("instance_count", None)
    d["threshold"] = cfg.threshold_cents
    return d


# -- overseas transfers ----------------------------------------------------------


def inject_overseas_transfers(graph, cfg, p, rng, exclude=frozenset(), instance_id=0):
    """Deposits under the threshold followed by transfers to 2-5 foreign accounts."""
    src = select_from_cluster(graph, HIGH_RISK_CLUSTERS, 1, exclude, rng, _is_individual_with_account(graph))
    if not src:
        raise NoEligibleSource("no high-risk individual with an account is available")
    src = src[0]
    home = graph.nodes[src].country_code
    src_acct = graph.noncash_accounts(src)[0]

    n = _ri(rng, p.transfers)
    m = min(_ri(rng, p.destinations), n)

    def foreign(node):
        return node.country_code != home and bool(graph.noncash_accounts(node.node_id))

    taken = set(exclude) | {src}
    dests = select_from_cluster(graph, "high_risk_jurisdiction", m, taken, rng, foreign)
    if len(dests) < m:
        dests += select_from_cluster(graph, ALL_CLUSTERS, m - len(dests), taken | set(dests), rng, foreign)
    if len(dests) < max(p.destinations[0], 1):
        raise NoOverseasDestinations(f"found {len(dests)} overseas destinations, need {p.destinations[0]}")
    m = len(dests)
    n = max(n, m)
    dest_accts = [_pick_account(graph, d, rng) for d in dests]

    lp = p.layering
    extra = layering_span(lp)
    lead = p.deposit_lead[1]
    span = graph.end_ts - graph.start_ts
    timing = p.timing
    if timing == "mixed":
        timing = "periodic" if rng.random() < 0.5 else "burst"
    period = None
    if timing == "periodic":
        def fits(k, per):
            return lead + (k - 1) * (per + p.epsilon) + extra <= span

        feasible = [per for per in p.periods if fits(n, per)]
        if not feasible:
            per = min(p.periods)
            k = n
            while k > max(p.transfers[0], m) and not fits(k, per):
                k -= 1
            if not fits(k, per):
                raise InvalidPeriod("no configured period fits the simulation window")
            n, feasible = k, [per]
        period = int(feasible[int(rng.integers(0, len(feasible)))])
        duration = (n - 1) * (period + p.epsilon) + extra
        t0 = _place(graph, rng, lead, duration)
        times = schedule_periodic(n, period, p.epsilon, t0, rng)
    else:
        t0 = _place(graph, rng, lead, p.burst_window + extra)
        times = schedule_burst(n, p.burst_window, t0, rng)

    assign = list(rng.permutation(m)) + list(rng.integers(0, m, size=n - m))
    amounts = _uniform_cents(rng, *p.amount, size=n)
    threshold = cfg.threshold_cents
    b = _Builder()
    fraud_owners = {src, *dests}
    for i in range(n):
        chain = apply_layering((src_acct, dest_accts[assign[i]], int(amounts[i]), times[i]), graph, lp, rng,
                               forbidden_owners=fraud_owners)
        leg = b.add_chain(chain, "transfer")
        for amt in _structured_deposits(rng, int(amounts[i]), threshold):
            lag = _ri(rng, p.deposit_lead)
            b.add(TransactionEdge(CASH_NODE_ID, src_acct, amt, times[i] - lag, "deposit", is_fraud=True),
                  "deposit", leg)

    params = _base_params(p, cfg)
    params.update(
        timing_used=timing,
        period_used=period,
        layering=_layering_dict(lp),
        countries=_country_map(graph, [src_acct] + dest_accts),
        high_risk_countries=_hrj_codes(cfg),
    )
    roles = {"source": [src], "source_account": [src_acct], "destinations": dests, "destination_accounts": dest_accts}
    return b.finish("overseas_transfers", instance_id, roles, params)


# -- rapid movement --------------------------------------------------------------


def inject_rapid_movement(graph, cfg, p, rng, exclude=frozenset(), instance_id=0):
    """Fan-in of sub-threshold wires, then cash withdrawals of 85-95% of the inflow."""
    def beneficiary_ok(node):
        return (node.node_type == "individual" and bool(graph.noncash_accounts(node.node_id))
                and node.node_id in graph.cash_account_of)

    ben = select_from_cluster(graph, HIGH_RISK_CLUSTERS, 1, exclude, rng, beneficiary_ok)
    if not ben:
        raise NoEligibleBeneficiary("no high-risk individual with a bank and a cash account is available")
    ben = ben[0]
    home = graph.nodes[ben].country_code
    ben_acct = graph.noncash_accounts(ben)[0]
    cash_acct = graph.cash_account_of[ben]

    def foreign(node):
        return node.country_code != home and bool(graph.noncash_accounts(node.node_id))

    n_send = _ri(rng, p.senders)
    senders = select_from_cluster(graph, ALL_CLUSTERS, n_send, set(exclude) | {ben}, rng, foreign)
    if len(senders) < p.senders[0]:
        raise PoolExhausted(f"found {len(senders)} overseas senders, need {p.senders[0]}")
    sender_accts = [_pick_account(graph, s, rng) for s in senders]

    lp = p.layering
    lead = p.layering_budget if lp.enabled else 0
    tail = p.inflow_window + p.phase_delay[1] + p.withdrawal_window
    t_in = _place(graph, rng, lead, tail)

    per_sender = rng.integers(p.inflows_per_sender[0], p.inflows_per_sender[1] + 1, size=len(senders))
    origin = np.repeat(np.arange(len(senders)), per_sender)
    origin = origin[rng.permutation(origin.size)]
    arrivals = schedule_burst(origin.size, p.inflow_window, t_in, rng)
    amounts = _uniform_cents(rng, *p.inflow_amount, size=origin.size)

    b = _Builder()
    total_in = 0
    fraud_owners = {ben, *senders}
    for k in range(origin.size):
        chain = apply_layering((sender_accts[origin[k]], ben_acct, int(amounts[k]), arrivals[k]), graph, lp, rng,
                               forbidden_owners=fraud_owners, anchor="end", max_total_delay=p.layering_budget)
        b.add_chain(chain, "inflow")
        total_in += chain[-1].amount

    lo, hi = p.outflow_ratio
    ratio = rng.uniform(lo, hi)
    total_out = int(round(ratio * total_in))
    total_out = min(max(total_out, math.ceil(lo * total_in)), math.floor(hi * total_in))
    k_out = _ri(rng, p.withdrawals)
    k_out = max(1, min(k_out, total_out))
    w = rng.dirichlet(np.ones(k_out))
    parts = np.maximum(np.floor(w * total_out).astype(np.int64), 1)
    parts[-1] = total_out - int(parts[:-1].sum())
    if parts[-1] < 1:
        parts = np.full(k_out, total_out // k_out, dtype=np.int64)
        parts[-1] += total_out - int(parts.sum())
    t_out = max(arrivals) + _ri(rng, p.phase_delay)
    out_times = schedule_burst(k_out, p.withdrawal_window, t_out, rng)
    for amt, t in zip(parts, out_times):
        b.add(TransactionEdge(ben_acct, cash_acct, int(amt), t, "withdrawal", is_fraud=True), "withdrawal")

    params = _base_params(p, cfg)
    params.update(layering=_layering_dict(lp), countries=_country_map(graph, [ben_acct] + sender_accts))
    roles = {
        "beneficiary": [ben], "beneficiary_account": [ben_acct], "cash_account": [cash_acct],
        "senders": senders, "sender_accounts": sender_accts,
    }
    return b.finish("rapid_movement", instance_id, roles, params)


# -- front business --------------------------------------------------------------


def inject_front_business(graph, cfg, p, rng, exclude=frozenset(), instance_id=0):
    """Large cash deposits into a business, each forwarded abroad within hours."""
    def business_ok(node):
        if node.node_type != "business":
            return False
        insts = {graph.nodes[a].institution_id for a in graph.noncash_accounts(node.node_id)}
        return len(insts) >= 2

    bus = select_from_cluster(graph, FRONT_BUSINESS_CLUSTERS, 1, exclude, rng, business_ok)
    if not bus:
        raise NoEligibleBusiness("no high-risk business with accounts at two institutions is available")
    bus = bus[0]
    home = graph.nodes[bus].country_code

    # one account per institution first, so deposits span several banks
    accts, seen = [], set()
    for a in graph.noncash_accounts(bus):
        inst = graph.nodes[a].institution_id
        if inst not in seen:
            seen.add(inst)
            accts.append(a)
    accts = [accts[i] for i in rng.permutation(len(accts))]

    def foreign_business(node):
        return (node.node_type == "business" and node.country_code != home
                and bool(graph.noncash_accounts(node.node_id)))

    m = _ri(rng, p.destinations)
    pool = select_from_cluster(graph, ALL_CLUSTERS, 8 * m, set(exclude) | {bus}, rng, foreign_business)
    pool = [pool[i] for i in rng.permutation(len(pool))]
    dests, countries = [], set()
    for d in pool:
        c = graph.nodes[d].country_code
        if c not in countries:
            countries.add(c)
            dests.append(d)
            if len(dests) == m:
                break
    if len(dests) < p.destinations[0]:
        raise InsufficientOverseasBusinesses(
            f"found overseas businesses in {len(dests)} distinct countries, need {p.destinations[0]}"
        )
    m = len(dests)
    dest_accts = [_pick_account(graph, d, rng) for d in dests]

    lp = p.layering
    k = max(_ri(rng, p.deposits), m)
    t0 = _place(graph, rng, 0, p.deposit_window + p.transfer_delay[1] + layering_span(lp))
    times = schedule_burst(k, p.deposit_window, t0, rng)
    amounts = _uniform_cents(rng, *p.deposit_amount, size=k)
    assign = list(rng.permutation(m)) + list(rng.integers(0, m, size=k - m))
    b = _Builder()
    fraud_owners = {bus, *dests}
    for j in range(k):
        acct = accts[j % len(accts)]
        dep = TransactionEdge(CASH_NODE_ID, acct, int(amounts[j]), times[j], "deposit", is_fraud=True)
        ratio = rng.uniform(*p.transfer_ratio)
        amt = min(max(int(round(ratio * amounts[j])), math.ceil(p.transfer_ratio[0] * amounts[j])),
                  math.floor(p.transfer_ratio[1] * amounts[j]))
        t = times[j] + _ri(rng, p.transfer_delay)
        chain = apply_layering((acct, dest_accts[assign[j]], amt, t), graph, lp, rng, forbidden_owners=fraud_owners)
        leg = b.add_chain(chain, "transfer")
        b.add(dep, "deposit", leg)

    params = _base_params(p, cfg)
    params.update(
        layering=_layering_dict(lp),
        countries=_country_map(graph, accts + dest_accts),
        institutions={a: graph.nodes[a].institution_id for a in accts},
    )
    roles = {"business": [bus], "business_accounts": accts, "destinations": dests, "destination_accounts": dest_accts}
    return b.finish("front_business", instance_id, roles, params)


# -- synchronised ----------------------------------------------------------------


def profile_key(node):
    """Opaque diversity key over (age group, occupation, country)."""
    raw = f"{node.age_group}|{node.occupation}|{node.country_code}"
    return hashlib.sha256(raw.encode()).hexdigest()[:12]


def inject_synchronised(graph, cfg, p, rng, exclude=frozenset(), instance_id=0):
    """Diverse coordinators take near-simultaneous cash deposits and forward them to one recipient."""
    n = _ri(rng, p.coordinators)
    cands = select_from_cluster(graph, ALL_CLUSTERS, 4 * n, exclude, rng, _is_individual_with_account(graph))
    cands = [cands[i] for i in rng.permutation(len(cands))]
    coords, keys = [], set()
    for c in cands:
        key = profile_key(graph.nodes[c])
        if key not in keys:
            keys.add(key)
            coords.append(c)
            if len(coords) == n:
                break
    if len(coords) < p.coordinators[0]:
        raise InsufficientCoordinators(f"found {len(coords)} diverse coordinators, need {p.coordinators[0]}")
    coord_accts = [_pick_account(graph, c, rng) for c in coords]

    taken = set(exclude) | set(coords)
    has_acct = _has_noncash(graph)
    recip = select_from_cluster(graph, "high_risk_jurisdiction", 1, taken, rng, has_acct)
    if not recip:
        recip = select_from_cluster(graph, ALL_CLUSTERS, 1, taken, rng, has_acct)
    if not recip:
        raise InsufficientCoordinators("no recipient available")
    recip = recip[0]
    recip_acct = _pick_account(graph, recip, rng)

    per = rng.integers(p.deposits_per_coordinator[0], p.deposits_per_coordinator[1] + 1, size=len(coords))
    owner_of_slot = np.repeat(np.arange(len(coords)), per)
    owner_of_slot = owner_of_slot[rng.permutation(owner_of_slot.size)]
    t0 = _place(graph, rng, 0, p.sync_window + p.transfer_delay[1])
    times = schedule_burst(owner_of_slot.size, p.sync_window, t0, rng)
    threshold = cfg.threshold_cents
    dep_amounts = rng.integers(math.ceil(0.70 * threshold), min(math.floor(0.9999 * threshold), threshold - 1) + 1,
                               size=owner_of_slot.size)
    b = _Builder()
    for c in range(len(coords)):
        slots = np.flatnonzero(owner_of_slot == c)
        total = 0
        for s in slots:
            b.add(TransactionEdge(CASH_NODE_ID, coord_accts[c], int(dep_amounts[s]), times[s], "deposit",
                                  is_fraud=True), "deposit", c)
            total += int(dep_amounts[s])
        lo, hi = p.transfer_ratio
        amt = min(max(int(round(rng.uniform(lo, hi) * total)), math.ceil(lo * total)), math.floor(hi * total))
        t = max(times[s] for s in slots) + _ri(rng, p.transfer_delay)
        b.add(TransactionEdge(coord_accts[c], recip_acct, amt, t, "transfer", is_fraud=True), "transfer", c)

    params = _base_params(p, cfg)
    params.update(
        layering=_layering_dict(p.layering),
        profile_keys=[profile_key(graph.nodes[c]) for c in coords],
        countries=_country_map(graph, [recip_acct]),
    )
    roles = {"coordinators": coords, "coordinator_accounts": coord_accts, "recipient": [recip],
             "recipient_account": [recip_acct]}
    return b.finish("synchronised", instance_id, roles, params)


# -- U-turn ----------------------------------------------------------------------


def _linked_accounts(graph, entity_id):
    accts = list(graph.noncash_accounts(entity_id))
    for bid in graph.businesses_of.get(entity_id, ()):
        accts.extend(graph.noncash_accounts(bid))
    return accts


def inject_u_turn(graph, cfg, p, rng, exclude=frozenset(), instance_id=0):
    """Funds leave through a mule chain and come back, net of fees, to another source account."""
    def source_ok(node):
        return node.node_type == "individual" and len(graph.noncash_accounts(node.node_id)) >= 1 \
            and len(_linked_accounts(graph, node.node_id)) >= 2

    src = select_from_cluster(graph, HIGH_RISK_CLUSTERS, 1, exclude, rng, source_ok)
    if not src:
        raise NoEligibleSource("no high-risk individual with two linked accounts is available")
    src = src[0]
    origin = graph.noncash_accounts(src)[0]
    others = [a for a in _linked_accounts(graph, src) if a != origin]
    ret = others[int(rng.integers(0, len(others)))]

    n_entities = _ri(rng, p.chain_entities)
    n_mid = n_entities - 1
    linked_owners = {src, *graph.businesses_of.get(src, ())}
    taken = set(exclude) | linked_owners

    def mule_ok(node):
        return node.node_type == "individual" and bool(graph.noncash_accounts(node.node_id))

    hrj = select_from_cluster(graph, "high_risk_jurisdiction", 1, taken, rng, _has_noncash(graph))
    if not hrj:
        raise PoolExhausted("no high-risk-jurisdiction account available for the turning point")
    mules = select_from_cluster(graph, MULE_CLUSTERS, n_mid - 1, taken | set(hrj), rng, mule_ok)
    if len(mules) < n_mid - 1:
        raise PoolExhausted(f"need {n_mid - 1} intermediaries, found {len(mules)}")
    mules = [mules[i] for i in rng.permutation(len(mules))] + hrj
    mule_accts = [_pick_account(graph, m_, rng) for m_ in mules]

    hop_hi = p.hop_delay[1]
    t0 = _place(graph, rng, 0, n_mid * hop_hi)
    delays = rng.integers(p.hop_delay[0], hop_hi + 1, size=n_mid)
    times = [t0] + [t0 + int(s) for s in np.cumsum(delays)]

    initial = int(_uniform_cents(rng, *p.initial_amount))
    amounts = [initial]
    fees = rng.uniform(p.fee[0], p.fee[1], size=n_mid - 1)
    for f in fees:
        amounts.append(int(round(amounts[-1] * (1.0 - f))))
    remaining = amounts[-1]
    lo, hi = p.return_ratio
    # the return stays within [lo, hi] both of the initial and of the remaining amount
    r_hi = max(lo, min(hi, hi * remaining / initial))
    ret_amt = int(round(rng.uniform(lo, r_hi) * initial))
    ret_amt = min(max(ret_amt, math.ceil(lo * initial), math.ceil(lo * remaining)),
                  math.floor(hi * initial), math.floor(hi * remaining))
    amounts.append(ret_amt)

    path = [origin] + mule_accts + [ret]
    b = _Builder()
    for k in range(n_mid + 1):
        role = "outbound" if k == 0 else ("return" if k == n_mid else "chain_hop")
        b.add(TransactionEdge(path[k], path[k + 1], amounts[k], times[k], "transfer", is_fraud=True), role, 0, k)

    params = _base_params(p, cfg)
    params.update(
        layering=_layering_dict(p.layering),
        countries=_country_map(graph, path),
        high_risk_countries=_hrj_codes(cfg),
        source_linked_accounts=sorted(_linked_accounts(graph, src)),
    )
    roles = {"source": [src], "origin_account": [origin], "return_account": [ret], "intermediaries": mules,
             "chain_accounts": path}
    return b.finish("u_turn", instance_id, roles, params)


INJECTORS = {
    "overseas_transfers": inject_overseas_transfers,
    "rapid_movement": inject_rapid_movement,
    "front_business": inject_front_business,
    "synchronised": inject_synchronised,
    "u_turn": inject_u_turn,
}
