"""Graph data structures, risk scoring and the cluster index."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DanglingEndpoint, OutOfWindow, UnknownCluster, UnsupportedEntityType

NODE_TYPES = ("individual", "business", "account", "institution", "cash")
RELATIONS = ("transaction", "ownership")
CATEGORIES = ("payment", "transfer", "deposit", "withdrawal", "salary")
CAT_CODE = {c: i for i, c in enumerate(CATEGORIES)}
NO_CATEGORY = -1
CASH_NODE_ID = "CASH"

ID_PREFIX = {"individual": "I", "business": "B", "account": "A", "institution": "F"}

LEGIT = "legit"
SINGLE_CLUSTERS = (
    "high_risk_age",
    "high_risk_occupation",
    "high_risk_jurisdiction",
    "cash_intensive_business",
    "very_small_company",
    "young_adult_18_24",
    "elderly_65_plus",
)
COMPOSITE_CLUSTERS = (
    "young_or_elderly_and_jurisdiction",
    "occupation_and_jurisdiction",
    "cash_intensive_and_very_small",
)
FRAUD_ONLY = "fraud_unclustered"
CLUSTER_LABELS = (LEGIT,) + SINGLE_CLUSTERS + COMPOSITE_CLUSTERS + (FRAUD_ONLY,)
HIGH_RISK_CLUSTERS = SINGLE_CLUSTERS + COMPOSITE_CLUSTERS


def make_id(node_type, counter):
    return f"{ID_PREFIX[node_type]}{counter:06d}"


@dataclass(slots=True)
class EntityNode:
    node_id: str
    node_type: str
    country_code: str
    is_fraudulent: bool = False
    risk_score: float = 0.0
    # risk indicators, fixed at creation
    high_risk_jurisdiction: bool = False
    # individual
    name: str | None = None
    age_group: str | None = None
    occupation: str | None = None
    gender: str | None = None
    high_risk_age: bool = False
    high_risk_occupation: bool = False
    young_adult: bool = False
    elderly: bool = False
    # business
    business_category: str | None = None
    incorporation_year: int | None = None
    number_of_employees: int | None = None
    is_high_risk_category: bool = False
    very_small: bool = False
    owner_of_business: str | None = None
    # account
    account_category: str | None = None
    currency: str | None = None
    owner_id: str | None = None
    institution_id: str | None = None
    creation_year: int | None = None
    # institution
    institution_name: str | None = None
    index: int = -1


@dataclass(slots=True)
class TransactionEdge:
    """One edge; ``amount`` is in integer minor units (cents)."""

    source_id: str
    target_id: str
    amount: int
    timestamp: int
    category: str | None
    is_fraud: bool = False
    relation: str = "transaction"
    time_since_prev: int = 0
    edge_id: int = -1

    @property
    def amount_value(self):
        return self.amount / 100


def risk_score(entity, weights):
    """Base weight plus the weights of every risk factor present, capped."""
    w = weights
    if entity.node_type == "individual":
        s = w.individual_base
        s += w.high_risk_age * entity.high_risk_age
        s += w.high_risk_occupation * entity.high_risk_occupation
    elif entity.node_type == "business":
        s = w.business_base
        s += w.cash_intensive_category * entity.is_high_risk_category
        s += w.very_small_company * entity.very_small
    else:
        raise UnsupportedEntityType(f"risk scores apply to individuals and businesses, not {entity.node_type}")
    s += w.high_risk_jurisdiction * entity.high_risk_jurisdiction
    return min(s, w.cap)


def assign_clusters(entity):
    if entity.node_type not in ("individual", "business"):
        raise UnsupportedEntityType(f"clusters apply to individuals and businesses, not {entity.node_type}")
    e = entity
    out = set()
    if not e.is_fraudulent:
        out.add(LEGIT)
    flags = {
        "high_risk_age": e.high_risk_age,
        "high_risk_occupation": e.high_risk_occupation,
        "high_risk_jurisdiction": e.high_risk_jurisdiction,
        "cash_intensive_business": e.is_high_risk_category,
        "very_small_company": e.very_small,
        "young_adult_18_24": e.young_adult,
        "elderly_65_plus": e.elderly,
        "young_or_elderly_and_jurisdiction": (e.young_adult or e.elderly) and e.high_risk_jurisdiction,
        "occupation_and_jurisdiction": e.high_risk_occupation and e.high_risk_jurisdiction,
        "cash_intensive_and_very_small": e.is_high_risk_category and e.very_small,
    }
    out.update(k for k, v in flags.items() if v)
    if not out:
        # a fraudulent entity with no risk factor still belongs somewhere
        out.add(FRAUD_ONLY)
    return out


class EdgeStore:
    """Append-only columnar edge storage.

    Single edges are buffered in Python lists; bulk generators append whole
    numpy columns.  ``columns()`` concatenates everything in insertion order.
    """

    _DTYPES = (
        ("src", np.int64),
        ("dst", np.int64),
        ("relation", np.int8),
        ("amount", np.int64),
        ("ts", np.int64),
        ("category", np.int8),
        ("fraud", np.bool_),
    )

    def __init__(self):
        self._chunks = []
        self._buf = {k: [] for k, _ in self._DTYPES}
        self.count = 0

    def append(self, src, dst, relation, amount, ts, category, fraud):
        b = self._buf
        b["src"].append(src)
        b["dst"].append(dst)
        b["relation"].append(relation)
        b["amount"].append(amount)
        b["ts"].append(ts)
        b["category"].append(category)
        b["fraud"].append(fraud)
        self.count += 1
        return self.count - 1

    def _flush(self):
        if self._buf["src"]:
            self._chunks.append({k: np.asarray(self._buf[k], dtype=d) for k, d in self._DTYPES})
            self._buf = {k: [] for k, _ in self._DTYPES}

    def extend(self, cols):
        n = len(cols["src"])
        if n == 0:
            return np.arange(self.count, self.count, dtype=np.int64)
        self._flush()
        chunk = {}
        for k, d in self._DTYPES:
            v = cols[k]
            chunk[k] = np.full(n, v, dtype=d) if np.isscalar(v) else np.asarray(v, dtype=d)
        self._chunks.append(chunk)
        first = self.count
        self.count += n
        return np.arange(first, self.count, dtype=np.int64)

    def columns(self):
        self._flush()
        if not self._chunks:
            return {k: np.empty(0, dtype=d) for k, d in self._DTYPES}
        if len(self._chunks) > 1:
            merged = {k: np.concatenate([c[k] for c in self._chunks]) for k, _ in self._DTYPES}
            self._chunks = [merged]
        return dict(self._chunks[0])

    def __len__(self):
        return self.count


class Graph:
    def __init__(self, start_ts, end_ts, currency="EUR"):
        self.start_ts = int(start_ts)
        self.end_ts = int(end_ts)
        self.currency = currency
        self.nodes = {}
        self.node_list = []
        self.clusters = {}
        self.edges = EdgeStore()
        self.accounts_of = {}
        self.cash_account_of = {}
        self.businesses_of = {}
        self._canon_cache = {}
        self.meta = {}
        self.population_summary = None

    # -- nodes -----------------------------------------------------------------
    def add_node(self, node):
        if node.node_type not in NODE_TYPES:
            raise UnsupportedEntityType(node.node_type)
        node.index = len(self.node_list)
        self.nodes[node.node_id] = node
        self.node_list.append(node)
        return node

    def index_of(self, node_id):
        try:
            return self.nodes[node_id].index
        except KeyError:
            raise DanglingEndpoint(f"unknown node {node_id!r}") from None

    def entities(self):
        return [n for n in self.node_list if n.node_type in ("individual", "business")]

    def owner_entity(self, account_id):
        return self.nodes[self.nodes[account_id].owner_id]

    def noncash_accounts(self, owner_id):
        return [a for a in self.accounts_of.get(owner_id, ()) if self.nodes[a].account_category != "cash"]

    # -- clusters --------------------------------------------------------------
    def index_clusters(self, entity):
        for label in assign_clusters(entity):
            self.clusters.setdefault(label, set()).add(entity.node_id)
        self._canon_cache.clear()

    def remove_from_cluster(self, label, node_id):
        members = self.clusters.get(label)
        if members is not None and node_id in members:
            members.discard(node_id)
            self._canon_cache.clear()

    def clusters_of(self, node_id):
        return {k for k, v in self.clusters.items() if node_id in v}

    def canonical_members(self, labels):
        """Members of the union of ``labels`` in (risk desc, node_id asc) order."""
        key = tuple(sorted(labels))
        cached = self._canon_cache.get(key)
        if cached is None:
            members = set()
            for label in key:
                if label not in self.clusters:
                    if label in CLUSTER_LABELS:
                        continue
                    raise UnknownCluster(label)
                members |= self.clusters[label]
            ids = sorted(members, key=lambda i: (-self.nodes[i].risk_score, i))
            risks = np.array([self.nodes[i].risk_score for i in ids], dtype=np.float64)
            cached = (ids, risks)
            self._canon_cache[key] = cached
        return cached

    # -- fraud marking ---------------------------------------------------------
    def mark_fraudulent(self, node_id):
        node = self.nodes[node_id]
        if node.node_type == "cash":
            return
        node.is_fraudulent = True
        if node.node_type == "account":
            self.mark_fraudulent(node.owner_id)
        elif node.node_type in ("individual", "business"):
            self.remove_from_cluster(LEGIT, node_id)
            self.index_clusters(node)


def select_from_cluster(graph, cluster, k, exclude=(), rng=None, eligible=None):
    """Draw up to ``k`` distinct entities from a cluster (or a union of clusters).

    Draws are proportional to risk score (uniform when every score is 0) and
    the result is returned in canonical (risk desc, node_id asc) order.
    """
    labels = (cluster,) if isinstance(cluster, str) else tuple(cluster)
    for label in labels:
        if label not in CLUSTER_LABELS and label not in graph.clusters:
            raise UnknownCluster(label)
    if k <= 0:
        return []
    ids, risks = graph.canonical_members(labels)
    exclude = set(exclude)
    keep = [i for i, nid in enumerate(ids) if nid not in exclude and (eligible is None or eligible(graph.nodes[nid]))]
    if len(keep) <= k:
        return [ids[i] for i in keep]
    w = risks[keep]
    total = w.sum()
    p = None if total <= 0 else w / total
    picked = np.sort(rng.choice(len(keep), size=k, replace=False, p=p))
    return [ids[keep[i]] for i in picked]


def insert_transaction(graph, edge):
    """Append ``edge`` to the graph and return its edge id."""
    src = graph.index_of(edge.source_id)
    dst = graph.index_of(edge.target_id)
    if not graph.start_ts <= edge.timestamp <= graph.end_ts:
        raise OutOfWindow(f"timestamp {edge.timestamp} outside [{graph.start_ts}, {graph.end_ts}]")
    rel = RELATIONS.index(edge.relation)
    cat = NO_CATEGORY if edge.category is None else CAT_CODE[edge.category]
    edge.edge_id = graph.edges.append(src, dst, rel, int(edge.amount), int(edge.timestamp), cat, bool(edge.is_fraud))
    return edge.edge_id


@dataclass
class PopulationSummary:
    counts: dict
    cluster_sizes: dict
    seed_fingerprint: str = ""
    extra: dict = field(default_factory=dict)
