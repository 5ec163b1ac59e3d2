"""Structural checks for injected instances and whole-dataset statistics.

Each typology has a range table (``constraint_table``) built from the
instance's own resolved parameters, and an observation function that
extracts the matching measured values from its transactions.  A value passes
when ``lo - slack <= value <= hi + slack``; the slack only absorbs rounding to
minor units.
"""

from __future__ import annotations

import hashlib
import json
import math
import tempfile
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoError, UnknownTypology
from .model import CATEGORIES

INF = math.inf


@dataclass(frozen=True)
class Constraint:
    name: str
    lo: float
    hi: float
    description: str = ""


@dataclass
class InstanceReport:
    typology: str
    instance_id: int
    passed: bool
    violations: list = field(default_factory=list)


def _c(name, lo, hi, description=""):
    return Constraint(name, float(lo), float(hi), description)


def _layering_constraints(params):
    lp = params["layering"]
    if not lp["enabled"]:
        return [_c("layering_hops", 0, 0, "no intermediary hops when layering is off")]
    return [
        _c("layering_hops", lp["h_min"], lp["h_max"], "intermediary count per layered transfer"),
        _c("layering_decay", lp["decay_min"], lp["decay_max"], "per-hop retained fraction"),
        _c("layering_delay", lp["hop_delay_min"], lp["hop_delay_max"], "seconds between hops"),
    ]


def constraint_table(typology, params):
    """Return the ``{name: Constraint}`` table for one instance."""
    p = params
    thr = p["threshold"] / 100
    below = (thr - 0.01)
    rows = [
        _c("chronological", 1, 1, "transactions listed in time order"),
        _c("chain_continuity", 1, 1, "each hop starts where the previous one ended"),
        _c("strictly_decreasing", 1, 1, "amounts fall along every hop chain"),
    ]
    if typology == "overseas_transfers":
        rows += [
            _c("transfer_count", *p["transfers"]),
            _c("destination_count", *p["destinations"]),
            _c("destinations_distinct", 1, 1),
            _c("destinations_overseas", 1, 1),
            _c("transfer_amount", *p["amount"]),
            _c("deposit_amount", 0.01, below, "cash deposits stay under the reporting threshold"),
            _c("deposit_coverage", 1, INF, "deposits cover the transfer they fund"),
            _c("deposit_lead", *p["deposit_lead"]),
        ]
        if p["timing_used"] == "periodic":
            per, eps = p["period_used"], p["epsilon"]
            rows.append(_c("transfer_gap", per - eps, per + eps, "periodic spacing"))
            rows.append(_c("period_allowed", 1, 1))
        else:
            rows.append(_c("transfer_span", 0, p["burst_window"], "burst window"))
        rows += _layering_constraints(p)
    elif typology == "rapid_movement":
        rows += [
            _c("sender_count", *p["senders"]),
            _c("inflow_amount", *p["inflow_amount"]),
            _c("inflow_arrival_amount", 0.01, below, "inflows stay under the reporting threshold"),
            _c("inflow_span", 0, p["inflow_window"]),
            _c("phase_delay", *p["phase_delay"]),
            _c("withdrawal_count", *p["withdrawals"]),
            _c("withdrawal_span", 0, p["withdrawal_window"]),
            _c("withdrawal_to_own_cash", 1, 1),
            _c("outflow_ratio", *p["outflow_ratio"]),
            _c("total_span", 0, p["max_duration"] - 1, "instance finishes before the maximum duration"),
            _c("layering_budget", 0, p["layering_budget"]),
        ]
        rows += _layering_constraints(p)
    elif typology == "front_business":
        rows += [
            _c("deposit_count", *p["deposits"]),
            _c("deposit_amount", *p["deposit_amount"]),
            _c("deposit_span", 0, p["deposit_window"]),
            _c("transfer_delay", *p["transfer_delay"]),
            _c("pair_ratio", *p["transfer_ratio"]),
            _c("total_ratio", *p["transfer_ratio"]),
            _c("destination_count", *p["destinations"]),
            _c("destination_countries_distinct", 1, 1),
            _c("destinations_overseas", 1, 1),
            _c("institutions_used", 2, INF, "deposits land at two or more banks"),
        ]
        rows += _layering_constraints(p)
    elif typology == "synchronised":
        rows += [
            _c("coordinator_count", *p["coordinators"]),
            _c("deposits_per_coordinator", *p["deposits_per_coordinator"]),
            _c("deposit_span", 0, p["sync_window"]),
            _c("deposit_amount", 0.01, below),
            _c("transfer_delay", *p["transfer_delay"]),
            _c("coordinator_ratio", *p["transfer_ratio"]),
            _c("coordinators_diverse", 1, 1),
            _c("single_recipient", 1, 1),
            _c("layering_hops", 0, 0),
        ]
    elif typology == "u_turn":
        rows += [
            _c("chain_entities", *p["chain_entities"]),
            _c("initial_amount", *p["initial_amount"]),
            _c("hop_fee", *p["fee"]),
            _c("hop_delay", *p["hop_delay"]),
            _c("return_ratio_initial", *p["return_ratio"]),
            _c("return_ratio_remaining", *p["return_ratio"]),
            _c("return_to_source", 1, 1),
            _c("high_risk_on_path", 1, INF),
        ]
    else:
        raise UnknownTypology(typology)
    return {r.name: r for r in rows}


# -- observations ------------------------------------------------------------------


def _legs(inst):
    legs = defaultdict(list)
    for e, leg, hop, role in zip(inst.transactions, inst.edge_legs, inst.edge_hops, inst.edge_roles):
        if leg >= 0 and role not in ("deposit",):
            legs[leg].append((hop, e))
    return {k: [e for _, e in sorted(v, key=lambda x: x[0])] for k, v in legs.items()}


def _deposits_by_leg(inst):
    out = defaultdict(list)
    for e, leg, role in zip(inst.transactions, inst.edge_legs, inst.edge_roles):
        if role == "deposit":
            out[leg].append(e)
    return out


def _flag(ok):
    return [(1.0 if ok else 0.0, 0.0)]


def _common(inst, chains):
    ts = [e.timestamp for e in inst.transactions]
    obs = {"chronological": _flag(all(a <= b for a, b in zip(ts, ts[1:])))}
    cont, dec = True, True
    for chain in chains:
        for a, b in zip(chain, chain[1:]):
            cont &= a.target_id == b.source_id and a.timestamp <= b.timestamp
            dec &= b.amount < a.amount
    obs["chain_continuity"] = _flag(cont)
    obs["strictly_decreasing"] = _flag(dec)
    return obs


def _layering_obs(chains, params):
    lp = params["layering"]
    obs = {"layering_hops": [(len(c) - 1, 0.0) for c in chains]}
    if lp["enabled"]:
        decay, delay = [], []
        for c in chains:
            for a, b in zip(c, c[1:]):
                decay.append((b.amount / a.amount, 0.5 / a.amount))
                d = b.timestamp - a.timestamp
                delay.append((d, 0.0))
        obs["layering_decay"] = decay
        obs["layering_delay"] = delay
    return obs


def _obs_overseas(inst):
    p = inst.params_used
    legs = _legs(inst)
    chains = [legs[k] for k in sorted(legs)]
    deps = _deposits_by_leg(inst)
    countries = p["countries"]
    src_acct = inst.role_bindings["source_account"][0]
    home = countries[src_acct]
    finals = [c[-1].target_id for c in chains]
    firsts = [c[0] for c in chains]
    obs = _common(inst, chains)
    obs.update(
        transfer_count=[(len(chains), 0.0)],
        destination_count=[(len(set(finals)), 0.0)],
        destinations_distinct=_flag(len(set(inst.role_bindings["destination_accounts"]))
                                    == len(inst.role_bindings["destination_accounts"])),
        destinations_overseas=_flag(all(countries[f] != home for f in finals)),
        transfer_amount=[(e.amount / 100, 0.0) for e in firsts],
        deposit_amount=[(d.amount / 100, 0.0) for ds in deps.values() for d in ds],
        deposit_coverage=[(sum(d.amount for d in deps.get(k, [])) / legs[k][0].amount, 0.0) for k in sorted(legs)],
        deposit_lead=[(legs[k][0].timestamp - d.timestamp, 0.0) for k in sorted(legs) for d in deps.get(k, [])],
    )
    t = sorted(e.timestamp for e in firsts)
    if p["timing_used"] == "periodic":
        obs["transfer_gap"] = [(b - a, 0.0) for a, b in zip(t, t[1:])]
        obs["period_allowed"] = _flag(p["period_used"] in p["periods"])
    else:
        obs["transfer_span"] = [(t[-1] - t[0], 0.0)]
    obs.update(_layering_obs(chains, p))
    return obs


def _obs_rapid(inst):
    p = inst.params_used
    legs = _legs(inst)
    chains = [legs[k] for k in sorted(legs)]
    ben_acct = inst.role_bindings["beneficiary_account"][0]
    cash = inst.role_bindings["cash_account"][0]
    arrivals = [c[-1] for c in chains]
    outs = [e for e, r in zip(inst.transactions, inst.edge_roles) if r == "withdrawal"]
    ts = [e.timestamp for e in inst.transactions]
    a_ts = [e.timestamp for e in arrivals]
    o_ts = [e.timestamp for e in outs]
    total_in = sum(e.amount for e in arrivals)
    total_out = sum(e.amount for e in outs)
    obs = _common(inst, chains)
    obs.update(
        sender_count=[(len({c[0].source_id for c in chains}), 0.0)],
        inflow_amount=[(c[0].amount / 100, 0.0) for c in chains],
        inflow_arrival_amount=[(e.amount / 100, 0.0) for e in arrivals],
        inflow_span=[(max(a_ts) - min(a_ts), 0.0)],
        phase_delay=[(min(o_ts) - max(a_ts), 0.0)] if o_ts else [(-1, 0.0)],
        withdrawal_count=[(len(outs), 0.0)],
        withdrawal_span=[(max(o_ts) - min(o_ts), 0.0)] if o_ts else [],
        withdrawal_to_own_cash=_flag(all(e.source_id == ben_acct and e.target_id == cash for e in outs)
                                     and all(e.target_id == ben_acct for e in arrivals)),
        outflow_ratio=[(total_out / total_in if total_in else 0.0, 0.5 / max(total_in, 1))],
        total_span=[(max(ts) - min(ts), 0.0)],
        layering_budget=[(c[-1].timestamp - c[0].timestamp, 0.0) for c in chains],
    )
    obs.update(_layering_obs(chains, p))
    return obs


def _obs_front(inst):
    p = inst.params_used
    legs = _legs(inst)
    chains = [legs[k] for k in sorted(legs)]
    deps = _deposits_by_leg(inst)
    countries = p["countries"]
    home = countries[inst.role_bindings["business_accounts"][0]]
    dep_list = [deps[k][0] for k in sorted(legs) if deps.get(k)]
    finals = [legs[k][-1].target_id for k in sorted(legs)]
    dest_accts = inst.role_bindings["destination_accounts"]
    dest_countries = [countries[a] for a in dest_accts]
    pairs = [(deps[k][0], legs[k][0]) for k in sorted(legs) if deps.get(k)]
    d_ts = [d.timestamp for d in dep_list]
    total_dep = sum(d.amount for d in dep_list)
    total_tr = sum(t.amount for _, t in pairs)
    insts = {p["institutions"][d.target_id] for d in dep_list}
    obs = _common(inst, chains)
    obs.update(
        deposit_count=[(len(dep_list), 0.0)],
        deposit_amount=[(d.amount / 100, 0.0) for d in dep_list],
        deposit_span=[(max(d_ts) - min(d_ts), 0.0)],
        transfer_delay=[(t.timestamp - d.timestamp, 0.0) for d, t in pairs],
        pair_ratio=[(t.amount / d.amount, 0.5 / d.amount) for d, t in pairs],
        total_ratio=[(total_tr / total_dep, 0.5 / total_dep)],
        destination_count=[(len(set(finals)), 0.0)],
        destination_countries_distinct=_flag(len(set(dest_countries)) == len(dest_countries)),
        destinations_overseas=_flag(all(countries[f] != home for f in finals)),
        institutions_used=[(len(insts) if len(dep_list) >= 2 else 2, 0.0)],
    )
    obs.update(_layering_obs(chains, p))
    return obs


def _obs_sync(inst):
    p = inst.params_used
    deps = _deposits_by_leg(inst)
    transfers = {leg: e for e, leg, r in zip(inst.transactions, inst.edge_legs, inst.edge_roles) if r == "transfer"}
    d_all = [d for ds in deps.values() for d in ds]
    d_ts = [d.timestamp for d in d_all]
    keys = p["profile_keys"]
    recips = {t.target_id for t in transfers.values()}
    obs = _common(inst, [])
    obs.update(
        coordinator_count=[(len(transfers), 0.0)],
        deposits_per_coordinator=[(len(deps.get(k, [])), 0.0) for k in sorted(transfers)],
        deposit_span=[(max(d_ts) - min(d_ts), 0.0)],
        deposit_amount=[(d.amount / 100, 0.0) for d in d_all],
        transfer_delay=[(transfers[k].timestamp - max(d.timestamp for d in deps[k]), 0.0) for k in sorted(transfers)],
        coordinator_ratio=[
            (transfers[k].amount / sum(d.amount for d in deps[k]), 0.5 / sum(d.amount for d in deps[k]))
            for k in sorted(transfers)
        ],
        coordinators_diverse=_flag(len(set(keys)) == len(keys)),
        single_recipient=_flag(len(recips) == 1),
        layering_hops=[(sum(1 for r in inst.edge_roles if r == "layer_hop"), 0.0)],
    )
    return obs


def _obs_uturn(inst):
    p = inst.params_used
    chain = [e for _, e in sorted(zip(inst.edge_hops, inst.transactions), key=lambda x: x[0])]
    countries = p["countries"]
    hrj = set(p["high_risk_countries"])
    origin = inst.role_bindings["origin_account"][0]
    initial = chain[0].amount
    ret = chain[-1]
    remaining = chain[-2].amount
    fees = [(1 - b.amount / a.amount, 0.5 / a.amount) for a, b in zip(chain[:-1], chain[1:-1])]
    obs = _common(inst, [chain])
    obs.update(
        chain_entities=[(len(chain), 0.0)],
        initial_amount=[(initial / 100, 0.0)],
        hop_fee=fees,
        hop_delay=[(b.timestamp - a.timestamp, 0.0) for a, b in zip(chain, chain[1:])],
        return_ratio_initial=[(ret.amount / initial, 0.5 / initial)],
        return_ratio_remaining=[(ret.amount / remaining, 0.5 / remaining)],
        return_to_source=_flag(chain[0].source_id == origin and ret.target_id != origin
                               and ret.target_id in p["source_linked_accounts"]),
        high_risk_on_path=[(sum(1 for e in chain[1:] if countries[e.source_id] in hrj), 0.0)],
    )
    return obs


OBSERVERS = {
    "overseas_transfers": _obs_overseas,
    "rapid_movement": _obs_rapid,
    "front_business": _obs_front,
    "synchronised": _obs_sync,
    "u_turn": _obs_uturn,
}


def observe(inst):
    if inst.typology not in OBSERVERS:
        raise UnknownTypology(inst.typology)
    return OBSERVERS[inst.typology](inst)


def check(table, observations):
    """Compare observations to a range table; returns a list of violations."""
    violations = []
    for name, c in table.items():
        values = observations.get(name)
        if values is None:
            violations.append({"constraint": name, "observed": None, "required": [c.lo, c.hi],
                               "detail": "not observed"})
            continue
        for value, slack in values:
            if not (c.lo - slack - 1e-12 <= value <= c.hi + slack + 1e-12):
                violations.append({"constraint": name, "observed": value, "required": [c.lo, c.hi]})
    return violations


def validate_instance(instance, cfg=None):
    """Evaluate every constraint for ``instance``.  ``cfg`` is accepted for symmetry; params come from the instance."""
    table = constraint_table(instance.typology, instance.params_used)
    violations = check(table, observe(instance))
    return InstanceReport(instance.typology, instance.instance_id, not violations, violations)


def validate_instances(instances, cfg=None):
    return [validate_instance(inst, cfg) for inst in instances]


# -- dataset statistics --------------------------------------------------------------


def dataset_stats(relation, category, amount, fraud, src, dst, node_fraud, structuring_range=(7000.0, 9999.99)):
    """Whole-dataset statistics over transaction edges.

    ``relation`` uses 0 for transactions, ``category`` the index into
    ``CATEGORIES`` and ``amount`` integer minor units.  ``node_fraud`` is the
    node label array indexed like ``src``/``dst``.
    """
    tx = np.asarray(relation) == 0
    cat = np.asarray(category)[tx]
    amt = np.asarray(amount)[tx]
    fr = np.asarray(fraud, dtype=bool)[tx]
    n = int(tx.sum())
    n_fraud = int(fr.sum())
    ratio = n_fraud / n if n else 0.0
    counts = np.bincount(cat[cat >= 0], minlength=len(CATEGORIES)) if n else np.zeros(len(CATEGORIES), int)
    shares = {c: (float(counts[i]) / n if n else 0.0) for i, c in enumerate(CATEGORIES)}
    medians = {}
    for i, c in enumerate(CATEGORIES):
        sel = amt[cat == i]
        medians[c] = float(np.median(sel)) / 100 if sel.size else None
    lo = int(round(structuring_range[0] * 100))
    hi = int(round(structuring_range[1] * 100))
    struct = float(np.mean((amt >= lo) & (amt <= hi))) if n else 0.0
    nf = np.asarray(node_fraud, dtype=bool)
    both = nf[np.asarray(src)[tx]] & nf[np.asarray(dst)[tx]]
    return {
        "transaction_edges": n,
        "fraud_edges": n_fraud,
        "illicit_ratio": ratio,
        "imbalance": (1 - ratio) / ratio if ratio else None,
        "type_shares": shares,
        "median_amounts": medians,
        "structuring_share": struct,
        "both_endpoints_fraud_fraction": float(both.mean()) if n else 0.0,
    }


def stats_for_dataset(ds):
    c = ds.columns
    node_fraud = np.array([n.is_fraudulent for n in ds.graph.node_list], dtype=bool)
    st = ds.graph_config.background.structuring
    return dataset_stats(c["relation"], c["category"], c["amount"], c["fraud"], c["src"], c["dst"], node_fraud,
                         (st.low, st.high))


# -- reading an export directory -----------------------------------------------------


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise IoError(f"cannot read {path}: {e}") from e


def _read_edges(export_dir):
    import polars as pl

    path = Path(export_dir) / "edges.csv"
    try:
        df = pl.read_csv(path, schema_overrides={"amount": pl.Utf8, "category": pl.Utf8})
    except (OSError, pl.exceptions.PolarsError) as e:
        raise IoError(f"cannot read {path}: {e}") from e
    parts = df["amount"].str.split_exact(".", 1)
    whole = parts.struct.field("field_0").cast(pl.Int64)
    frac = parts.struct.field("field_1").fill_null("0").str.pad_end(2, "0").str.slice(0, 2).cast(pl.Int64)
    return df.with_columns((whole * 100 + frac).alias("cents"))


def _read_nodes(export_dir):
    import polars as pl

    path = Path(export_dir) / "nodes.csv"
    try:
        return pl.read_csv(path, columns=["node_id", "is_fraudulent"])
    except (OSError, pl.exceptions.PolarsError) as e:
        raise IoError(f"cannot read {path}: {e}") from e


def load_instances(export_dir, edges=None):
    """Rebuild pattern instances from ``patterns.json`` and ``edges.csv``.

    Amounts and timestamps come from the edge file, so edits to it are
    visible to validation.
    """
    from .model import TransactionEdge
    from .patterns import PatternInstance

    records = _read_json(Path(export_dir) / "patterns.json")
    if edges is None:
        edges = _read_edges(export_dir)
    wanted = sorted({i for r in records for i in r["edge_ids"]})
    sub = edges.filter(edges["edge_id"].is_in(wanted)).select(
        "edge_id", "source_id", "target_id", "cents", "timestamp", "category", "is_fraud", "relation",
        "time_since_prev")
    by_id = {row[0]: row for row in sub.iter_rows()}
    out = []
    for r in records:
        txs = []
        for eid in r["edge_ids"]:
            if eid not in by_id:
                raise IoError(f"patterns.json references missing edge {eid}")
            _, s, t, cents, ts, cat, fr, rel, delta = by_id[eid]
            txs.append(TransactionEdge(s, t, int(cents), int(ts), cat, bool(fr), rel, int(delta), int(eid)))
        out.append(PatternInstance(r["typology"], r["instance_id"], r["role_bindings"], txs, r["params_used"],
                                   r["edge_roles"], r["edge_legs"], r["edge_hops"]))
    return out


def stats_for_export(export_dir):
    edges = _read_edges(export_dir)
    nodes = _read_nodes(export_dir)
    ids = nodes["node_id"].to_list()
    index = {nid: i for i, nid in enumerate(ids)}
    cat_code = {c: i for i, c in enumerate(CATEGORIES)}
    src = np.array([index[s] for s in edges["source_id"].to_list()], dtype=np.int64)
    dst = np.array([index[s] for s in edges["target_id"].to_list()], dtype=np.int64)
    relation = (edges["relation"] != "transaction").cast(int).to_numpy()
    category = np.array([cat_code.get(c, -1) if c else -1 for c in edges["category"].to_list()], dtype=np.int64)
    return dataset_stats(relation, category, edges["cents"].to_numpy(), edges["is_fraud"].to_numpy(),
                         src, dst, nodes["is_fraudulent"].to_numpy())


# -- reports ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    instances: list
    stats: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.instances)

    @property
    def failures(self):
        return [r for r in self.instances if not r.passed]

    def to_dict(self):
        per = defaultdict(lambda: {"instances": 0, "passed": 0})
        for r in self.instances:
            per[r.typology]["instances"] += 1
            per[r.typology]["passed"] += int(r.passed)
        return _finite({
            "passed": self.passed,
            "summary": dict(per),
            "instances": [asdict(r) for r in self.instances],
            "stats": self.stats,
        })

    def to_text(self):
        lines = []
        d = self.to_dict()
        for typ, s in d["summary"].items():
            lines.append(f"{typ:20s} {s['passed']}/{s['instances']} passed")
        for r in self.failures:
            for v in r.violations:
                lines.append(f"FAIL {r.typology}#{r.instance_id} {v['constraint']}: observed {v['observed']}, "
                             f"required {v['required']}")
        if self.stats:
            lines.append(f"illicit ratio {self.stats['illicit_ratio']:.6f}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def validate_export(export_dir, write_report=True):
    """Validate every instance of an export directory; writes ``report.json``."""
    edges = _read_edges(export_dir)
    report = ValidationReport(validate_instances(load_instances(export_dir, edges)), stats_for_export(export_dir))
    if write_report:
        path = Path(export_dir) / "report.json"
        try:
            path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write {path}: {e}") from e
    return report


# -- determinism ---------------------------------------------------------------------


@dataclass
class DeterminismResult:
    identical: bool
    hashes_a: dict
    hashes_b: dict
    differing: list


def check_determinism(graph_config, pattern_config, seed=None, threads=(1, 1), seeds=None, workdir=None):
    """Generate twice in-process and compare the hashes of the data files.

    ``graph_config``/``pattern_config`` may be config objects or YAML paths.
    ``seeds`` overrides ``(seed, seed)``; ``threads`` gives the thread count
    of each run.
    """
    from .assemble import DATA_FILES, run
    from .config import load_graph_config, load_pattern_config

    if isinstance(graph_config, (str, Path)):
        graph_config = load_graph_config(graph_config)
    if isinstance(pattern_config, (str, Path)):
        pattern_config = load_pattern_config(pattern_config)
    seeds = seeds or (seed, seed)
    hashes = []
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        for k in range(2):
            _, manifest = run(graph_config, pattern_config, Path(tmp) / f"run{k}", seed=seeds[k],
                              threads=threads[k], formats=("csv",))
            hashes.append({f: manifest.files[f] for f in DATA_FILES})
    differing = [f for f in DATA_FILES if hashes[0][f] != hashes[1][f]]
    return DeterminismResult(not differing, hashes[0], hashes[1], differing)


def fingerprint_files(paths):
    """SHA-256 per path, for ad-hoc comparisons."""
    out = {}
    for p in paths:
        h = hashlib.sha256(Path(p).read_bytes())
        out[str(p)] = h.hexdigest()
    return out
