"""Merge, finalize, split and export a generated graph.

Output layout of an export directory::

    nodes.csv      one row per node, masked attributes removed
    edges.csv      one row per edge in chronological order
    splits.csv     edge_id -> train / val / test (transaction edges only)
    patterns.json  one record per injected pattern instance
    manifest.json  seed, config hashes, counts, achieved ratio, file hashes
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import polars as pl

from . import __version__
from ._kernels import inter_arrival
from .background import generate_background
from .config import (
    TYPOLOGIES,
    config_fingerprint,
    graph_config_to_dict,
    pattern_config_to_dict,
    validate_combined,
)
from .errors import IoError, TooFewEdges
from .model import CATEGORIES, RELATIONS
from .patterns import inject_all
from .population import generate_population
from .rng import POPULATION, substream

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

NODE_COLUMNS = (
    "node_id", "node_type", "country_code", "account_category", "currency", "owner_id", "institution_id",
    "age_group", "gender", "incorporation_year", "number_of_employees", "creation_year", "is_fraudulent",
)
EDGE_COLUMNS = (
    "edge_id", "source_id", "target_id", "relation", "amount", "timestamp", "time_since_prev", "category",
    "is_fraud",
)
# generation-only attributes that never leave the process
MASKED_ATTRIBUTES = (
    "risk_score", "name", "occupation", "business_category", "institution_name", "owner_of_business",
    "high_risk_jurisdiction", "high_risk_age", "high_risk_occupation", "young_adult", "elderly",
    "is_high_risk_category", "very_small", "cluster", "clusters",
)
SPLIT_NAMES = ("train", "val", "test")
DATA_FILES = ("nodes.csv", "edges.csv", "splits.csv", "patterns.json")


@dataclass
class SplitIndex:
    """Chronological split over transaction edges.

    ``edge_ids`` lists transaction edge ids in chronological order and
    ``labels`` holds 0/1/2 (train/val/test) aligned with it.
    """

    t1: int
    t2: int
    edge_ids: np.ndarray
    labels: np.ndarray

    @property
    def counts(self):
        return tuple(int(c) for c in np.bincount(self.labels, minlength=3))

    def ids(self, name):
        return self.edge_ids[self.labels == SPLIT_NAMES.index(name)]


@dataclass
class ExportManifest:
    seed: int
    files: dict
    config_fingerprints: dict
    stats: dict
    schema_version: int = SCHEMA_VERSION
    generator_version: str = __version__

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class Dataset:
    """A finalized graph: sorted edge columns plus everything needed for export."""

    graph: object
    columns: dict
    instances: list
    seed: int
    graph_config: object
    pattern_config: object
    background: object = None
    warnings: list = field(default_factory=list)

    @property
    def transaction_mask(self):
        return self.columns["relation"] == RELATIONS.index("transaction")


# -- merge ---------------------------------------------------------------------------


def merge_and_finalize(graph, instances, background_parts=()):
    """Merge background edges into ``graph``, sort and compute inter-arrival deltas.

    Edges are ordered by ``(timestamp, insertion id)`` and renumbered so that
    ``edge_id`` equals the chronological rank.  Instance edges are updated in
    place with their final ids and deltas.  Returns the sorted columns.
    """
    for _, part in background_parts:
        graph.edges.extend(part)
    cols = graph.edges.columns()
    n = cols["src"].shape[0]
    order = np.lexsort((np.arange(n), cols["ts"]))
    out = {k: v[order] for k, v in cols.items()}
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, dtype=np.int64)
    out["edge_id"] = np.arange(n, dtype=np.int64)

    delta = np.zeros(n, dtype=np.int64)
    tx = out["relation"] == RELATIONS.index("transaction")
    delta[tx] = inter_arrival(out["src"][tx], out["ts"][tx], len(graph.node_list))
    out["delta"] = delta

    for inst in instances:
        for e in inst.transactions:
            e.edge_id = int(rank[e.edge_id])
            e.time_since_prev = int(delta[e.edge_id])
    return out


# -- split ---------------------------------------------------------------------------


def _split_sizes(n, fractions):
    # exact for decimal fractions such as 0.6 / 0.2
    n_train = int(math.floor(n * fractions[0] + 1e-9))
    n_val = int(math.floor(n * fractions[1] + 1e-9))
    return n_train, n_val, n - n_train - n_val


def temporal_split(columns, fractions=(0.6, 0.2, 0.2)):
    """Split transaction edges chronologically with an edge-id tie-break.

    ``columns`` must be sorted by ``(ts, edge_id)`` as returned by
    ``merge_and_finalize``.  ``t1`` and ``t2`` are the timestamps of the first
    validation and first test edge.
    """
    if abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise ValueError(f"fractions must be non-negative and sum to 1, got {fractions}")
    tx = columns["relation"] == RELATIONS.index("transaction")
    ids = columns["edge_id"][tx]
    ts = columns["ts"][tx]
    n = ids.shape[0]
    if n < 5:
        raise TooFewEdges(f"need at least 5 transaction edges to split, have {n}")
    n_train, n_val, n_test = _split_sizes(n, fractions)
    labels = np.repeat(np.array([0, 1, 2], dtype=np.int8), [n_train, n_val, n_test])
    t1 = int(ts[n_train]) if n_train < n else int(ts[-1])
    t2 = int(ts[n_train + n_val]) if n_train + n_val < n else int(ts[-1])
    return SplitIndex(t1, t2, ids, labels)


# -- export --------------------------------------------------------------------------


def _atomic_write(path, writer):
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        os.close(fd)
        try:
            writer(tmp)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def _write_text(path, text):
    def w(tmp):
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    _atomic_write(path, w)


def _write_frame(path, frame, fmt="csv"):
    if fmt == "csv":
        _atomic_write(path, lambda tmp: frame.write_csv(tmp, line_terminator="\n"))
    else:
        _atomic_write(path, lambda tmp: frame.write_ndjson(tmp))


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def node_frame(graph):
    """Exported node table; generation-only attributes are dropped."""
    data = {c: [] for c in NODE_COLUMNS}
    for n in graph.node_list:
        for c in NODE_COLUMNS:
            v = getattr(n, c)
            data[c].append(None if v == "" else v)
    schema = {c: pl.Utf8 for c in NODE_COLUMNS}
    schema.update(incorporation_year=pl.Int64, number_of_employees=pl.Int64, creation_year=pl.Int64,
                  is_fraudulent=pl.Boolean)
    return pl.DataFrame(data, schema=schema)


def format_amounts(cents):
    """Render integer minor units as fixed two-decimal strings."""
    s = pl.Series("amount", cents, dtype=pl.Int64)
    return (
        (s // 100).cast(pl.Utf8) + "." + (s % 100).cast(pl.Utf8).str.zfill(2)
    ).alias("amount")


def edge_frame(graph, columns):
    ids = pl.Series("node_id", [n.node_id for n in graph.node_list], dtype=pl.Utf8)
    rel = pl.Series("relation", list(RELATIONS), dtype=pl.Utf8)
    cat = pl.Series("category", list(CATEGORIES), dtype=pl.Utf8)
    c = columns["category"].astype(np.int64)
    has_cat = c >= 0
    category = cat.gather(np.where(has_cat, c, 0))
    category = pl.select(pl.when(pl.Series(has_cat)).then(category).otherwise(None)).to_series()
    return pl.DataFrame([
        pl.Series("edge_id", columns["edge_id"], dtype=pl.Int64),
        ids.gather(columns["src"]).alias("source_id"),
        ids.gather(columns["dst"]).alias("target_id"),
        rel.gather(columns["relation"].astype(np.int64)).alias("relation"),
        format_amounts(columns["amount"]),
        pl.Series("timestamp", columns["ts"], dtype=pl.Int64),
        pl.Series("time_since_prev", columns["delta"], dtype=pl.Int64),
        category.alias("category"),
        pl.Series("is_fraud", columns["fraud"], dtype=pl.Boolean),
    ])


def split_frame(split):
    names = pl.Series("split", list(SPLIT_NAMES), dtype=pl.Utf8)
    return pl.DataFrame([
        pl.Series("edge_id", split.edge_ids, dtype=pl.Int64),
        names.gather(split.labels.astype(np.int64)),
    ])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def pattern_records(instances):
    """One JSON-ready record per instance, in generation order."""
    out = []
    for inst in instances:
        out.append({
            "typology": inst.typology,
            "instance_id": inst.instance_id,
            "role_bindings": _jsonable(inst.role_bindings),
            "edge_ids": [int(e.edge_id) for e in inst.transactions],
            "edge_roles": list(inst.edge_roles),
            "edge_legs": [int(x) for x in inst.edge_legs],
            "edge_hops": [int(x) for x in inst.edge_hops],
            "params_used": _jsonable(inst.params_used),
        })
    return out


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=True) + "\n"


def export_pattern_metadata(instances, path):
    """Write ``patterns.json``; zero instances give ``[]``."""
    _write_text(path, _dumps(pattern_records(instances)))
    return Path(path)


def dataset_counts(dataset):
    graph, cols = dataset.graph, dataset.columns
    tx = dataset.transaction_mask
    n_tx = int(tx.sum())
    n_fraud = int((cols["fraud"] & tx).sum())
    by_type = {}
    for n in graph.node_list:
        by_type[n.node_type] = by_type.get(n.node_type, 0) + 1
    per_typology = {t: 0 for t in TYPOLOGIES}
    for inst in dataset.instances:
        per_typology[inst.typology] += 1
    return {
        "nodes": len(graph.node_list),
        "nodes_by_type": by_type,
        "fraudulent_nodes": sum(1 for n in graph.node_list if n.is_fraudulent),
        "edges": int(cols["src"].shape[0]),
        "transaction_edges": n_tx,
        "ownership_edges": int(cols["src"].shape[0]) - n_tx,
        "fraud_edges": n_fraud,
        "instances": per_typology,
        "achieved_illicit_ratio": n_fraud / n_tx if n_tx else 0.0,
    }


def export_dataset(dataset, split, out_dir, formats=None):
    """Write every output file under ``out_dir`` and return the manifest."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoError(f"cannot create {out}: {e}") from e
    if formats is None:
        formats = tuple(k for k, on in dataset.graph_config.formats().items() if on)
    nodes = node_frame(dataset.graph)
    edges = edge_frame(dataset.graph, dataset.columns)
    # CSV is the base contract and is always written; JSON lines are optional extras
    _write_frame(out / "nodes.csv", nodes)
    _write_frame(out / "edges.csv", edges)
    written = ["nodes.csv", "edges.csv"]
    if "json" in formats:
        _write_frame(out / "nodes.jsonl", nodes, "json")
        _write_frame(out / "edges.jsonl", edges, "json")
        written += ["nodes.jsonl", "edges.jsonl"]
    _write_frame(out / "splits.csv", split_frame(split))
    export_pattern_metadata(dataset.instances, out / "patterns.json")
    written += ["splits.csv", "patterns.json"]

    stats = dataset_counts(dataset)
    stats["target_illicit_ratio"] = dataset.graph_config.target_illicit_ratio
    stats["split"] = {"counts": dict(zip(SPLIT_NAMES, split.counts)), "t1": split.t1, "t2": split.t2}
    if dataset.background is not None:
        b = dataset.background
        stats["background"] = {"counts": b.counts, "capped": b.budget.capped,
                               "effective_daily_rate": b.budget.effective_daily_rate}
    stats["warnings"] = list(dataset.warnings)
    manifest = ExportManifest(
        seed=dataset.seed,
        files={name: sha256_file(out / name) for name in sorted(written)},
        config_fingerprints={
            "graph": config_fingerprint(graph_config_to_dict(dataset.graph_config)),
            "patterns": config_fingerprint(pattern_config_to_dict(dataset.pattern_config)),
        },
        stats=_jsonable(stats),
    )
    _write_text(out / "manifest.json", _dumps(manifest.to_dict()))
    return manifest


# -- pipeline ------------------------------------------------------------------------


def generate(graph_config, pattern_config, seed=None, threads=1):
    """Run population, patterns, background and merge; returns a ``Dataset``."""
    if seed is not None and seed != graph_config.master_seed:
        graph_config = dataclasses.replace(graph_config, master_seed=int(seed))
    seed = graph_config.master_seed
    warnings = validate_combined(graph_config, pattern_config)
    for w in warnings:
        log.warning(w)
    graph = generate_population(graph_config, graph_config.risk_weights, substream(seed, POPULATION))
    instances, inj_warnings = inject_all(graph, graph_config, pattern_config, seed)
    warnings += inj_warnings
    fraud_edges = sum(len(i.transactions) for i in instances)
    bg = generate_background(graph, graph_config, fraud_edges, seed, threads=threads)
    warnings += bg.budget.warnings
    columns = merge_and_finalize(graph, instances, bg.parts)
    return Dataset(graph, columns, instances, seed, graph_config, pattern_config, bg, warnings)


def run(graph_config, pattern_config, out_dir, seed=None, threads=1, formats=None):
    """Generate, split and export in one call."""
    ds = generate(graph_config, pattern_config, seed=seed, threads=threads)
    split = temporal_split(ds.columns)
    return ds, export_dataset(ds, split, out_dir, formats)
