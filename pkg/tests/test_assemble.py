import json

import numpy as np
import polars as pl
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amlgraph.assemble import (
    EDGE_COLUMNS,
    MASKED_ATTRIBUTES,
    NODE_COLUMNS,
    export_dataset,
    export_pattern_metadata,
    format_amounts,
    merge_and_finalize,
    run,
    sha256_file,
    temporal_split,
)
from amlgraph.errors import TooFewEdges
from amlgraph.model import EntityNode, Graph, TransactionEdge, insert_transaction

from .conftest import desk_graph, patterns
from .oracle import inter_arrival, split_counts


def tiny_graph():
    g = Graph(0, 10**6)
    for i in range(3):
        g.add_node(EntityNode(node_id=f"A{i}", node_type="account", country_code="NL"))
    return g


def tx_columns(ts):
    n = len(ts)
    return {"relation": np.zeros(n, np.int8), "edge_id": np.arange(n), "ts": np.asarray(ts, np.int64)}


# -- merge ---------------------------------------------------------------------------


def test_delta_first_and_gap():
    g = tiny_graph()
    insert_transaction(g, TransactionEdge("A0", "A1", 100, 1000, "payment"))
    insert_transaction(g, TransactionEdge("A0", "A2", 100, 4600, "payment"))
    cols = merge_and_finalize(g, [])
    assert cols["delta"].tolist() == [0, 3600]


def test_merge_sorts_and_renumbers():
    g = tiny_graph()
    late = TransactionEdge("A1", "A0", 5, 900, "transfer")
    insert_transaction(g, late)

    class Inst:
        transactions = [late]

    bg = {"src": np.array([0, 0, 2]), "dst": np.array([1, 2, 0]), "relation": 0,
          "amount": np.array([1, 2, 3]), "ts": np.array([500, 500, 100]), "category": np.array([0, 0, 1]),
          "fraud": False}
    cols = merge_and_finalize(g, [Inst], [("x", bg)])
    assert cols["ts"].tolist() == [100, 500, 500, 900]
    assert cols["edge_id"].tolist() == [0, 1, 2, 3]
    # stable: insertion order breaks the tie at t=500
    assert cols["dst"][1:3].tolist() == [1, 2]
    assert late.edge_id == 3
    expected = inter_arrival(zip(cols["src"].tolist(), cols["ts"].tolist()))
    assert cols["delta"].tolist() == expected


# -- split ---------------------------------------------------------------------------


def test_split_ten():
    s = temporal_split(tx_columns(range(10)))
    assert s.counts == (6, 2, 2)
    assert (s.t1, s.t2) == (6, 8)


def test_split_equal_timestamps():
    s = temporal_split(tx_columns([7] * 10))
    assert s.counts == (6, 2, 2)
    assert s.ids("train").tolist() == list(range(6))


def test_split_too_few():
    with pytest.raises(TooFewEdges):
        temporal_split(tx_columns(range(4)))


def test_split_bad_fractions():
    with pytest.raises(ValueError):
        temporal_split(tx_columns(range(10)), (0.5, 0.5, 0.5))


@settings(max_examples=200, deadline=None)
@given(ts=st.lists(st.integers(0, 50), min_size=5, max_size=400).map(sorted))
def test_split_partition_and_bounds(ts):
    s = temporal_split(tx_columns(ts))
    n = len(ts)
    assert s.counts == split_counts(n)
    ids = np.concatenate([s.ids(k) for k in ("train", "val", "test")])
    assert sorted(ids.tolist()) == list(range(n))
    t = np.asarray(ts)
    tr, va, te = (t[s.ids(k)] for k in ("train", "val", "test"))
    assert tr.max() <= s.t1
    if va.size:
        assert s.t1 <= va.min() and va.max() <= s.t2
    if te.size:
        assert s.t2 <= te.min()


def test_split_ignores_ownership_edges():
    cols = tx_columns(range(12))
    cols["relation"][:2] = 1
    s = temporal_split(cols)
    assert sum(s.counts) == 10 and 0 not in s.edge_ids and 1 not in s.edge_ids


# -- export --------------------------------------------------------------------------


def test_amount_rendering():
    assert format_amounts(np.array([0, 5, 100, 123456, 1_000_000])).to_list() == \
        ["0.00", "0.05", "1.00", "1234.56", "10000.00"]


def test_schema(desk_export):
    _, _, out = desk_export
    nodes = pl.read_csv(out / "nodes.csv", n_rows=5)
    edges = pl.read_csv(out / "edges.csv", n_rows=5)
    assert tuple(nodes.columns) == NODE_COLUMNS
    assert tuple(edges.columns) == EDGE_COLUMNS
    assert "is_fraudulent" in nodes.columns and "is_fraud" in edges.columns
    assert not set(nodes.columns + edges.columns) & set(MASKED_ATTRIBUTES)
    assert "risk_score" not in nodes.columns


def test_manifest_hashes_recompute(desk_export):
    _, manifest, out = desk_export
    on_disk = json.loads((out / "manifest.json").read_text())
    for name, digest in on_disk["files"].items():
        assert sha256_file(out / name) == digest
    assert on_disk["seed"] == 42 == manifest.seed


def test_reexport_byte_identical(desk_export, tmp_path):
    ds, manifest, _ = desk_export
    again = export_dataset(ds, temporal_split(ds.columns), tmp_path)
    assert again.files == manifest.files


def test_splits_file_partitions_transactions(desk_export):
    ds, _, out = desk_export
    splits = pl.read_csv(out / "splits.csv")
    tx_ids = ds.columns["edge_id"][ds.transaction_mask]
    assert splits["edge_id"].n_unique() == splits.height == tx_ids.size
    assert set(splits["edge_id"].to_list()) == set(tx_ids.tolist())


def test_pattern_records(desk_export):
    ds, _, out = desk_export
    records = json.loads((out / "patterns.json").read_text())
    assert len(records) == ds.pattern_config.total_instances() == len(ds.instances)
    edges = pl.read_csv(out / "edges.csv").sort("edge_id")
    ts = edges["timestamp"].to_numpy()
    fraud = edges["is_fraud"].to_numpy()
    for r in records:
        assert fraud[r["edge_ids"]].all()
        if r["typology"] == "u_turn":
            chain = [eid for _, eid in sorted(zip(r["edge_hops"], r["edge_ids"]))]
            assert (np.diff(ts[chain]) > 0).all()


def test_zero_instances_json(tmp_path):
    path = export_pattern_metadata([], tmp_path / "patterns.json")
    assert json.loads(path.read_text()) == []


def test_delta_matches_oracle_on_export(desk_export):
    ds, _, _ = desk_export
    c = ds.columns
    tx = ds.transaction_mask
    expected = inter_arrival(zip(c["src"][tx].tolist(), c["ts"][tx].tolist()))
    assert c["delta"][tx].tolist() == expected
    assert (c["delta"][~tx] == 0).all()


def test_json_lines_optional(tmp_path):
    g = desk_graph(individual_count=200)
    _, m = run(g, patterns(0), tmp_path / "a", formats=("csv", "json"))
    assert "edges.jsonl" in m.files and (tmp_path / "a" / "nodes.jsonl").exists()
    _, m = run(g, patterns(0), tmp_path / "b")
    assert "edges.jsonl" not in m.files
    first = json.loads((tmp_path / "a" / "edges.jsonl").read_text().splitlines()[0])
    assert set(first) == set(EDGE_COLUMNS)


def test_zero_instance_run(tmp_path):
    ds, m = run(desk_graph(individual_count=200), patterns(0), tmp_path)
    assert m.stats["fraud_edges"] == 0 and m.stats["fraudulent_nodes"] == 0
    assert json.loads((tmp_path / "patterns.json").read_text()) == []
    assert any("no fraud" in w for w in m.stats["warnings"])
