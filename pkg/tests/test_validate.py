import json
import shutil

import numpy as np
import pytest

from amlgraph.errors import IoError, UnknownTypology
from amlgraph.validate import (
    check_determinism,
    constraint_table,
    dataset_stats,
    load_instances,
    stats_for_dataset,
    stats_for_export,
    validate_export,
)

from .conftest import desk_graph, patterns


def tamper_edge(out_dir, edge_id, amount):
    """Rewrite one edge's amount in edges.csv (rows are ordered by edge_id)."""
    path = out_dir / "edges.csv"
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    col = header.index("amount")
    fields = lines[edge_id + 1].split(",")
    assert int(fields[0]) == edge_id
    fields[col] = amount
    lines[edge_id + 1] = ",".join(fields)
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def export_copy(desk_export, tmp_path):
    _, _, out = desk_export
    dst = tmp_path / "copy"
    shutil.copytree(out, dst)
    return dst


def test_stats_all_legit():
    n = 1000
    s = dataset_stats(np.zeros(n), np.zeros(n, int), np.full(n, 100), np.zeros(n, bool), np.zeros(n, int),
                      np.ones(n, int), np.zeros(2, bool))
    assert s["illicit_ratio"] == 0 and s["imbalance"] is None
    assert s["type_shares"]["payment"] == 1.0


def test_imbalance():
    # [PAPER] 0.10% illicit corresponds to an imbalance near 959:1 after rounding; exact 999 at 1/1000
    n = 1000
    fraud = np.zeros(n, bool)
    fraud[0] = True
    s = dataset_stats(np.zeros(n), np.zeros(n, int), np.full(n, 100), fraud, np.zeros(n, int), np.ones(n, int),
                      np.zeros(2, bool))
    assert s["illicit_ratio"] == 0.001
    assert s["imbalance"] == pytest.approx(999)


def test_ownership_edges_not_counted():
    rel = np.array([0, 0, 1, 1])
    s = dataset_stats(rel, np.array([0, 1, -1, -1]), np.array([1, 2, 0, 0]), np.zeros(4, bool),
                      np.zeros(4, int), np.ones(4, int), np.zeros(2, bool))
    assert s["transaction_edges"] == 2


def test_export_validates(desk_export):
    _, _, out = desk_export
    report = validate_export(out, write_report=False)
    assert report.passed and len(report.instances) == 10
    assert "PASS" in report.to_text()


def test_export_stats_match_memory(desk_export):
    ds, manifest, out = desk_export
    a, b = stats_for_dataset(ds), stats_for_export(out)
    assert a["fraud_edges"] == b["fraud_edges"] == manifest.stats["fraud_edges"]
    assert a["illicit_ratio"] == pytest.approx(b["illicit_ratio"])
    assert a["type_shares"] == pytest.approx(b["type_shares"])
    assert a["structuring_share"] == pytest.approx(b["structuring_share"])


def test_loaded_instances_match_memory(desk_export):
    ds, _, out = desk_export
    loaded = load_instances(out)
    assert [i.fingerprint() for i in loaded] == [i.fingerprint() for i in ds.instances]


def test_tampered_export_fails(export_copy):
    records = json.loads((export_copy / "patterns.json").read_text())
    fb = next(r for r in records if r["typology"] == "front_business")
    k = fb["edge_roles"].index("deposit")
    tamper_edge(export_copy, fb["edge_ids"][k], "99999.00")
    report = validate_export(export_copy)
    assert not report.passed
    assert any(v["constraint"] == "deposit_amount" for r in report.failures for v in r.violations)
    assert json.loads((export_copy / "report.json").read_text())["passed"] is False


def test_missing_edge_reference(export_copy):
    records = json.loads((export_copy / "patterns.json").read_text())
    records[0]["edge_ids"].append(10**9)
    (export_copy / "patterns.json").write_text(json.dumps(records))
    with pytest.raises(IoError):
        load_instances(export_copy)


def test_unreadable_export(tmp_path):
    with pytest.raises(IoError):
        validate_export(tmp_path)


def test_unknown_typology():
    with pytest.raises(UnknownTypology):
        constraint_table("ponzi", {"threshold": 1_000_000})


def test_determinism_same_seed():
    g = desk_graph(individual_count=300)
    res = check_determinism(g, patterns(1), threads=(1, 4))
    assert res.identical and not res.differing


def test_determinism_different_seeds():
    g = desk_graph(individual_count=300)
    res = check_determinism(g, patterns(1), seeds=(1, 2))
    assert not res.identical and "edges.csv" in res.differing
