import json
import shutil

import pytest
import yaml

from amlgraph.cli import main

from .test_validate import tamper_edge


@pytest.fixture(scope="module")
def configs(tmp_path_factory):
    d = tmp_path_factory.mktemp("cfg")
    g, p = d / "g.yaml", d / "p.yaml"
    g.write_text(yaml.safe_dump({"master_seed": 7, "individual_count": 400, "simulation_start": "2025-01-01",
                                 "simulation_end": "2025-02-28", "target_illicit_ratio": 0.002}))
    p.write_text(yaml.safe_dump({t: {"instance_count": 1} for t in
                                 ("overseas_transfers", "rapid_movement", "front_business", "synchronised",
                                  "u_turn")}))
    return g, p


@pytest.fixture(scope="module")
def generated(configs, tmp_path_factory):
    g, p = configs
    out = tmp_path_factory.mktemp("out")
    assert main(["generate", "--graph-config", str(g), "--patterns-config", str(p), "--out", str(out),
                 "--seed", "99", "--format", "csv,json"]) == 0
    return out


def test_generate_records_seed_override(generated):
    manifest = json.loads((generated / "manifest.json").read_text())
    assert manifest["seed"] == 99
    assert (generated / "edges.jsonl").exists()


def test_validate_ok(generated, capsys):
    assert main(["validate", str(generated)]) == 0
    assert "PASS" in capsys.readouterr().out


def test_stats_ratio_matches_manifest(generated, capsys):
    assert main(["stats", str(generated)]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["illicit_ratio"] == pytest.approx(stats["manifest_illicit_ratio"])


def test_validate_tampered_exits_nonzero(generated, tmp_path):
    copy = tmp_path / "t"
    shutil.copytree(generated, copy)
    records = json.loads((copy / "patterns.json").read_text())
    fb = next(r for r in records if r["typology"] == "front_business")
    tamper_edge(copy, fb["edge_ids"][fb["edge_roles"].index("deposit")], "1.00")
    assert main(["validate", str(copy)]) == 1


def test_check_determinism(configs, capsys):
    g, p = configs
    assert main(["check-determinism", "--graph-config", str(g), "--patterns-config", str(p)]) == 0
    assert "identical" in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, configs, capsys):
    _, p = configs
    bad = tmp_path / "bad.yaml"
    bad.write_text("individual_count: 10\n")
    assert main(["generate", "--graph-config", str(bad), "--patterns-config", str(p), "--out",
                 str(tmp_path / "o")]) == 1
    assert "MissingSeed" in capsys.readouterr().err


def test_strict_flag_fails_on_impossible_population(tmp_path, capsys):
    g = tmp_path / "g.yaml"
    g.write_text(yaml.safe_dump({"master_seed": 1, "individual_count": 3}))
    p = tmp_path / "p.yaml"
    p.write_text(yaml.safe_dump({"synchronised": {"instance_count": 5}}))
    assert main(["generate", "--graph-config", str(g), "--patterns-config", str(p), "--out",
                 str(tmp_path / "o"), "--strict"]) == 1
    assert "PatternInjectionFailed" in capsys.readouterr().err


def test_usage_errors_exit_two(configs, tmp_path):
    g, p = configs
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["generate", "--graph-config", str(g), "--patterns-config", str(p), "--out", str(tmp_path),
              "--format", "parquet"])
    assert e.value.code == 2
