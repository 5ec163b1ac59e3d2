import pytest

from amlgraph.assemble import run
from amlgraph.config import TYPOLOGIES, graph_config_from_dict, pattern_config_from_dict


def desk_graph(seed=42, **overrides):
    raw = {
        "master_seed": seed,
        "individual_count": 1000,
        "simulation_start": "2025-01-01",
        "simulation_end": "2025-03-31",
        "target_illicit_ratio": 0.001,
    }
    raw.update(overrides)
    return graph_config_from_dict(raw)


def patterns(per_typology=2, **extra):
    raw = {t: {"instance_count": per_typology} for t in TYPOLOGIES}
    raw.update(extra)
    return pattern_config_from_dict(raw)


@pytest.fixture(scope="session")
def desk_export(tmp_path_factory):
    """One desk-scale run shared by read-only tests: (dataset, manifest, out_dir)."""
    out = tmp_path_factory.mktemp("desk")
    ds, manifest = run(desk_graph(), patterns(2), out)
    return ds, manifest, out


@pytest.fixture(scope="session")
def small_world():
    """Population plus injected patterns without background, for fast pattern tests."""
    from amlgraph.patterns import inject_all
    from amlgraph.population import generate_population
    from amlgraph.rng import POPULATION, substream

    g = desk_graph(seed=5, individual_count=3000)
    p = patterns(10, strict=True)
    graph = generate_population(g, g.risk_weights, substream(5, POPULATION))
    instances, warnings = inject_all(graph, g, p, 5)
    return g, p, graph, instances


# acceptance verdict lines, printed once at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
