import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amlgraph.config import LayeringParams
from amlgraph.errors import InvalidPeriod, InvalidWindow, PoolExhausted
from amlgraph.model import Graph
from amlgraph.patterns.scheduling import TemporalProfile, apply_layering, schedule_burst, schedule_periodic
from amlgraph.population import generate_population
from amlgraph.rng import POPULATION, substream

from .conftest import desk_graph
from .oracle import decayed

DAY, HOUR = 86400, 3600


def rng(seed=0):
    return np.random.default_rng(seed)


def test_burst_single():
    assert schedule_burst(1, 60, 1000, rng()) == [1000]


def test_burst_day_window():
    ts = schedule_burst(5, 24 * HOUR, 0, rng())
    assert max(ts) - min(ts) <= 86400 and ts == sorted(ts)


def test_burst_repeatable():
    assert schedule_burst(100, HOUR, 5, rng(3)) == schedule_burst(100, HOUR, 5, rng(3))


def test_burst_jittered():
    ts = schedule_burst(20, DAY, 0, rng(1))
    assert len(set(np.diff(ts).tolist())) > 1


@pytest.mark.parametrize("n, window", [(0, 10), (3, 0), (3, -5)])
def test_burst_invalid(n, window):
    with pytest.raises(InvalidWindow):
        schedule_burst(n, window, 0, rng())


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 300), window=st.integers(1, 30 * DAY), t0=st.integers(0, 2**31), seed=st.integers(0, 2**32))
def test_burst_property(n, window, t0, seed):
    ts = schedule_burst(n, window, t0, rng(seed))
    assert len(ts) == n and ts == sorted(ts) and ts[-1] - ts[0] <= window and ts[0] == t0


def test_periodic_zero_jitter():
    assert schedule_periodic(4, 7 * DAY, 0, 0, rng()) == [0, 7 * DAY, 14 * DAY, 21 * DAY]


def test_periodic_jitter_bounds():
    ts = schedule_periodic(10, 7 * DAY, 6 * HOUR, 0, rng())
    gaps = np.diff(ts)
    assert ((gaps >= 6.75 * DAY) & (gaps <= 7.25 * DAY)).all()


def test_periodic_single():
    assert schedule_periodic(1, DAY, 0, 42, rng()) == [42]


@pytest.mark.parametrize("period, eps", [(10, 10), (10, 20), (0, 0), (10, -1)])
def test_periodic_invalid(period, eps):
    with pytest.raises(InvalidPeriod):
        schedule_periodic(3, period, eps, 0, rng())


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 200), period=st.integers(2, 40 * DAY), frac=st.floats(0, 0.99), seed=st.integers(0, 2**32))
def test_periodic_property(n, period, frac, seed):
    eps = int(period * frac)
    if eps >= period:
        eps = period - 1
    ts = schedule_periodic(n, period, eps, 0, rng(seed))
    gaps = np.diff(ts)
    assert len(ts) == n and (np.abs(gaps - period) <= eps).all() and ts == sorted(ts)


def test_profile_invariants():
    with pytest.raises(InvalidWindow):
        TemporalProfile("burst", burst_window=0)
    with pytest.raises(InvalidPeriod):
        TemporalProfile("periodic", period=5, epsilon=5)
    TemporalProfile("periodic", period=5, epsilon=0)


@pytest.fixture(scope="module")
def graph():
    g = desk_graph(individual_count=300)
    return generate_population(g, g.risk_weights, substream(1, POPULATION))


def _two_accounts(graph):
    a = graph.noncash_accounts("I000001")[0]
    b = graph.noncash_accounts("I000002")[0]
    return a, b


def test_layering_disabled_is_identity(graph):
    a, b = _two_accounts(graph)
    edges = apply_layering((a, b, 123_45, 1000), graph, LayeringParams(enabled=False), rng())
    assert len(edges) == 1
    e = edges[0]
    assert (e.source_id, e.target_id, e.amount, e.timestamp) == (a, b, 123_45, 1000)


def test_layering_fixed_decay_amounts(graph):
    # [DERIVED] cumulative product oracle, in currency units
    a, b = _two_accounts(graph)
    lp = LayeringParams(h_min=2, h_max=2, decay_min=0.99, decay_max=0.99)
    edges = apply_layering((a, b, 1_000_000, 0), graph, lp, rng())
    assert [e.amount / 100 for e in edges] == decayed(10000.00, [0.99, 0.99]) == [10000.0, 9900.0, 9801.0]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), amount=st.integers(100, 10**9))
def test_layering_properties(graph, seed, amount):
    a, b = _two_accounts(graph)
    lp = LayeringParams()
    edges = apply_layering((a, b, amount, 0), graph, lp, rng(seed))
    h = len(edges) - 1
    assert 2 <= h <= 5
    assert edges[0].source_id == a and edges[-1].target_id == b
    for x, y in zip(edges, edges[1:]):
        assert x.target_id == y.source_id
        assert HOUR <= y.timestamp - x.timestamp <= 48 * HOUR
        assert y.amount <= x.amount
    mids = [e.target_id for e in edges[:-1]]
    assert len(set(mids)) == h and a not in mids and b not in mids
    owners = {graph.nodes[m].owner_id for m in mids}
    assert len(owners) == h and not owners & {"I000001", "I000002"}
    assert all(e.is_fraud for e in edges)


def test_layering_anchor_end(graph):
    a, b = _two_accounts(graph)
    edges = apply_layering((a, b, 10_000, 10 * DAY), graph, LayeringParams(), rng(), anchor="end")
    assert edges[-1].timestamp == 10 * DAY


def test_layering_pool_exhausted():
    cfg = desk_graph(individual_count=3, business_ratio=0)
    g = generate_population(cfg, cfg.risk_weights, substream(1, POPULATION))
    a, b = g.noncash_accounts("I000001")[0], g.noncash_accounts("I000002")[0]
    with pytest.raises(PoolExhausted):
        apply_layering((a, b, 10_000, 0), g, LayeringParams(h_min=4, h_max=4), rng())
    assert isinstance(g, Graph)
