import dataclasses

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from amlgraph.config import (
    TYPOLOGIES,
    fill_graph_defaults,
    graph_config_from_dict,
    graph_config_to_dict,
    load_graph_config,
    load_pattern_config,
    parse_duration,
    pattern_config_from_dict,
    pattern_config_to_dict,
    validate_combined,
)
from amlgraph.errors import MissingSeed, ParseError, ValidationError


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else yaml.safe_dump(data), encoding="utf-8")
    return path


# -- load_graph_config ---------------------------------------------------------------


def test_li_shape_loads(tmp_path):
    # [PAPER] 8,000 individuals, 12-month simulation, 0.10% target
    path = _write(tmp_path, "g.yaml", {"master_seed": 1, "individual_count": 8000, "simulation_start": "2025-01-01",
                                       "simulation_end": "2025-12-31", "target_illicit_ratio": 0.001})
    g = load_graph_config(path)
    assert g.individual_count == 8000
    assert g.months == 12
    assert g.days == 365
    assert g.target_illicit_ratio == 0.001


def test_rate_cap_defaults_to_two(tmp_path):
    # [PAPER] per-account daily rate capped at 2
    g = load_graph_config(_write(tmp_path, "g.yaml", {"master_seed": 1}))
    assert g.per_account_daily_rate_cap == 2.0


def test_empty_window_rejected(tmp_path):
    path = _write(tmp_path, "g.yaml", {"master_seed": 1, "simulation_start": "2025-03-01",
                                       "simulation_end": "2025-03-01"})
    with pytest.raises(ValidationError) as exc:
        load_graph_config(path)
    assert "simulation" in exc.value.key


def test_missing_seed(tmp_path):
    with pytest.raises(MissingSeed):
        load_graph_config(_write(tmp_path, "g.yaml", {"individual_count": 10}))


def test_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_graph_config(_write(tmp_path, "g.yaml", "master_seed: [1, 2\n"))
    with pytest.raises(ParseError):
        load_graph_config(tmp_path / "absent.yaml")
    with pytest.raises(ParseError):
        load_graph_config(_write(tmp_path, "list.yaml", "- 1\n- 2\n"))


@pytest.mark.parametrize("override, key", [
    ({"target_illicit_ratio": 0.5}, "target_illicit_ratio"),
    ({"target_illicit_ratio": 0.0}, "target_illicit_ratio"),
    ({"individual_count": 0}, "individual_count"),
    ({"business_ratio": 1.5}, "business_ratio"),
    ({"background_weights": {"payment": -1, "transfer": 1, "withdrawal": 1, "deposit": 1}}, "background_weights"),
    ({"amount_params": {"payment": {"mu": 20.0, "sigma": 1.0, "min": 1, "max": 100}}}, "amount_params"),
    ({"amount_params": {"payment": {"mu": 3.0, "sigma": 0.0, "min": 1, "max": 100}}}, "amount_params"),
    ({"unknown_key": 1}, "unknown_key"),
    ({"background": {"type_calibration": "everything"}}, "background.type_calibration"),
])
def test_invariant_violations_name_the_key(override, key):
    with pytest.raises(ValidationError) as exc:
        graph_config_from_dict({"master_seed": 1, **override})
    assert exc.value.key.startswith(key)


def test_amount_table_defaults():
    # [PAPER] log-normal parameters per type
    g = graph_config_from_dict({"master_seed": 1})
    got = {t: (g.amount(t).mu, g.amount(t).sigma) for t in ("payment", "transfer", "withdrawal", "deposit")}
    assert got == {"payment": (3.8, 1.2), "transfer": (5.5, 2.0), "withdrawal": (4.8, 0.9), "deposit": (5.3, 1.5)}


def test_type_weight_defaults():
    # [PAPER] generated shares 68/12/8/11
    w = dict(graph_config_from_dict({"master_seed": 1}).background_weights)
    assert w == {"payment": 0.68, "transfer": 0.12, "withdrawal": 0.08, "deposit": 0.11}


def test_risk_weight_defaults():
    # [PAPER] default risk factor weights
    rw = graph_config_from_dict({"master_seed": 1}).risk_weights
    assert (rw.individual_base, rw.high_risk_age, rw.high_risk_occupation) == (0.05, 0.15, 0.12)
    assert (rw.business_base, rw.cash_intensive_category, rw.very_small_company) == (0.10, 0.25, 0.10)
    assert rw.high_risk_jurisdiction == 0.20
    assert rw.cap == 0.9


# -- load_pattern_config -------------------------------------------------------------


def test_empty_pattern_file(tmp_path):
    p = load_pattern_config(_write(tmp_path, "p.yaml", ""))
    assert p.total_instances() == 0
    assert p.overseas_transfers.transfers == (4, 12)
    assert p.overseas_transfers.destinations == (2, 5)
    assert (p.overseas_transfers.layering.h_min, p.overseas_transfers.layering.h_max) == (2, 5)


def test_layering_block_verbatim():
    # [PAPER] h in [2, 5] by default
    p = pattern_config_from_dict({"layering": {"h_min": 2, "h_max": 5}})
    for t in ("overseas_transfers", "rapid_movement", "front_business"):
        lp = p.typology(t).layering
        assert (lp.h_min, lp.h_max) == (2, 5)


def test_decay_max_one_rejected():
    with pytest.raises(ValidationError):
        pattern_config_from_dict({"layering": {"decay_max": 1.0}})


@pytest.mark.parametrize("raw", [
    {"layering": {"h_min": 4, "h_max": 3}},
    {"layering": {"hop_delay_min": "2d", "hop_delay_max": "1d"}},
    {"overseas_transfers": {"transfers": [5, 4]}},
    {"overseas_transfers": {"instance_count": -1}},
    {"u_turn": {"layering": {"enabled": True}}},
    {"exclusivity": "sometimes"},
    {"rapid_movement": {"layering": {"h_max": 5, "hop_delay_min": "12h"}}},
])
def test_pattern_invariants(raw):
    with pytest.raises(ValidationError):
        pattern_config_from_dict(raw)


def test_durations_accept_human_units():
    p = pattern_config_from_dict({"front_business": {"deposit_window": "2d", "transfer_delay": ["30m", "6h"]}})
    assert p.front_business.deposit_window == 172800
    assert p.front_business.transfer_delay == (1800, 21600)


@pytest.mark.parametrize("text, seconds", [(90, 90), ("90s", 90), ("30m", 1800), ("24h", 86400), ("7d", 604800),
                                           ("1w", 604800)])
def test_parse_duration(text, seconds):
    assert parse_duration(text) == seconds


def test_parse_duration_rejects_garbage():
    with pytest.raises(ValidationError):
        parse_duration("soon")


# -- validate_combined ---------------------------------------------------------------


def test_empty_patterns_warn():
    g = graph_config_from_dict({"master_seed": 1})
    warnings = validate_combined(g, pattern_config_from_dict({}))
    assert any("no fraud will be injected" in w for w in warnings)


def test_li_hi_volumes_do_not_warn():
    # [PAPER] 90 and 320 patterns on 8,000 individuals
    g = graph_config_from_dict({"master_seed": 1, "individual_count": 8000})
    for total in (90, 320):
        per = total // len(TYPOLOGIES)
        p = pattern_config_from_dict({t: {"instance_count": per} for t in TYPOLOGIES})
        assert not [w for w in validate_combined(g, p) if "insufficient" in w]


def test_oversubscribed_population_warns():
    g = graph_config_from_dict({"master_seed": 1, "individual_count": 100})
    p = pattern_config_from_dict({t: {"instance_count": 1000} for t in TYPOLOGIES})
    assert any("insufficient eligible entities likely" in w for w in validate_combined(g, p))


def test_validate_combined_does_not_mutate():
    g = graph_config_from_dict({"master_seed": 1})
    p = pattern_config_from_dict({})
    g2, p2 = dataclasses.replace(g), dataclasses.replace(p)
    validate_combined(g, p)
    assert g == g2 and p == p2


# -- properties ----------------------------------------------------------------------

graph_overrides = st.fixed_dictionaries({}, optional={
    "individual_count": st.integers(1, 50_000),
    "business_ratio": st.floats(0, 1),
    "institution_count": st.integers(1, 200),
    "target_illicit_ratio": st.floats(1e-5, 0.49),
    "per_account_daily_rate_cap": st.floats(0, 10),
    "reporting_threshold": st.floats(100, 1e6),
    "currency": st.sampled_from(["EUR", "USD", "GBP"]),
})


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), extra=graph_overrides)
def test_graph_round_trip(seed, extra):
    g = graph_config_from_dict({"master_seed": seed, **extra})
    assert graph_config_from_dict(graph_config_to_dict(g)) == g


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), extra=graph_overrides)
def test_defaulting_idempotent(seed, extra):
    once = fill_graph_defaults({"master_seed": seed, **extra})
    assert fill_graph_defaults(once) == once


@settings(max_examples=40, deadline=None)
@given(counts=st.lists(st.integers(0, 500), min_size=5, max_size=5), strict=st.booleans(),
       h=st.integers(1, 6).flatmap(lambda lo: st.tuples(st.just(lo), st.integers(lo, 8))))
def test_pattern_round_trip(counts, strict, h):
    raw = {t: {"instance_count": c} for t, c in zip(TYPOLOGIES, counts)}
    raw["strict"] = strict
    raw["layering"] = {"h_min": h[0], "h_max": h[1], "hop_delay_min": "1h", "hop_delay_max": "8h"}
    p = pattern_config_from_dict(raw)
    assert pattern_config_from_dict(pattern_config_to_dict(p)) == p


def test_identical_files_equal_configs(tmp_path):
    text = "master_seed: 9\nindividual_count: 123\nsimulation_end: 2025-06-30\n"
    a = load_graph_config(_write(tmp_path, "a.yaml", text))
    b = load_graph_config(_write(tmp_path, "b.yaml", text))
    assert a == b
