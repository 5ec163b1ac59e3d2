"""Graph-level and pattern-level configuration.

Both files are YAML mappings.  Every key has a default except ``master_seed``;
``docs/schema.md`` lists the keys.  Durations accept integer seconds or a
string with a unit suffix (``"90s"``, ``"30m"``, ``"24h"``, ``"7d"``) and are
stored as integer seconds.  Money amounts are plain numbers in the run
currency.
"""

from __future__ import annotations

import copy
import datetime as dt
import hashlib
import math
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .errors import MissingSeed, ParseError, ValidationError

TRANSACTION_TYPES = ("payment", "transfer", "withdrawal", "deposit")
AMOUNT_TYPES = TRANSACTION_TYPES + ("salary", "high_value")
TYPOLOGIES = ("overseas_transfers", "rapid_movement", "front_business", "synchronised", "u_turn")

_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86400, "w": 7 * 86400}
_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([smhdw])\s*$")


def parse_duration(value, key="duration"):
    """Return ``value`` as integer seconds."""
    if isinstance(value, bool):
        raise ValidationError(key, f"not a duration: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        m = _DURATION_RE.match(value)
        if m:
            return int(round(float(m.group(1)) * _UNITS[m.group(2)]))
    raise ValidationError(key, f"not a duration: {value!r}")


def _parse_date(value, key):
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    if isinstance(value, str):
        try:
            return dt.date.fromisoformat(value.strip())
        except ValueError:
            pass
    raise ValidationError(key, f"not a calendar date: {value!r}")


def _pair(value, key, conv=float):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(key, f"expected [min, max], got {value!r}")
    lo, hi = conv(value[0]), conv(value[1])
    if lo > hi:
        raise ValidationError(key, f"min {lo} > max {hi}")
    return (lo, hi)


def _int_pair(value, key):
    return _pair(value, key, conv=lambda v: _as_int(v, key))


def _duration_pair(value, key):
    return _pair(value, key, conv=lambda v: parse_duration(v, key))


def _as_int(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
        raise ValidationError(key, f"expected an integer, got {value!r}")
    return int(value)


def _as_float(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(key, f"expected a number, got {value!r}")
    return float(value)


def _as_bool(value, key):
    if not isinstance(value, bool):
        raise ValidationError(key, f"expected true/false, got {value!r}")
    return value


def _check_keys(raw, allowed, prefix):
    if not isinstance(raw, dict):
        raise ValidationError(prefix or "<root>", f"expected a mapping, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ValidationError(f"{prefix}{unknown[0]}", "unknown key")


# ---------------------------------------------------------------------------
# graph-level configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmountParams:
    mu: float
    sigma: float
    min: float
    max: float


@dataclass(frozen=True)
class Country:
    code: str
    high_risk: bool
    weight: float


@dataclass(frozen=True)
class RiskWeights:
    individual_base: float = 0.05
    business_base: float = 0.10
    high_risk_age: float = 0.15
    high_risk_occupation: float = 0.12
    cash_intensive_category: float = 0.25
    very_small_company: float = 0.10
    high_risk_jurisdiction: float = 0.20
    cap: float = 0.9


@dataclass(frozen=True)
class PopulationParams:
    accounts_per_individual: tuple = (1, 3)
    accounts_per_business: tuple = (2, 4)
    age_groups: tuple = (("18-24", 0.12), ("25-39", 0.28), ("40-54", 0.27), ("55-64", 0.15), ("65+", 0.18))
    high_risk_age_groups: tuple = ("18-24", "65+")
    young_age_group: str = "18-24"
    elderly_age_group: str = "65+"
    occupations: tuple = (
        ("office_worker", 0.14), ("retail_worker", 0.09), ("teacher", 0.07), ("nurse", 0.06),
        ("engineer", 0.07), ("software_engineer", 0.05), ("student", 0.09), ("retired", 0.08),
        ("tradesperson", 0.07), ("driver", 0.05), ("unemployed", 0.04), ("physician", 0.02),
        ("executive", 0.03), ("lawyer", 0.02), ("accountant", 0.03), ("banker", 0.02),
        ("financial_advisor", 0.02), ("real_estate_agent", 0.02), ("car_dealer", 0.01),
    )
    high_risk_occupations: tuple = (
        "accountant", "banker", "financial_advisor", "lawyer", "real_estate_agent", "car_dealer", "executive",
    )
    high_paid_occupations: tuple = (
        "executive", "lawyer", "physician", "banker", "software_engineer", "financial_advisor",
    )
    business_categories: tuple = (
        ("restaurant", 0.09), ("bar", 0.04), ("car_wash", 0.03), ("convenience_store", 0.05),
        ("laundromat", 0.02), ("nail_salon", 0.03), ("jewellery_store", 0.02), ("software", 0.10),
        ("consulting", 0.12), ("manufacturing", 0.09), ("logistics", 0.08), ("construction", 0.10),
        ("healthcare", 0.06), ("retail", 0.10), ("wholesale", 0.07),
    )
    cash_intensive_categories: tuple = (
        "restaurant", "bar", "car_wash", "convenience_store", "laundromat", "nail_salon", "jewellery_store",
    )
    very_small_max_employees: int = 5
    high_value_min_employees: int = 11


@dataclass(frozen=True)
class StructuringParams:
    share: float = 0.04
    low: float = 7000.0
    high: float = 9999.99


@dataclass(frozen=True)
class SalaryParams:
    schedule: str = "monthly"
    pay_days: tuple = (1, 15, 30)
    period_days: int = 14
    recipients: tuple = (1, 3)
    jitter: float = 0.05


@dataclass(frozen=True)
class CounterLeakageParams:
    fraud_mix: tuple = (0.5, 0.9)
    burst_size: tuple = (5, 15)
    burst_window: int = 1800
    chain_hops: tuple = (2, 5)
    chain_hop_delay: tuple = (3600, 48 * 3600)
    rapid_inflows: tuple = (2, 7)
    rapid_inflow_window: int = 24 * 3600
    rapid_delay: tuple = (3600, 24 * 3600)
    rapid_withdrawals: tuple = (1, 3)
    cash_rapid_share: float = 0.3
    cash_rapid_deposits: tuple = (3, 5)
    cash_rapid_window: int = 6 * 3600
    structuring_low: float = 7500.0
    structuring_high: float = 9999.99
    structuring_burst_share: float = 0.3
    structuring_burst_deposits: tuple = (2, 5)
    structuring_burst_window: int = 6 * 3600
    high_risk_min_score: float = 0.3
    high_risk_unit_size: tuple = (1, 5)
    periodic_periods: tuple = (7 * 86400, 14 * 86400, 30 * 86400)
    periodic_epsilon: int = 6 * 3600
    periodic_min_count: int = 3


@dataclass(frozen=True)
class BackgroundParams:
    allocation: tuple = (("random", 0.80), ("salaries", 0.08), ("high_value", 0.02), ("counter_leakage", 0.10))
    fallback_daily_rate: float = 0.5
    business_hours: tuple = (9, 17)
    # "dataset": random payments compensate the type mix of the other generators
    # so all background traffic follows background_weights; "random": only
    # random payments follow them
    type_calibration: str = "dataset"
    structuring: StructuringParams = field(default_factory=StructuringParams)
    salary: SalaryParams = field(default_factory=SalaryParams)
    counter_leakage: CounterLeakageParams = field(default_factory=CounterLeakageParams)


DEFAULT_AMOUNT_PARAMS = (
    ("payment", AmountParams(3.8, 1.2, 1.0, 25000.0)),
    ("transfer", AmountParams(5.5, 2.0, 1.0, 250000.0)),
    ("withdrawal", AmountParams(4.8, 0.9, 10.0, 20000.0)),
    ("deposit", AmountParams(5.3, 1.5, 1.0, 100000.0)),
    ("salary", AmountParams(8.0, 0.6, 500.0, 30000.0)),
    ("high_value", AmountParams(10.3, 1.0, 5000.0, 2000000.0)),
)

DEFAULT_BACKGROUND_WEIGHTS = (("payment", 0.68), ("transfer", 0.12), ("withdrawal", 0.08), ("deposit", 0.11))

DEFAULT_COUNTRIES = (
    Country("NL", False, 0.54), Country("DE", False, 0.08), Country("BE", False, 0.06),
    Country("FR", False, 0.05), Country("GB", False, 0.05), Country("ES", False, 0.03),
    Country("IT", False, 0.03), Country("US", False, 0.04), Country("PL", False, 0.02),
    Country("CH", False, 0.02), Country("AE", True, 0.02), Country("PA", True, 0.015),
    Country("KY", True, 0.015), Country("VG", True, 0.01), Country("CY", True, 0.01),
    Country("MT", True, 0.01),
)


@dataclass(frozen=True)
class GraphConfig:
    master_seed: int
    individual_count: int = 1000
    business_ratio: float = 0.1
    institution_count: int = 20
    simulation_start: dt.date = dt.date(2025, 1, 1)
    simulation_end: dt.date = dt.date(2025, 12, 31)
    target_illicit_ratio: float = 0.001
    currency: str = "EUR"
    reporting_threshold: float = 10000.0
    per_account_daily_rate_cap: float = 2.0
    output_formats: tuple = (("csv", True), ("json", False))
    background_weights: tuple = DEFAULT_BACKGROUND_WEIGHTS
    amount_params: tuple = DEFAULT_AMOUNT_PARAMS
    country_table: tuple = DEFAULT_COUNTRIES
    risk_weights: RiskWeights = field(default_factory=RiskWeights)
    population: PopulationParams = field(default_factory=PopulationParams)
    background: BackgroundParams = field(default_factory=BackgroundParams)

    # -- derived views -----------------------------------------------------
    @property
    def start_ts(self):
        return int(dt.datetime.combine(self.simulation_start, dt.time(), dt.timezone.utc).timestamp())

    @property
    def end_ts(self):
        """Last second of ``simulation_end`` (the end day is inclusive)."""
        return int(dt.datetime.combine(self.simulation_end, dt.time(), dt.timezone.utc).timestamp()) + 86399

    @property
    def days(self):
        return (self.simulation_end - self.simulation_start).days + 1

    @property
    def months(self):
        s, e = self.simulation_start, self.simulation_end
        return (e.year - s.year) * 12 + e.month - s.month + 1

    @property
    def threshold_cents(self):
        return int(round(self.reporting_threshold * 100))

    def amount(self, txn_type):
        return dict(self.amount_params)[txn_type]

    def weights_normalized(self):
        total = sum(w for _, w in self.background_weights)
        return tuple((k, w / total) for k, w in self.background_weights)

    def formats(self):
        return dict(self.output_formats)


def _graph_defaults():
    return {
        "individual_count": 1000,
        "business_ratio": 0.1,
        "institution_count": 20,
        "simulation_start": "2025-01-01",
        "simulation_end": "2025-12-31",
        "target_illicit_ratio": 0.001,
        "currency": "EUR",
        "reporting_threshold": 10000.0,
        "per_account_daily_rate_cap": 2.0,
        "output_formats": {"csv": True, "json": False},
        "background_weights": dict(DEFAULT_BACKGROUND_WEIGHTS),
        "amount_params": {k: asdict(v) for k, v in DEFAULT_AMOUNT_PARAMS},
        "country_table": [asdict(c) for c in DEFAULT_COUNTRIES],
        "risk_weights": asdict(RiskWeights()),
        "population": _plain(asdict(PopulationParams())),
        "background": _plain(asdict(BackgroundParams())),
    }


def _plain(obj):
    """Tuples to lists and pair-tuples-of-tuples to mappings, for YAML output."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        if obj and all(isinstance(x, (list, tuple)) and len(x) == 2 and isinstance(x[0], str) for x in obj):
            return {x[0]: _plain(x[1]) for x in obj}
        return [_plain(x) for x in obj]
    return obj


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("background_weights", "amount_params"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def fill_graph_defaults(raw):
    """Return ``raw`` with every absent key filled in.  Idempotent."""
    if raw is None:
        raw = {}
    _check_keys(raw, set(_graph_defaults()) | {"master_seed"}, "")
    filled = _merge(_graph_defaults(), raw)
    if "amount_params" in raw:
        # partial override of the amount table keeps the remaining defaults
        filled["amount_params"] = {**_graph_defaults()["amount_params"], **raw["amount_params"]}
    return filled


def _dataclass_from(cls, raw, prefix, converters=None):
    converters = converters or {}
    names = {f.name for f in fields(cls)}
    _check_keys(raw, names, prefix)
    kwargs = {}
    for f in fields(cls):
        if f.name not in raw:
            continue
        conv = converters.get(f.name)
        kwargs[f.name] = conv(raw[f.name], prefix + f.name) if conv else raw[f.name]
    return cls(**kwargs)


def _weighted_table(value, key):
    if isinstance(value, dict):
        items = list(value.items())
    elif isinstance(value, (list, tuple)):
        items = [tuple(x) for x in value]
    else:
        raise ValidationError(key, "expected a mapping of name -> weight")
    out = []
    for name, w in items:
        w = _as_float(w, f"{key}.{name}")
        if w < 0:
            raise ValidationError(f"{key}.{name}", "weight must be non-negative")
        out.append((str(name), w))
    if not out or sum(w for _, w in out) <= 0:
        raise ValidationError(key, "weights must have a positive sum")
    return tuple(out)


def _str_tuple(value, key):
    if not isinstance(value, (list, tuple)):
        raise ValidationError(key, "expected a list")
    return tuple(str(v) for v in value)


def _population_from(raw):
    conv = {
        "accounts_per_individual": _int_pair,
        "accounts_per_business": _int_pair,
        "age_groups": _weighted_table,
        "occupations": _weighted_table,
        "business_categories": _weighted_table,
        "high_risk_age_groups": _str_tuple,
        "high_risk_occupations": _str_tuple,
        "high_paid_occupations": _str_tuple,
        "cash_intensive_categories": _str_tuple,
        "very_small_max_employees": _as_int,
        "high_value_min_employees": _as_int,
    }
    p = _dataclass_from(PopulationParams, raw, "population.", conv)
    for key in ("accounts_per_individual", "accounts_per_business"):
        lo, _ = getattr(p, key)
        if lo < 1:
            raise ValidationError(f"population.{key}", "every owner needs at least one account")
    ages = {a for a, _ in p.age_groups}
    for a in (p.young_age_group, p.elderly_age_group, *p.high_risk_age_groups):
        if a not in ages:
            raise ValidationError("population.age_groups", f"age group {a!r} not declared")
    return p


def _background_from(raw):
    _check_keys(raw, {f.name for f in fields(BackgroundParams)}, "background.")
    sal_raw = raw.get("salary", {})
    salary = _dataclass_from(
        SalaryParams, sal_raw, "background.salary.",
        {
            "pay_days": lambda v, k: tuple(_as_int(x, k) for x in v),
            "period_days": _as_int,
            "recipients": _int_pair,
            "jitter": _as_float,
        },
    )
    if salary.schedule not in ("monthly", "biweekly", "custom"):
        raise ValidationError("background.salary.schedule", "expected monthly, biweekly or custom")
    if not salary.pay_days or not all(1 <= d <= 31 for d in salary.pay_days):
        raise ValidationError("background.salary.pay_days", "pay days must lie in 1..31")
    if salary.period_days < 1:
        raise ValidationError("background.salary.period_days", "must be >= 1")
    if salary.recipients[0] < 1:
        raise ValidationError("background.salary.recipients", "at least one recipient")
    st = _dataclass_from(StructuringParams, raw.get("structuring", {}), "background.structuring.",
                         {"share": _as_float, "low": _as_float, "high": _as_float})
    if not 0 <= st.share < 1:
        raise ValidationError("background.structuring.share", "must lie in [0, 1)")
    if st.low > st.high or st.low <= 0:
        raise ValidationError("background.structuring", "need 0 < low <= high")
    cl_raw = raw.get("counter_leakage", {})
    cl_conv = {}
    for f in fields(CounterLeakageParams):
        default = f.default
        if f.name in ("chain_hop_delay", "rapid_delay"):
            cl_conv[f.name] = _duration_pair
        elif f.name == "periodic_periods":
            cl_conv[f.name] = lambda v, k: tuple(parse_duration(x, k) for x in v)
        elif f.name.endswith("window") or f.name == "periodic_epsilon":
            cl_conv[f.name] = parse_duration
        elif f.name == "fraud_mix":
            cl_conv[f.name] = _pair
        elif isinstance(default, tuple):
            cl_conv[f.name] = _int_pair
        elif isinstance(default, float):
            cl_conv[f.name] = _as_float
        else:
            cl_conv[f.name] = _as_int
    cl = _dataclass_from(CounterLeakageParams, cl_raw, "background.counter_leakage.", cl_conv)
    if not (0 <= cl.fraud_mix[0] <= cl.fraud_mix[1] <= 1):
        raise ValidationError("background.counter_leakage.fraud_mix", "must lie in [0, 1]")
    alloc = _weighted_table(raw.get("allocation", dict(BackgroundParams.allocation)), "background.allocation")
    if set(k for k, _ in alloc) != {"random", "salaries", "high_value", "counter_leakage"}:
        raise ValidationError("background.allocation", "keys must be random, salaries, high_value, counter_leakage")
    hours = _int_pair(raw.get("business_hours", [9, 17]), "background.business_hours")
    if not (0 <= hours[0] < hours[1] <= 24):
        raise ValidationError("background.business_hours", "need 0 <= open < close <= 24")
    rate = _as_float(raw.get("fallback_daily_rate", 0.5), "background.fallback_daily_rate")
    if rate < 0:
        raise ValidationError("background.fallback_daily_rate", "must be non-negative")
    calibration = str(raw.get("type_calibration", "dataset"))
    if calibration not in ("dataset", "random"):
        raise ValidationError("background.type_calibration", "expected dataset or random")
    return BackgroundParams(
        allocation=alloc, fallback_daily_rate=rate, business_hours=hours, type_calibration=calibration,
        structuring=st, salary=salary, counter_leakage=cl,
    )


def graph_config_from_dict(raw):
    if raw is None or "master_seed" not in raw or raw["master_seed"] is None:
        raise MissingSeed("master_seed is required; determinism needs an explicit seed")
    d = fill_graph_defaults(raw)

    seed = d["master_seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValidationError("master_seed", "must be an unsigned 64-bit integer")

    individual_count = _as_int(d["individual_count"], "individual_count")
    if individual_count < 1:
        raise ValidationError("individual_count", "must be positive")
    business_ratio = _as_float(d["business_ratio"], "business_ratio")
    if not 0 <= business_ratio <= 1:
        raise ValidationError("business_ratio", "must lie in [0, 1]")
    institution_count = _as_int(d["institution_count"], "institution_count")
    if institution_count < 1:
        raise ValidationError("institution_count", "must be positive")
    start = _parse_date(d["simulation_start"], "simulation_start")
    end = _parse_date(d["simulation_end"], "simulation_end")
    if not start < end:
        raise ValidationError("simulation_end", "simulation_start must precede simulation_end")
    ratio = _as_float(d["target_illicit_ratio"], "target_illicit_ratio")
    if not 0 < ratio < 0.5:
        raise ValidationError("target_illicit_ratio", "must lie in (0, 0.5)")
    threshold = _as_float(d["reporting_threshold"], "reporting_threshold")
    if threshold <= 0:
        raise ValidationError("reporting_threshold", "must be positive")
    cap = _as_float(d["per_account_daily_rate_cap"], "per_account_daily_rate_cap")
    if cap < 0:
        raise ValidationError("per_account_daily_rate_cap", "must be non-negative")
    currency = str(d["currency"])
    if not re.fullmatch(r"[A-Z]{3}", currency):
        raise ValidationError("currency", "expected an ISO-4217 code")

    formats = d["output_formats"]
    _check_keys(formats, {"csv", "json"}, "output_formats.")
    formats = tuple((k, _as_bool(formats[k], f"output_formats.{k}")) for k in ("csv", "json"))

    weights = _weighted_table(d["background_weights"], "background_weights")
    if set(k for k, _ in weights) - set(TRANSACTION_TYPES):
        raise ValidationError("background_weights", f"types must be among {TRANSACTION_TYPES}")

    amounts = []
    for name in sorted(d["amount_params"], key=lambda n: (AMOUNT_TYPES + (n,)).index(n)):
        key = f"amount_params.{name}"
        p = d["amount_params"][name]
        _check_keys(p, {"mu", "sigma", "min", "max"}, key + ".")
        try:
            ap = AmountParams(*(_as_float(p[k], f"{key}.{k}") for k in ("mu", "sigma", "min", "max")))
        except KeyError as e:
            raise ValidationError(f"{key}.{e.args[0]}", "missing") from None
        if ap.sigma <= 0:
            raise ValidationError(f"{key}.sigma", "must be positive")
        if not ap.min <= math.exp(ap.mu) <= ap.max:
            raise ValidationError(key, "need min <= exp(mu) <= max")
        amounts.append((name, ap))
    missing = set(AMOUNT_TYPES) - {n for n, _ in amounts}
    if missing:
        raise ValidationError("amount_params", f"missing types {sorted(missing)}")

    countries = []
    seen = set()
    for i, c in enumerate(d["country_table"]):
        key = f"country_table[{i}]"
        _check_keys(c, {"code", "high_risk", "weight"}, key + ".")
        code = str(c.get("code", ""))
        if not code or code in seen:
            raise ValidationError(key + ".code", "missing or duplicate country code")
        seen.add(code)
        w = _as_float(c.get("weight", 0), key + ".weight")
        if w < 0:
            raise ValidationError(key + ".weight", "must be non-negative")
        countries.append(Country(code, _as_bool(c.get("high_risk", False), key + ".high_risk"), w))
    if not countries or sum(c.weight for c in countries) <= 0:
        raise ValidationError("country_table", "needs at least one country with positive weight")

    rw = _dataclass_from(RiskWeights, d["risk_weights"], "risk_weights.",
                         {f.name: _as_float for f in fields(RiskWeights)})
    for f in fields(RiskWeights):
        if f.name != "cap" and getattr(rw, f.name) < 0:
            raise ValidationError(f"risk_weights.{f.name}", "must be non-negative")
    if not 0 < rw.cap <= 1:
        raise ValidationError("risk_weights.cap", "must lie in (0, 1]")

    return GraphConfig(
        master_seed=seed,
        individual_count=individual_count,
        business_ratio=business_ratio,
        institution_count=institution_count,
        simulation_start=start,
        simulation_end=end,
        target_illicit_ratio=ratio,
        currency=currency,
        reporting_threshold=threshold,
        per_account_daily_rate_cap=cap,
        output_formats=formats,
        background_weights=weights,
        amount_params=tuple(amounts),
        country_table=tuple(countries),
        risk_weights=rw,
        population=_population_from(d["population"]),
        background=_background_from(d["background"]),
    )


def graph_config_to_dict(cfg):
    out = {"master_seed": cfg.master_seed}
    for f in fields(cfg):
        if f.name == "master_seed":
            continue
        v = getattr(cfg, f.name)
        if isinstance(v, dt.date):
            out[f.name] = v.isoformat()
        elif f.name == "amount_params":
            out[f.name] = {k: asdict(p) for k, p in v}
        elif f.name == "country_table":
            out[f.name] = [asdict(c) for c in v]
        elif f.name in ("risk_weights", "population", "background"):
            out[f.name] = _plain(asdict(v))
        else:
            out[f.name] = _plain(v)
    return out


# ---------------------------------------------------------------------------
# pattern-level configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayeringParams:
    enabled: bool = True
    h_min: int = 2
    h_max: int = 5
    decay_min: float = 0.95
    decay_max: float = 0.99
    hop_delay_min: int = 3600
    hop_delay_max: int = 48 * 3600
    pool: str = "uniform"


LAYERING_OFF = LayeringParams(enabled=False)


@dataclass(frozen=True)
class OverseasTransfersParams:
    instance_count: int = 0
    layering: LayeringParams = LayeringParams()
    transfers: tuple = (4, 12)
    destinations: tuple = (2, 5)
    amount: tuple = (5000.0, 20000.0)
    timing: str = "periodic"
    periods: tuple = (7 * 86400, 14 * 86400, 30 * 86400)
    epsilon: int = 6 * 3600
    burst_window: int = 48 * 3600
    deposit_lead: tuple = (3600, 24 * 3600)


@dataclass(frozen=True)
class RapidMovementParams:
    instance_count: int = 0
    layering: LayeringParams = LayeringParams()
    senders: tuple = (2, 7)
    inflows_per_sender: tuple = (1, 2)
    inflow_amount: tuple = (1000.0, 9500.0)
    inflow_window: int = 24 * 3600
    phase_delay: tuple = (3600, 24 * 3600)
    withdrawals: tuple = (3, 8)
    withdrawal_window: int = 24 * 3600
    outflow_ratio: tuple = (0.85, 0.95)
    max_duration: int = 128 * 3600
    layering_budget: int = 48 * 3600


@dataclass(frozen=True)
class FrontBusinessParams:
    instance_count: int = 0
    layering: LayeringParams = LayeringParams()
    deposits: tuple = (5, 15)
    deposit_amount: tuple = (15000.0, 75000.0)
    deposit_window: int = 48 * 3600
    transfer_delay: tuple = (1800, 6 * 3600)
    transfer_ratio: tuple = (0.80, 1.00)
    destinations: tuple = (2, 4)


@dataclass(frozen=True)
class SynchronisedParams:
    instance_count: int = 0
    layering: LayeringParams = LAYERING_OFF
    coordinators: tuple = (3, 8)
    deposits_per_coordinator: tuple = (1, 3)
    sync_window: int = 2 * 3600
    transfer_delay: tuple = (3600, 6 * 3600)
    transfer_ratio: tuple = (0.85, 0.95)


@dataclass(frozen=True)
class UTurnParams:
    instance_count: int = 0
    layering: LayeringParams = LAYERING_OFF
    chain_entities: tuple = (4, 7)
    initial_amount: tuple = (10000.0, 100000.0)
    hop_delay: tuple = (86400, 5 * 86400)
    fee: tuple = (0.01, 0.03)
    return_ratio: tuple = (0.70, 0.90)


TYPOLOGY_PARAMS = {
    "overseas_transfers": OverseasTransfersParams,
    "rapid_movement": RapidMovementParams,
    "front_business": FrontBusinessParams,
    "synchronised": SynchronisedParams,
    "u_turn": UTurnParams,
}

_DURATION_FIELDS = {
    "epsilon", "burst_window", "inflow_window", "withdrawal_window", "max_duration", "deposit_window",
    "sync_window", "layering_budget",
}
_DURATION_PAIR_FIELDS = {"deposit_lead", "phase_delay", "transfer_delay", "hop_delay"}
_INT_PAIR_FIELDS = {
    "transfers", "destinations", "senders", "inflows_per_sender", "withdrawals", "deposits",
    "coordinators", "deposits_per_coordinator", "chain_entities",
}


@dataclass(frozen=True)
class PatternConfig:
    overseas_transfers: OverseasTransfersParams = OverseasTransfersParams()
    rapid_movement: RapidMovementParams = RapidMovementParams()
    front_business: FrontBusinessParams = FrontBusinessParams()
    synchronised: SynchronisedParams = SynchronisedParams()
    u_turn: UTurnParams = UTurnParams()
    strict: bool = False
    # "per_typology": an entity joins at most one instance of each typology;
    # "global": at most one instance overall
    exclusivity: str = "per_typology"

    def typology(self, name):
        return getattr(self, name)

    def total_instances(self):
        return sum(self.typology(t).instance_count for t in TYPOLOGIES)


def _layering_from(raw, key, default):
    conv = {
        "enabled": _as_bool, "h_min": _as_int, "h_max": _as_int,
        "decay_min": _as_float, "decay_max": _as_float,
        "hop_delay_min": parse_duration, "hop_delay_max": parse_duration,
    }
    merged = {**asdict(default), **raw} if isinstance(raw, dict) else raw
    lp = _dataclass_from(LayeringParams, merged, key + ".", conv)
    if lp.h_min < 1 or lp.h_min > lp.h_max:
        raise ValidationError(f"{key}.h_min", "need 1 <= h_min <= h_max")
    if not 0 < lp.decay_min <= lp.decay_max < 1:
        raise ValidationError(f"{key}.decay_max", "need 0 < decay_min <= decay_max < 1")
    if not 0 <= lp.hop_delay_min <= lp.hop_delay_max:
        raise ValidationError(f"{key}.hop_delay_min", "need 0 <= hop_delay_min <= hop_delay_max")
    if lp.pool not in ("uniform", "high_risk_cluster"):
        raise ValidationError(f"{key}.pool", "expected uniform or high_risk_cluster")
    return lp


def _typology_from(name, raw, base_layering):
    cls = TYPOLOGY_PARAMS[name]
    prefix = f"{name}."
    _check_keys(raw, {f.name for f in fields(cls)}, prefix)
    kwargs = {}
    for f in fields(cls):
        key = prefix + f.name
        if f.name == "layering":
            default = f.default if name in ("synchronised", "u_turn") else base_layering
            lp = _layering_from(raw.get("layering", {}), key, default)
            if name in ("synchronised", "u_turn") and lp.enabled:
                raise ValidationError(key + ".enabled", f"{name} does not take extra layering hops")
            kwargs["layering"] = lp
            continue
        if f.name not in raw:
            continue
        v = raw[f.name]
        if f.name == "instance_count":
            v = _as_int(v, key)
            if v < 0:
                raise ValidationError(key, "must be non-negative")
        elif f.name in _DURATION_FIELDS:
            v = parse_duration(v, key)
        elif f.name in _DURATION_PAIR_FIELDS:
            v = _duration_pair(v, key)
        elif f.name in _INT_PAIR_FIELDS:
            v = _int_pair(v, key)
        elif f.name == "periods":
            v = tuple(parse_duration(x, key) for x in v)
            if not v:
                raise ValidationError(key, "needs at least one period")
        elif f.name == "timing":
            if v not in ("periodic", "burst", "mixed"):
                raise ValidationError(key, "expected periodic, burst or mixed")
        else:
            v = _pair(v, key)
        kwargs[f.name] = v
    p = cls(**kwargs)
    for f in fields(p):
        v = getattr(p, f.name)
        if isinstance(v, tuple) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v) and v[0] > v[1]:
            raise ValidationError(prefix + f.name, "min > max")
    _check_typology(name, p, prefix)
    return p


def _check_typology(name, p, prefix):
    def need(cond, key, msg):
        if not cond:
            raise ValidationError(prefix + key, msg)

    if name == "overseas_transfers":
        need(p.transfers[0] >= 1, "transfers", "at least one transfer")
        need(p.destinations[0] >= 1, "destinations", "at least one destination")
        need(all(per > p.epsilon for per in p.periods), "epsilon", "every period must exceed epsilon")
        need(p.burst_window > 0, "burst_window", "must be positive")
        need(p.amount[0] > 0, "amount", "must be positive")
    elif name == "rapid_movement":
        need(p.senders[0] >= 1, "senders", "at least one sender")
        need(p.withdrawals[0] >= 1, "withdrawals", "at least one withdrawal")
        need(0 < p.outflow_ratio[0] and p.outflow_ratio[1] <= 1, "outflow_ratio", "must lie in (0, 1]")
        need(p.inflow_amount[0] > 0, "inflow_amount", "must be positive")
        lp = p.layering
        need(not lp.enabled or lp.h_max * lp.hop_delay_min <= p.layering_budget, "layering_budget",
             "must fit h_max hops at hop_delay_min each")
    elif name == "front_business":
        need(p.deposits[0] >= 1, "deposits", "at least one deposit")
        need(p.destinations[0] >= 1, "destinations", "at least one destination")
        need(0 < p.transfer_ratio[0] and p.transfer_ratio[1] <= 1, "transfer_ratio", "must lie in (0, 1]")
    elif name == "synchronised":
        need(p.coordinators[0] >= 2, "coordinators", "at least two coordinators")
        need(p.deposits_per_coordinator[0] >= 1, "deposits_per_coordinator", "at least one deposit")
        need(0 < p.transfer_ratio[0] and p.transfer_ratio[1] <= 1, "transfer_ratio", "must lie in (0, 1]")
    elif name == "u_turn":
        need(p.chain_entities[0] >= 3, "chain_entities", "a round trip needs at least 3 entities")
        need(0 <= p.fee[0] and p.fee[1] < 1, "fee", "must lie in [0, 1)")
        need(0 < p.return_ratio[0] and p.return_ratio[1] <= 1, "return_ratio", "must lie in (0, 1]")
        need(p.initial_amount[0] > 0, "initial_amount", "must be positive")


def pattern_config_from_dict(raw):
    raw = raw or {}
    _check_keys(raw, set(TYPOLOGIES) | {"layering", "strict", "exclusivity"}, "")
    base = _layering_from(raw.get("layering", {}), "layering", LayeringParams())
    kwargs = {t: _typology_from(t, raw.get(t) or {}, base) for t in TYPOLOGIES}
    kwargs["strict"] = _as_bool(raw.get("strict", False), "strict")
    kwargs["exclusivity"] = str(raw.get("exclusivity", "per_typology"))
    if kwargs["exclusivity"] not in ("per_typology", "global"):
        raise ValidationError("exclusivity", "expected per_typology or global")
    return PatternConfig(**kwargs)


def pattern_config_to_dict(cfg):
    out = {"strict": cfg.strict, "exclusivity": cfg.exclusivity}
    for t in TYPOLOGIES:
        out[t] = _plain(asdict(cfg.typology(t)))
    return out


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------


def _read_yaml(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ParseError(f"{path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    return data


def load_graph_config(path):
    return graph_config_from_dict(_read_yaml(path))


def load_pattern_config(path):
    return pattern_config_from_dict(_read_yaml(path))


def dump_config(data, path):
    Path(path).write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")


def config_fingerprint(data):
    """SHA-256 over a canonical YAML rendering of a config mapping."""
    text = yaml.safe_dump(data, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def validate_combined(g, p):
    """Cross-file sanity checks.  Returns human-readable warnings."""
    warnings = []
    if p.total_instances() == 0:
        warnings.append("no fraud will be injected: every typology has instance_count 0")

    threshold = g.reporting_threshold
    if p.rapid_movement.instance_count and p.rapid_movement.inflow_amount[1] >= threshold:
        warnings.append("rapid_movement.inflow_amount reaches the reporting threshold; inflows will not be sub-threshold")
    if p.u_turn.instance_count and p.u_turn.initial_amount[0] < threshold:
        warnings.append("u_turn.initial_amount starts below the reporting threshold")
    if p.front_business.instance_count and p.front_business.deposit_amount[1] < threshold:
        warnings.append("front_business.deposit_amount never exceeds the reporting threshold")

    for name, ap in g.amount_params:
        if ap.sigma < 0.6:
            warnings.append(f"amount_params.{name}.sigma={ap.sigma} is below 0.6; tails will be light")

    # role demand against a rough eligible-pool estimate
    pop = g.population
    age_w = dict(pop.age_groups)
    p_age = sum(age_w.get(a, 0) for a in pop.high_risk_age_groups) / sum(age_w.values())
    occ_w = dict(pop.occupations)
    p_occ = sum(occ_w.get(o, 0) for o in pop.high_risk_occupations) / sum(occ_w.values())
    total_cw = sum(c.weight for c in g.country_table)
    p_jur = sum(c.weight for c in g.country_table if c.high_risk) / total_cw
    p_high = 1 - (1 - p_age) * (1 - p_occ) * (1 - p_jur)
    n_ind = g.individual_count
    n_bus = round(n_ind * g.business_ratio)
    cat_w = dict(pop.business_categories)
    p_cash = sum(cat_w.get(c, 0) for c in pop.cash_intensive_categories) / sum(cat_w.values())

    demands = [
        ("overseas_transfers", p.overseas_transfers.instance_count, n_ind * p_high),
        ("rapid_movement", p.rapid_movement.instance_count, n_ind * p_high),
        ("u_turn", p.u_turn.instance_count, n_ind * p_high),
        ("synchronised", p.synchronised.instance_count * p.synchronised.coordinators[1], n_ind),
        ("front_business", p.front_business.instance_count, n_bus * max(p_cash, p_jur)),
    ]
    for name, demand, pool in demands:
        if demand and demand > pool:
            warnings.append(
                f"{name}: insufficient eligible entities likely (needs ~{demand}, pool ~{int(pool)})"
            )
    if p.front_business.instance_count and g.institution_count < 2:
        warnings.append("front_business needs accounts at >= 2 institutions; institution_count < 2")
    return warnings
