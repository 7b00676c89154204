"""Scenario configuration: schema, validation, presets, and (de)serialization.

A scenario is a single YAML document (schema_version 1).  Every field has a
default; a minimal file needs only a seed.  ``preset("paper")`` mirrors the
published two-area parameters, ``preset("desk")`` is a scaled-down grid that
runs a full 9 h day in a few seconds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import yaml

from .errors import ConfigError

SCHEMA_VERSION = 1

STRATEGIES = ("WO_V2G", "CS1", "CS2")
CONTROL_MODES = ("TBC", "FTC")
DISTRIBUTIONS = ("normal", "uniform", "constant")
EV_TYPES = ("TYPE_I", "TYPE_II", "TYPE_III")


@dataclass(frozen=True)
class ClockParams:
    dt_plant_s: float = 0.1
    dt_regu_s: float = 4.0
    dt_corr_s: float = 3600.0
    comm_delay_s: float = 1.0
    horizon_start_s: float = 28800.0   # 08:00
    horizon_end_s: float = 61200.0     # 17:00


@dataclass(frozen=True)
class AreaParams:
    inertia_mws: float = 16320.0
    damping_mw_per_hz: float = 2040.0
    bias_mw_per_0p1hz: float = 3400.0
    pfc_deadband_hz: float = 0.033
    # Aggregate governor droop, Hz per MW.  None disables primary response.
    droop_hz_per_mw: Optional[float] = 1.0 / 3000.0
    gov_t_s: float = 0.2
    turb_t_s: float = 5.0
    sfr_capacity_mw: float = 2000.0
    # Slew limit on the secondary-control setpoint (None = unlimited).
    ramp_limit_mw_per_s: Optional[float] = 20.0
    control_mode: str = "TBC"


@dataclass(frozen=True)
class TieLineParams:
    sync_mw_per_hz_s: float = 2000.0


@dataclass(frozen=True)
class SocDist:
    """Truncated-normal spec for an SOC draw (per-unit)."""

    mean: float
    variance: float
    lower: float
    upper: float


@dataclass(frozen=True)
class FleetSpec:
    n_aggregators: int = 1
    stations_per_aggregator: int = 100
    count_type_i: int = 350
    count_type_ii: int = 90
    count_type_iii: int = 60
    init_soc_type_i: SocDist = SocDist(0.4, 0.01, 0.3, 0.5)
    init_soc_type_ii: SocDist = SocDist(0.7, 0.01, 0.6, 0.8)
    init_soc_type_iii: SocDist = SocDist(0.7, 0.01, 0.6, 0.8)
    exp_soc_type_i: SocDist = SocDist(0.7, 0.01, 0.6, 0.8)
    exp_soc_type_ii: SocDist = SocDist(0.4, 0.01, 0.3, 0.5)
    # TYPE III expected SOC always equals its initial SOC.
    e_rated_kwh: float = 24.0
    p_max_kw: float = 10.0
    eta_ch: float = 0.9
    eta_disch: float = 0.9
    plug_in_s: float = 28800.0
    plug_out_s: float = 61200.0
    # When False the fleet is removed from the plant entirely (baseline probe).
    include_as_load: bool = True
    n_trace_evs: int = 9

    @property
    def evs_per_station(self) -> int:
        return self.count_type_i + self.count_type_ii + self.count_type_iii

    @property
    def n_stations(self) -> int:
        return self.n_aggregators * self.stations_per_aggregator


@dataclass(frozen=True)
class DispatchPolicy:
    distribution: str = "normal"
    mu: float = 0.5
    sigma2: float = 0.01
    lo: float = 0.0
    hi: float = 1.0
    r_const: float = 0.5
    ace_deadband_mw: float = 20.0
    pi_kp: float = 1.0
    pi_ki: float = 0.01
    # When True the PI shapes the raw ACE and the EV share is split afterwards.
    pi_on_ace: bool = False


@dataclass(frozen=True)
class SyntheticLoadParams:
    # Piecewise-linear trend through (time_s, deviation_mw) breakpoints.
    trend_points: tuple = ((28800.0, 0.0), (61200.0, 0.0))
    noise_std_mw: float = 0.0
    noise_corr_time_s: float = 60.0
    sample_dt_s: float = 4.0


@dataclass(frozen=True)
class LoadSource:
    kind: str = "synthetic"
    synthetic: SyntheticLoadParams = SyntheticLoadParams()
    csv_path: Optional[str] = None


@dataclass(frozen=True)
class WindSpec:
    enabled: bool = False
    time_constant_s: float = 1.0
    noise_std_mw: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    strategy: str = "CS2"
    clocks: ClockParams = ClockParams()
    area_a: AreaParams = AreaParams()
    area_b: AreaParams = AreaParams(
        inertia_mws=54720.0,
        damping_mw_per_hz=6840.0,
        control_mode="FTC",
        ramp_limit_mw_per_s=60.0,
    )
    tie: TieLineParams = TieLineParams()
    fleet: FleetSpec = FleetSpec()
    policy: DispatchPolicy = DispatchPolicy()
    load_source: LoadSource = LoadSource()
    wind: WindSpec = WindSpec()
    sanity_limit_hz: float = 1.0


# ---------------------------------------------------------------------------
# validation


def _require(cond: bool, fld: str, msg: str):
    if not cond:
        raise ConfigError(fld, msg)


def _is_multiple(big: float, small: float) -> bool:
    if small <= 0:
        return False
    ratio = big / small
    return abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every invariant; returns the config unchanged on success."""
    _require(cfg.schema_version == SCHEMA_VERSION, "schema_version",
             f"expected {SCHEMA_VERSION}, got {cfg.schema_version}")
    _require(cfg.seed >= 0, "seed", "must be a non-negative integer")
    _require(cfg.strategy in STRATEGIES, "strategy",
             f"must be one of {STRATEGIES}")

    c = cfg.clocks
    for name in ("dt_plant_s", "dt_regu_s", "dt_corr_s"):
        _require(getattr(c, name) > 0, f"clocks.{name}", "must be positive")
    _require(c.comm_delay_s >= 0, "clocks.comm_delay_s", "must be >= 0")
    _require(_is_multiple(c.dt_regu_s, c.dt_plant_s), "clocks.dt_regu_s",
             "must be a positive integer multiple of dt_plant_s")
    _require(_is_multiple(c.dt_corr_s, c.dt_regu_s), "clocks.dt_corr_s",
             "must be a positive integer multiple of dt_regu_s")
    _require(c.comm_delay_s < c.dt_regu_s, "clocks.comm_delay_s",
             "must be smaller than dt_regu_s")
    _require(c.comm_delay_s == 0 or _is_multiple(c.comm_delay_s, c.dt_plant_s),
             "clocks.comm_delay_s", "must be a multiple of dt_plant_s")
    _require(0 <= c.horizon_start_s < c.horizon_end_s <= 86400.0,
             "clocks.horizon_start_s", "horizon must satisfy 0 <= start < end <= 86400")
    _require(_is_multiple(c.horizon_end_s - c.horizon_start_s, c.dt_regu_s),
             "clocks.horizon_end_s", "horizon length must be a multiple of dt_regu_s")

    for label, a in (("area_a", cfg.area_a), ("area_b", cfg.area_b)):
        _require(a.inertia_mws > 0, f"{label}.inertia_mws", "must be positive")
        _require(a.damping_mw_per_hz >= 0, f"{label}.damping_mw_per_hz", "must be >= 0")
        _require(a.pfc_deadband_hz >= 0, f"{label}.pfc_deadband_hz", "must be >= 0")
        _require(a.droop_hz_per_mw is None or a.droop_hz_per_mw > 0,
                 f"{label}.droop_hz_per_mw", "must be positive or null")
        _require(a.gov_t_s > 0, f"{label}.gov_t_s", "must be positive")
        _require(a.turb_t_s > 0, f"{label}.turb_t_s", "must be positive")
        _require(a.sfr_capacity_mw > 0, f"{label}.sfr_capacity_mw", "must be positive")
        _require(a.ramp_limit_mw_per_s is None or a.ramp_limit_mw_per_s > 0,
                 f"{label}.ramp_limit_mw_per_s", "must be positive or null")
        _require(a.control_mode in CONTROL_MODES, f"{label}.control_mode",
                 f"must be one of {CONTROL_MODES}")

    _require(cfg.tie.sync_mw_per_hz_s > 0, "tie.sync_mw_per_hz_s", "must be positive")

    f = cfg.fleet
    _require(f.n_aggregators >= 1, "fleet.n_aggregators", "must be >= 1")
    _require(f.stations_per_aggregator >= 1, "fleet.stations_per_aggregator", "must be >= 1")
    for name in ("count_type_i", "count_type_ii", "count_type_iii"):
        _require(getattr(f, name) >= 0, f"fleet.{name}", "must be >= 0")
    _require(f.evs_per_station > 0, "fleet.count_type_i", "station must hold at least one EV")
    _require(f.e_rated_kwh > 0, "fleet.e_rated_kwh", "must be positive")
    _require(f.p_max_kw > 0, "fleet.p_max_kw", "must be positive")
    _require(0 < f.eta_ch <= 1, "fleet.eta_ch", "must be in (0, 1]")
    _require(0 < f.eta_disch <= 1, "fleet.eta_disch", "must be in (0, 1]")
    _require(f.plug_in_s < f.plug_out_s, "fleet.plug_in_s",
             "plug window must be non-empty")
    _require(f.n_trace_evs >= 0, "fleet.n_trace_evs", "must be >= 0")
    for name in ("init_soc_type_i", "init_soc_type_ii", "init_soc_type_iii",
                 "exp_soc_type_i", "exp_soc_type_ii"):
        d = getattr(f, name)
        _require(d.variance > 0, f"fleet.{name}.variance", "must be positive")
        _require(0 <= d.lower < d.upper <= 1, f"fleet.{name}.lower",
                 "truncation bounds must satisfy 0 <= lower < upper <= 1")

    p = cfg.policy
    _require(p.distribution in DISTRIBUTIONS, "policy.distribution",
             f"must be one of {DISTRIBUTIONS}")
    if p.distribution == "normal":
        _require(0 <= p.mu <= 1, "policy.mu", "must be in [0, 1]")
        _require(p.sigma2 > 0, "policy.sigma2", "must be positive")
    elif p.distribution == "uniform":
        _require(0 <= p.lo <= p.hi <= 1, "policy.lo",
                 "must satisfy 0 <= lo <= hi <= 1")
    else:
        _require(0 <= p.r_const <= 1, "policy.r_const", "must be in [0, 1]")
    _require(p.ace_deadband_mw >= 0, "policy.ace_deadband_mw", "must be >= 0")

    ls = cfg.load_source
    _require(ls.kind in ("synthetic", "csv"), "load_source.kind",
             "must be 'synthetic' or 'csv'")
    if ls.kind == "csv":
        _require(bool(ls.csv_path), "load_source.csv_path",
                 "required when kind is 'csv'")
    else:
        sp = ls.synthetic
        _require(len(sp.trend_points) >= 1, "load_source.synthetic.trend_points",
                 "need at least one breakpoint")
        times = [t for t, _ in sp.trend_points]
        _require(all(b > a for a, b in zip(times, times[1:])),
                 "load_source.synthetic.trend_points", "times must be strictly increasing")
        _require(sp.noise_std_mw >= 0, "load_source.synthetic.noise_std_mw", "must be >= 0")
        _require(sp.noise_corr_time_s > 0, "load_source.synthetic.noise_corr_time_s",
                 "must be positive")
        _require(sp.sample_dt_s > 0, "load_source.synthetic.sample_dt_s", "must be positive")

    _require(cfg.wind.time_constant_s > 0, "wind.time_constant_s", "must be positive")
    _require(cfg.wind.noise_std_mw >= 0, "wind.noise_std_mw", "must be >= 0")
    _require(cfg.sanity_limit_hz > 0, "sanity_limit_hz", "must be positive")
    return cfg


# ---------------------------------------------------------------------------
# dict <-> dataclass

_NESTED = {
    "clocks": ClockParams,
    "area_a": AreaParams,
    "area_b": AreaParams,
    "tie": TieLineParams,
    "fleet": FleetSpec,
    "policy": DispatchPolicy,
    "load_source": LoadSource,
    "wind": WindSpec,
    "synthetic": SyntheticLoadParams,
}
_SOC_FIELDS = ("init_soc_type_i", "init_soc_type_ii", "init_soc_type_iii",
               "exp_soc_type_i", "exp_soc_type_ii")


def _build(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path or cls.__name__, "expected a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown field")
    kwargs = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        if key in _NESTED and key != "synthetic":
            kwargs[key] = _build(_NESTED[key], value, sub)
        elif key == "synthetic":
            kwargs[key] = _build(SyntheticLoadParams, value, sub)
        elif cls is FleetSpec and key in _SOC_FIELDS:
            kwargs[key] = _build(SocDist, value, sub)
        elif cls is SyntheticLoadParams and key == "trend_points":
            try:
                kwargs[key] = tuple((float(t), float(v)) for t, v in value)
            except (TypeError, ValueError):
                raise ConfigError(sub, "expected a list of [time_s, deviation_mw] pairs")
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(path or cls.__name__, str(exc))


def config_from_dict(data: dict) -> ScenarioConfig:
    return validate_config(_build(ScenarioConfig, data, ""))


def config_to_dict(cfg: ScenarioConfig) -> dict:
    def unpack(obj):
        if dataclasses.is_dataclass(obj):
            return {k: unpack(v) for k, v in dataclasses.asdict(obj).items()}
        if isinstance(obj, tuple):
            return [unpack(v) for v in obj]
        return obj

    return unpack(cfg)


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario YAML file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            loc = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
            raise ConfigError(str(path), f"YAML parse error{loc}: {exc}")
    if data is None:
        data = {}
    return config_from_dict(data)


def save_config(cfg: ScenarioConfig, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, sort_keys=True)


# ---------------------------------------------------------------------------
# presets


def paper_preset(seed: int = 0, strategy: str = "CS2") -> ScenarioConfig:
    """Full-size two-area grid: 100 stations x 500 EVs, published area parameters."""
    load = LoadSource(synthetic=SyntheticLoadParams(
        trend_points=((28800.0, 0.0), (36000.0, 250.0), (43200.0, 120.0),
                      (50400.0, 300.0), (57600.0, 80.0), (61200.0, 150.0)),
        noise_std_mw=80.0,
        noise_corr_time_s=120.0,
        sample_dt_s=4.0,
    ))
    return validate_config(ScenarioConfig(
        seed=seed, strategy=strategy, load_source=load,
        wind=WindSpec(enabled=True, time_constant_s=1.0, noise_std_mw=30.0),
    ))


def desk_preset(seed: int = 0, strategy: str = "CS2") -> ScenarioConfig:
    """Scaled-down grid (10 stations x 50 EVs) that runs a 9 h day in seconds."""
    area_a = AreaParams(
        inertia_mws=1632.0,
        damping_mw_per_hz=204.0,
        bias_mw_per_0p1hz=20.4,
        droop_hz_per_mw=1.0 / 300.0,
        sfr_capacity_mw=200.0,
        ramp_limit_mw_per_s=None,
        control_mode="TBC",
    )
    area_b = AreaParams(
        inertia_mws=5472.0,
        damping_mw_per_hz=684.0,
        bias_mw_per_0p1hz=68.4,
        droop_hz_per_mw=1.0 / 1000.0,
        sfr_capacity_mw=600.0,
        ramp_limit_mw_per_s=None,
        control_mode="FTC",
    )
    fleet = FleetSpec(
        stations_per_aggregator=10,
        count_type_i=35, count_type_ii=9, count_type_iii=6,
    )
    load = LoadSource(synthetic=SyntheticLoadParams(
        trend_points=((28800.0, 0.0), (61200.0, 0.0)),
        noise_std_mw=0.4,
        noise_corr_time_s=30.0,
        sample_dt_s=4.0,
    ))
    # A weak tie keeps the per-tick gain from an EV power step to the next
    # ACE sample below one, so dispatch at high ratios stays well behaved.
    tie = TieLineParams(sync_mw_per_hz_s=20.0)
    # Integral-dominant secondary control: proportional action at this small
    # scale excites the lightly damped tie-line mode through the sampling and
    # communication lags.
    policy = DispatchPolicy(ace_deadband_mw=0.1, pi_kp=0.0, pi_ki=0.05)
    return validate_config(ScenarioConfig(
        seed=seed, strategy=strategy,
        area_a=area_a, area_b=area_b,
        tie=tie,
        fleet=fleet, policy=policy, load_source=load,
    ))


def preset(name: str, seed: int = 0, strategy: str = "CS2") -> ScenarioConfig:
    if name == "paper":
        return paper_preset(seed, strategy)
    if name == "desk":
        return desk_preset(seed, strategy)
    raise ConfigError("preset", f"unknown preset {name!r} (expected 'paper' or 'desk')")


def with_wide_initial_soc(cfg: ScenarioConfig) -> ScenarioConfig:
    """Robustness variant: initial-SOC variance 0.1, truncation [0.1, 0.9], all types."""
    wide = lambda mean: SocDist(mean, 0.1, 0.1, 0.9)
    fleet = dataclasses.replace(
        cfg.fleet,
        init_soc_type_i=wide(0.4),
        init_soc_type_ii=wide(0.7),
        init_soc_type_iii=wide(0.7),
    )
    return validate_config(dataclasses.replace(cfg, fleet=fleet))


def with_biased_disturbance(cfg: ScenarioConfig, amplitude_mw: float = 8.0,
                            period_s: float = 480.0,
                            quiet_tail_s: float = 7200.0) -> ScenarioConfig:
    """Variant whose load trend is a sawtooth: a slow ramp up followed by a
    fast reset.  The secondary loop tracks the ramp with a steady lag while
    the reset spike exceeds the fleet's charging headroom, so the ACE sign
    mix is biased and EV regulation is predominantly one-sided.  The teeth
    stop ``quiet_tail_s`` before the horizon end."""
    t0 = cfg.clocks.horizon_start_s
    t1 = cfg.clocks.horizon_end_s
    points = []
    t = t0
    while t + period_s <= t1 - quiet_tail_s:
        points.append((t, 0.0))
        points.append((t + period_s - 4.0, amplitude_mw))
        t += period_s
    points.append((t1, 0.0))
    synthetic = dataclasses.replace(cfg.load_source.synthetic,
                                    trend_points=tuple(points))
    load = dataclasses.replace(cfg.load_source, synthetic=synthetic)
    return validate_config(dataclasses.replace(cfg, load_source=load))


def set_config_value(cfg: ScenarioConfig, path: str, value) -> ScenarioConfig:
    """Return a copy of ``cfg`` with the dotted ``path`` (e.g. 'policy.mu') replaced."""
    parts = path.split(".")
    def rebuild(obj, idx):
        name = parts[idx]
        if not dataclasses.is_dataclass(obj) or name not in {f.name for f in dataclasses.fields(obj)}:
            raise ConfigError(path, f"unknown config path segment {name!r}")
        if idx == len(parts) - 1:
            return dataclasses.replace(obj, **{name: value})
        return dataclasses.replace(obj, **{name: rebuild(getattr(obj, name), idx + 1)})

    return validate_config(rebuild(cfg, 0))
