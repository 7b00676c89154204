"""Deterministic simulator of a two-area power grid whose frequency
regulation is partly carried by a hierarchically dispatched EV fleet."""

from .config import (ScenarioConfig, config_from_dict, config_to_dict,
                     desk_preset, load_config, paper_preset, preset,
                     save_config, set_config_value, validate_config,
                     with_wide_initial_soc)
from .errors import ConfigError, SimulationDiverged
from .fleet import Fleet, generate_fleet
from .metrics import (BASELINE_LABEL, MetricsSummary, SocDeviationReport,
                      compare_strategies, series_stats)
from .runner import RunRecord, export, run, sweep

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig", "ConfigError", "SimulationDiverged",
    "Fleet", "generate_fleet",
    "MetricsSummary", "SocDeviationReport", "BASELINE_LABEL",
    "compare_strategies", "series_stats",
    "RunRecord", "run", "sweep", "export",
    "config_from_dict", "config_to_dict", "load_config", "save_config",
    "set_config_value", "validate_config",
    "preset", "paper_preset", "desk_preset", "with_wide_initial_soc",
]
