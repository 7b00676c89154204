"""Evaluation statistics: Max/Min/RMS of recorded series, final-window SOC
deviation, and side-by-side strategy comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ev import TYPE_NAMES, expected_soc_trajectory


@dataclass(frozen=True)
class SeriesStats:
    max: float
    min: float
    rms: float
    n: int


def series_stats(samples) -> SeriesStats:
    """Componentwise max, min and root-mean-square of a nonempty series."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("series_stats: empty series")
    return SeriesStats(max=float(arr.max()), min=float(arr.min()),
                       rms=float(np.sqrt(np.mean(arr * arr))), n=int(arr.size))


@dataclass(frozen=True)
class SocDeviationReport:
    """Per-EV RMS of (SOC - expected SOC path) over a window, aggregated per type.

    For each type: the population mean and max of the per-EV RMS values, plus
    one randomly selected EV's RMS (the presentation used in the source data).
    """

    window_s: tuple
    per_ev_rms: np.ndarray
    ev_type: np.ndarray
    mean_by_type: dict
    max_by_type: dict
    sample_by_type: dict

    @property
    def fleet_mean(self) -> float:
        return float(self.per_ev_rms.mean())

    @property
    def fleet_max(self) -> float:
        return float(self.per_ev_rms.max())


def soc_deviation_report(per_ev_rms: np.ndarray, ev_type: np.ndarray,
                         window_s, rng: Optional[np.random.Generator] = None
                         ) -> SocDeviationReport:
    """Aggregate already-computed per-EV deviation RMS values."""
    rng = rng or np.random.default_rng(0)
    mean_by, max_by, sample_by = {}, {}, {}
    for code, name in enumerate(TYPE_NAMES):
        vals = per_ev_rms[ev_type == code]
        if len(vals) == 0:
            continue
        mean_by[name] = float(vals.mean())
        max_by[name] = float(vals.max())
        sample_by[name] = float(vals[rng.integers(len(vals))])
    return SocDeviationReport(window_s=tuple(window_s), per_ev_rms=per_ev_rms,
                              ev_type=ev_type, mean_by_type=mean_by,
                              max_by_type=max_by, sample_by_type=sample_by)


def soc_deviation_rms(times_s, soc_trajectories, soc_init, soc_exp,
                      t_init_s, t_out_s, window_s, ev_type,
                      rng: Optional[np.random.Generator] = None) -> SocDeviationReport:
    """Per-EV deviation RMS from full trajectories (rows: time, cols: EV)."""
    times_s = np.asarray(times_s, dtype=float)
    lo, hi = window_s
    if lo >= hi:
        raise ValueError("soc window must be non-empty")
    mask = (times_s >= lo) & (times_s <= hi)
    if not np.any(mask):
        raise ValueError("soc window lies outside the recorded horizon")
    dev_sq = np.zeros(np.asarray(soc_trajectories).shape[1])
    for t, row in zip(times_s[mask], np.asarray(soc_trajectories)[mask]):
        ref = expected_soc_trajectory(soc_init, soc_exp, t_init_s, t_out_s, t)
        dev_sq += (row - ref) ** 2
    per_ev = np.sqrt(dev_sq / int(mask.sum()))
    return soc_deviation_report(per_ev, np.asarray(ev_type), window_s, rng)


@dataclass(frozen=True)
class MetricsSummary:
    strategy: str
    seed: int
    horizon_s: tuple
    ace: SeriesStats
    freq_a: SeriesStats
    freq_b: SeriesStats
    soc_dev: Optional[SocDeviationReport] = None
    n_power_clamps: int = 0
    n_soc_saturations: int = 0

    def to_kv(self) -> dict:
        kv = {
            "strategy": self.strategy,
            "seed": self.seed,
            "ace.max_mw": self.ace.max,
            "ace.min_mw": self.ace.min,
            "ace.rms_mw": self.ace.rms,
            "freq.max_hz": self.freq_a.max,
            "freq.min_hz": self.freq_a.min,
            "freq.rms_hz": self.freq_a.rms,
            "freq_b.max_hz": self.freq_b.max,
            "freq_b.min_hz": self.freq_b.min,
            "freq_b.rms_hz": self.freq_b.rms,
            "events.power_clamps": self.n_power_clamps,
            "events.soc_saturations": self.n_soc_saturations,
        }
        if self.soc_dev is not None:
            suffixes = {"TYPE_I": "type_i", "TYPE_II": "type_ii", "TYPE_III": "type_iii"}
            for name, suffix in suffixes.items():
                if name in self.soc_dev.mean_by_type:
                    kv[f"soc_dev.rms_pu.{suffix}"] = self.soc_dev.mean_by_type[name]
                    kv[f"soc_dev.rms_pu.{suffix}.max"] = self.soc_dev.max_by_type[name]
                    kv[f"soc_dev.rms_pu.{suffix}.sample"] = self.soc_dev.sample_by_type[name]
            kv["soc_dev.rms_pu.fleet_mean"] = self.soc_dev.fleet_mean
            kv["soc_dev.rms_pu.fleet_max"] = self.soc_dev.fleet_max
        return kv


BASELINE_LABEL = "W/O V2G"


def compare_strategies(entries) -> str:
    """Render a Max/Min/RMS comparison table with relative changes vs the
    W/O V2G baseline.  Entries must share seed and horizon (paired runs)."""
    labels = [label for label, _ in entries]
    if BASELINE_LABEL not in labels:
        raise ValueError(f"comparison requires a {BASELINE_LABEL!r} baseline entry")
    seeds = {m.seed for _, m in entries}
    horizons = {m.horizon_s for _, m in entries}
    if len(seeds) > 1 or len(horizons) > 1:
        raise ValueError("comparison entries must share seed and horizon "
                         f"(got seeds {sorted(seeds)}, horizons {sorted(horizons)})")
    base = dict(entries)[BASELINE_LABEL]
    lines = []
    header = (f"{'Strategy':<10} {'ACE max':>10} {'ACE min':>10} {'ACE rms':>10} "
              f"{'df max':>9} {'df min':>9} {'df rms':>9} {'dACErms%':>9}")
    lines.append(header)
    lines.append("-" * len(header))
    for label, m in entries:
        if base.ace.rms > 0:
            rel = 100.0 * (m.ace.rms - base.ace.rms) / base.ace.rms
        else:
            rel = math.nan
        lines.append(
            f"{label:<10} {m.ace.max:>10.2f} {m.ace.min:>10.2f} {m.ace.rms:>10.2f} "
            f"{m.freq_a.max:>9.4f} {m.freq_a.min:>9.4f} {m.freq_a.rms:>9.4f} "
            f"{rel:>+8.1f}%")
    return "\n".join(lines)
