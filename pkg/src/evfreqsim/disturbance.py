"""Load-deviation and wind-fluctuation inputs.

The load profile is a zero-order-hold sequence of (time, MW) samples, either
synthesized (piecewise-linear trend plus AR(1) band-limited noise) or read
from a two-column CSV.  Wind is first-order low-pass filtered white noise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter, lfiltic

from .config import SyntheticLoadParams, WindSpec
from .errors import ConfigError


@dataclass(frozen=True)
class LoadProfile:
    """Zero-order-hold load deviation: sample i holds on [t_i, t_{i+1})."""

    times_s: np.ndarray
    deviation_mw: np.ndarray

    def __post_init__(self):
        if len(self.times_s) == 0:
            raise ConfigError("load_profile", "profile must be non-empty")
        if np.any(np.diff(self.times_s) <= 0):
            raise ConfigError("load_profile", "sample times must be strictly increasing")

    def value_at(self, t: float) -> float:
        idx = int(np.searchsorted(self.times_s, t, side="right")) - 1
        return float(self.deviation_mw[max(idx, 0)])

    def resample(self, t0: float, dt: float, n: int) -> np.ndarray:
        """ZOH values at t0, t0+dt, ..., t0+(n-1)*dt."""
        grid = t0 + dt * np.arange(n)
        idx = np.clip(np.searchsorted(self.times_s, grid, side="right") - 1, 0, None)
        return self.deviation_mw[idx]


def synthesize_load(params: SyntheticLoadParams, seed_seq: np.random.SeedSequence,
                    t0: float, t1: float) -> LoadProfile:
    """Trend + band-limited noise, sampled every ``sample_dt_s`` over [t0, t1]."""
    n = int(math.floor((t1 - t0) / params.sample_dt_s)) + 1
    times = t0 + params.sample_dt_s * np.arange(n)
    bp_t = np.array([t for t, _ in params.trend_points])
    bp_v = np.array([v for _, v in params.trend_points])
    trend = np.interp(times, bp_t, bp_v)
    if params.noise_std_mw > 0:
        rng = np.random.default_rng(seed_seq)
        a = math.exp(-params.sample_dt_s / params.noise_corr_time_s)
        # AR(1) scaled to a stationary std of noise_std_mw.
        eps = rng.standard_normal(n) * params.noise_std_mw * math.sqrt(1.0 - a * a)
        y0 = rng.standard_normal() * params.noise_std_mw
        zi = lfiltic([1.0], [1.0, -a], [y0])
        noise, _ = lfilter([1.0], [1.0, -a], eps, zi=zi)
        trend = trend + noise
    return LoadProfile(times_s=times, deviation_mw=trend)


def load_profile_from_csv(path) -> LoadProfile:
    """Read a ``time_s,deviation_mw`` CSV (UTF-8, LF) into a profile."""
    times, values = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["time_s", "deviation_mw"]:
            raise ConfigError(str(path), "expected header 'time_s,deviation_mw'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
            except (IndexError, ValueError):
                raise ConfigError(f"{path}:{lineno}", f"bad row {row!r}")
    return LoadProfile(times_s=np.asarray(times), deviation_mw=np.asarray(values))


def wind_disturbance_step(y: float, dt: float, spec: WindSpec, u: float) -> float:
    """One exact-ZOH step of the first-order filter y' = (u - y)/T."""
    if not spec.enabled:
        return 0.0
    a = math.exp(-dt / spec.time_constant_s)
    return a * y + (1.0 - a) * u


def wind_series(spec: WindSpec, seed_seq: np.random.SeedSequence,
                dt: float, n: int) -> np.ndarray:
    """Filtered-noise wind deviation at plant resolution (zeros when disabled)."""
    if not spec.enabled or spec.noise_std_mw == 0.0:
        return np.zeros(n)
    rng = np.random.default_rng(seed_seq)
    u = rng.standard_normal(n) * spec.noise_std_mw
    a = math.exp(-dt / spec.time_constant_s)
    out, _ = lfilter([1.0 - a], [1.0, -a], u, zi=np.zeros(1))
    return out
