"""Charging-station V2G logic: per-EV capacity, station FRC uploads, scheduled
power (constant and real-time corrected), and proportional task allocation.

Capacities are computed about each EV's scheduled power, so any station task
inside the uploaded FRC composes into per-EV powers that never hit the +-p_max
clamp.  Uploaded regulation-up FRC is derated by the discharging efficiency
(what the grid can actually receive); regulation-down is the battery-side sum,
which is conservative because charging draws more than the battery stores.
"""

from __future__ import annotations

import numpy as np


def ev_capacity(p_sche_kw, p_max_kw, is_plugged):
    """Battery-side regulation headroom (p_up, p_down, participating) per EV.

    An EV whose scheduled power reaches +-p_max (or that is unplugged) is
    excluded from regulation: both capacities are zero and it only executes
    its (clamped) schedule.
    """
    p_sche_kw = np.asarray(p_sche_kw, dtype=float)
    p_max_kw = np.asarray(p_max_kw, dtype=float)
    participating = np.asarray(is_plugged) & (np.abs(p_sche_kw) < p_max_kw)
    p_up = np.where(participating, p_max_kw + p_sche_kw, 0.0)
    p_down = np.where(participating, p_max_kw - p_sche_kw, 0.0)
    return p_up, p_down, participating


def station_sums(p_up_kw, p_down_kw, station_idx, n_stations: int):
    """Battery-side per-station capacity sums (kW), fixed ascending-station order."""
    up = np.bincount(station_idx, weights=p_up_kw, minlength=n_stations)
    down = np.bincount(station_idx, weights=p_down_kw, minlength=n_stations)
    return up, down


def station_frc(sum_up_kw, sum_down_kw, eta_disch: float):
    """Grid-side FRC upload (MW) from battery-side capacity sums."""
    return np.asarray(sum_up_kw) * eta_disch / 1000.0, np.asarray(sum_down_kw) / 1000.0


def scheduled_power_const(soc_init, soc_exp, e_rated_kwh, t_init_s, t_out_s):
    """Constant battery-side schedule reaching the expected SOC at plug-out (kW)."""
    hours = (np.asarray(t_out_s) - np.asarray(t_init_s)) / 3600.0
    return (np.asarray(soc_exp) - np.asarray(soc_init)) * np.asarray(e_rated_kwh) / hours


def scheduled_power_realtime(soc, soc_exp, e_rated_kwh, t_out_s, now: float,
                             prev_kw, dt_corr_s: float):
    """Hourly-corrected schedule from the current SOC and remaining window (kW).

    When less than a quarter correction interval remains the previous value is
    held (the remaining-time denominator would blow up).
    """
    remaining_s = np.asarray(t_out_s, dtype=float) - now
    safe = remaining_s >= dt_corr_s / 4.0
    hours = np.where(safe, remaining_s, dt_corr_s) / 3600.0
    fresh = (np.asarray(soc_exp) - np.asarray(soc)) * np.asarray(e_rated_kwh) / hours
    return np.where(safe, fresh, prev_kw)


def allocate_to_evs(task_mw, p_up_kw, p_down_kw, sum_up_kw, sum_down_kw,
                    station_idx, eta_ch: float, eta_disch: float):
    """Split station tasks (grid-side MW, one per station) into battery-side kW.

    Discharge tasks are scaled by 1/eta_disch and charge tasks by eta_ch so the
    grid-side sum over a station equals its task exactly.  A station with zero
    capacity on the relevant side contributes all-zero assignments.
    """
    task_kw = np.asarray(task_mw, dtype=float) * 1000.0
    up_t = task_kw[station_idx]
    sum_up = np.asarray(sum_up_kw, dtype=float)[station_idx]
    sum_down = np.asarray(sum_down_kw, dtype=float)[station_idx]
    with np.errstate(invalid="ignore", divide="ignore"):
        share_up = np.where(sum_up > 0, p_up_kw / np.where(sum_up > 0, sum_up, 1.0), 0.0)
        share_down = np.where(sum_down > 0, p_down_kw / np.where(sum_down > 0, sum_down, 1.0), 0.0)
    p_regu = np.where(
        up_t <= 0.0,
        (up_t / eta_disch) * share_up,
        (up_t * eta_ch) * share_down,
    )
    return p_regu


def compose_v2g_power(p_sche_kw, p_regu_kw, p_max_kw):
    """Total battery-side V2G power, clamped to +-p_max; returns (power, n_clamped)."""
    raw = np.asarray(p_sche_kw, dtype=float) + np.asarray(p_regu_kw, dtype=float)
    p_max_kw = np.asarray(p_max_kw, dtype=float)
    clamped = np.clip(raw, -p_max_kw, p_max_kw)
    n_clamped = int(np.count_nonzero(clamped != raw))
    return clamped, n_clamped


def grid_side_kw(p_battery_kw, eta_ch: float, eta_disch: float):
    """Grid-side power drawn (kW, positive = consuming) for battery-side power."""
    p = np.asarray(p_battery_kw, dtype=float)
    return np.where(p > 0, p / eta_ch, p * eta_disch)
