"""Simulation orchestrator: wires the plant, control center, aggregator,
stations and fleet across the three clock domains, and provides run/sweep
and CSV export.

Per regulation tick the event order is fixed: schedule correction (CS2, on
the hour) -> FRC upload -> ACE -> ratio draw -> EV dispatch -> split -> PI ->
station allocation -> EV allocation -> compose -> (communication delay) ->
plant integration and SOC accumulation.  All randomness flows from four
deterministically derived sub-streams (fleet, load, wind, ratio), so changing
the strategy or dispatch policy never perturbs the disturbance realization.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import aggregator as agg
from . import control, station
from . import ev as evmod
from . import grid
from .config import ScenarioConfig, set_config_value, validate_config
from .disturbance import (LoadProfile, load_profile_from_csv, synthesize_load,
                          wind_series)
from .errors import ConfigError, SimulationDiverged
from .fleet import Fleet, generate_fleet
from .metrics import MetricsSummary, series_stats, soc_deviation_report

TIMESERIES_HEADER = ("time_s,df_a_hz,df_b_hz,dp_tie_mw,ace_a_mw,"
                     "s_contr_mw,s_gener_mw,ev_power_mw,frc_up_mw,frc_down_mw")
SOC_TRACES_HEADER = "time_s,ev_id,ev_type,soc_pu"


@dataclass
class RunRecord:
    """Everything one simulation produced: config snapshot, per-tick series,
    SOC traces, audit residuals, and the metrics summary."""

    config: ScenarioConfig
    times_s: np.ndarray
    df_a_hz: np.ndarray
    df_b_hz: np.ndarray
    dp_tie_mw: np.ndarray
    ace_a_mw: np.ndarray
    ace_b_mw: np.ndarray
    s_contr_mw: np.ndarray
    s_gener_mw: np.ndarray
    ev_power_mw: np.ndarray          # grid-side fleet draw, positive = charging load
    frc_up_mw: np.ndarray
    frc_down_mw: np.ndarray
    r_used: np.ndarray
    # Per-tick conservation residuals (absolute MW).
    audit_split_mw: np.ndarray       # |s_contr + s_gener - ace|
    audit_alloc_mw: np.ndarray       # |sum of station tasks - s_contr|
    audit_station_mw: np.ndarray     # max_j |grid-side EV regulation - task_j|
    trace_ev_ids: np.ndarray
    trace_soc: np.ndarray            # (n_ticks, n_trace)
    corr_times_s: np.ndarray
    corr_soc: np.ndarray             # (n_corrections, n_evs)
    fleet: Fleet
    metrics: MetricsSummary
    soc_window_s: tuple


def _build_load_profile(cfg: ScenarioConfig, seed_seq) -> LoadProfile:
    c = cfg.clocks
    if cfg.load_source.kind == "csv":
        profile = load_profile_from_csv(cfg.load_source.csv_path)
    else:
        profile = synthesize_load(cfg.load_source.synthetic, seed_seq,
                                  c.horizon_start_s, c.horizon_end_s)
    if profile.times_s[0] > c.horizon_start_s:
        raise ConfigError("load_source", "load profile does not cover the horizon start")
    return profile


def run(cfg: ScenarioConfig, workers: int = 1,
        soc_window_s: Optional[tuple] = None) -> RunRecord:
    """Execute one scenario; deterministic for a fixed (config, seed) and
    independent of ``workers``."""
    validate_config(cfg)
    c, fl, pol = cfg.clocks, cfg.fleet, cfg.policy
    t0, t1 = c.horizon_start_s, c.horizon_end_s
    dt_p, dt_r = c.dt_plant_s, c.dt_regu_s
    n_sub = int(round(dt_r / dt_p))
    n_regu = int(round((t1 - t0) / dt_r))
    delay_steps = int(round(c.comm_delay_s / dt_p))
    if soc_window_s is None:
        soc_window_s = (max(t0, t1 - 3600.0), t1)

    master = np.random.SeedSequence(cfg.seed)
    fleet_ss, load_ss, wind_ss, ratio_ss, pick_ss = master.spawn(5)
    fleet = generate_fleet(fl, fleet_ss, workers=workers)
    ratio_rng = np.random.default_rng(ratio_ss)

    profile = _build_load_profile(cfg, load_ss)
    n_plant = n_regu * n_sub
    dist_a_full = profile.resample(t0, dt_p, n_plant) + wind_series(
        cfg.wind, wind_ss, dt_p, n_plant)
    dist_b_full = np.zeros(n_plant)

    pa = grid.area_param_vector(cfg.area_a)
    pb = grid.area_param_vector(cfg.area_b)
    sync = cfg.tie.sync_mw_per_hz_s
    x = np.zeros(grid.N_STATE)
    pi_a = control.PiController(pol.pi_kp, pol.pi_ki, cfg.area_a.sfr_capacity_mw)
    pi_b = control.PiController(pol.pi_kp, pol.pi_ki, cfg.area_b.sfr_capacity_mw)

    # Initial schedules (CS2 recomputes on its correction grid, starting at plug-in).
    p_const = station.scheduled_power_const(
        fleet.soc_init, fleet.soc_exp, fleet.e_rated_kwh, fleet.t_init_s, fleet.t_out_s)
    p_sche = p_const.copy()

    n_ticks = n_regu + 1
    series = {name: np.zeros(n_ticks) for name in (
        "df_a", "df_b", "dp_tie", "ace_a", "ace_b", "s_contr", "s_gener",
        "ev_power", "frc_up", "frc_down", "r_used",
        "audit_split", "audit_alloc", "audit_station")}
    times = t0 + dt_r * np.arange(n_ticks)

    n_trace = min(fl.n_trace_evs, fleet.n_evs)
    trace_ids = np.arange(n_trace)
    trace_soc = np.zeros((n_ticks, n_trace))
    corr_times, corr_soc = [], []

    dev_sq = np.zeros(fleet.n_evs)
    n_dev = 0

    # Signals currently applied at the plant (commands mature after comm_delay).
    applied_cmd_a = applied_cmd_b = applied_ev_gen = 0.0
    applied_sche = np.zeros(fleet.n_evs)
    applied_regu = np.zeros(fleet.n_evs)
    cmd_a_buf = np.empty(n_sub)
    cmd_b_buf = np.empty(n_sub)
    ev_gen_buf = np.empty(n_sub)
    df_scratch = np.empty(n_sub)

    eta_ch, eta_disch = fl.eta_ch, fl.eta_disch
    n_stations = fl.n_stations

    for k in range(n_ticks):
        t = times[k]

        # Hourly schedule correction (CS2 only).
        rel = t - fleet.t_init_s
        corr_due = (rel >= 0) & (t < fleet.t_out_s) & (
            np.abs(rel / c.dt_corr_s - np.round(rel / c.dt_corr_s)) < 1e-9)
        if cfg.strategy == "CS2" and np.any(corr_due):
            fresh = station.scheduled_power_realtime(
                fleet.soc, fleet.soc_exp, fleet.e_rated_kwh, fleet.t_out_s,
                t, p_sche, c.dt_corr_s)
            p_sche = np.where(corr_due, fresh, p_sche)

        # Station FRC upload and aggregator totals.
        plug = fleet.plugged(t)
        p_up, p_down, part = station.ev_capacity(p_sche, fleet.p_max_kw, plug)
        sum_up, sum_down = station.station_sums(p_up, p_down, fleet.station_idx, n_stations)
        st_up_mw, st_down_mw = station.station_frc(sum_up, sum_down, eta_disch)
        tot_up, tot_down = agg.total_frc(st_up_mw, st_down_mw)

        # Control center.
        ace_a = control.compute_ace(x[0], x[8], cfg.area_a)
        ace_b = control.compute_ace(x[4], -x[8], cfg.area_b)
        r = control.sample_ratio(pol, ratio_rng)
        if cfg.strategy == "WO_V2G":
            s_contr = 0.0
        else:
            s_contr = control.uncertain_dispatch(ace_a, tot_up, tot_down, r,
                                                 pol.ace_deadband_mw)
        s_gener = control.split_tasks(ace_a, s_contr)
        in_band_a = abs(ace_a) <= pol.ace_deadband_mw
        if pol.pi_on_ace:
            pi_out_a = pi_a.step(0.0 if in_band_a else ace_a, dt_r) - s_contr
        else:
            pi_out_a = pi_a.step(0.0 if in_band_a else s_gener, dt_r)
        cmd_a = -pi_out_a
        in_band_b = abs(ace_b) <= pol.ace_deadband_mw
        cmd_b = -pi_b.step(0.0 if in_band_b else ace_b, dt_r)

        # Hierarchical allocation down to EV powers.
        tasks = agg.allocate_to_stations(s_contr, st_up_mw, st_down_mw, tot_up, tot_down)
        p_regu = station.allocate_to_evs(tasks, p_up, p_down, sum_up, sum_down,
                                         fleet.station_idx, eta_ch, eta_disch)
        composed, n_clamp = station.compose_v2g_power(p_sche, p_regu, fleet.p_max_kw)
        fleet.n_power_clamps += n_clamp
        sche_eff = np.where(plug, np.clip(p_sche, -fleet.p_max_kw, fleet.p_max_kw), 0.0)
        regu_eff = np.where(plug, composed - np.clip(p_sche, -fleet.p_max_kw,
                                                     fleet.p_max_kw), 0.0)
        grid_kw = station.grid_side_kw(sche_eff + regu_eff, eta_ch, eta_disch)
        ev_load_mw = float(np.sum(grid_kw)) / 1000.0 if fl.include_as_load else 0.0

        # Conservation audit.
        grid_regu_kw = station.grid_side_kw(regu_eff, eta_ch, eta_disch)
        station_regu_mw = np.bincount(fleet.station_idx, weights=grid_regu_kw,
                                      minlength=n_stations) / 1000.0
        series["audit_split"][k] = abs(s_contr + s_gener - ace_a)
        series["audit_alloc"][k] = abs(float(np.sum(tasks)) - s_contr)
        series["audit_station"][k] = float(np.max(np.abs(station_regu_mw - tasks)))

        series["df_a"][k] = x[0]
        series["df_b"][k] = x[4]
        series["dp_tie"][k] = x[8]
        series["ace_a"][k] = ace_a
        series["ace_b"][k] = ace_b
        series["s_contr"][k] = s_contr
        series["s_gener"][k] = s_gener
        series["ev_power"][k] = ev_load_mw
        series["frc_up"][k] = tot_up
        series["frc_down"][k] = tot_down
        series["r_used"][k] = r

        if soc_window_s[0] <= t <= soc_window_s[1]:
            ref = evmod.expected_soc_trajectory(
                fleet.soc_init, fleet.soc_exp, fleet.t_init_s, fleet.t_out_s, t)
            dev_sq += (fleet.soc - ref) ** 2
            n_dev += 1
        if n_trace:
            trace_soc[k] = fleet.soc[trace_ids]
        if n_trace and bool(np.any(corr_due)):
            corr_times.append(t)
            corr_soc.append(fleet.soc.copy())

        if k == n_regu:
            break

        # Plant integration over [t, t + dt_regu) with the communication delay.
        cmd_a_buf[:delay_steps] = applied_cmd_a
        cmd_a_buf[delay_steps:] = cmd_a
        cmd_b_buf[:delay_steps] = applied_cmd_b
        cmd_b_buf[delay_steps:] = cmd_b
        ev_gen = -ev_load_mw
        ev_gen_buf[:delay_steps] = applied_ev_gen
        ev_gen_buf[delay_steps:] = ev_gen
        lo = k * n_sub
        bad = grid._integrate(
            x, n_sub, dt_p, pa, pb, sync,
            dist_a_full[lo:lo + n_sub], dist_b_full[lo:lo + n_sub],
            ev_gen_buf, cmd_a_buf, cmd_b_buf, cfg.sanity_limit_hz, df_scratch)
        if bad >= 0:
            raise SimulationDiverged(
                t + (bad + 1) * dt_p, "frequency sanity limit exceeded "
                f"(|df| > {cfg.sanity_limit_hz} Hz)",
                grid.PlantState.from_vector(x))

        # SOC: old powers until the command matures, new powers afterwards.
        if delay_steps:
            fleet.soc, d_s, d_r, n_sat = evmod.advance_soc(
                fleet.soc, applied_sche, applied_regu, delay_steps * dt_p,
                fleet.e_rated_kwh)
            fleet.e_sche_acc_kwh += d_s
            fleet.e_regu_acc_kwh += d_r
            fleet.n_soc_saturations += n_sat
        fleet.soc, d_s, d_r, n_sat = evmod.advance_soc(
            fleet.soc, sche_eff, regu_eff, (n_sub - delay_steps) * dt_p,
            fleet.e_rated_kwh)
        fleet.e_sche_acc_kwh += d_s
        fleet.e_regu_acc_kwh += d_r
        fleet.n_soc_saturations += n_sat

        applied_cmd_a, applied_cmd_b, applied_ev_gen = cmd_a, cmd_b, ev_gen
        applied_sche, applied_regu = sche_eff, regu_eff
        fleet.p_sche_kw, fleet.p_regu_kw = sche_eff, regu_eff

    per_ev_rms = np.sqrt(dev_sq / max(n_dev, 1))
    soc_dev = soc_deviation_report(per_ev_rms, fleet.ev_type, soc_window_s,
                                   np.random.default_rng(pick_ss))
    summary = MetricsSummary(
        strategy=cfg.strategy, seed=cfg.seed, horizon_s=(t0, t1),
        ace=series_stats(series["ace_a"]),
        freq_a=series_stats(series["df_a"]),
        freq_b=series_stats(series["df_b"]),
        soc_dev=soc_dev,
        n_power_clamps=fleet.n_power_clamps,
        n_soc_saturations=fleet.n_soc_saturations,
    )
    return RunRecord(
        config=cfg, times_s=times,
        df_a_hz=series["df_a"], df_b_hz=series["df_b"], dp_tie_mw=series["dp_tie"],
        ace_a_mw=series["ace_a"], ace_b_mw=series["ace_b"],
        s_contr_mw=series["s_contr"], s_gener_mw=series["s_gener"],
        ev_power_mw=series["ev_power"], frc_up_mw=series["frc_up"],
        frc_down_mw=series["frc_down"], r_used=series["r_used"],
        audit_split_mw=series["audit_split"], audit_alloc_mw=series["audit_alloc"],
        audit_station_mw=series["audit_station"],
        trace_ev_ids=trace_ids, trace_soc=trace_soc,
        corr_times_s=np.asarray(corr_times), corr_soc=np.asarray(corr_soc),
        fleet=fleet, metrics=summary, soc_window_s=soc_window_s,
    )


def sweep(base: ScenarioConfig, axis: str, values, workers: int = 1):
    """One run per value of the dotted config ``axis``, common seed."""
    if not values:
        raise ConfigError("sweep.values", "need at least one value")
    configs = [set_config_value(base, axis, v) for v in values]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, configs))
    return [run(c) for c in configs]


def export(record: RunRecord, out_dir) -> list:
    """Write timeseries.csv, soc_traces.csv, metrics.kv and config.yaml.

    Output is byte-stable: rerunning the snapshot reproduces identical files.
    """
    from .config import save_config

    os.makedirs(out_dir, exist_ok=True)
    paths = []

    ts_path = os.path.join(out_dir, "timeseries.csv")
    cols = (record.times_s, record.df_a_hz, record.df_b_hz, record.dp_tie_mw,
            record.ace_a_mw, record.s_contr_mw, record.s_gener_mw,
            record.ev_power_mw, record.frc_up_mw, record.frc_down_mw)
    with open(ts_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TIMESERIES_HEADER + "\n")
        for row in zip(*cols):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    paths.append(ts_path)

    soc_path = os.path.join(out_dir, "soc_traces.csv")
    type_names = evmod.TYPE_NAMES
    with open(soc_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SOC_TRACES_HEADER + "\n")
        for i, t in enumerate(record.times_s):
            for j, ev_id in enumerate(record.trace_ev_ids):
                fh.write(f"{float(t)!r},{int(ev_id)},"
                         f"{type_names[record.fleet.ev_type[ev_id]]},"
                         f"{float(record.trace_soc[i, j])!r}\n")
        for i, t in enumerate(record.corr_times_s):
            for ev_id in range(record.fleet.n_evs):
                fh.write(f"{float(t)!r},{ev_id},"
                         f"{type_names[record.fleet.ev_type[ev_id]]},"
                         f"{float(record.corr_soc[i, ev_id])!r}\n")
    paths.append(soc_path)

    kv_path = os.path.join(out_dir, "metrics.kv")
    with open(kv_path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in sorted(record.metrics.to_kv().items()):
            fh.write(f"{key}={value!r}\n" if isinstance(value, float)
                     else f"{key}={value}\n")
    paths.append(kv_path)

    cfg_path = os.path.join(out_dir, "config.yaml")
    save_config(record.config, cfg_path)
    paths.append(cfg_path)
    return paths
