"""End-to-end runner contracts: equilibrium, scheduling closure, record shape,
export reproducibility, and sweeps."""

import dataclasses

import numpy as np
import pytest

import evfreqsim as efs
from evfreqsim.config import load_config, preset
from evfreqsim.errors import ConfigError


def _quiet_desk(strategy):
    """Desk scenario with no disturbance and the fleet excluded from the
    plant's load balance: the grid should sit exactly at its operating point."""
    cfg = preset("desk", seed=0, strategy=strategy)
    synth = dataclasses.replace(cfg.load_source.synthetic,
                                trend_points=((28800.0, 0.0), (61200.0, 0.0)),
                                noise_std_mw=0.0)
    return dataclasses.replace(
        cfg,
        load_source=dataclasses.replace(cfg.load_source, synthetic=synth),
        fleet=dataclasses.replace(cfg.fleet, include_as_load=False))


def test_zero_disturbance_baseline_is_exact_equilibrium():
    rec = efs.run(_quiet_desk("WO_V2G"))
    for series in (rec.df_a_hz, rec.df_b_hz, rec.dp_tie_mw, rec.ace_a_mw,
                   rec.s_contr_mw, rec.s_gener_mw):
        assert np.all(series == 0.0)


def test_cs2_zero_disturbance_hits_expected_soc_exactly():
    rec = efs.run(_quiet_desk("CS2"))
    assert np.max(np.abs(rec.fleet.soc - rec.fleet.soc_exp)) < 1e-9


def test_cs1_zero_disturbance_matches_closed_form():
    # The constant schedule starts one communication delay late, so the
    # exact final SOC is the target minus that 1 s of scheduled energy.
    rec = efs.run(_quiet_desk("CS1"))
    f = rec.fleet
    delay_s = rec.config.clocks.comm_delay_s
    p_const = (f.soc_exp - f.soc_init) * f.e_rated_kwh / 9.0
    predicted = f.soc_exp - p_const * delay_s / 3600.0 / f.e_rated_kwh
    assert np.max(np.abs(f.soc - predicted)) < 1e-9


def test_series_row_count_includes_both_endpoints():
    rec = efs.run(preset("desk", seed=2))
    assert len(rec.times_s) == 9 * 3600 // 4 + 1   # 8101
    assert rec.times_s[0] == 28800.0
    assert rec.times_s[-1] == 61200.0


def test_strategies_share_the_disturbance_realization():
    a = efs.run(preset("desk", seed=5, strategy="WO_V2G"))
    b = efs.run(preset("desk", seed=5, strategy="CS2"))
    # Same seed, same ratio draws, regardless of strategy.
    assert np.array_equal(a.r_used, b.r_used)
    # W/O V2G never dispatches the fleet.
    assert np.all(a.s_contr_mw == 0.0)
    assert np.all(a.s_gener_mw == a.ace_a_mw)


def test_export_snapshot_reproduces_bytes(tmp_path):
    rec = efs.run(preset("desk", seed=4))
    efs.export(rec, tmp_path / "first")
    rerun = efs.run(load_config(tmp_path / "first" / "config.yaml"))
    efs.export(rerun, tmp_path / "second")
    for name in ("timeseries.csv", "soc_traces.csv", "metrics.kv", "config.yaml"):
        assert (tmp_path / "first" / name).read_bytes() == \
               (tmp_path / "second" / name).read_bytes()


def test_export_headers_and_trace_gating(tmp_path):
    cfg = preset("desk", seed=4)
    rec = efs.run(cfg)
    efs.export(rec, tmp_path / "out")
    ts = (tmp_path / "out" / "timeseries.csv").read_text().splitlines()
    assert ts[0] == ("time_s,df_a_hz,df_b_hz,dp_tie_mw,ace_a_mw,"
                     "s_contr_mw,s_gener_mw,ev_power_mw,frc_up_mw,frc_down_mw")
    assert len(ts) == 1 + len(rec.times_s)
    soc = (tmp_path / "out" / "soc_traces.csv").read_text().splitlines()
    assert soc[0] == "time_s,ev_id,ev_type,soc_pu"
    assert len(soc) > 1

    no_trace = dataclasses.replace(
        cfg, fleet=dataclasses.replace(cfg.fleet, n_trace_evs=0))
    efs.export(efs.run(no_trace), tmp_path / "empty")
    assert (tmp_path / "empty" / "soc_traces.csv").read_text() == \
        "time_s,ev_id,ev_type,soc_pu\n"


def test_metrics_kv_keys(tmp_path):
    efs.export(efs.run(preset("desk", seed=4)), tmp_path / "kv")
    kv = dict(line.split("=", 1) for line in
              (tmp_path / "kv" / "metrics.kv").read_text().splitlines())
    for key in ("ace.max_mw", "ace.min_mw", "ace.rms_mw",
                "freq.max_hz", "freq.min_hz", "freq.rms_hz",
                "soc_dev.rms_pu.type_i", "soc_dev.rms_pu.type_ii",
                "soc_dev.rms_pu.type_iii", "soc_dev.rms_pu.fleet_mean",
                "events.power_clamps", "events.soc_saturations"):
        assert key in kv


def test_sweep_runs_one_record_per_value():
    base = preset("desk", seed=6)
    records = efs.sweep(base, "policy.mu", [0.5, 0.8])
    assert [r.config.policy.mu for r in records] == [0.5, 0.8]
    assert records[0].metrics.seed == records[1].metrics.seed
    with pytest.raises(ConfigError):
        efs.sweep(base, "policy.mu", [])
    with pytest.raises(ConfigError):
        efs.sweep(base, "policy.not_a_knob", [1.0])


def test_regulation_respects_uploaded_frc():
    rec = efs.run(preset("desk", seed=8, strategy="CS2"))
    up_ok = rec.s_contr_mw >= -rec.frc_up_mw - 1e-9
    down_ok = rec.s_contr_mw <= rec.frc_down_mw + 1e-9
    assert np.all(up_ok) and np.all(down_ok)
    assert rec.metrics.n_power_clamps == 0
    assert rec.metrics.n_soc_saturations == 0
