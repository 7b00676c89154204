"""Load profiles (synthetic and CSV) and filtered wind noise."""

import math

import numpy as np
import pytest

from evfreqsim.config import SyntheticLoadParams, WindSpec
from evfreqsim.disturbance import (LoadProfile, load_profile_from_csv,
                                   synthesize_load, wind_disturbance_step,
                                   wind_series)
from evfreqsim.errors import ConfigError

T0, T1 = 28800.0, 61200.0


def test_flat_trend_zero_noise_is_constant():
    params = SyntheticLoadParams(trend_points=((T0, 100.0), (T1, 100.0)),
                                 noise_std_mw=0.0)
    profile = synthesize_load(params, np.random.SeedSequence(0), T0, T1)
    assert np.all(profile.deviation_mw == 100.0)


def test_same_seed_same_profile():
    params = SyntheticLoadParams(noise_std_mw=50.0)
    a = synthesize_load(params, np.random.SeedSequence(4), T0, T1)
    b = synthesize_load(params, np.random.SeedSequence(4), T0, T1)
    assert np.array_equal(a.deviation_mw, b.deviation_mw)


def test_noise_std_is_calibrated():
    params = SyntheticLoadParams(trend_points=((T0, 0.0), (T1, 0.0)),
                                 noise_std_mw=50.0, noise_corr_time_s=60.0)
    profile = synthesize_load(params, np.random.SeedSequence(8), T0, T1)
    assert abs(profile.deviation_mw.std() - 50.0) / 50.0 < 0.15


def test_zero_order_hold_lookup():
    profile = LoadProfile(times_s=np.array([0.0, 10.0, 20.0]),
                          deviation_mw=np.array([1.0, 2.0, 3.0]))
    assert profile.value_at(0.0) == 1.0
    assert profile.value_at(9.999) == 1.0
    assert profile.value_at(10.0) == 2.0
    assert profile.value_at(25.0) == 3.0
    assert np.array_equal(profile.resample(0.0, 5.0, 4), [1.0, 1.0, 2.0, 2.0])


def test_csv_roundtrip_and_header_check(tmp_path):
    good = tmp_path / "load.csv"
    good.write_text("time_s,deviation_mw\n28800.0,5.0\n28804.0,-3.5\n")
    profile = load_profile_from_csv(good)
    assert profile.value_at(28801.0) == 5.0
    assert profile.value_at(28804.0) == -3.5

    bad = tmp_path / "bad.csv"
    bad.write_text("t,mw\n0,1\n")
    with pytest.raises(ConfigError):
        load_profile_from_csv(bad)


def test_wind_disabled_is_zero():
    spec = WindSpec(enabled=False)
    assert wind_disturbance_step(5.0, 0.1, spec, 100.0) == 0.0
    assert np.all(wind_series(spec, np.random.SeedSequence(0), 0.1, 100) == 0.0)


def test_wind_step_response_matches_first_order_lag():
    spec = WindSpec(enabled=True, time_constant_s=1.0, noise_std_mw=1.0)
    y, dt = 0.0, 0.01
    for k in range(1, 301):
        y = wind_disturbance_step(y, dt, spec, 10.0)
        expected = 10.0 * (1.0 - math.exp(-k * dt / 1.0))
        assert abs(y - expected) < 1e-9


def test_wind_autocorrelation_time_near_time_constant():
    spec = WindSpec(enabled=True, time_constant_s=1.0, noise_std_mw=10.0)
    y = wind_series(spec, np.random.SeedSequence(5), 0.1, 200_000)
    lag = 10  # one time constant at dt = 0.1 s
    rho = np.corrcoef(y[:-lag], y[lag:])[0, 1]
    assert abs(rho - math.exp(-1.0)) < 0.05
