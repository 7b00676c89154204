"""Two-area plant dynamics: equilibrium, signs, closed-form steady states,
symmetry, and the divergence guard."""

import dataclasses

import numpy as np
import pytest

from evfreqsim import grid
from evfreqsim.config import TieLineParams, preset
from evfreqsim.errors import SimulationDiverged

AREA_A = preset("paper").area_a
AREA_B = preset("paper").area_b
TIE = TieLineParams(sync_mw_per_hz_s=2000.0)


def _simulate(pa, pb, sync, dist_a, dist_b, dt=0.1, n=1000, ev_gen=0.0,
              cmd_a=0.0, cmd_b=0.0):
    x = np.zeros(grid.N_STATE)
    va, vb = grid.area_param_vector(pa), grid.area_param_vector(pb)
    ones = np.ones(n)
    out = np.empty(n)
    bad = grid._integrate(x, n, dt, va, vb, sync,
                          dist_a * ones, dist_b * ones, ev_gen * ones,
                          cmd_a * ones, cmd_b * ones, 1.0, out)
    assert bad == -1
    return x, out


def test_equilibrium_stays_exactly_zero():
    x, df = _simulate(AREA_A, AREA_B, 2000.0, 0.0, 0.0)
    assert np.all(x == 0.0)
    assert np.all(df == 0.0)


def test_load_step_depresses_frequency():
    _, df = _simulate(AREA_A, AREA_B, 2000.0, 200.0, 0.0, n=100)
    assert df[-1] < 0.0


def test_single_area_steady_state_is_minus_load_over_damping():
    # No PFC, no SFR command, no tie coupling: df settles at -L/D.
    area = dataclasses.replace(AREA_A, droop_hz_per_mw=None,
                               ramp_limit_mw_per_s=None)
    x, df = _simulate(area, AREA_B, 0.0, 102.0, 0.0, n=20_000)
    assert df[-1] == pytest.approx(-102.0 / 2040.0, abs=1e-6)  # -0.05 Hz


def test_mirrored_areas_exchange_nothing():
    area = dataclasses.replace(AREA_A, ramp_limit_mw_per_s=None)
    x = np.zeros(grid.N_STATE)
    v = grid.area_param_vector(area)
    n, ones = 5000, np.ones(5000)
    out = np.empty(n)
    bad = grid._integrate(x, n, 0.1, v, v, 2000.0, 150.0 * ones, 150.0 * ones,
                          0.0 * ones, 0.0 * ones, 0.0 * ones, 1.0, out)
    assert bad == -1
    assert x[0] == pytest.approx(x[4], abs=1e-12)   # df_a == df_b
    assert x[8] == pytest.approx(0.0, abs=1e-9)     # no tie flow


def test_generation_command_raises_frequency():
    _, df = _simulate(AREA_A, AREA_B, 2000.0, 0.0, 0.0, n=200, cmd_a=100.0)
    assert df[-1] > 0.0


def test_pfc_deadband_and_droop():
    assert grid.pfc_response(0.02, AREA_A) == 0.0
    assert grid.pfc_response(0.0, AREA_A) == 0.0
    area = dataclasses.replace(AREA_A, droop_hz_per_mw=1.0 / 3000.0)
    assert grid.pfc_response(-0.05, area) == pytest.approx(
        (0.05 - 0.033) * 3000.0)  # +51 MW
    assert grid.pfc_response(+0.05, area) == pytest.approx(-51.0)
    disabled = dataclasses.replace(AREA_A, droop_hz_per_mw=None)
    assert grid.pfc_response(-0.5, disabled) == 0.0


def test_ramp_limit_slews_the_setpoint():
    area = dataclasses.replace(AREA_A, ramp_limit_mw_per_s=10.0)
    x, _ = _simulate(area, AREA_B, 0.0, 0.0, 0.0, n=10, cmd_a=1000.0)
    # After 1 s the slewed setpoint has moved at most 10 MW.
    assert 0.0 < x[9] <= 10.0 + 1e-9


def test_divergence_raises_with_state_snapshot():
    state = grid.PlantState()
    inj = grid.Injections(load_a_mw=1e9)
    with pytest.raises(SimulationDiverged) as err:
        s = state
        for _ in range(10_000):
            s = grid.step_plant(s, inj, AREA_A, AREA_B, TIE, 0.1, 1.0)
    assert err.value.state_snapshot is not None


def test_plant_state_vector_roundtrip():
    x = np.arange(grid.N_STATE, dtype=float)
    assert np.array_equal(grid.PlantState.from_vector(x).as_vector(), x)
