"""Two-area plant: per-area frequency dynamics with aggregate primary (droop
with dead band, governor lag) and secondary (setpoint slew limit, governor and
turbine lags) generation blocks, coupled by an integrating tie-line.

Integration is fixed-step classical RK4 with zero-order-hold inputs; the
setpoint slew limiter advances once per plant step before the RK4 stage.  The
hot loop is numba-compiled; `step_plant` wraps a single step for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .config import AreaParams, TieLineParams
from .errors import SimulationDiverged

# State vector layout:
#   0 df_a   1 pfc_a  2 sfr_gov_a  3 sfr_turb_a
#   4 df_b   5 pfc_b  6 sfr_gov_b  7 sfr_turb_b
#   8 dp_tie 9 slew_a 10 slew_b
N_STATE = 11

# Per-area parameter vector layout for the kernel.
# [inertia, damping, pfc_deadband, pfc_gain_mw_per_hz, gov_t, turb_t, ramp_mw_per_s]
_P_INERTIA, _P_DAMP, _P_DB, _P_GAIN, _P_GOV, _P_TURB, _P_RAMP = range(7)


def area_param_vector(p: AreaParams) -> np.ndarray:
    gain = 0.0 if p.droop_hz_per_mw is None else 1.0 / p.droop_hz_per_mw
    ramp = -1.0 if p.ramp_limit_mw_per_s is None else p.ramp_limit_mw_per_s
    return np.array([p.inertia_mws, p.damping_mw_per_hz, p.pfc_deadband_hz,
                     gain, p.gov_t_s, p.turb_t_s, ramp])


@njit(cache=True)
def _pfc_static(df, deadband, gain):
    if df > deadband:
        return -(df - deadband) * gain
    if df < -deadband:
        return -(df + deadband) * gain
    return 0.0


@njit(cache=True)
def _slew(current, target, ramp, dt):
    if ramp < 0.0:
        return target
    step = target - current
    lim = ramp * dt
    if step > lim:
        step = lim
    elif step < -lim:
        step = -lim
    return current + step


@njit(cache=True)
def _deriv(x, pa, pb, sync, dist_a, dist_b, ev_gen_a, out):
    # Area A
    pfc_cmd_a = _pfc_static(x[0], pa[_P_DB], pa[_P_GAIN])
    out[1] = (pfc_cmd_a - x[1]) / pa[_P_GOV]
    out[2] = (x[9] - x[2]) / pa[_P_GOV]
    out[3] = (x[2] - x[3]) / pa[_P_TURB]
    out[0] = (x[3] + x[1] - dist_a + ev_gen_a - pa[_P_DAMP] * x[0] - x[8]) / pa[_P_INERTIA]
    # Area B
    pfc_cmd_b = _pfc_static(x[4], pb[_P_DB], pb[_P_GAIN])
    out[5] = (pfc_cmd_b - x[5]) / pb[_P_GOV]
    out[6] = (x[10] - x[6]) / pb[_P_GOV]
    out[7] = (x[6] - x[7]) / pb[_P_TURB]
    out[4] = (x[7] + x[5] - dist_b - pb[_P_DAMP] * x[4] + x[8]) / pb[_P_INERTIA]
    # Tie line (positive = export from A to B)
    out[8] = sync * (x[0] - x[4])
    out[9] = 0.0
    out[10] = 0.0


@njit(cache=True)
def _integrate(x, n_steps, dt, pa, pb, sync,
               dist_a, dist_b, ev_gen_a, cmd_a, cmd_b,
               f_limit, out_df_a):
    """Advance n_steps plant steps in place; returns -1 or the offending step."""
    k1 = np.empty(N_STATE)
    k2 = np.empty(N_STATE)
    k3 = np.empty(N_STATE)
    k4 = np.empty(N_STATE)
    xs = np.empty(N_STATE)
    for i in range(n_steps):
        # Slew the secondary setpoints toward the delayed commands.
        x[9] = _slew(x[9], cmd_a[i], pa[_P_RAMP], dt)
        x[10] = _slew(x[10], cmd_b[i], pb[_P_RAMP], dt)
        da, db, ev = dist_a[i], dist_b[i], ev_gen_a[i]
        _deriv(x, pa, pb, sync, da, db, ev, k1)
        for j in range(N_STATE):
            xs[j] = x[j] + 0.5 * dt * k1[j]
        _deriv(xs, pa, pb, sync, da, db, ev, k2)
        for j in range(N_STATE):
            xs[j] = x[j] + 0.5 * dt * k2[j]
        _deriv(xs, pa, pb, sync, da, db, ev, k3)
        for j in range(N_STATE):
            xs[j] = x[j] + dt * k3[j]
        _deriv(xs, pa, pb, sync, da, db, ev, k4)
        for j in range(N_STATE):
            x[j] += dt * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0
        out_df_a[i] = x[0]
        if abs(x[0]) > f_limit or abs(x[4]) > f_limit:
            return i
    return -1


@dataclass(frozen=True)
class PlantState:
    """Snapshot of the two-area plant (deviations from the operating point)."""

    df_a_hz: float = 0.0
    p_pfc_a_mw: float = 0.0
    p_sfr_gov_a_mw: float = 0.0
    p_sfr_turb_a_mw: float = 0.0
    df_b_hz: float = 0.0
    p_pfc_b_mw: float = 0.0
    p_sfr_gov_b_mw: float = 0.0
    p_sfr_turb_b_mw: float = 0.0
    dp_tie_mw: float = 0.0
    slew_a_mw: float = 0.0
    slew_b_mw: float = 0.0

    def as_vector(self) -> np.ndarray:
        return np.array([self.df_a_hz, self.p_pfc_a_mw, self.p_sfr_gov_a_mw,
                         self.p_sfr_turb_a_mw, self.df_b_hz, self.p_pfc_b_mw,
                         self.p_sfr_gov_b_mw, self.p_sfr_turb_b_mw,
                         self.dp_tie_mw, self.slew_a_mw, self.slew_b_mw])

    @staticmethod
    def from_vector(x: np.ndarray) -> "PlantState":
        return PlantState(*[float(v) for v in x])


@dataclass(frozen=True)
class Injections:
    """Per-area MW inputs held constant over a plant step (consumption positive,
    except ev_gen_a_mw and the commands which are generation positive)."""

    load_a_mw: float = 0.0
    wind_a_mw: float = 0.0
    load_b_mw: float = 0.0
    ev_gen_a_mw: float = 0.0
    cmd_a_mw: float = 0.0
    cmd_b_mw: float = 0.0


def pfc_response(delta_f_hz: float, params: AreaParams) -> float:
    """Steady primary-control droop output (MW); zero inside the dead band.

    The governor lag applied on top of this static law lives in the plant state.
    """
    gain = 0.0 if params.droop_hz_per_mw is None else 1.0 / params.droop_hz_per_mw
    return float(_pfc_static(delta_f_hz, params.pfc_deadband_hz, gain))


def step_plant(state: PlantState, inj: Injections, area_a: AreaParams,
               area_b: AreaParams, tie: TieLineParams, dt_s: float,
               f_limit_hz: float = 1.0) -> PlantState:
    """One RK4 plant step with all injections held constant."""
    x = state.as_vector()
    out = np.empty(1)
    bad = _integrate(
        x, 1, dt_s, area_param_vector(area_a), area_param_vector(area_b),
        tie.sync_mw_per_hz_s,
        np.array([inj.load_a_mw + inj.wind_a_mw]), np.array([inj.load_b_mw]),
        np.array([inj.ev_gen_a_mw]), np.array([inj.cmd_a_mw]),
        np.array([inj.cmd_b_mw]), f_limit_hz, out)
    if bad >= 0:
        raise SimulationDiverged(dt_s, "frequency sanity limit exceeded",
                                 PlantState.from_vector(x))
    return PlantState.from_vector(x)
