"""Per-EV battery state: SOC integration and plug-window logic.

All powers are battery-side kW with charging positive.  The SOC integrator is
exact for piecewise-constant power (plain accumulation, no ODE solve), and
keeps an audit split of the energy into regulation and scheduled components.
Everything works elementwise on numpy arrays, so a scalar EV is just a
length-one array (or plain floats).
"""

from __future__ import annotations

import numpy as np

TYPE_I, TYPE_II, TYPE_III = 0, 1, 2
TYPE_NAMES = ("TYPE_I", "TYPE_II", "TYPE_III")


def plugged(t_init, t_out, now: float):
    """True on the half-open plug window [t_init, t_out)."""
    return (np.asarray(t_init) <= now) & (now < np.asarray(t_out))


def advance_soc(soc, p_sche_kw, p_regu_kw, duration_s: float, e_rated_kwh):
    """Advance SOC under constant battery-side power for ``duration_s`` seconds.

    Returns (soc, d_e_sche_kwh, d_e_regu_kwh, n_saturated).  SOC is hard-clamped
    to [0, 1]; clamped-off energy is attributed to the two components in
    proportion to their magnitudes so the audit identity stays exact.
    """
    soc = np.asarray(soc, dtype=float)
    p_sche_kw = np.broadcast_to(np.asarray(p_sche_kw, dtype=float), soc.shape)
    p_regu_kw = np.broadcast_to(np.asarray(p_regu_kw, dtype=float), soc.shape)
    e_rated_kwh = np.asarray(e_rated_kwh, dtype=float)

    d_sche = p_sche_kw * (duration_s / 3600.0)
    d_regu = p_regu_kw * (duration_s / 3600.0)
    new_soc = soc + (d_sche + d_regu) / e_rated_kwh
    clamped = np.clip(new_soc, 0.0, 1.0)
    overflow_kwh = (new_soc - clamped) * e_rated_kwh
    sat = overflow_kwh != 0.0
    n_sat = int(np.count_nonzero(sat))
    if n_sat:
        mag = np.abs(d_sche) + np.abs(d_regu)
        with np.errstate(invalid="ignore", divide="ignore"):
            w_sche = np.where(mag > 0, np.abs(d_sche) / np.where(mag > 0, mag, 1.0), 0.5)
        d_sche = d_sche - overflow_kwh * w_sche
        d_regu = d_regu - overflow_kwh * (1.0 - w_sche)
    return clamped, d_sche, d_regu, n_sat


def expected_soc_trajectory(soc_init, soc_exp, t_init, t_out, t: float):
    """Owner-expected SOC path: linear from initial to expected over the plug window."""
    soc_init = np.asarray(soc_init, dtype=float)
    frac = np.clip((t - np.asarray(t_init)) / (np.asarray(t_out) - np.asarray(t_init)), 0.0, 1.0)
    return soc_init + (np.asarray(soc_exp) - soc_init) * frac
