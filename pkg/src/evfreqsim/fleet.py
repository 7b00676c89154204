"""Monte Carlo EV fleet generation.

The fleet is stored as a struct-of-arrays (one entry per EV, ordered by
station id then EV id) so the per-tick station math stays vectorized.  Each
station draws from its own deterministically derived RNG sub-stream, which
makes generation order-independent and bit-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ev
from .config import FleetSpec, SocDist
from .errors import ConfigError


@dataclass
class Fleet:
    """Struct-of-arrays EV fleet state (battery-side kW, per-unit SOC)."""

    spec: FleetSpec
    station_idx: np.ndarray     # int, station of each EV
    ev_type: np.ndarray         # int codes from evfreqsim.ev
    soc: np.ndarray
    soc_init: np.ndarray
    soc_exp: np.ndarray
    e_rated_kwh: np.ndarray
    p_max_kw: np.ndarray
    t_init_s: np.ndarray
    t_out_s: np.ndarray
    p_sche_kw: np.ndarray = field(default=None)
    p_regu_kw: np.ndarray = field(default=None)
    e_sche_acc_kwh: np.ndarray = field(default=None)
    e_regu_acc_kwh: np.ndarray = field(default=None)
    n_soc_saturations: int = 0
    n_power_clamps: int = 0

    def __post_init__(self):
        n = len(self.soc)
        if self.p_sche_kw is None:
            self.p_sche_kw = np.zeros(n)
        if self.p_regu_kw is None:
            self.p_regu_kw = np.zeros(n)
        if self.e_sche_acc_kwh is None:
            self.e_sche_acc_kwh = np.zeros(n)
        if self.e_regu_acc_kwh is None:
            self.e_regu_acc_kwh = np.zeros(n)

    @property
    def n_evs(self) -> int:
        return len(self.soc)

    @property
    def n_stations(self) -> int:
        return self.spec.n_stations

    @property
    def p_now_kw(self) -> np.ndarray:
        return self.p_sche_kw + self.p_regu_kw

    def plugged(self, now: float) -> np.ndarray:
        return ev.plugged(self.t_init_s, self.t_out_s, now)


def truncated_normal(rng: np.random.Generator, dist: SocDist, n: int) -> np.ndarray:
    """Rejection-sampled truncated normal (keeps the in-bounds density shape)."""
    std = np.sqrt(dist.variance)
    out = rng.normal(dist.mean, std, n)
    bad = (out < dist.lower) | (out > dist.upper)
    guard = 0
    while np.any(bad):
        out[bad] = rng.normal(dist.mean, std, int(bad.sum()))
        bad = (out < dist.lower) | (out > dist.upper)
        guard += 1
        if guard > 10000:
            raise ConfigError("fleet.soc", "truncation bounds reject almost all draws")
    return out


def _station_draws(spec: FleetSpec, seed_seq: np.random.SeedSequence):
    """Per-station (ev_type, soc_init, soc_exp) arrays from one sub-stream."""
    rng = np.random.default_rng(seed_seq)
    counts = (spec.count_type_i, spec.count_type_ii, spec.count_type_iii)
    ev_type = np.repeat(np.array([ev.TYPE_I, ev.TYPE_II, ev.TYPE_III]), counts)
    init = np.empty(spec.evs_per_station)
    exp = np.empty(spec.evs_per_station)
    dists = {
        ev.TYPE_I: (spec.init_soc_type_i, spec.exp_soc_type_i),
        ev.TYPE_II: (spec.init_soc_type_ii, spec.exp_soc_type_ii),
        ev.TYPE_III: (spec.init_soc_type_iii, None),
    }
    for code, (init_dist, exp_dist) in dists.items():
        mask = ev_type == code
        n = int(mask.sum())
        if n == 0:
            continue
        init[mask] = truncated_normal(rng, init_dist, n)
        exp[mask] = init[mask] if exp_dist is None else truncated_normal(rng, exp_dist, n)
    return ev_type, init, exp


def generate_fleet(spec: FleetSpec, seed_seq: np.random.SeedSequence,
                   workers: int = 1) -> Fleet:
    """Draw the whole fleet; deterministic for a fixed seed sequence.

    Stations are assembled in ascending station order regardless of how the
    per-station draws are scheduled, so ``workers`` never changes the result.
    """
    n_st = spec.n_stations
    children = seed_seq.spawn(n_st)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            draws = list(pool.map(lambda ss: _station_draws(spec, ss), children))
    else:
        draws = [_station_draws(spec, ss) for ss in children]

    per = spec.evs_per_station
    n = n_st * per
    fleet = Fleet(
        spec=spec,
        station_idx=np.repeat(np.arange(n_st), per),
        ev_type=np.concatenate([d[0] for d in draws]),
        soc=np.concatenate([d[1] for d in draws]),
        soc_init=np.concatenate([d[1] for d in draws]),
        soc_exp=np.concatenate([d[2] for d in draws]),
        e_rated_kwh=np.full(n, spec.e_rated_kwh),
        p_max_kw=np.full(n, spec.p_max_kw),
        t_init_s=np.full(n, spec.plug_in_s),
        t_out_s=np.full(n, spec.plug_out_s),
    )
    return fleet
