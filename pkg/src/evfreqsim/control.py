"""Control-center level: ACE, random-ratio dispatch to EVs, the EV/generator
task split, the PI load-frequency controller, and the communication delay.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .config import AreaParams, DispatchPolicy


def compute_ace(delta_f_hz: float, delta_p_tie_mw: float, params: AreaParams) -> float:
    """Area control error in MW; negative means generation deficit.

    TBC combines the tie-line deviation with the frequency bias (given per
    0.1 Hz); FTC uses the tie-line deviation alone.
    """
    if params.control_mode == "FTC":
        return delta_p_tie_mw
    return delta_p_tie_mw + 10.0 * params.bias_mw_per_0p1hz * delta_f_hz


def sample_ratio(policy: DispatchPolicy, rng: np.random.Generator) -> float:
    """Draw the dispatch ratio R from the configured distribution, clamped to [0, 1]."""
    if policy.distribution == "constant":
        r = policy.r_const
    elif policy.distribution == "uniform":
        r = rng.uniform(policy.lo, policy.hi)
    else:
        r = rng.normal(policy.mu, math.sqrt(policy.sigma2))
    return min(max(r, 0.0), 1.0)


def uncertain_dispatch(ace_mw: float, frc_up_mw: float, frc_down_mw: float,
                       r: float, ace_deadband_mw: float) -> float:
    """EV share of the ACE: zero inside the dead band, otherwise the random
    fraction r of the ACE capped at the uploaded FRC on the relevant side."""
    if abs(ace_mw) <= ace_deadband_mw:
        return 0.0
    if ace_mw <= 0.0:
        return -r * min(abs(ace_mw), frc_up_mw)
    return r * min(ace_mw, frc_down_mw)


def split_tasks(ace_mw: float, s_contr_mw: float) -> float:
    """Generator share of the ACE: s_gener = ace - s_contr, exact."""
    if abs(s_contr_mw) > abs(ace_mw) or s_contr_mw * ace_mw < 0.0:
        raise ValueError(
            f"EV task {s_contr_mw} MW inconsistent with ACE {ace_mw} MW "
            "(allocation bug upstream)")
    return ace_mw - s_contr_mw


class PiController:
    """Discrete PI on the generator regulation share, with output saturation
    and frozen-integral anti-windup."""

    def __init__(self, kp: float, ki: float, limit_mw: float):
        self.kp = kp
        self.ki = ki
        self.limit_mw = limit_mw
        self.integral = 0.0

    def step(self, error_mw: float, dt_s: float) -> float:
        candidate = self.integral + error_mw * dt_s
        raw = self.kp * error_mw + self.ki * candidate
        if abs(raw) <= self.limit_mw:
            self.integral = candidate
            return raw
        return math.copysign(self.limit_mw, raw)


class DelayLine:
    """Piecewise-constant signal with a fixed transport delay.

    ``push(value, t)`` records a value computed at time t; ``value_at(now)``
    returns the newest value that has matured (t + delay <= now), or 0.0
    before the first one matures.
    """

    def __init__(self, delay_s: float):
        self.delay_s = delay_s
        self._events = deque()   # (time_available, value)
        self._current = 0.0

    def push(self, value: float, t_s: float):
        self._events.append((t_s + self.delay_s, value))

    def value_at(self, now_s: float) -> float:
        while self._events and self._events[0][0] <= now_s:
            self._current = self._events.popleft()[1]
        return self._current
