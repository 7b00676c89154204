"""Aggregator level: total fleet FRC and FRC-proportional task allocation.

Stateless; reports are consumed in ascending station order so the floating
summation residual is reproducible.
"""

from __future__ import annotations

import numpy as np


def total_frc(s_up_mw, s_down_mw):
    """Componentwise sum of station FRC reports (missing stations report zero)."""
    return float(np.sum(s_up_mw)), float(np.sum(s_down_mw))


def allocate_to_stations(s_contr_mw: float, s_up_mw, s_down_mw,
                         total_up_mw: float, total_down_mw: float) -> np.ndarray:
    """Distribute the control-center task to stations proportionally to FRC.

    Regulation-up (task <= 0) splits on the up reports, regulation-down on the
    down reports.  A zero total on the relevant side yields all-zero tasks.
    """
    if s_contr_mw <= 0.0:
        if total_up_mw <= 0.0:
            return np.zeros(len(np.atleast_1d(s_up_mw)))
        return s_contr_mw * np.asarray(s_up_mw, dtype=float) / total_up_mw
    if total_down_mw <= 0.0:
        return np.zeros(len(np.atleast_1d(s_down_mw)))
    return s_contr_mw * np.asarray(s_down_mw, dtype=float) / total_down_mw
