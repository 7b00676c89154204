"""Aggregator: FRC totals and proportional task allocation to stations."""

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from evfreqsim import aggregator as agg


def test_total_frc_examples():
    up, down = agg.total_frc(np.array([10.0, 4.0]), np.array([6.0, 14.0]))
    assert (up, down) == (14.0, 20.0)
    assert agg.total_frc(np.array([]), np.array([])) == (0.0, 0.0)
    up, down = agg.total_frc(np.full(100, 3.5), np.full(100, 2.1))
    assert up == pytest.approx(350.0)
    assert down == pytest.approx(210.0)


def test_allocation_examples():
    ups = np.array([300.0, 700.0])
    downs = np.array([200.0, 200.0])
    tasks = agg.allocate_to_stations(-100.0, ups, downs, 1000.0, 400.0)
    assert np.allclose(tasks, [-30.0, -70.0])
    assert np.all(agg.allocate_to_stations(0.0, ups, downs, 1000.0, 400.0) == 0.0)
    # One station holds all down-FRC.
    downs = np.array([0.0, 400.0])
    tasks = agg.allocate_to_stations(50.0, ups, downs, 1000.0, 400.0)
    assert np.allclose(tasks, [0.0, 50.0])


def test_zero_total_yields_zero_tasks():
    tasks = agg.allocate_to_stations(-10.0, np.zeros(3), np.ones(3), 0.0, 3.0)
    assert np.all(tasks == 0.0)


frc_arrays = arrays(np.float64, st.integers(1, 30),
                    elements=st.floats(0.0, 50.0))


@given(frc_arrays, st.floats(-1.0, 1.0))
def test_partition_proportionality_feasibility(ups, frac):
    downs = ups[::-1].copy()
    tot_up, tot_down = agg.total_frc(ups, downs)
    s_contr = frac * (tot_up if frac <= 0 else tot_down)
    tasks = agg.allocate_to_stations(s_contr, ups, downs, tot_up, tot_down)
    # Exact partition.
    assert tasks.sum() == pytest.approx(s_contr, abs=1e-9 * max(1.0, abs(s_contr)))
    # Per-station feasibility.
    side = ups if s_contr <= 0 else downs
    assert np.all(np.abs(tasks) <= side + 1e-9)
    # Scale equivariance: scaling all reports leaves tasks unchanged.
    scaled = agg.allocate_to_stations(s_contr, 3.0 * ups, 3.0 * downs,
                                      3.0 * tot_up, 3.0 * tot_down)
    assert np.allclose(tasks, scaled, atol=1e-12)


@given(frc_arrays)
def test_proportionality_ratios(ups):
    tot = float(ups.sum())
    if tot == 0.0:
        return
    tasks = agg.allocate_to_stations(-tot / 2.0, ups, ups, tot, tot)
    nz = ups > 1e-12 * tot   # avoid underflow degeneracies at subnormal sizes
    ratios = tasks[nz] / ups[nz]
    assert np.allclose(ratios, ratios[0])
