"""Shared fixtures: desk-scale runs are expensive enough to cache per session."""

import dataclasses

import pytest

import evfreqsim as efs
from evfreqsim.config import with_biased_disturbance


@pytest.fixture(scope="session")
def desk_runs():
    """Paired desk-scale runs (same seed, same disturbance realization),
    one per strategy, computed once for the whole session."""
    base = efs.preset("desk", seed=1)
    return {s: efs.run(dataclasses.replace(base, strategy=s))
            for s in ("WO_V2G", "CS1", "CS2")}


@pytest.fixture(scope="session")
def biased_runs():
    """CS1/CS2 pair under the sawtooth load trend that biases the ACE sign mix."""
    base = with_biased_disturbance(efs.preset("desk", seed=1))
    return {s: efs.run(dataclasses.replace(base, strategy=s))
            for s in ("CS1", "CS2")}
