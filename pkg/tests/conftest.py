import numpy as np
import pytest

from rotorwave.model import LIH, RotationalBasis
from rotorwave.optimizer import orientation_target
from rotorwave.pulses import design_sequence
from rotorwave.tdse import PropagationSchedule, run_experiment


@pytest.fixture(scope="session")
def lih():
    return LIH


@pytest.fixture(scope="session")
def tdse_run():
    """Factory for cached default-parameter TDSE runs, shared across tests.

    Returns a dict with the target, the designed sequence, the trajectory and
    the post-pulse window; heavy runs (large j_max) are computed once per
    session.
    """
    cache = {}

    def get(j_max, samples_per_cycle=50, j_buffer=8, sample_step_trot=0.01,
            extra_revivals=4.0):
        key = (j_max, samples_per_cycle, j_buffer, sample_step_trot, extra_revivals)
        if key not in cache:
            target = orientation_target(j_max)
            seq = design_sequence(target, LIH)
            schedule = PropagationSchedule.from_sequence(
                seq, sample_step_trot=sample_step_trot, extra_revivals=extra_revivals
            )
            basis = RotationalBasis(j_target=j_max, j_buffer=j_buffer)
            traj = run_experiment(
                seq, schedule, basis=basis, samples_per_cycle=samples_per_cycle
            )
            cache[key] = {
                "target": target,
                "sequence": seq,
                "schedule": schedule,
                "trajectory": traj,
                "post_window": (seq.t_off, traj.times[-1]),
            }
        return cache[key]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
