import numpy as np
import pytest

from ugsb.gates import (
    dynamical_swap_schedule,
    holonomic_swap_schedule,
    initial_state,
    run_schedule,
    swap_gate,
)
from ugsb.params import symmetric_paramset
from ugsb.units import mhz

#: residual pair detuning of the dispersive gate (rad/us)
DELTA_DYN = mhz(3.36)


def rb87_params(**kw):
    """The 87Rb working point: pumps at 10 MHz, detunings 100/300 MHz,
    C6/2pi = 858.4 GHz um^6."""
    return symmetric_paramset(
        mhz(10.0), mhz(100.0), mhz(300.0), v=mhz(200.0), c6=mhz(858400.0), **kw
    )


def swap_target(params, psi0):
    comp = params.scheme.computational_indices
    tgt = np.zeros_like(psi0)
    tgt[comp] = swap_gate().matrix @ psi0[comp]
    return tgt


@pytest.fixture(scope="session")
def rb87():
    return rb87_params()


@pytest.fixture(scope="session")
def hol_schedule(rb87):
    return holonomic_swap_schedule(rb87)


@pytest.fixture(scope="session")
def dyn_schedule(rb87):
    return dynamical_swap_schedule(rb87, DELTA_DYN)


@pytest.fixture(scope="session")
def hol_run_skewed(rb87, hol_schedule):
    """Holonomic run from the uneven product state, with the propagator."""
    psi0 = initial_state(rb87.scheme, "skewed")
    return run_schedule(hol_schedule, psi0=psi0, n_snapshots=201)


@pytest.fixture(scope="session")
def dyn_run_skewed(rb87, dyn_schedule):
    psi0 = initial_state(rb87.scheme, "skewed")
    return run_schedule(dyn_schedule, psi0=psi0, n_snapshots=201)
