"""The numpy fallback must step exactly like the compiled kernels."""

import numpy as np
import pytest

from ugsb.backend import backend_name, set_backend
from ugsb.dynamics import DecayModel, integrate_lindblad, integrate_schrodinger
from ugsb.gates import InitialStateGrid, average_fidelity, swap_gate
from ugsb.hamiltonian import build_rotated_hamiltonian
from conftest import rb87_params

RNG = np.random.default_rng(77)


@pytest.fixture
def both_backends():
    previous = backend_name()
    yield
    set_backend(previous)


def _short_state_run():
    p = rb87_params()
    h = build_rotated_hamiltonian(p, "v0")
    psi0 = p.scheme.basis_state("01")
    times = np.linspace(0, 0.2, 5)
    traj = integrate_schrodinger(h, psi0, (0, 0.2), times, rtol=1e-10)
    return traj.states


def _short_density_run():
    p = rb87_params().with_leak()
    h = build_rotated_hamiltonian(p, "v0")
    s = p.scheme
    psi0 = (s.basis_state("01") + s.basis_state("11")) / np.sqrt(2)
    rho0 = np.outer(psi0, psi0.conj())
    traj = integrate_lindblad(
        h, DecayModel(50.0), rho0, (0, 0.2), [0.1, 0.2], rtol=1e-9
    )
    return traj.matrices


def test_state_integration_agrees(both_backends):
    set_backend("numba")
    a = _short_state_run()
    set_backend("numpy")
    b = _short_state_run()
    assert np.max(np.abs(a - b)) < 1e-11


def test_density_integration_agrees(both_backends):
    set_backend("numba")
    a = _short_density_run()
    set_backend("numpy")
    b = _short_density_run()
    assert np.max(np.abs(a - b)) < 1e-11


def test_grid_average_agrees(both_backends):
    u = RNG.normal(size=(4, 4)) + 1j * RNG.normal(size=(4, 4))
    u = np.linalg.qr(u)[0]
    grid = InitialStateGrid(5)
    set_backend("numba")
    a = average_fidelity(u, grid, swap_gate())
    set_backend("numpy")
    b = average_fidelity(u, grid, swap_gate())
    assert a == pytest.approx(b, abs=1e-12)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        set_backend("fortran")
