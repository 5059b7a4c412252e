import numpy as np
import pytest

from ugsb.dynamics import (
    DecayModel,
    DensityMatrix,
    GaussianSampler,
    QuantumState,
    integrate_lindblad,
    integrate_schrodinger,
    propagator,
)
from ugsb.errors import ConfigurationError, IntegratorAccuracyError
from ugsb.hamiltonian import (
    HamiltonianTerm,
    TimeDepHamiltonian,
    build_rotated_hamiltonian,
)
from ugsb.levels import LevelScheme
from ugsb.perturbation import derive_effective
from conftest import rb87_params

RNG = np.random.default_rng(11)


def _static(scheme, matrix):
    return TimeDepHamiltonian(scheme, (HamiltonianTerm(matrix, 0.0, pair=False),))


def test_zero_hamiltonian_keeps_state():
    s = LevelScheme.two_atom()
    h = _static(s, np.zeros((9, 9)))
    psi0 = RNG.normal(size=9) + 1j * RNG.normal(size=9)
    psi0 /= np.linalg.norm(psi0)
    traj = integrate_schrodinger(h, psi0, (0, 5.0), [1.0, 5.0])
    assert np.allclose(traj.states[-1], psi0, atol=1e-12)


def test_static_diagonal_exact_phases():
    s = LevelScheme.two_atom()
    energies = RNG.uniform(-3, 3, 9)
    h = _static(s, np.diag(energies).astype(complex))
    psi0 = np.full(9, 1 / 3.0, dtype=complex)
    t = 2.7
    traj = integrate_schrodinger(h, psi0, (0, t), [t], rtol=1e-12)
    expect = psi0 * np.exp(-1j * energies * t)
    assert np.max(np.abs(traj.final - expect)) < 1e-10


def test_effective_model_full_transfer(rb87):
    # resonant three-level chain: |01> fully transfers to -|10> at
    # T = sqrt(2) pi / |omega_eff|
    from ugsb.perturbation import choose_v_for_delta

    p = rb87.with_v(choose_v_for_delta(rb87, 0.0))
    model = derive_effective(p)
    h = model.hamiltonian()
    s = h.scheme
    t_gate = np.sqrt(2) * np.pi / abs(model.omega_eff)
    traj = integrate_schrodinger(
        h, s.basis_state("01"), (0, t_gate), [t_gate], rtol=1e-11
    )
    target = -s.basis_state("10")
    err = 1.0 - abs(np.vdot(target, traj.final)) ** 2
    assert err < 1e-6
    assert np.vdot(target, traj.final).real > 0.999


def test_norm_drift_is_an_error_signal():
    p = rb87_params()
    from ugsb.hamiltonian import build_interaction_hamiltonian

    h = build_interaction_hamiltonian(p)  # static pair diagonal drifts
    psi0 = np.zeros(9, complex)
    psi0[p.scheme.ket_index("01")] = 1.0
    with pytest.raises(IntegratorAccuracyError):
        integrate_schrodinger(h, psi0, (0, 2.0), [2.0], rtol=1e-8, norm_tol=1e-10)


def test_initial_state_must_be_normalized():
    s = LevelScheme.two_atom()
    h = _static(s, np.zeros((9, 9)))
    with pytest.raises(ConfigurationError):
        integrate_schrodinger(h, np.ones(9), (0, 1.0), [1.0])


def test_propagator_identity_and_unitarity(rb87):
    h = build_rotated_hamiltonian(rb87, "v0")
    s = rb87.scheme
    sub = s.computational_indices
    prop = propagator(h, sub, (0, 0.5), [0.0, 0.25, 0.5], rtol=1e-10)
    first = prop.matrices[0][sub, :]
    assert np.allclose(first, np.eye(4), atol=1e-12)
    assert prop.max_unitarity_defect() < 1e-8
    assert prop.block(0).shape == (4, 4)


def test_decay_model_rates():
    d = DecayModel(400.0)
    rates = d.rates
    assert rates["q0"] == rates["q1"] == pytest.approx(1 / 3200)
    assert rates["leak"] == pytest.approx(3 / 1600)
    assert d.total_rate == pytest.approx(1 / 400.0)
    with pytest.raises(ConfigurationError):
        DecayModel(0.0)


def test_decay_needs_leak_level():
    s = LevelScheme.two_atom()
    with pytest.raises(ConfigurationError):
        DecayModel(100.0).collapse_channels(s)


def test_rate_equations_single_atom():
    # undriven atom parked in ryd: populations follow the stated rates
    s = LevelScheme(1, with_leak=True)
    h = _static(s, np.zeros((4, 4)))
    rho0 = np.zeros((4, 4), complex)
    rho0[s.ket_index("r"), s.ket_index("r")] = 1.0
    tau = 37.0
    times = np.linspace(0, 60.0, 7)
    traj = integrate_lindblad(h, DecayModel(tau), rho0, (0, 60.0), times, rtol=1e-10)
    decayed = 1.0 - np.exp(-times / tau)
    p_r = traj.populations([s.ket_index("r")])[:, 0]
    p_leak = traj.populations([s.ket_index("2")])[:, 0]
    p_q0 = traj.populations([s.ket_index("0")])[:, 0]
    assert np.max(np.abs(p_r - np.exp(-times / tau))) < 1e-8
    assert np.max(np.abs(p_leak - 0.75 * decayed)) < 1e-8
    assert np.max(np.abs(p_q0 - 0.125 * decayed)) < 1e-8


def test_lindblad_without_decay_matches_schrodinger(rb87):
    p = rb87.with_leak()
    h = build_rotated_hamiltonian(p, "v0")
    s = p.scheme
    psi0 = (s.basis_state("01") + s.basis_state("10")) / np.sqrt(2)
    t = 0.6
    traj_psi = integrate_schrodinger(h, psi0, (0, t), [t], rtol=1e-11)
    rho0 = np.outer(psi0, psi0.conj())
    traj_rho = integrate_lindblad(h, None, rho0, (0, t), [t], rtol=1e-11)
    rho_from_psi = np.outer(traj_psi.final, traj_psi.final.conj())
    gap = np.max(np.abs(traj_rho.final - rho_from_psi))
    assert gap < 1e-8
    fid = np.real(np.vdot(traj_psi.final, traj_rho.final @ traj_psi.final))
    assert fid > 1 - 1e-7


def test_density_matrix_validation():
    good = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    DensityMatrix(good).validate()
    with pytest.raises(IntegratorAccuracyError):
        DensityMatrix(0.9 * good).validate()
    bad = good.copy()
    bad[0, 1] = 0.2
    with pytest.raises(IntegratorAccuracyError):
        DensityMatrix(bad).validate()
    QuantumState(np.array([1.0, 0.0], complex)).validate()
    with pytest.raises(IntegratorAccuracyError):
        QuantumState(np.array([1.0, 0.1], complex)).validate()


def test_sampler_degenerate_sigma():
    s = GaussianSampler(3.5, 0.0, 7, seed=1)
    assert np.all(s.samples() == 3.5)


def test_sampler_statistics():
    s = GaussianSampler(0.0, 2.0, 400, seed=42)
    draws = s.samples(size=1)[:, 0]
    assert abs(draws.mean()) < 5 * 2.0 / np.sqrt(400)
    assert draws.std() == pytest.approx(2.0, rel=0.2)


def test_sampler_order_independent_and_seeded():
    a = GaussianSampler(0.0, 1.0, 10, seed=9, stream=(3,))
    b = GaussianSampler(0.0, 1.0, 10, seed=9, stream=(3,))
    forward = [a.draw(i, 2) for i in range(10)]
    backward = [b.draw(i, 2) for i in reversed(range(10))]
    assert np.array_equal(np.array(forward), np.array(backward[::-1]))
    c = GaussianSampler(0.0, 1.0, 10, seed=9, stream=(4,))
    assert not np.array_equal(c.draw(0, 2), a.draw(0, 2))
    with pytest.raises(ConfigurationError):
        a.draw(10)
