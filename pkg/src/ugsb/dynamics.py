"""Time evolution: Schrodinger and Lindblad integration, propagators,
and reproducible Gaussian sampling.

The integrator is an adaptive embedded Runge-Kutta 5(4) pair on the
flattened complex system, with the initial and maximum step tied to the
fastest oscillation of the Hamiltonian term list (20 steps per period).
Norm and trace are error signals: trajectories are never renormalized,
and a drift beyond tolerance raises instead of being papered over.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _dopri5
from .backend import get_kernels
from .errors import ConfigurationError, IntegratorAccuracyError, StiffnessError
from .hamiltonian import TimeDepHamiltonian
from .levels import LevelScheme
from .units import TWO_PI

#: steps per period of the fastest Hamiltonian term (step ceiling)
STEPS_PER_PERIOD = 20

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
NORM_TOL = 1e-9


@dataclass(frozen=True)
class QuantumState:
    """Complex amplitudes over a level-scheme basis, with its frame."""

    amplitudes: np.ndarray
    frame: str = "interaction"

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def validate(self, tol: float = NORM_TOL):
        if abs(self.norm - 1.0) > tol:
            raise IntegratorAccuracyError(
                f"state norm drifted to {self.norm - 1.0:+.3e} (tolerance {tol})"
            )
        return self


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace operator over a level-scheme basis."""

    matrix: np.ndarray
    frame: str = "interaction"

    def validate(self, trace_tol=1e-8, herm_tol=1e-10, eig_floor=-1e-7):
        m = self.matrix
        tr = np.trace(m).real
        if abs(tr - 1.0) > trace_tol:
            raise IntegratorAccuracyError(f"trace drifted to {tr - 1.0:+.3e}")
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise IntegratorAccuracyError("density matrix lost Hermiticity")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < eig_floor:
            raise IntegratorAccuracyError(
                f"density matrix has eigenvalue {min_eig:.3e} below {eig_floor}"
            )
        return self


@dataclass(frozen=True)
class StateTrajectory:
    """State snapshots of one Schrodinger run."""

    times: np.ndarray
    states: np.ndarray  # (n_snap, dim)
    frame: str
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def populations(self, indices) -> np.ndarray:
        return np.abs(self.states[:, indices]) ** 2

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.states, axis=1) - 1.0)))


@dataclass(frozen=True)
class DensityTrajectory:
    """Density-matrix snapshots of one Lindblad run."""

    times: np.ndarray
    matrices: np.ndarray  # (n_snap, dim, dim)
    frame: str
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.matrices[-1]

    def populations(self, indices) -> np.ndarray:
        diag = np.einsum("sii->si", self.matrices).real
        return diag[:, indices]


@dataclass(frozen=True)
class Propagator:
    """Evolution restricted to a declared subspace of initial kets.

    ``matrices[s][:, j]`` is the full-space state grown out of subspace
    ket j at snapshot s.  Restrictions to a subset of rows may be
    sub-unitary (leakage lives in the discarded rows).
    """

    times: np.ndarray
    matrices: np.ndarray  # (n_snap, dim, m)
    subspace: np.ndarray  # m basis indices
    frame: str
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.matrices[-1]

    def block(self, snapshot: int = -1, rows=None) -> np.ndarray:
        """Rows of one snapshot; defaults to the square subspace block."""
        rows = self.subspace if rows is None else np.asarray(rows)
        return self.matrices[snapshot][rows, :]

    def blocks(self, rows=None) -> np.ndarray:
        rows = self.subspace if rows is None else np.asarray(rows)
        return self.matrices[:, rows, :]

    def max_unitarity_defect(self) -> float:
        m = self.matrices.shape[2]
        eye = np.eye(m)
        defect = 0.0
        for u in self.matrices:
            g = u.conj().T @ u
            defect = max(defect, float(np.max(np.abs(g - eye))))
        return defect


def _step_ceiling(h: TimeDepHamiltonian, span: float) -> float:
    f_max = h.max_frequency / TWO_PI  # cycles per us
    if f_max > 0.0:
        return 1.0 / (STEPS_PER_PERIOD * f_max)
    return span / STEPS_PER_PERIOD


def _prep_times(t_span, snapshot_times):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if snapshot_times is None:
        snaps = np.array([t1])
    else:
        snaps = np.asarray(snapshot_times, dtype=np.float64)
    if snaps.ndim != 1 or snaps.size == 0:
        raise ConfigurationError("snapshot_times must be a non-empty 1-d sequence")
    if np.any(np.diff(snaps) < 0):
        raise ConfigurationError("snapshot_times must be non-decreasing")
    if snaps[0] < t0 - 1e-12 or snaps[-1] > t1 + 1e-12:
        raise ConfigurationError("snapshot_times must lie within t_span")
    return t0, snaps


def integrate_columns(
    h: TimeDepHamiltonian,
    y0: np.ndarray,
    t_span,
    snapshot_times=None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step_scale: float = 1.0,
):
    """Evolve a (dim, m) stack of states; shared core of the public
    entry points.  ``max_step_scale`` tightens the step ceiling below
    the default 20-steps-per-period bound (never loosens it).
    Returns (times, snapshots (S, dim, m), n_steps, n_rej)."""
    t0, snaps = _prep_times(t_span, snapshot_times)
    y0 = np.ascontiguousarray(y0, dtype=np.complex128)
    dim, m = y0.shape
    if dim != h.dim:
        raise ConfigurationError(f"state dimension {dim} != Hamiltonian {h.dim}")
    rows, cols, vals, ptr, omegas = h.packed_sparse
    span = max(snaps[-1] - t0, 1e-30)
    h_max = min(_step_ceiling(h, span) * min(max_step_scale, 1.0), span)
    out, n_steps, n_rej, status = get_kernels().integrate_states(
        rows, cols, vals, ptr, omegas, dim,
        y0.reshape(dim * m), t0, snaps, rtol, atol, h_max, m,
    )
    if status == _dopri5.STEP_UNDERFLOW:
        raise StiffnessError(
            f"step size underflowed at rtol={rtol} after {n_steps} steps "
            f"({n_rej} rejected); the term list has max frequency "
            f"{h.max_frequency:.3g} rad/us"
        )
    return snaps, out.reshape(-1, dim, m), int(n_steps), int(n_rej)


def integrate_schrodinger(
    h: TimeDepHamiltonian,
    psi0: np.ndarray,
    t_span,
    snapshot_times=None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    norm_tol: float = NORM_TOL,
) -> StateTrajectory:
    """Propagate one state and record it at the snapshot times.

    The norm is monitored, not corrected: drift beyond ``norm_tol``
    raises :class:`IntegratorAccuracyError` (tighten rtol to cure it).
    """
    psi0 = np.asarray(psi0, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-9:
        raise ConfigurationError(f"initial state norm is {nrm:.12f}, not 1")
    times, snaps, n_steps, n_rej = integrate_columns(
        h, psi0[:, None], t_span, snapshot_times, rtol, atol
    )
    traj = StateTrajectory(times, snaps[:, :, 0], h.frame, n_steps, n_rej)
    drift = traj.max_norm_drift
    if drift > norm_tol:
        raise IntegratorAccuracyError(
            f"norm drifted by {drift:.3e} (> {norm_tol:g}) at rtol={rtol}; "
            "tighten rtol or integrate in a rotated frame"
        )
    return traj


def propagator(
    h: TimeDepHamiltonian,
    subspace,
    t_span,
    snapshot_times=None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    unitarity_tol: float = 1e-8,
) -> Propagator:
    """Column-wise evolution of the listed subspace kets."""
    subspace = np.asarray(subspace, dtype=np.intp)
    y0 = np.zeros((h.dim, subspace.size), dtype=np.complex128)
    for j, idx in enumerate(subspace):
        y0[idx, j] = 1.0
    times, snaps, n_steps, n_rej = integrate_columns(
        h, y0, t_span, snapshot_times, rtol, atol
    )
    prop = Propagator(times, snaps, subspace, h.frame, n_steps, n_rej)
    defect = prop.max_unitarity_defect()
    if defect > unitarity_tol:
        raise IntegratorAccuracyError(
            f"propagator columns lost orthonormality by {defect:.3e} "
            f"(> {unitarity_tol:g}) at rtol={rtol}"
        )
    return prop


@dataclass(frozen=True)
class DecayModel:
    """Rydberg-state decay into the two qubit states and the leak level.

    The eight Zeeman ground sublevels are assumed equally fed, which
    splits the total rate 1/tau into 1/(8 tau) for each qubit state and
    3/(4 tau) for the six sublevels lumped into ``leak``.
    """

    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ConfigurationError(f"lifetime must be > 0, got {self.tau}")

    @property
    def rates(self) -> dict:
        g = 1.0 / (8.0 * self.tau)
        return {"q0": g, "q1": g, "leak": 6.0 * g}

    @property
    def total_rate(self) -> float:
        return sum(self.rates.values())

    def collapse_channels(self, scheme: LevelScheme, atoms=None):
        """(rate, source indices, destination indices) per atom/channel.

        Each channel moves every basis state with the named atom in
        ``ryd`` to the same state with that atom in the destination
        level.
        """
        if not scheme.with_leak:
            raise ConfigurationError("decay simulation needs the leak level")
        atoms = range(scheme.atom_count) if atoms is None else atoms
        channels = []
        for atom in atoms:
            src = [
                i for i in range(scheme.dim)
                if scheme.ket_labels(i)[atom] == "r"
            ]
            src = np.asarray(src, dtype=np.int64)
            for dest, rate in self.rates.items():
                ch = scheme.level_index(dest) - scheme.level_index("ryd")
                stride = scheme.n_levels ** (scheme.atom_count - 1 - atom)
                dst = src + ch * stride
                channels.append((rate, src, dst))
        return channels


def _pack_channels(channels, dim):
    src = np.concatenate([c[1] for c in channels]) if channels else np.zeros(0, np.int64)
    dst = np.concatenate([c[2] for c in channels]) if channels else np.zeros(0, np.int64)
    ptr = np.zeros(len(channels) + 1, np.int64)
    for k, c in enumerate(channels):
        ptr[k + 1] = ptr[k] + len(c[1])
    rate = np.array([c[0] for c in channels], dtype=np.float64)
    g = np.zeros(dim, dtype=np.float64)
    for r, s, _ in channels:
        g[s] += r
    return src, dst, ptr, rate, g


def integrate_lindblad(
    h: TimeDepHamiltonian,
    decay: Optional[DecayModel],
    rho0: np.ndarray,
    t_span,
    snapshot_times=None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    trace_tol: float = 1e-8,
    eig_floor: float = -1e-6,
    atoms=None,
    max_step_scale: float = 1.0,
) -> DensityTrajectory:
    """Propagate a density matrix under the drive and the decay channels.

    Trace preservation and positivity are asserted on every snapshot;
    ``decay=None`` integrates the closed system in density-matrix form.
    """
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    dim = h.dim
    if rho0.shape != (dim, dim):
        raise ConfigurationError(f"rho0 shape {rho0.shape} != ({dim}, {dim})")
    DensityMatrix(rho0, h.frame).validate(eig_floor=-1e-10)
    t0, snaps = _prep_times(t_span, snapshot_times)
    channels = decay.collapse_channels(h.scheme, atoms) if decay else []
    l_src, l_dst, l_ptr, l_rate, g_diag = _pack_channels(channels, dim)
    rows, cols, vals, ptr, omegas = h.packed_sparse
    span = max(snaps[-1] - t0, 1e-30)
    h_max = min(_step_ceiling(h, span) * min(max_step_scale, 1.0), span)
    out, n_steps, n_rej, status = get_kernels().integrate_density(
        rows, cols, vals, ptr, omegas, dim,
        rho0.reshape(dim * dim), t0, snaps,
        rtol, atol, h_max, l_src, l_dst, l_ptr, l_rate, g_diag,
    )
    if status == _dopri5.STEP_UNDERFLOW:
        raise StiffnessError(
            f"step size underflowed at rtol={rtol} after {n_steps} steps "
            f"({n_rej} rejected)"
        )
    rhos = out.reshape(-1, dim, dim)
    traj = DensityTrajectory(snaps, rhos, h.frame, int(n_steps), int(n_rej))
    for rho in rhos:
        tr = np.trace(rho).real
        if abs(tr - 1.0) > trace_tol:
            raise IntegratorAccuracyError(f"trace drifted to {tr - 1.0:+.3e}")
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < eig_floor:
            raise IntegratorAccuracyError(
                f"positivity violated: eigenvalue {min_eig:.3e} < {eig_floor}"
            )
    return traj


@dataclass(frozen=True)
class GaussianSampler:
    """Reproducible Gaussian draws with per-index substreams.

    Sample ``i`` depends only on (seed, stream, i), so a scan may hand
    samples to any number of workers in any order and still aggregate
    deterministically.  ``sigma = 0`` short-circuits to the mean.
    """

    mean: float
    sigma: float
    n: int
    seed: int
    stream: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.sigma < 0:
            raise ConfigurationError(f"sigma must be >= 0, got {self.sigma}")
        if isinstance(self.stream, list):
            object.__setattr__(self, "stream", tuple(self.stream))

    def draw(self, index: int, size: int = 1) -> np.ndarray:
        if not 0 <= index < self.n:
            raise ConfigurationError(f"sample index {index} outside 0..{self.n - 1}")
        if self.sigma == 0.0:
            return np.full(size, self.mean)
        seq = np.random.SeedSequence(self.seed, spawn_key=(*self.stream, index))
        rng = np.random.default_rng(seq)
        return rng.normal(self.mean, self.sigma, size)

    def samples(self, size: int = 1) -> np.ndarray:
        """All n draws, ordered by index; shape (n, size)."""
        return np.stack([self.draw(i, size) for i in range(self.n)])
