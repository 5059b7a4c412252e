"""Time-dependent Hamiltonians of the driven two- and three-atom registers.

A Hamiltonian is a sum of terms, each a constant matrix with a single
oscillation frequency.  Off-diagonal ("pair") terms contribute
``M exp(i w t) + M^dag exp(-i w t)``; static terms are Hermitian matrices
with ``w = 0``.  Three frames are provided:

``interaction``
    The drive rotating frame: pump couplings oscillate at +delta0 /
    -delta1 and the pair-state shift sits as a static ``v`` diagonal.
``v``
    The pair-state diagonal rotated away entirely; couplings into the
    doubly excited state oscillate at delta0+v and -(delta1-v).
``v0``
    Only the resonant part ``delta1-delta0`` of the pair-state shift is
    rotated away, leaving a small static ``v0`` diagonal; couplings into
    the doubly excited state oscillate at delta1 and -delta0.

The frames differ only by a time-dependent phase of the doubly excited
pair state, so populations of every basis state, and any overlap taken
within the computational subspace, are frame-independent.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, UnsupportedFrameError
from .levels import LevelScheme
from .params import ParamSet

FRAMES = ("interaction", "v", "v0")


@dataclass(frozen=True, eq=False)
class HamiltonianTerm:
    """One constant-matrix term with a single oscillation frequency."""

    matrix: np.ndarray
    omega: float = 0.0
    pair: bool = True  # if True the Hermitian conjugate at -omega is implied

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        if not self.pair:
            if self.omega != 0.0:
                raise ConfigurationError("static terms must have omega = 0")
            if np.max(np.abs(m - m.conj().T)) > 1e-13 * max(np.max(np.abs(m)), 1e-300):
                raise ConfigurationError("static term is not Hermitian")


@dataclass(frozen=True, eq=False)
class TimeDepHamiltonian:
    """Sum of oscillating terms over a level-scheme basis."""

    scheme: LevelScheme
    terms: tuple
    frame: str = "interaction"

    def __post_init__(self):
        for t in self.terms:
            if t.matrix.shape != (self.dim, self.dim):
                raise ConfigurationError(
                    f"term shape {t.matrix.shape} does not match dimension {self.dim}"
                )

    @property
    def dim(self) -> int:
        return self.scheme.dim

    @property
    def max_frequency(self) -> float:
        """Largest |omega| over the term list (rad/us)."""
        return max((abs(t.omega) for t in self.terms), default=0.0)

    @cached_property
    def packed(self):
        """One-sided stack (mats, omegas) with H(t) = sum_k mats[k] e^{i w_k t}.

        Pair terms expand into matrix/adjoint entries at +/- omega;
        entries sharing a frequency are merged (one phase evaluation per
        distinct frequency in the kernels); static terms collapse into
        the omega = 0 slot.
        """
        entries = []  # (|omega|, sign, matrix); pair terms keep exact +/- twins
        for t in self.terms:
            if t.pair and t.omega != 0.0:
                entries.append((abs(t.omega), np.sign(t.omega), t.matrix))
                entries.append((abs(t.omega), -np.sign(t.omega), t.matrix.conj().T))
            elif t.pair:
                entries.append((0.0, 0.0, t.matrix + t.matrix.conj().T))
            else:
                entries.append((0.0, 0.0, t.matrix))
        if not entries:
            entries.append((0.0, 0.0, np.zeros((self.dim, self.dim))))
        # cluster by |omega| so frequencies equal up to rounding of the
        # frame arithmetic share one phase evaluation, and +/- twins stay
        # exactly negated (evaluate(t) must be Hermitian at any t)
        entries.sort(key=lambda e: e[0])
        slots = {}
        reps = []
        for w, sign, m in entries:
            if not reps or w - reps[-1] > 1e-9 * max(1.0, w):
                reps.append(w)
            key = (reps[-1], sign)
            slots[key] = slots.get(key, 0) + m
        omegas = sorted(rep * sign for rep, sign in slots)
        mats = [
            slots[(abs(w), np.sign(w))].astype(np.complex128) for w in omegas
        ]
        return (
            np.ascontiguousarray(np.stack(mats)),
            np.asarray(omegas, dtype=np.float64),
        )

    @cached_property
    def packed_sparse(self):
        """Element layout (rows, cols, vals, ptr, omegas) of :attr:`packed`.

        Term k owns elements ptr[k]..ptr[k+1]; kernels then touch only
        the nonzero couplings.
        """
        mats, omegas = self.packed
        rows, cols, vals = [], [], []
        ptr = np.zeros(len(omegas) + 1, dtype=np.int64)
        for k, m in enumerate(mats):
            r, c = np.nonzero(m)
            rows.append(r)
            cols.append(c)
            vals.append(m[r, c])
            ptr[k + 1] = ptr[k] + r.size
        cat = lambda parts, dt: (
            np.concatenate(parts).astype(dt)
            if parts and sum(p.size for p in parts)
            else np.zeros(0, dt)
        )
        return (
            cat(rows, np.int64),
            cat(cols, np.int64),
            cat(vals, np.complex128),
            ptr,
            np.asarray(omegas, dtype=np.float64),
        )

    def evaluate(self, t: float) -> np.ndarray:
        """Dense H(t); Hermitian by construction."""
        mats, omegas = self.packed
        phases = np.exp(1j * omegas * t)
        return np.einsum("k,kab->ab", phases, mats)

    def restricted(self, indices) -> "TimeDepHamiltonian":
        """Hamiltonian with all couplings outside ``indices`` removed."""
        mask = np.zeros(self.dim, dtype=bool)
        mask[np.asarray(indices)] = True
        keep = np.outer(mask, mask)
        terms = tuple(
            HamiltonianTerm(t.matrix * keep, t.omega, t.pair) for t in self.terms
        )
        return TimeDepHamiltonian(self.scheme, terms, self.frame)


# ---------------------------------------------------------------------------
# builders


def _pump_terms(params: ParamSet):
    """Pump pairs of both target atoms in the interaction frame."""
    d = params.drive
    terms = []
    for atom in params.target_atoms:
        up0 = params.scheme.single_atom_operator(atom, "ryd", "q0")
        up1 = params.scheme.single_atom_operator(atom, "ryd", "q1")
        terms.append(HamiltonianTerm(0.5 * d.omega0 * up0, +d.delta0))
        terms.append(HamiltonianTerm(0.5 * d.omega1 * up1, -d.delta1))
    return terms


def _aux_terms(params: ParamSet):
    """Stark-compensation terms for the selected aux mode."""
    d = params.drive
    scheme = params.scheme
    terms = []
    if d.aux_mode == "ideal":
        # Static counter-shifts equal to minus the second-order light shifts
        # of each driven level (the explicit fields produce exactly these).
        comp = np.zeros((scheme.dim, scheme.dim), dtype=np.complex128)
        for atom in params.target_atoms:
            comp += (d.omega0**2 / (4 * d.delta0)) * scheme.single_atom_operator(
                atom, "q0", "q0"
            )
            comp -= (d.omega1**2 / (4 * d.delta1)) * scheme.single_atom_operator(
                atom, "q1", "q1"
            )
        terms.append(HamiltonianTerm(comp, 0.0, pair=False))
    elif d.aux_mode == "explicit":
        for atom in params.target_atoms:
            dn0 = scheme.single_atom_operator(atom, "q0", "aux_e")
            dn1 = scheme.single_atom_operator(atom, "q1", "aux_e")
            terms.append(HamiltonianTerm(0.5 * d.aux_omega0 * dn0, +d.aux_delta0))
            terms.append(HamiltonianTerm(0.5 * d.aux_omega1 * dn1, -d.aux_delta1))
    return terms


def _rri_diagonal(params: ParamSet) -> np.ndarray:
    """Static pair-state shifts of the register, as a real diagonal."""
    scheme = params.scheme
    a1, a2 = params.target_atoms
    diag = params.coupling.v * np.real(
        np.diag(scheme.rydberg_pair_projector(a1, a2))
    )
    if params.control is not None:
        diag = diag + params.control.v1c * np.real(
            np.diag(scheme.rydberg_pair_projector(0, a1))
        )
        diag = diag + params.control.v2c * np.real(
            np.diag(scheme.rydberg_pair_projector(0, a2))
        )
    return diag


def _doppler_terms(params: ParamSet):
    scheme = params.scheme
    diag = np.zeros((scheme.dim, scheme.dim), dtype=np.complex128)
    for atom, offset in zip(params.target_atoms, params.doppler):
        if offset:
            diag += offset * scheme.single_atom_operator(atom, "ryd", "ryd")
    if (
        params.control is not None
        and params.doppler_on_control
        and params.control.doppler
    ):
        diag += params.control.doppler * scheme.single_atom_operator(0, "ryd", "ryd")
    if np.any(diag):
        return [HamiltonianTerm(diag, 0.0, pair=False)]
    return []


def _frame_generator(params: ParamSet, frame: str) -> np.ndarray:
    """Diagonal g of the rotation exp(i t g): the part of the RRI
    diagonal moved into the term frequencies."""
    scheme = params.scheme
    g = np.zeros(scheme.dim)
    if frame == "interaction":
        return g
    a1, a2 = params.target_atoms
    pair = np.real(np.diag(scheme.rydberg_pair_projector(a1, a2)))
    if frame == "v":
        return params.coupling.v * pair
    if frame == "v0":
        g = (params.drive.delta1 - params.drive.delta0) * pair
        if params.control is not None:
            # the control-cross shifts rotate away entirely; they are
            # zero on every state reachable without a doubly excited
            # control-target pair, so computational observables are
            # untouched while the generator loses its large diagonal
            g = g + params.control.v1c * np.real(
                np.diag(scheme.rydberg_pair_projector(0, a1))
            )
            g = g + params.control.v2c * np.real(
                np.diag(scheme.rydberg_pair_projector(0, a2))
            )
        return g
    raise UnsupportedFrameError(f"unknown frame {frame!r}")


def _rotate_terms(terms, g: np.ndarray):
    """Move terms into the frame generated by the diagonal g.

    Each element picks up the frequency offset g(row) - g(col);
    elements are regrouped by offset so every term keeps a single
    frequency.  Static Hermitian terms keep only offsets >= 0: the
    negative-offset elements are the conjugates implied by the pair
    convention.
    """
    rotated = []
    offsets = np.subtract.outer(g, g)
    for t in terms:
        if not np.any(t.matrix):
            continue
        for off in np.unique(offsets[t.matrix != 0]):
            part = np.where(offsets == off, t.matrix, 0.0)
            if t.pair:
                rotated.append(HamiltonianTerm(part, t.omega + off))
            elif off == 0.0:
                rotated.append(HamiltonianTerm(part, 0.0, pair=False))
            elif off > 0.0:
                rotated.append(HamiltonianTerm(part, off))
    return rotated


def _assemble(
    params: ParamSet, drive_terms, frame: str, with_aux: bool = True
) -> TimeDepHamiltonian:
    """Rotate the drive terms, keep the residual RRI diagonal static,
    and append compensation and Doppler terms.

    The compensation fields switch together with the pumps (they exist
    to cancel pump-induced shifts), so segments with the target drives
    off must pass ``with_aux=False`` or the bare counter-shifts would
    rotate the ground states.
    """
    g = _frame_generator(params, frame)
    terms = _rotate_terms(drive_terms, g)
    if with_aux:
        terms += _aux_terms(params)
    residual = _rri_diagonal(params) - g
    if np.any(residual):
        terms.append(HamiltonianTerm(np.diag(residual), 0.0, pair=False))
    terms += _doppler_terms(params)
    return TimeDepHamiltonian(params.scheme, tuple(terms), frame=frame)


def build_interaction_hamiltonian(params: ParamSet) -> TimeDepHamiltonian:
    """Two-atom Hamiltonian in the drive rotating frame.

    Pump couplings oscillate at +delta0 / -delta1, the pair-state shift
    ``v`` and the Doppler offsets are static diagonals, and the selected
    compensation terms are included.
    """
    if params.control is not None:
        raise ConfigurationError(
            "register has a control atom; use build_fredkin_hamiltonian"
        )
    return _assemble(params, _pump_terms(params), "interaction")


def build_rotated_hamiltonian(params: ParamSet, frame: str) -> TimeDepHamiltonian:
    """Two-atom Hamiltonian in the ``v`` or ``v0`` rotated frame."""
    if params.control is not None:
        raise UnsupportedFrameError(
            "rotated frames are defined for the two-atom register only"
        )
    if frame not in ("v", "v0"):
        raise UnsupportedFrameError(f"unknown frame {frame!r}")
    return _assemble(params, _pump_terms(params), frame)


def build_fredkin_hamiltonian(
    params: ParamSet, step: str, frame: str = "interaction"
) -> TimeDepHamiltonian:
    """Three-atom Hamiltonian for one step of the controlled-SWAP protocol.

    ``step='pulse'`` applies the resonant control drive with all target
    drives off; ``step='swap'`` applies the target pumps and compensation
    with the control drive off.  The RRI diagonals and Doppler offsets
    are present in both steps.  ``frame='v0'`` rotates the target-pair
    states at delta1-delta0 and the control-cross shifts entirely; the
    rotation is zero on every computational state and on the singly
    excited control sector, so protocol observables are unchanged.
    """
    if params.control is None:
        raise ConfigurationError("register has no control atom")
    if step not in ("pulse", "swap"):
        raise ConfigurationError(f"unknown protocol step {step!r}")
    if frame not in ("interaction", "v0"):
        raise UnsupportedFrameError(f"frame {frame!r} not defined for this register")
    if step == "pulse":
        up = params.scheme.single_atom_operator(0, "ryd", "q0")
        drive_terms = [HamiltonianTerm(0.5 * params.control.omega_c * up, 0.0)]
    else:
        drive_terms = _pump_terms(params)
    return _assemble(params, drive_terms, frame, with_aux=(step == "swap"))


def build_hamiltonian(params: ParamSet, frame: str = "interaction", step: str = None):
    """Frame/step dispatch used by gate schedules."""
    if params.control is not None:
        return build_fredkin_hamiltonian(params, step or "swap", frame=frame)
    if frame == "interaction":
        return build_interaction_hamiltonian(params)
    return build_rotated_hamiltonian(params, frame)
