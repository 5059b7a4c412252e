"""Simulator for unselective ground-state blockade (UGSB) gates of
driven Rydberg atoms.

Two far-detuned pumps on a pair of interacting atoms block the
evolution of the even-parity ground states while a two-photon channel
through the doubly excited pair state resonantly swaps the odd-parity
ones.  The package builds the driven-register Hamiltonians, reduces
them by second-order elimination, integrates the full and reduced
dynamics (closed and open), and sweeps the gate fidelity over drive,
decay, Doppler and distance noise.
"""

from .backend import backend_name, set_backend
from .dynamics import (
    DecayModel,
    DensityMatrix,
    GaussianSampler,
    Propagator,
    QuantumState,
    integrate_lindblad,
    integrate_schrodinger,
    propagator,
)
from .errors import (
    ConfigurationError,
    DegenerateGateError,
    FitError,
    IntegratorAccuracyError,
    PerturbationInvalidError,
    StiffnessError,
    UgsbError,
    UnsupportedFrameError,
)
from .gates import (
    GateSchedule,
    IdealGate,
    InitialStateGrid,
    average_fidelity,
    dynamical_swap_schedule,
    fredkin_gate,
    fredkin_schedule,
    gate_fidelity,
    holonomic_swap_schedule,
    initial_state,
    nhqc_condition_check,
    run_schedule,
    state_fidelity,
    swap_gate,
    swap_schedule,
    truth_table,
)
from .hamiltonian import (
    HamiltonianTerm,
    TimeDepHamiltonian,
    build_fredkin_hamiltonian,
    build_interaction_hamiltonian,
    build_rotated_hamiltonian,
)
from .levels import LevelScheme
from .params import (
    ControlParams,
    DriveParams,
    ParamSet,
    RydbergCoupling,
    TwoPhotonSpec,
    distance_for_strength,
    effective_rabi_from_two_photon,
    rri_strength,
    symmetric_paramset,
)
from .perturbation import (
    EffectiveModel,
    choose_v_for_delta,
    derive_effective,
    dispersive_rate,
    eliminate_numeric,
    second_order_elimination,
    validate_against_numeric,
)
from .robustness import (
    DistanceSpec,
    DopplerSpec,
    NoiseSpec,
    SweepResult,
    decay_scan,
    distance_scan,
    doppler_scan,
    sweep_delta,
    sweep_detunings,
)
from .units import mhz, to_mhz

__version__ = "0.1.0"
