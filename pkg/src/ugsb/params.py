"""Drive, coupling and register parameters.

Sign conventions: both detunings are stored positive.  The ``q0 -> ryd``
pump is red-detuned by ``delta0`` and the ``q1 -> ryd`` pump is
blue-detuned by ``delta1``; the signs enter only through the oscillation
frequencies of the Hamiltonian terms (+delta0 and -delta1 on the
raising parts).  The auxiliary compensation fields use the opposite
pattern (blue on q0, red on q1) so that their Stark shifts cancel the
pump-induced ones.
"""

import warnings
from dataclasses import dataclass, replace

from .errors import ConfigurationError
from .levels import LevelScheme

#: Auxiliary-field handling: no compensation, ideal static counter-shifts,
#: or explicit detuned transitions to the aux_e level.
AUX_MODES = ("off", "ideal", "explicit")


@dataclass(frozen=True)
class DriveParams:
    """Rydberg pumping fields and the auxiliary compensation fields.

    All frequencies are angular (rad/us).  ``aux_*`` entries default to
    mirroring the pump values, which satisfies the Stark-cancellation
    relation omega'_k**2 / delta'_k = omega_k**2 / delta_k exactly.
    """

    omega0: float
    omega1: float
    delta0: float
    delta1: float
    aux_mode: str = "ideal"
    aux_omega0: float = None
    aux_omega1: float = None
    aux_delta0: float = None
    aux_delta1: float = None

    def __post_init__(self):
        if self.aux_mode not in AUX_MODES:
            raise ConfigurationError(
                f"aux_mode must be one of {AUX_MODES}, got {self.aux_mode!r}"
            )
        if self.delta0 <= 0 or self.delta1 <= 0:
            raise ConfigurationError(
                "detunings are stored positive; got "
                f"delta0={self.delta0}, delta1={self.delta1}"
            )
        for name, mirror in (
            ("aux_omega0", self.omega0),
            ("aux_omega1", self.omega1),
            ("aux_delta0", self.delta0),
            ("aux_delta1", self.delta1),
        ):
            if getattr(self, name) is None:
                object.__setattr__(self, name, mirror)
        if self.aux_mode == "explicit":
            for k, (om, de, aom, ade) in enumerate(
                (
                    (self.omega0, self.delta0, self.aux_omega0, self.aux_delta0),
                    (self.omega1, self.delta1, self.aux_omega1, self.aux_delta1),
                )
            ):
                want = om**2 / de
                got = aom**2 / ade
                if abs(got - want) > 1e-12 * abs(want):
                    raise ConfigurationError(
                        f"auxiliary field {k} violates the Stark-cancellation "
                        f"relation: omega'^2/delta' = {got:.15g}, "
                        f"omega^2/delta = {want:.15g}"
                    )

    @property
    def max_omega(self) -> float:
        return max(abs(self.omega0), abs(self.omega1))


@dataclass(frozen=True)
class RydbergCoupling:
    """Pair-state shift V of the two target atoms, V = c6 / d**6.

    Any two of (v, c6, d) determine the third; if all three are supplied
    they must be consistent to a relative 1e-12.  ``v`` is angular
    (rad/us), ``c6`` is rad/us * um**6 and ``d`` is um.
    """

    v: float = None
    c6: float = None
    d: float = None

    def __post_init__(self):
        v, c6, d = self.v, self.c6, self.d
        if v is None:
            if c6 is None or d is None:
                raise ConfigurationError("need v, or both c6 and d")
            v = rri_strength(c6, d)
            object.__setattr__(self, "v", v)
        if v <= 0:
            raise ConfigurationError(f"pair-state shift must be > 0, got {v}")
        if c6 is not None and d is None:
            object.__setattr__(self, "d", distance_for_strength(c6, v))
        elif c6 is not None and d is not None:
            if abs(v - c6 / d**6) > 1e-12 * abs(v):
                raise ConfigurationError(
                    f"inconsistent coupling: v={v} but c6/d^6={c6 / d**6}"
                )

    def with_v(self, v: float) -> "RydbergCoupling":
        """Same c6, new shift (distance rederived if c6 is known)."""
        return RydbergCoupling(v=v, c6=self.c6)


@dataclass(frozen=True)
class TwoPhotonSpec:
    """One leg pair of a two-photon Rydberg pumping ladder.

    ``omega_p``/``delta_p`` describe the ground-to-intermediate leg and
    ``omega_r`` the intermediate-to-Rydberg leg; ``delta`` is the
    two-photon detuning of the whole ladder.  Angular units throughout.
    """

    omega_p: float
    omega_r: float
    delta_p: float
    delta: float

    def __post_init__(self):
        legs = max(abs(self.omega_p), abs(self.omega_r))
        if legs and abs(self.delta_p) / legs <= 5:
            warnings.warn(
                "intermediate detuning is not large compared with the legs "
                f"(|delta_p|/max leg = {abs(self.delta_p) / legs:.2f}); the "
                "two-level reduction may be inaccurate",
                stacklevel=2,
            )


def effective_rabi_from_two_photon(spec: TwoPhotonSpec) -> float:
    """Effective Rabi frequency of a two-photon ladder.

    Uses the harmonic-mean detuning
    ``dbar = 2 / [1/(delta_p - delta) + 1/delta_p]`` and returns
    ``omega_p * omega_r / (2 * dbar)``.
    """
    if spec.delta_p == 0 or spec.delta_p == spec.delta:
        raise ValueError("intermediate detuning collides with a ladder level")
    dbar = 2.0 / (1.0 / (spec.delta_p - spec.delta) + 1.0 / spec.delta_p)
    return spec.omega_p * spec.omega_r / (2.0 * dbar)


def rri_strength(c6: float, d: float) -> float:
    """Van der Waals shift v = c6 / d**6 (rad/us)."""
    if c6 <= 0 or d <= 0:
        raise ValueError(f"c6 and d must be > 0, got c6={c6}, d={d}")
    return c6 / d**6


def distance_for_strength(c6: float, v: float) -> float:
    """Separation d = (c6/v)**(1/6) (um) realizing a given shift."""
    if c6 <= 0 or v <= 0:
        raise ValueError(f"c6 and v must be > 0, got c6={c6}, v={v}")
    return (c6 / v) ** (1.0 / 6.0)


@dataclass(frozen=True)
class ControlParams:
    """Control atom of the three-atom register.

    ``omega_c`` drives q0 <-> ryd on resonance; ``v1c``/``v2c`` are the
    control-target pair shifts.  ``doppler`` is a static detuning of the
    control Rydberg level (applied only when enabled on the register).
    """

    omega_c: float
    v1c: float
    v2c: float
    doppler: float = 0.0


@dataclass(frozen=True)
class ParamSet:
    """All physical parameters of one scenario, in angular units.

    ``doppler`` holds the per-target-atom static Rydberg detunings
    (frozen-velocity model), in register order.
    """

    drive: DriveParams
    coupling: RydbergCoupling
    scheme: LevelScheme
    doppler: tuple = (0.0, 0.0)
    control: ControlParams = None
    doppler_on_control: bool = False

    def __post_init__(self):
        if isinstance(self.doppler, list):
            object.__setattr__(self, "doppler", tuple(self.doppler))
        want_atoms = 3 if self.control is not None else 2
        if self.scheme.atom_count != want_atoms:
            raise ConfigurationError(
                f"scheme has {self.scheme.atom_count} atoms but the parameter "
                f"set describes {want_atoms}"
            )
        if len(self.doppler) != 2:
            raise ConfigurationError("doppler holds one offset per target atom")
        if self.drive.aux_mode == "explicit" and not self.scheme.with_aux:
            raise ConfigurationError(
                "explicit auxiliary fields need the aux_e level in the scheme"
            )
        if self.drive.aux_mode != "explicit" and self.scheme.with_aux:
            raise ConfigurationError(
                "scheme carries aux_e but aux_mode is not 'explicit'"
            )

    # target atoms are the last two register slots
    @property
    def target_atoms(self) -> tuple:
        return (1, 2) if self.control is not None else (0, 1)

    @property
    def v0(self) -> float:
        """Residual shift v - (delta1 - delta0) of the pair state."""
        return self.coupling.v - (self.drive.delta1 - self.drive.delta0)

    def with_v(self, v: float) -> "ParamSet":
        return replace(self, coupling=self.coupling.with_v(v))

    def with_doppler(self, d1: float, d2: float) -> "ParamSet":
        return replace(self, doppler=(float(d1), float(d2)))

    def with_aux_mode(self, aux_mode: str) -> "ParamSet":
        """Switch compensation mode, adjusting the level scheme to match."""
        drive = replace(self.drive, aux_mode=aux_mode)
        scheme = LevelScheme(
            self.scheme.atom_count,
            with_leak=self.scheme.with_leak,
            with_aux=(aux_mode == "explicit"),
        )
        return replace(self, drive=drive, scheme=scheme)

    def with_leak(self, with_leak=True) -> "ParamSet":
        scheme = LevelScheme(
            self.scheme.atom_count,
            with_leak=with_leak,
            with_aux=self.scheme.with_aux,
        )
        return replace(self, scheme=scheme)

    def with_control(self, control: ControlParams) -> "ParamSet":
        scheme = LevelScheme(
            3, with_leak=self.scheme.with_leak, with_aux=self.scheme.with_aux
        )
        return replace(self, control=control, scheme=scheme)

    def without_control(self) -> "ParamSet":
        scheme = LevelScheme(
            2, with_leak=self.scheme.with_leak, with_aux=self.scheme.with_aux
        )
        return replace(self, control=None, scheme=scheme)


def symmetric_paramset(
    omega: float,
    delta0: float,
    delta1: float,
    v: float,
    c6: float = None,
    aux_mode: str = "ideal",
) -> ParamSet:
    """Two-atom parameter set with equal Rabi frequencies on both pumps."""
    drive = DriveParams(omega, omega, delta0, delta1, aux_mode=aux_mode)
    scheme = LevelScheme.two_atom(with_aux=(aux_mode == "explicit"))
    return ParamSet(drive, RydbergCoupling(v=v, c6=c6), scheme)
