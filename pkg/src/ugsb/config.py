"""Scenario configuration: YAML round-trip, validation, parameter build.

Configs quote every frequency as nu = omega/2pi in MHz with the unit in
the key name, mirroring the laboratory convention; conversion to the
internal angular units happens only here.  Unknown keys are rejected so
typos fail loudly instead of silently running defaults.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigurationError
from .levels import LevelScheme
from .params import ControlParams, DriveParams, ParamSet, RydbergCoupling
from .presets import preset
from .robustness import DistanceSpec, DopplerSpec, NoiseSpec
from .tables import config_hash
from .units import RB87_MASS_KG, mhz

_SCHEMA = {
    "scenario": None,
    "seed": None,
    "drive": {
        "omega0_mhz": None,
        "omega1_mhz": None,
        "delta0_mhz": None,
        "delta1_mhz": None,
        "aux": None,
    },
    "coupling": {"c6_mhz_um6": None, "v_mhz": None, "d_um": None},
    "gate": {"type": None, "delta_mhz": None},
    "control": {"omega_c_mhz": None, "v1c_mhz": None, "v2c_mhz": None},
    "initial_state": None,
    "doppler_mhz": None,
    "noise": {
        "samples": None,
        "decay": {"tau_us": None},
        "doppler": {
            "k_eff_per_m": None,
            "temperature_uk": None,
            "mass_kg": None,
            "convention": None,
        },
        "distance": {"sigma_nm": None, "mean_um": None},
    },
    "sweep": {
        "ratio0": None,
        "ratio1": None,
        "delta_mhz": None,
        "tau_us": None,
        "temperature_uk": None,
        "sigma_nm": None,
    },
    "output": {"directory": None},
}


def _check_keys(node, schema, path=""):
    if not isinstance(node, dict):
        return
    for key, val in node.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigurationError(f"unknown configuration key {where!r}")
        sub = schema[key]
        if isinstance(sub, dict):
            if not isinstance(val, dict):
                raise ConfigurationError(f"{where!r} must be a mapping")
            _check_keys(val, sub, where)


def grid_values(spec) -> np.ndarray:
    """An axis given either as an explicit list or as
    {start, stop, num}."""
    if isinstance(spec, dict):
        extra = set(spec) - {"start", "stop", "num"}
        if extra:
            raise ConfigurationError(f"unknown grid keys {sorted(extra)}")
        return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
    return np.asarray(spec, dtype=float)


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario; keeps the raw mapping for lossless echo."""

    raw: dict

    def __post_init__(self):
        _check_keys(self.raw, _SCHEMA)
        for section in ("drive", "gate"):
            if section not in self.raw:
                raise ConfigurationError(f"configuration needs a {section!r} section")

    # constructors -------------------------------------------------------

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        return ScenarioConfig(d)

    @staticmethod
    def from_preset(name: str) -> "ScenarioConfig":
        return ScenarioConfig(preset(name))

    @staticmethod
    def from_file(path) -> "ScenarioConfig":
        with open(path) as f:
            return ScenarioConfig(yaml.safe_load(f))

    def to_file(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            yaml.safe_dump(self.raw, f, sort_keys=False)
        return path

    # accessors ----------------------------------------------------------

    @property
    def scenario(self) -> str:
        return self.raw.get("scenario", "unnamed")

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    @property
    def hash(self) -> str:
        return config_hash(self.raw)

    @property
    def gate_type(self) -> str:
        g = self.raw["gate"].get("type", "holonomic")
        if g not in ("holonomic", "dynamical"):
            raise ConfigurationError(f"unknown gate type {g!r}")
        return g

    @property
    def gate_delta(self) -> float:
        return mhz(float(self.raw["gate"].get("delta_mhz", 0.0)))

    @property
    def initial_state_spec(self):
        return self.raw.get("initial_state", "plusplus")

    def paramset(self, with_leak: bool = False) -> ParamSet:
        d = self.raw["drive"]
        aux = d.get("aux", "ideal")
        drive = DriveParams(
            mhz(float(d["omega0_mhz"])),
            mhz(float(d["omega1_mhz"])),
            mhz(float(d["delta0_mhz"])),
            mhz(float(d["delta1_mhz"])),
            aux_mode=aux,
        )
        c = self.raw.get("coupling", {})
        c6 = mhz(float(c["c6_mhz_um6"])) if c.get("c6_mhz_um6") is not None else None
        v = mhz(float(c["v_mhz"])) if c.get("v_mhz") is not None else None
        dd = float(c["d_um"]) if c.get("d_um") is not None else None
        if v is None and (c6 is None or dd is None):
            # the gate schedules retune v anyway; seed with the resonant
            # value (or a small off-resonant shift if detunings coincide,
            # keeping every reduction guard satisfied)
            v = drive.delta1 - drive.delta0
            if v <= 0:
                v = drive.delta0 / 4.0
        coupling = RydbergCoupling(v=v, c6=c6, d=dd)
        control = None
        if "control" in self.raw:
            cc = self.raw["control"]
            control = ControlParams(
                mhz(float(cc["omega_c_mhz"])),
                mhz(float(cc["v1c_mhz"])),
                mhz(float(cc["v2c_mhz"])),
            )
        scheme = LevelScheme(
            3 if control else 2,
            with_leak=with_leak,
            with_aux=(aux == "explicit"),
        )
        doppler = tuple(
            mhz(float(x)) for x in self.raw.get("doppler_mhz", (0.0, 0.0))
        )
        return ParamSet(drive, coupling, scheme, doppler=doppler, control=control)

    def noise(self) -> NoiseSpec:
        n = self.raw.get("noise", {})
        dop = n.get("doppler", {})
        dist = n.get("distance", {})
        return NoiseSpec(
            doppler=DopplerSpec(
                k_eff_per_m=float(dop.get("k_eff_per_m", 8.76e6)),
                temperature_uk=float(dop.get("temperature_uk", 10.0)),
                mass_kg=float(dop.get("mass_kg", RB87_MASS_KG)),
                convention=dop.get("convention", "pair-sum"),
            ),
            distance=DistanceSpec(
                sigma_um=float(dist.get("sigma_nm", 0.0)) * 1e-3,
                mean_um=dist.get("mean_um"),
            ),
            tau=float(n["decay"]["tau_us"]) if "decay" in n else None,
            n=int(n.get("samples", 201)),
            seed=self.seed,
        )

    def sweep_axis(self, name: str, default=None) -> np.ndarray:
        sweep = self.raw.get("sweep", {})
        if name in sweep:
            return grid_values(sweep[name])
        if default is None:
            raise ConfigurationError(f"configuration has no sweep axis {name!r}")
        return np.asarray(default, dtype=float)
