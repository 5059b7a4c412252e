"""Bundled scenario presets.

One preset per reproduced figure-class run, all on the 87Rb working
point (pump Rabi 10 MHz, detunings 100/300 MHz, C6/2pi = 858.4 GHz um^6,
Rydberg lifetime 400 us, residual pair detuning 3.36 MHz for the
dispersive gate).
"""

from copy import deepcopy

_RB87 = {
    "drive": {
        "omega0_mhz": 10.0,
        "omega1_mhz": 10.0,
        "delta0_mhz": 100.0,
        "delta1_mhz": 300.0,
        "aux": "ideal",
    },
    "coupling": {"c6_mhz_um6": 858400.0},
}

_NOISE = {
    "samples": 201,
    "decay": {"tau_us": 400.0},
    "doppler": {
        "k_eff_per_m": 8.76e6,
        "temperature_uk": 10.0,
        "mass_kg": 1.4431606e-25,
    },
    "distance": {"sigma_nm": 5.0},
}

PRESETS = {
    "swap-holonomic": {
        "scenario": "swap-holonomic",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "holonomic", "delta_mhz": 0.0},
        "initial_state": "skewed",
    },
    "swap-dynamical": {
        "scenario": "swap-dynamical",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "skewed",
    },
    "sweep-detunings": {
        "scenario": "sweep-detunings",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "holonomic", "delta_mhz": 0.0},
        "initial_state": "plusplus",
        "sweep": {
            "ratio0": {"start": 5.0, "stop": 20.0, "num": 16},
            "ratio1": {"start": 20.1, "stop": 40.0, "num": 20},
        },
    },
    "sweep-delta": {
        "scenario": "sweep-delta",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "skewed",
        "sweep": {"delta_mhz": {"start": 1.0, "stop": 5.0, "num": 17}},
    },
    "scan-decay": {
        "scenario": "scan-decay",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "plus1",
        "noise": deepcopy(_NOISE),
        "sweep": {"tau_us": {"start": 50.0, "stop": 500.0, "num": 10}},
    },
    "scan-doppler": {
        "scenario": "scan-doppler",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "plus1",
        "noise": deepcopy(_NOISE),
        "sweep": {"temperature_uk": {"start": 0.0, "stop": 50.0, "num": 6}},
    },
    "scan-distance": {
        "scenario": "scan-distance",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "plus1",
        "noise": deepcopy(_NOISE),
        "sweep": {"sigma_nm": {"start": 1.0, "stop": 20.0, "num": 20}},
    },
    "fredkin-holonomic": {
        "scenario": "fredkin-holonomic",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "holonomic", "delta_mhz": 0.0},
        "initial_state": "101",
        "control": {"omega_c_mhz": 10.0, "v1c_mhz": 3.0, "v2c_mhz": 3.0},
    },
    "fredkin-dynamical": {
        "scenario": "fredkin-dynamical",
        "seed": 7,
        **deepcopy(_RB87),
        "gate": {"type": "dynamical", "delta_mhz": 3.36},
        "initial_state": "101",
        "control": {"omega_c_mhz": 10.0, "v1c_mhz": 50.0, "v2c_mhz": 50.0},
    },
}


def preset(name: str) -> dict:
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; available: {known}")
    return deepcopy(PRESETS[name])
