"""Unit conventions and physical constants.

All internal frequencies are angular, in rad/us; times are in us and
distances in um.  Human-facing inputs and outputs (configs, CSV headers,
reports) quote plain frequencies nu = omega/2pi in MHz, which is the
usual laboratory convention.  The two helpers below are the only place
the 2pi factor lives.
"""

import math

TWO_PI = 2.0 * math.pi

#: Boltzmann constant (J/K).
K_B = 1.380649e-23

#: Mass of an 87Rb atom (kg).
RB87_MASS_KG = 1.44316060e-25


def mhz(nu):
    """Convert a plain frequency nu (MHz) to angular frequency (rad/us)."""
    return TWO_PI * nu


def to_mhz(omega):
    """Convert an angular frequency (rad/us) to a plain frequency (MHz)."""
    return omega / TWO_PI


def thermal_velocity(temperature_uk, mass_kg=RB87_MASS_KG):
    """Root-mean-square 1D thermal velocity sqrt(kB*T/M) in m/s."""
    if temperature_uk < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature_uk}")
    return math.sqrt(K_B * temperature_uk * 1e-6 / mass_kg)


def doppler_sigma(k_eff_per_m, temperature_uk, mass_kg=RB87_MASS_KG):
    """Standard deviation of the Doppler detuning, in rad/us.

    The residual two-photon wave vector k_eff maps the thermal velocity
    spread onto a spread of the Rydberg-transition detuning,
    sigma = k_eff * v_rms.  The 1e-6 factor converts rad/s to rad/us.
    """
    return k_eff_per_m * thermal_velocity(temperature_uk, mass_kg) * 1e-6
