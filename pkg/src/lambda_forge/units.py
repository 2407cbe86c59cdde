"""Physical constants and unit conventions.

All user-facing frequencies and energies are plain Hz (energy / h).  All
Hamiltonian matrices handed to the integrator are in angular frequency
(rad/s, i.e. H / hbar).  The conversion happens exactly once, at the module
boundary, through :func:`to_angular`.
"""

import math

TWO_PI = 2.0 * math.pi

# CODATA 2018 exact values
H_PLANCK = 6.62607015e-34        # J s
HBAR = H_PLANCK / TWO_PI         # J s
E_CHARGE = 1.602176634e-19       # C
K_BOLTZMANN = 1.380649e-23       # J / K

# reduced flux quantum  hbar / 2e
PHI0_REDUCED = HBAR / (2.0 * E_CHARGE)   # Wb


def to_angular(f_hz):
    """Hz -> rad/s."""
    return TWO_PI * f_hz


def from_angular(w_rad_s):
    """rad/s -> Hz."""
    return w_rad_s / TWO_PI


def inductive_energy_hz(inductance_h):
    """Inductive energy scale phi0^2 / L of an inductor, in Hz."""
    return PHI0_REDUCED**2 / (inductance_h * H_PLANCK)


def charging_energy_hz(capacitance_f):
    """Single-electron charging energy e^2 / 2C, in Hz."""
    return E_CHARGE**2 / (2.0 * capacitance_f * H_PLANCK)
