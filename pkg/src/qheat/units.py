"""Unit conventions.

Internally every frequency is an angular frequency in rad/ns, times are in ns
and energies are in units of hbar * rad/ns (hbar = 1).  The public helpers take
ordinary frequencies in GHz and temperatures in mK.
"""
import math

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

TWO_PI = 2.0 * math.pi

# one internal energy unit (hbar * 1 rad/ns) in joules
ENERGY_UNIT_J = HBAR * 1e9
# one internal power unit (energy unit per ns) in watts
POWER_UNIT_W = HBAR * 1e18


def ghz_to_angular(f_ghz):
    return TWO_PI * f_ghz


def angular_to_ghz(omega):
    return omega / TWO_PI


def thermal_angular(T_mK):
    """k_B T / hbar in rad/ns for a temperature given in mK."""
    return K_B * T_mK * 1e-3 / HBAR * 1e-9


def power_to_fw(p):
    return p * POWER_UNIT_W * 1e15
