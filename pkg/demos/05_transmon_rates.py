"""
Rates from a circuit
====================

A transmon coupled through C_c to a resistor R sees a relaxation rate of
about (C_c / C_sigma)^2 omega^2 R C_J.  For C_J = 30 fF, C_c = 8 fF and
R = 200 Ohm at 6 GHz this gives a dimensionless coupling close to 0.01.
A resonator filter between qubit and bath multiplies the rate by a
Lorentzian, which is how a bath is attached to one branch only.
"""
import math

import numpy as np

from qheat import ResonatorFilter, TransmonCircuit, effective_kappa, transmon_rate
from qheat.dissipation import bose_occupation
from qheat.units import thermal_angular

circ = TransmonCircuit(C_J=30e-15, C_c=8e-15, R=200.0, omega=2 * math.pi * 6e9)
rate = transmon_rate(circ)
print(f"Gamma / omega (estimate) = {rate.approx / circ.omega:.5f}")
print(f"Gamma / omega (full)     = {rate.full / circ.omega:.5f}")
print(f"kappa at 70 mK           = {effective_kappa(circ, T=0.07):.5f}")
print(f"thermal occupation N     = {bose_occupation(2 * math.pi * 6.0, thermal_angular(70.0)):.6f}")

filt = ResonatorFilter(Q_r=100.0, omega_r=1.0)
for x in np.array([0.8, 0.9, 0.99, 1.0, 1.01, 1.1]):
    print(f"omega / omega_r = {x:4.2f}: filter factor {float(filt.factor(x)):.3e}")
