"""Bath-induced rates: relaxation, excitation, pure dephasing and filters."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import QubitDriveModel
from .units import HBAR, K_B, ghz_to_angular, thermal_angular


class Branch(enum.Enum):
    """Which part of the drive cycle a bath acts on.

    The low-gap branch is ``Omega <= 1``, the high-gap branch ``Omega > 1``.
    """

    ALWAYS = "always"
    LOW_GAP = "low_gap"
    HIGH_GAP = "high_gap"

    def mask(self, omega_value):
        omega_value = np.asarray(omega_value, dtype=float)
        if self is Branch.ALWAYS:
            return np.ones_like(omega_value, dtype=bool)
        low = omega_value <= 1.0
        return low if self is Branch.LOW_GAP else ~low


@dataclass(frozen=True)
class ResonatorFilter:
    """Lorentzian spectral filter, ``omega_r`` in rad/ns."""

    Q_r: float
    omega_r: float

    def __post_init__(self):
        if not (self.Q_r > 0 and self.omega_r > 0):
            raise ValueError("filter Q_r and omega_r must be positive")

    @classmethod
    def from_ghz(cls, Q_r, f_r_ghz):
        return cls(Q_r, ghz_to_angular(f_r_ghz))

    def factor(self, omega):
        detune = self.omega_r / omega - omega / self.omega_r
        return 1.0 / (1.0 + self.Q_r**2 * detune**2)


@dataclass(frozen=True)
class BathCoupling:
    kappa: float
    T_mK: float
    filter: Optional[ResonatorFilter] = None
    active_branch: Branch = Branch.ALWAYS
    dephasing: bool = True

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")
        if not self.T_mK > 0:
            raise ValueError(f"temperature must be positive, got {self.T_mK}")

    @property
    def kT(self):
        """Thermal energy in rad/ns."""
        return thermal_angular(self.T_mK)


@dataclass(frozen=True)
class RateSet:
    """Rates in 1/ns.  Fields may be arrays when evaluated on a time grid."""

    gamma_down: np.ndarray
    gamma_up: np.ndarray
    gamma_phi: np.ndarray

    @property
    def gamma_sigma(self):
        return self.gamma_down + self.gamma_up

    def __add__(self, other):
        return RateSet(
            self.gamma_down + other.gamma_down,
            self.gamma_up + other.gamma_up,
            self.gamma_phi + other.gamma_phi,
        )


def bose_occupation(energy, thermal_energy):
    """``1 / (exp(E/kT) - 1)``; both arguments in the same units."""
    energy = np.asarray(energy, dtype=float)
    if np.any(energy <= 0):
        raise ValueError("Bose occupation needs a positive gap")
    out = 1.0 / np.expm1(energy / thermal_energy)
    return float(out) if out.ndim == 0 else out


def rates_for_drive(model: QubitDriveModel, bath: BathCoupling, omega_value):
    """Rates as a function of the instantaneous drive value ``Omega``."""
    omega_value = np.asarray(omega_value, dtype=float)
    w = model.gap(omega_value)
    kT = bath.kT
    drive_sq = (model.g * omega_value) ** 2
    matrix_element = model.omega0**2 / (model.omega0**2 + drive_sq)
    down = bath.kappa * matrix_element * w * (bose_occupation(w, kT) + 1.0)
    if bath.filter is not None:
        down = down * bath.filter.factor(w)
    up = np.exp(-w / kT) * down
    if bath.dephasing:
        # (omega0^2/(g Omega)^2 + 1)^-1 written so that Omega = 0 gives 0
        phi = bath.kappa * drive_sq / (model.omega0**2 + drive_sq) * kT
    else:
        phi = np.zeros_like(w)
    active = bath.active_branch.mask(omega_value)
    return RateSet(
        np.where(active, down, 0.0),
        np.where(active, up, 0.0),
        np.where(active, phi, 0.0),
    )


def rates_at(model, bath, t):
    """Rates of one bath at time ``t`` (ns)."""
    rs = rates_for_drive(model, bath, model.drive.value(t))
    if np.ndim(rs.gamma_down) == 0:
        return RateSet(float(rs.gamma_down), float(rs.gamma_up), float(rs.gamma_phi))
    return rs


def total_rates(model, baths, omega_value):
    omega_value = np.asarray(omega_value, dtype=float)
    zero = np.zeros_like(omega_value)
    total = RateSet(zero, zero, zero)
    for bath in baths:
        total = total + rates_for_drive(model, bath, omega_value)
    return total


@dataclass(frozen=True)
class TransmonCircuit:
    """Transmon capacitively coupled to a resistor (SI units, omega in rad/s)."""

    C_J: float
    C_c: float
    R: float
    omega: float

    @property
    def C_sigma(self):
        return self.C_c + 2 * self.C_J

    @property
    def quality_factor(self):
        return 1.0 / (self.omega * self.C_J * self.R)


@dataclass(frozen=True)
class TransmonRate:
    full: float
    approx: float


def transmon_rate(circ, model=None, T=None, drive_value=0.0):
    """Relaxation rate (1/s) of a transmon damped by a resistor.

    ``full`` keeps the drive-dependent matrix element and the Bose factor;
    ``approx`` is the low-temperature, weak-drive estimate
    ``C_c^2 / (C_J + C_c)^2 * omega^2 R C_J``.
    ``T`` is in kelvin; ``None`` means zero temperature.
    """
    w = circ.omega
    if circ.C_c == 0 or circ.R == 0:
        return TransmonRate(0.0, 0.0)
    element = 1.0
    if model is not None:
        drive_sq = (model.g * drive_value) ** 2
        element = model.omega0**2 / (model.omega0**2 + drive_sq)
    n_th = 0.0 if T is None else bose_occupation(HBAR * w, K_B * T)
    full = element * (circ.C_c / circ.C_sigma) ** 2 * (w / circ.quality_factor) * (n_th + 1)
    approx = (circ.C_c / (circ.C_J + circ.C_c)) ** 2 * w**2 * circ.R * circ.C_J
    return TransmonRate(full, approx)


def effective_kappa(circ, T=None, full=False):
    """Coupling ``kappa`` whose undriven rate ``kappa*omega*(N+1)`` matches the circuit.

    By default the low-temperature estimate is matched, giving
    ``Gamma/omega / (N+1)`` with ``N`` at ``T`` (kelvin; ``None`` is zero
    temperature).  With ``full`` the complete circuit rate is matched
    instead, which makes ``kappa`` temperature independent.
    """
    rate = transmon_rate(circ, T=None)
    if full:
        return rate.full / circ.omega
    n_th = 0.0 if T is None else bose_occupation(HBAR * circ.omega, K_B * T)
    return rate.approx / (circ.omega * (n_th + 1))


def filter_suppression(Q_r, omega_ratio):
    """Lorentzian factor at ``omega = omega_ratio * omega_r``."""
    return 1.0 / (1.0 + Q_r**2 * (1.0 / omega_ratio - omega_ratio) ** 2)
