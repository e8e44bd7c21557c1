"""Driven qubit: drive waveforms, instantaneous gap and resonance predictors.

The qubit Hamiltonian is ``H(t) = g*Omega(t)/2 * sigma_z + omega0/2 * sigma_x``
(hbar = 1, frequencies in rad/ns).  ``Omega(t)`` runs between 0 (low gap
``omega2 = omega0``) and 2 (high gap ``omega1 = sqrt(4 g^2 + omega0^2)``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .units import TWO_PI, ghz_to_angular

# below this the tanh ratio is replaced by its a -> 0 limit
SMALL_A = 1e-4


@dataclass(frozen=True)
class TanhCosine:
    """``Omega(t) = 1 + tanh(a cos(omega_L t)) / tanh(a)``.

    Starts (t = 0) in the middle of the high-gap half period.
    """

    a: float
    omega_L: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.omega_L > 0:
            raise ValueError(f"omega_L must be positive, got {self.omega_L}")

    @classmethod
    def from_ghz(cls, a, f_ghz):
        return cls(a, ghz_to_angular(f_ghz))

    @property
    def period(self):
        return TWO_PI / self.omega_L

    @property
    def symmetric(self):
        return True

    @property
    def switch_times(self):
        """Midpoints of the down (2 -> 0) and up (0 -> 2) switches."""
        return self.period / 4, 3 * self.period / 4

    def value(self, t):
        phase = self.omega_L * np.asarray(t, dtype=float)
        if self.a < SMALL_A:
            return 1.0 + np.cos(phase)
        return 1.0 + np.tanh(self.a * np.cos(phase)) / math.tanh(self.a)

    def high_duration(self):
        return self.period / 2

    def low_duration(self):
        return self.period / 2


@dataclass(frozen=True)
class AsymmetricSquare:
    """Square wave: ``Omega = 0`` for ``dt2``, then ``Omega = 2`` for ``dt1``.

    The cycle starts at the beginning of the low-gap leg.
    """

    dt1: float
    dt2: float

    def __post_init__(self):
        if not (self.dt1 > 0 and self.dt2 > 0):
            raise ValueError(f"leg durations must be positive, got {self.dt1}, {self.dt2}")

    @property
    def period(self):
        return self.dt1 + self.dt2

    @property
    def omega_L(self):
        return TWO_PI / self.period

    @property
    def symmetric(self):
        return math.isclose(self.dt1, self.dt2, rel_tol=1e-12)

    @property
    def switch_times(self):
        return self.period, self.dt2

    def value(self, t):
        tau = np.mod(np.asarray(t, dtype=float), self.period)
        return np.where(tau < self.dt2, 0.0, 2.0)

    def high_duration(self):
        return self.dt1

    def low_duration(self):
        return self.dt2


DriveWaveform = Union[TanhCosine, AsymmetricSquare]


def waveform_value(drive, t):
    """Dimensionless drive ``Omega(t)`` in [0, 2]; accepts scalars or arrays."""
    out = drive.value(t)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class QubitDriveModel:
    """Static qubit parameters in rad/ns plus a drive waveform."""

    omega0: float
    g: float
    drive: DriveWaveform

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")

    @classmethod
    def from_ghz(cls, omega0_ghz, g_ghz, drive):
        return cls(ghz_to_angular(omega0_ghz), ghz_to_angular(g_ghz), drive)

    @property
    def omega1(self):
        return math.sqrt(4 * self.g**2 + self.omega0**2)

    @property
    def omega2(self):
        return self.omega0

    @property
    def eta(self):
        """Sine of the mixing angle on the high-gap branch, ``2g/omega1``."""
        return 2 * self.g / self.omega1

    @property
    def period(self):
        return self.drive.period

    @property
    def omega_L(self):
        return self.drive.omega_L

    def with_drive(self, drive):
        return replace(self, drive=drive)

    def gap(self, omega_value):
        """Gap as a function of the drive value (not of time)."""
        return np.sqrt((self.g * omega_value) ** 2 + self.omega0**2)


def gap_angular_frequency(model, t):
    """Instantaneous transition frequency ``sqrt(g^2 Omega(t)^2 + omega0^2)``."""
    out = model.gap(model.drive.value(t))
    return float(out) if np.ndim(out) == 0 else out


def extremal_gaps(model):
    """``(omega1, omega2)``: gaps at Omega = 2 and Omega = 0."""
    return model.omega1, model.omega2


def dynamical_phase(model):
    """Closed-form phase accumulated by the coherence over one period."""
    drive = model.drive
    if isinstance(drive, AsymmetricSquare):
        return model.omega1 * drive.dt1 + model.omega2 * drive.dt2
    return (model.omega1 + model.omega2) * math.pi / drive.omega_L


def dynamical_phase_numeric(model, samples=1 << 16):
    """Integral of the instantaneous gap over one period (periodic trapezoid).

    Differs from :func:`dynamical_phase` at intermediate ``a`` because the
    gap is not linear in ``Omega``.
    """
    T = model.period
    t = np.arange(samples) * (T / samples)
    return float(np.sum(gap_angular_frequency(model, t)) * (T / samples))


@dataclass(frozen=True)
class PeakPrediction:
    """Predicted power maximum of order ``n``; frequencies in GHz."""

    n: int
    f_L_n: float
    f_M: float


def mean_frequency_ghz(model):
    return (model.omega1 + model.omega2) / (2 * TWO_PI)


def resonance_frequencies(model, n_max):
    """Drive frequencies (GHz) where the dynamical phase equals ``2 n pi``.

    Symmetric drives give ``f_M / n``.  For an asymmetric square wave the
    low-gap leg ``dt2`` is held fixed and ``dt1`` absorbs the change of period.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    drive = model.drive
    if isinstance(drive, AsymmetricSquare) and not drive.symmetric:
        return asymmetric_resonance_frequencies(model, n_max, drive.dt2)
    f_M = mean_frequency_ghz(model)
    return [PeakPrediction(n, f_M / n, f_M) for n in range(1, n_max + 1)]


def asymmetric_resonance_frequencies(model, n_max, dt2=None):
    """Resonances for a square wave with fixed low-gap leg ``dt2`` (ns).

    With ``dt2 = pi/omega2`` (the default) this is
    ``2 omega1 omega2 / ((2n - 1) omega2 + omega1) / 2 pi``.
    """
    w1, w2 = model.omega1, model.omega2
    if dt2 is None:
        dt2 = math.pi / w2
    f_M = mean_frequency_ghz(model)
    out = []
    n = 0
    while len(out) < n_max:
        n += 1
        dt1 = (TWO_PI * n - w2 * dt2) / w1
        if dt1 <= 0:
            continue
        out.append(PeakPrediction(n, 1.0 / (dt1 + dt2), f_M))
    return out
