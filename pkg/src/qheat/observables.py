"""Physical outputs of converged cycles: powers, trajectories, windings, peaks."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .lindblad import (
    IntegratorConfig,
    find_steady_cycle,
    heat_per_cycle,
    work_per_cycle,
)
from .model import AsymmetricSquare, PeakPrediction, TanhCosine, resonance_frequencies
from .units import POWER_UNIT_W

PHASOR_FLOOR = 1e-12


class WindingUndefined(ValueError):
    """The coherence phasor vanishes over too much of the cycle."""


class NoPeak(LookupError):
    def __init__(self, missing):
        super().__init__(f"no local maximum near predicted orders {[p.n for p in missing]}")
        self.missing = missing


@dataclass(frozen=True)
class PowerSpectrumPoint:
    """One sweep row.  Powers in watts; ``None`` when the point did not converge.

    ``P1``/``P2`` are the powers into bath 1 and bath 2; ``P2`` is ``None``
    for a single bath.
    """

    f_L: float  # GHz
    dt1: float  # ns, duration of the high-gap leg
    P_total: Optional[float]
    P1: Optional[float]
    P2: Optional[float]
    P_dimensionless: Optional[float]
    rho_ee_p: Optional[float]
    winding: Optional[int]
    purity_min: Optional[float]
    converged: bool
    cycles: int


@dataclass(frozen=True)
class Peak:
    n: int
    f_at_max: float
    P_at_max: float
    predicted_f: float

    @property
    def relative_offset(self):
        return abs(self.f_at_max - self.predicted_f) / self.predicted_f


def cycle_power_exact(model, baths, cycle):
    """Mean power into each bath (internal units) by quadrature of ``-Tr[H L rho]``."""
    heat = heat_per_cycle(model, baths, cycle.t, cycle.omega_drive, cycle.states, cycle.weights)
    return heat / model.period


def cycle_work(cycle):
    """Work done by the drive over the cycle, ``closed integral of Tr[rho dH]``."""
    return work_per_cycle(cycle.model, cycle.omega_drive, cycle.states)


def bloch_trajectory(cycle):
    """Lab-frame ``<sigma>`` and eigenframe ``2(R, I, D)`` along the cycle."""
    return cycle.lab_bloch, 2.0 * cycle.eigen_coordinates


def winding_number(cycle):
    """Turns of the eigenbasis coherence phasor ``R + iI`` over one cycle."""
    rid = cycle.eigen_coordinates
    z = rid[:, 0] + 1j * rid[:, 1]
    small = np.abs(z) < PHASOR_FLOOR
    if small.mean() > 0.1:
        raise WindingUndefined("coherence phasor is zero over more than 10% of the cycle")
    angle = np.unwrap(np.angle(z[~small]))
    return int(round((angle[-1] - angle[0]) / (2 * math.pi)))


def _parabolic_vertex(x, y):
    (x0, x1, x2), (y0, y1, y2) = x, y
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    B = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    C = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom
    if A >= 0:
        return x1, y1
    xv = -B / (2 * A)
    if not x0 <= xv <= x2:
        return x1, y1
    return xv, C - B**2 / (4 * A)


def local_maxima(f, P):
    """Interior 3-point maxima with parabolic refinement: list of ``(f, P)``."""
    out = []
    for i in range(1, len(f) - 1):
        if P[i] > P[i - 1] and P[i] >= P[i + 1]:
            out.append(_parabolic_vertex(f[i - 1 : i + 2], P[i - 1 : i + 2]))
    return out


def _extended_ladder(predictions, f_min):
    """Append unrequested orders ``f_M/n`` down to ``f_min`` for a harmonic ladder.

    Without them a maximum of order ``n_max + 1`` would be claimed by ``n_max``.
    """
    preds = list(predictions)
    if not preds or not all(
        math.isclose(q.n * q.f_L_n, q.f_M, rel_tol=1e-9) for q in preds
    ):
        return preds
    f_M = preds[0].f_M
    n = max(q.n for q in preds) + 1
    while f_M / n >= 0.5 * f_min and n < 10_000:
        preds.append(PeakPrediction(n, f_M / n, f_M))
        n += 1
    return preds


def find_peaks(spectrum, predictions, key="P_total", window=0.25, strict=False):
    """Match local power maxima to predicted resonances.

    Each maximum goes to its nearest order of the resonance ladder (extended
    beyond the requested orders when the ladder is harmonic); within
    ``window`` (relative) the highest one wins.  Unconverged rows are
    skipped.  With ``strict`` a prediction left without a maximum raises
    :class:`NoPeak`.
    """
    predictions = list(predictions)
    rows = [p for p in spectrum if p.converged and getattr(p, key) is not None]
    rows.sort(key=lambda p: p.f_L)
    f = np.array([p.f_L for p in rows])
    P = np.array([getattr(p, key) for p in rows])
    best = {}
    ladder = _extended_ladder(predictions, f[0] if len(f) else 0.0)
    for fm, pm in local_maxima(f, P):
        pred = min(ladder, key=lambda q: abs(fm - q.f_L_n))
        if pred not in predictions:
            continue
        if abs(fm - pred.f_L_n) > window * pred.f_L_n:
            continue
        if pred.n not in best or pm > best[pred.n].P_at_max:
            best[pred.n] = Peak(pred.n, float(fm), float(pm), pred.f_L_n)
    missing = [q for q in predictions if q.n not in best]
    if strict and missing:
        raise NoPeak(missing)
    return [best[q.n] for q in predictions if q.n in best]


def cooling_windows(spectrum):
    """Contiguous runs (in ``dt1``) with ``P2 < 0`` and ``P1 > 0``.

    Returns ``[((dt1_lo, dt1_hi), min_P2), ...]``; empty for single-bath sweeps.
    """
    rows = sorted(spectrum, key=lambda p: p.dt1)
    out = []
    run = []
    for p in rows + [None]:
        cooling = (
            p is not None
            and p.converged
            and p.P2 is not None
            and p.P1 is not None
            and p.P2 < 0
            and p.P1 > 0
        )
        if cooling:
            run.append(p)
        elif run:
            out.append(((run[0].dt1, run[-1].dt1), min(q.P2 for q in run)))
            run = []
    return out


def window_measure(windows):
    return sum(hi - lo for (lo, hi), _ in windows)


# ---------------------------------------------------------------------------
# one sweep point
# ---------------------------------------------------------------------------


def spectrum_point(model, baths, cfg=IntegratorConfig()):
    """Solve one operating point and reduce it to a :class:`PowerSpectrumPoint`."""
    cycle = find_steady_cycle(model, baths, cfg, raise_on_failure=False)
    return point_from_cycle(cycle)


def point_from_cycle(cycle):
    model = cycle.model
    f_L = 1.0 / model.period
    dt1 = model.drive.high_duration()
    if not cycle.converged:
        return PowerSpectrumPoint(f_L, dt1, None, None, None, None, None, None, None, False, cycle.cycles)
    power = cycle.power * POWER_UNIT_W
    total = float(np.sum(power))
    P1 = float(power[0]) if len(power) > 0 else None
    P2 = float(power[1]) if len(power) > 1 else None
    dimensionless = float(np.sum(cycle.heat)) / model.omega0
    rho_ee_p = 0.5 - float(cycle.corner_states()["p"][0])
    try:
        winding = winding_number(cycle)
    except WindingUndefined:
        winding = None
    return PowerSpectrumPoint(
        f_L,
        dt1,
        total,
        P1,
        P2,
        dimensionless,
        rho_ee_p,
        winding,
        float(cycle.purity.min()),
        True,
        cycle.cycles,
    )


def with_frequency(model, f_ghz):
    """Copy of ``model`` driven at ``f_ghz``.  Square waves keep their duty ratio."""
    drive = model.drive
    if isinstance(drive, TanhCosine):
        return model.with_drive(TanhCosine.from_ghz(drive.a, f_ghz))
    scale = 1.0 / (f_ghz * drive.period)
    return model.with_drive(AsymmetricSquare(drive.dt1 * scale, drive.dt2 * scale))


# ---------------------------------------------------------------------------
# peak amplitude studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmplitudeRow:
    variable: str
    value: float
    n: int
    P_max: float  # W
    f_at_max: float  # GHz
    is_peak: bool


def family_member(model, variable, value):
    if variable == "omega_ratio":
        g = model.omega0 * math.sqrt(value**2 - 1) / 2
        return replace(model, g=g)
    if variable == "a":
        return model.with_drive(replace(model.drive, a=value))
    raise ValueError(f"unknown sweep variable {variable!r}")


def local_peak(model, baths, n, window=0.03, points=41, cfg=IntegratorConfig()):
    """Largest power in a local frequency sweep around the ``n``-th resonance."""
    f0 = resonance_frequencies(model, n)[-1].f_L_n
    fs = np.linspace(f0 * (1 - window), f0 * (1 + window), points)
    P = np.array(
        [spectrum_point(with_frequency(model, f), baths, cfg).P_total or 0.0 for f in fs]
    )
    i = int(np.argmax(P))
    if 0 < i < len(fs) - 1:
        fm, pm = _parabolic_vertex(fs[i - 1 : i + 2], P[i - 1 : i + 2])
        return float(fm), float(pm), True
    return float(fs[i]), float(P[i]), False


def peak_amplitude_study(model, baths, orders, variable, values, window=0.03, points=41,
                         cfg=IntegratorConfig(), strict=False):
    """Peak power of each order ``n`` as ``variable`` ('omega_ratio' or 'a') varies."""
    rows = []
    for value in values:
        member = family_member(model, variable, value)
        for n in orders:
            if member.g == 0:
                rows.append(AmplitudeRow(variable, value, n, 0.0, float("nan"), False))
                continue
            fm, pm, is_peak = local_peak(member, baths, n, window, points, cfg)
            if strict and not is_peak:
                raise NoPeak(resonance_frequencies(member, n)[-1:])
            rows.append(AmplitudeRow(variable, value, n, pm, fm, is_peak))
    return rows
