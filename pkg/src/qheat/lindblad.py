"""Time-dependent master equation in the lab frame, integrated to a steady cycle.

A density matrix is stored as four reals ``(rho00, rho11, Re rho01, Im rho01)``
in the sigma_z basis.  Jump operators live in the instantaneous eigenbasis of
``H(t)``.  The equation is linear, so one classical RK4 step is itself a 4x4
matrix; a cycle is the ordered product of these step matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dissipation import rates_for_drive, total_rates
from .model import AsymmetricSquare

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# images of the four real coordinates
_BASIS = np.array(
    [
        [[1, 0], [0, 0]],
        [[0, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, 1j], [-1j, 0]],
    ],
    dtype=complex,
)

POSITIVITY_FLOOR = -1e-6


class StepUnstable(RuntimeError):
    """Positivity lost during integration; the step is too coarse."""


class NotConverged(RuntimeError):
    def __init__(self, cycles, residual):
        super().__init__(f"no steady cycle after {cycles} cycles (residual {residual:.3e})")
        self.cycles = cycles
        self.residual = residual


@dataclass(frozen=True)
class IntegratorConfig:
    steps_per_cycle: int = 4096
    convergence_tol: float = 1e-10
    max_cycles: int = 20000

    def __post_init__(self):
        if self.steps_per_cycle < 256:
            raise ValueError("steps_per_cycle must be >= 256")
        if not 0 < self.convergence_tol <= 1e-4:
            raise ValueError("convergence_tol must lie in (0, 1e-4]")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")


# ---------------------------------------------------------------------------
# representation helpers
# ---------------------------------------------------------------------------


def to_matrix(x):
    x = np.asarray(x, dtype=float)
    rho = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    rho[..., 0, 0] = x[..., 0]
    rho[..., 1, 1] = x[..., 1]
    rho[..., 0, 1] = x[..., 2] + 1j * x[..., 3]
    rho[..., 1, 0] = x[..., 2] - 1j * x[..., 3]
    return rho


def from_matrix(rho):
    rho = np.asarray(rho)
    return np.stack(
        [rho[..., 0, 0].real, rho[..., 1, 1].real, rho[..., 0, 1].real, rho[..., 0, 1].imag],
        axis=-1,
    )


def lab_bloch(x):
    """``(<sx>, <sy>, <sz>)`` of states in the four-real layout."""
    x = np.asarray(x, dtype=float)
    return np.stack([2 * x[..., 2], -2 * x[..., 3], x[..., 0] - x[..., 1]], axis=-1)


def min_eigenvalue(x):
    x = np.asarray(x, dtype=float)
    tr = x[..., 0] + x[..., 1]
    disc = np.sqrt((x[..., 0] - x[..., 1]) ** 2 + 4 * (x[..., 2] ** 2 + x[..., 3] ** 2))
    return 0.5 * (tr - disc)


@dataclass(frozen=True)
class DensityMatrix:
    """Single qubit state in the lab basis."""

    vec: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vec", np.asarray(self.vec, dtype=float).reshape(4))

    @classmethod
    def from_matrix(cls, rho):
        return cls(from_matrix(rho))

    @classmethod
    def from_bloch(cls, r):
        rx, ry, rz = r
        return cls(np.array([(1 + rz) / 2, (1 - rz) / 2, rx / 2, -ry / 2]))

    @property
    def matrix(self):
        return to_matrix(self.vec)

    @property
    def trace(self):
        return float(self.vec[0] + self.vec[1])

    @property
    def min_eigenvalue(self):
        return float(min_eigenvalue(self.vec))

    @property
    def bloch(self):
        return lab_bloch(self.vec)

    @property
    def purity(self):
        return float(0.5 * (1 + np.sum(self.bloch**2)))


# ---------------------------------------------------------------------------
# instantaneous eigenbasis
# ---------------------------------------------------------------------------


def mixing_angle(model, omega_value):
    """Angle of the field ``(omega0, 0, g Omega)`` above the x axis."""
    return np.arctan2(model.g * np.asarray(omega_value, dtype=float), model.omega0)


def instantaneous_eigenbasis(model, t):
    """Gap (rad/ns) and mixing angle at time ``t``; ``sin(theta) = g Omega / gap``."""
    omega_value = model.drive.value(t)
    w, theta = model.gap(omega_value), mixing_angle(model, omega_value)
    if np.ndim(w) == 0:
        return float(w), float(theta)
    return w, theta


def eigenvectors(theta):
    """Real excited and ground vectors; the excited state has Bloch vector
    ``(cos theta, 0, sin theta)``."""
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * (0.5 * np.pi - theta)
    c, s = np.cos(half), np.sin(half)
    excited = np.stack([c, s], axis=-1)
    ground = np.stack([s, -c], axis=-1)
    return excited, ground


def eigen_frame_coordinates(x, theta):
    """``(R, I, D)`` of lab states ``x`` in the eigenbasis with angle ``theta``.

    ``D = 1/2 - rho_ee``; ``2(R, I, D)`` are Bloch coordinates whose (R, I)
    phasor rotates counter-clockwise at the gap frequency.
    """
    r = lab_bloch(x)
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    R = 0.5 * (-s * r[..., 0] + c * r[..., 2])
    I = -0.5 * r[..., 1]
    D = -0.5 * (c * r[..., 0] + s * r[..., 2])
    return np.stack([R, I, D], axis=-1)


def state_from_eigen_frame(rid, theta):
    """Inverse of :func:`eigen_frame_coordinates`."""
    R, I, D = rid
    c, s = np.cos(theta), np.sin(theta)
    r = np.array([2 * (-s * R - c * D), -2 * I, 2 * (c * R - s * D)])
    return DensityMatrix.from_bloch(r).vec


def hamiltonian(model, omega_value):
    omega_value = np.asarray(omega_value, dtype=float)
    zg = 0.5 * model.g * omega_value
    return zg[..., None, None] * SZ + 0.5 * model.omega0 * SX


def thermal_state(model, baths, omega_value):
    """Instantaneous thermal state for the drive value ``omega_value``."""
    theta = mixing_angle(model, omega_value)
    rates = total_rates(model, baths, omega_value)
    gs = float(rates.gamma_sigma)
    if gs > 0:
        p_e = float(rates.gamma_up) / gs
    elif baths:
        w = float(model.gap(omega_value))
        p_e = 1.0 / (np.exp(w / baths[0].kT) + 1.0)
    else:
        p_e = 0.0
    e, g = eigenvectors(theta)
    rho = p_e * np.outer(e, e) + (1 - p_e) * np.outer(g, g)
    return from_matrix(rho)


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------


def _dissipator(rates, excited, ground, rho):
    """Adiabatic dissipator for batched rates, eigenvectors and states."""
    sm = ground[..., :, None] * excited[..., None, :]
    sp = np.swapaxes(sm, -1, -2)
    pe = excited[..., :, None] * excited[..., None, :]
    pg = ground[..., :, None] * ground[..., None, :]
    sz = pe - pg
    down = rates.gamma_down[..., None, None]
    up = rates.gamma_up[..., None, None]
    phi = rates.gamma_phi[..., None, None]
    out = down * (sm @ rho @ sp - 0.5 * (pe @ rho + rho @ pe))
    out = out + up * (sp @ rho @ sm - 0.5 * (pg @ rho + rho @ pg))
    out = out + phi * (sz @ rho @ sz - rho)
    return out


def _rhs_matrix(model, baths, omega_value, rho):
    H = hamiltonian(model, omega_value)
    excited, ground = eigenvectors(mixing_angle(model, omega_value))
    out = -1j * (H @ rho - rho @ H)
    if baths:
        out = out + _dissipator(total_rates(model, baths, omega_value), excited, ground, rho)
    return out


def master_equation_rhs(model, baths, rho, t):
    """``d rho / dt`` at time ``t``; ``rho`` is a :class:`DensityMatrix`,
    a four-real vector or a complex 2x2 matrix (the return matches)."""
    omega_value = np.asarray(model.drive.value(t), dtype=float)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(from_matrix(_rhs_matrix(model, baths, omega_value, rho.matrix)))
    rho = np.asarray(rho)
    if rho.shape[-2:] == (2, 2):
        return _rhs_matrix(model, baths, omega_value, rho)
    return from_matrix(_rhs_matrix(model, baths, omega_value, to_matrix(rho)))


def generator(model, baths, omega_value):
    """Real 4x4 generator(s) ``A`` with ``dx/dt = A x`` at drive value(s) ``omega_value``."""
    omega_value = np.asarray(omega_value, dtype=float)
    rho = _BASIS.reshape((4,) + (1,) * omega_value.ndim + (2, 2))
    cols = from_matrix(_rhs_matrix(model, baths, omega_value, rho))
    # cols has shape (4, ..., 4) with the basis index first
    return np.moveaxis(cols, 0, -1)


def bath_heat_rates(model, bath, omega_value, x):
    """Heat flow into ``bath`` per unit time, ``-Tr[H L_bath rho]``."""
    omega_value = np.asarray(omega_value, dtype=float)
    excited, ground = eigenvectors(mixing_angle(model, omega_value))
    rates = rates_for_drive(model, bath, omega_value)
    drho = _dissipator(rates, excited, ground, to_matrix(x))
    H = hamiltonian(model, omega_value)
    return -np.real(np.trace(H @ drho, axis1=-2, axis2=-1))


# ---------------------------------------------------------------------------
# RK4 schedule
# ---------------------------------------------------------------------------


def _rk4_steps(A0, Ah, A1, h):
    eye = np.eye(4)
    k1 = A0
    k2 = Ah @ (eye + 0.5 * h * k1)
    k3 = Ah @ (eye + 0.5 * h * k2)
    k4 = A1 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _ordered_product(steps):
    """``S[n-1] @ ... @ S[1] @ S[0]`` by pairwise reduction."""
    mats = steps
    while len(mats) > 1:
        if len(mats) % 2:
            tail = mats[-1:]
            mats = np.concatenate([mats[1:-1:2] @ mats[0:-1:2], tail])
        else:
            mats = mats[1::2] @ mats[0::2]
    return mats[0]


@dataclass
class _Segment:
    t: np.ndarray  # n + 1 nodes
    omega: np.ndarray  # drive value at the nodes
    steps: np.ndarray  # (n, 4, 4)


def _schedule(model, baths, cfg):
    drive = model.drive
    N = cfg.steps_per_cycle
    if isinstance(drive, AsymmetricSquare):
        segments = []
        n2 = max(16, int(round(N * drive.dt2 / drive.period)))
        n1 = max(16, N - n2)
        for t0, dur, n, value in ((0.0, drive.dt2, n2, 0.0), (drive.dt2, drive.dt1, n1, 2.0)):
            h = dur / n
            A = generator(model, baths, value)
            step = _rk4_steps(A, A, A, h)
            segments.append(
                _Segment(
                    t0 + h * np.arange(n + 1),
                    np.full(n + 1, value),
                    np.broadcast_to(step, (n, 4, 4)),
                )
            )
        return segments
    h = drive.period / N
    tt = 0.5 * h * np.arange(2 * N + 1)
    omega = drive.value(tt)
    A = generator(model, baths, omega)
    steps = _rk4_steps(A[0:-1:2], A[1::2], A[2::2], h)
    return [_Segment(tt[::2], omega[::2], steps)]


def cycle_propagator(model, baths, cfg=IntegratorConfig(), schedule=None):
    """4x4 matrix mapping the cycle-start state to the state one period later."""
    if schedule is None:
        schedule = _schedule(model, baths, cfg)
    M = np.eye(4)
    for seg in schedule:
        if seg.steps.strides[0] == 0:
            M = np.linalg.matrix_power(seg.steps[0], len(seg.steps)) @ M
        else:
            M = _ordered_product(np.ascontiguousarray(seg.steps)) @ M
    return M


def _run(schedule, x0):
    """Sequentially step ``x0`` through a schedule; boundary nodes are repeated."""
    t, omega, xs = [], [], []
    x = np.asarray(x0, dtype=float)
    for seg in schedule:
        n = len(seg.steps)
        out = np.empty((n + 1, 4))
        out[0] = x
        for k in range(n):
            x = seg.steps[k] @ x
            out[k + 1] = x
        t.append(seg.t)
        omega.append(seg.omega)
        xs.append(out)
    return np.concatenate(t), np.concatenate(omega), np.concatenate(xs), schedule


def _check_positivity(xs):
    lam = min_eigenvalue(xs).min()
    if lam < POSITIVITY_FLOOR:
        raise StepUnstable(f"density matrix eigenvalue {lam:.3e} below {POSITIVITY_FLOOR}")


def evolve_one_cycle(model, baths, rho0, cfg=IntegratorConfig()):
    """State after one drive period, stepping through every RK4 step."""
    x0 = rho0.vec if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=float)
    _, _, xs, _ = _run(_schedule(model, baths, cfg), x0)
    _check_positivity(xs)
    return DensityMatrix(xs[-1])


def _trapezoid_weights(schedule):
    w = []
    for seg in schedule:
        h = np.diff(seg.t)
        wk = np.zeros(len(seg.t))
        wk[:-1] += 0.5 * h
        wk[1:] += 0.5 * h
        w.append(wk)
    return np.concatenate(w)


# ---------------------------------------------------------------------------
# steady cycle
# ---------------------------------------------------------------------------


@dataclass
class CycleSolution:
    """One converged cycle sampled at every RK4 node.

    Samples at switching instants of a square wave appear twice, once with
    each drive value.  ``heat`` holds the heat released into each bath per
    cycle (internal energy units), ``power`` the corresponding mean power.
    """

    model: object
    baths: tuple
    t: np.ndarray
    omega_drive: np.ndarray
    states: np.ndarray
    weights: np.ndarray
    heat: np.ndarray
    converged: bool
    cycles: int
    residuals: list

    @property
    def period(self):
        return self.model.period

    @property
    def power(self):
        return self.heat / self.period

    @property
    def total_power(self):
        return float(np.sum(self.power))

    @property
    def theta(self):
        return mixing_angle(self.model, self.omega_drive)

    @property
    def eigen_coordinates(self):
        return eigen_frame_coordinates(self.states, self.theta)

    @property
    def lab_bloch(self):
        return lab_bloch(self.states)

    @property
    def purity(self):
        r = self.lab_bloch
        return 0.5 * (1 + np.sum(r**2, axis=-1))

    def density_matrices(self):
        return [DensityMatrix(x) for x in self.states]

    def state_at(self, t, omega_value):
        """Sample at time ``t`` with drive value ``omega_value`` (nearest node)."""
        d = np.abs(self.t - t) + np.abs(self.omega_drive - omega_value) * 1e-3
        return self.states[int(np.argmin(d))]

    def corner_states(self):
        """``(D, R, I)`` at the four corners p, q, r, s of the cycle.

        p/q open/close the low-gap leg and are expressed in the Omega = 0
        eigenbasis; r/s open/close the high-gap leg in the Omega = 2 basis.
        For smooth drives the switches are taken at their midpoints.
        """
        drive = self.model.drive
        theta1 = float(mixing_angle(self.model, 2.0))
        if isinstance(drive, AsymmetricSquare):
            tp, tq = 0.0, drive.dt2
            xp = self.states[0]
            xq = self.state_at(tq, 0.0)
            xs = self.states[-1]
        else:
            tp, tq = drive.switch_times
            xp = xs = self.state_at(tp, 1.0)
            xq = self.state_at(tq, 1.0)
        xr = xq
        out = {}
        for key, x, theta in (("p", xp, 0.0), ("q", xq, 0.0), ("r", xr, theta1), ("s", xs, theta1)):
            R, I, D = eigen_frame_coordinates(x, theta)
            out[key] = np.array([D, R, I])
        return out


def heat_per_cycle(model, baths, t, omega_drive, states, weights):
    """Heat into each bath over the sampled cycle (trapezoid quadrature)."""
    return np.array(
        [float(np.sum(weights * bath_heat_rates(model, b, omega_drive, states))) for b in baths]
    )


def work_per_cycle(model, omega_drive, states):
    """``closed integral of Tr[rho dH]`` as a midpoint Stieltjes sum over samples.

    Jumps of a square-wave drive (repeated samples) and the wrap-around from
    the last sample to the first are included.
    """
    H = hamiltonian(model, omega_drive)
    rho = to_matrix(states)
    dH = np.concatenate([H[1:] - H[:-1], (H[0] - H[-1])[None]])
    rho_mid = 0.5 * (rho + np.concatenate([rho[1:], rho[:1]]))
    return float(np.real(np.trace(rho_mid @ dH, axis1=-2, axis2=-1)).sum())


def find_steady_cycle(model, baths, cfg=IntegratorConfig(), rho0=None, raise_on_failure=True):
    """Iterate the one-period map from the thermal state until the cycle start
    moves by less than ``cfg.convergence_tol`` (max-abs over the four reals)."""
    baths = tuple(baths)
    schedule = _schedule(model, baths, cfg)
    M = cycle_propagator(model, baths, cfg, schedule)
    if rho0 is None:
        x = thermal_state(model, baths, model.drive.value(0.0))
    else:
        x = rho0.vec if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=float)
    residuals = []
    converged = False
    cycles = 0
    while cycles < cfg.max_cycles:
        x_new = M @ x
        cycles += 1
        res = float(np.max(np.abs(x_new - x)))
        residuals.append(res)
        x = x_new
        if res < cfg.convergence_tol:
            converged = True
            break
    if not converged and raise_on_failure:
        raise NotConverged(cycles, residuals[-1])
    t, omega, xs, _ = _run(schedule, x)
    _check_positivity(xs)
    weights = _trapezoid_weights(schedule)
    heat = heat_per_cycle(model, baths, t, omega, xs, weights)
    return CycleSolution(model, baths, t, omega, xs, weights, heat, converged, cycles, residuals)
