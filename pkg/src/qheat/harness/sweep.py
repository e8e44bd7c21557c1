"""Sweep grids and their (optionally parallel) evaluation."""
from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import __version__
from ..model import resonance_frequencies
from ..observables import spectrum_point


@dataclass(frozen=True)
class SweepResultSet:
    points: list
    variable: str
    config_hash: str
    code_version: str
    wall_time: float


def _predicted_positions(cfg):
    """Predicted resonance positions in units of the sweep variable."""
    model = cfg.base_model()
    n_max = cfg.sweep.n_max
    if cfg.sweep.variable == "f_L":
        return [p.f_L_n for p in resonance_frequencies(model, n_max)]
    dt2 = cfg.dt2_ns()
    out = []
    for n in range(1, n_max + 1):
        dt1 = (2 * math.pi * n - model.omega2 * dt2) / model.omega1
        if dt1 > 0:
            out.append(dt1)
    return out


def sweep_grid(cfg):
    """Uniform grid plus denser patches around predicted resonances."""
    sw = cfg.sweep
    base = np.linspace(sw.start, sw.stop, sw.points)
    if not sw.refine or sw.points < 2:
        return base
    step = (sw.stop - sw.start) / (sw.points - 1) / sw.refine_factor
    patches = [base]
    for x0 in _predicted_positions(cfg):
        lo = max(sw.start, x0 * (1 - sw.refine_window))
        hi = min(sw.stop, x0 * (1 + sw.refine_window))
        if hi > lo:
            patches.append(np.arange(lo, hi, step))
    grid = np.concatenate(patches)
    return np.unique(np.round(grid, 12))


def model_for(cfg, value):
    if cfg.sweep.variable == "f_L":
        return cfg.model_at(f_L=float(value))
    return cfg.model_at(dt1=float(value))


def _solve(args):
    cfg, value = args
    return spectrum_point(model_for(cfg, value), cfg.bath_couplings(), cfg.integrator())


def config_hash(cfg):
    return hashlib.sha256(cfg.source.encode("utf-8")).hexdigest()[:16]


def run_sweep(cfg, workers=None, grid=None):
    """Evaluate every grid point; rows come back in grid order.

    Unconverged points are kept as rows flagged ``converged = False``.
    """
    workers = cfg.workers if workers is None else workers
    grid = sweep_grid(cfg) if grid is None else np.asarray(grid, dtype=float)
    tasks = [(cfg, float(v)) for v in grid]
    start = time.perf_counter()
    if workers <= 1:
        points = [_solve(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_solve, tasks, chunksize=chunk))
    return SweepResultSet(
        points, cfg.sweep.variable, config_hash(cfg), __version__, time.perf_counter() - start
    )
