"""
Power spectrum of a driven qubit
================================

A qubit with bare splitting omega0 is driven along sigma_z with a smooth
square-ish waveform.  Heat flows into the bath only when the coherence phase
accumulated over one period is a multiple of 2 pi, which happens at

    f_L,n = f_M / n,   f_M = (omega1 + omega2) / 4 pi.

This script sweeps the drive frequency on a coarse grid (refined around each
predicted resonance) and locates the maxima.
"""
from dataclasses import replace

import numpy as np

from qheat.harness.config import load_config
from qheat.harness.sweep import run_sweep
from qheat.model import resonance_frequencies
from qheat.observables import find_peaks

cfg = load_config("fig1c")
model = cfg.base_model()
preds = resonance_frequencies(model, 4)
print(f"omega1/2pi = {model.omega1 / 2 / np.pi:.4f} GHz, omega2/2pi = {model.omega2 / 2 / np.pi:.4f} GHz")
print(f"f_M = {preds[0].f_M:.5f} GHz")

# restrict the preset to the first four resonances to keep the run short
cfg = replace(cfg, sweep=replace(cfg.sweep, start=1.4, points=60, n_max=4))
results = run_sweep(cfg)
print(f"{len(results.points)} points in {results.wall_time:.1f} s")

for p in find_peaks(results.points, preds):
    print(f"n = {p.n}: predicted {p.predicted_f:.4f} GHz, found {p.f_at_max:.4f} GHz "
          f"({p.relative_offset:.2%}), P = {p.P_at_max * 1e15:.3f} fW")

# a crude text plot of the spectrum
P = np.array([p.P_total for p in results.points])
f = np.array([p.f_L for p in results.points])
for fi, pi in zip(f[::4], P[::4]):
    print(f"{fi:6.3f} GHz |" + "#" * int(60 * pi / P.max()))
