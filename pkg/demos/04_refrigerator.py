"""
Two-bath refrigerator
=====================

With an asymmetric square wave and two filtered baths (one coupled on each
branch, both at 210 mK) the qubit can pump heat out of bath 2 into bath 1.
The cooling windows sit around dt1 = 2 n pi / omega1, where coherences
created on one sudden leg are undone on the other.
"""
import math
from dataclasses import replace

from qheat.harness.config import load_config
from qheat.harness.sweep import run_sweep
from qheat.observables import cooling_windows

cfg = load_config("fig3")
cfg = replace(cfg, sweep=replace(cfg.sweep, points=60, refine=False))
w1 = cfg.base_model().omega1
results = run_sweep(cfg)

for p in results.points[::5]:
    print(f"dt1 = {p.dt1:.3f} ns: P1 = {p.P1 * 1e15:+8.4f} fW, P2 = {p.P2 * 1e15:+8.4f} fW")

print("cooling windows (P2 < 0 < P1):")
for (lo, hi), p2 in cooling_windows(results.points):
    print(f"  dt1 in [{lo:.3f}, {hi:.3f}] ns, strongest P2 = {p2 * 1e15:.4f} fW")
print(f"2 pi/omega1 = {2 * math.pi / w1:.3f} ns, 4 pi/omega1 = {4 * math.pi / w1:.3f} ns")
