"""
How the peaks depend on the drive
=================================

The height of each resonance depends on the waveform and on the gap ratio
omega1 / omega2.  Here a few members of each family are solved on a local
frequency grid around f_M / n.  The full studies are in the fig1d and fig1e
presets (``qheat study fig1d``).
"""
from qheat.harness.config import load_config
from qheat.observables import peak_amplitude_study

cfg = load_config("fig1e")
model, baths = cfg.base_model(), cfg.bath_couplings()

print("shape parameter a")
for r in peak_amplitude_study(model, baths, [1, 2, 3], "a", [0.5, 8.0], points=15):
    print(f"  a = {r.value:4g}, n = {r.n}: P_max = {r.P_max * 1e15:.4f} fW at {r.f_at_max:.4f} GHz")

print("gap ratio omega1 / omega2")
for r in peak_amplitude_study(model, baths, [1, 2], "omega_ratio", [1.02, 1.05], points=15):
    print(f"  ratio = {r.value:4g}, n = {r.n}: P_max = {r.P_max * 1e15:.4f} fW")
