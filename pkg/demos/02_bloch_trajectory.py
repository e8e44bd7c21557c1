"""
Steady-state cycle on the Bloch ball
====================================

At the n-th resonance the coherence phasor (R, I) in the instantaneous
eigenframe winds n times around the origin during one drive period, and the
steady cycle is pulled away from the surface of the Bloch ball.  Off
resonance the state stays close to the ground state.
"""
import numpy as np

from qheat import find_steady_cycle
from qheat.harness.config import load_config
from qheat.model import resonance_frequencies
from qheat.observables import bloch_trajectory, winding_number

cfg = load_config("fig1c")
baths = cfg.bath_couplings()

for q in resonance_frequencies(cfg.base_model(), 3):
    cyc = find_steady_cycle(cfg.model_at(f_L=q.f_L_n), baths)
    lab, eig = bloch_trajectory(cyc)
    print(f"f_L = {q.f_L_n:.4f} GHz: winding {winding_number(cyc)}, "
          f"min purity {cyc.purity.min():.4f}, "
          f"|r| in [{np.linalg.norm(lab, axis=1).min():.3f}, {np.linalg.norm(lab, axis=1).max():.3f}], "
          f"converged after {cyc.cycles} cycles")

# away from any resonance the qubit barely leaves the surface
cyc = find_steady_cycle(cfg.model_at(f_L=4.5), baths)
print(f"f_L = 4.5 GHz: min purity {cyc.purity.min():.4f}")

# the corner states p, q, r, s in eigenframe coordinates (D, R, I)
for k, v in find_steady_cycle(cfg.model_at(f_L=resonance_frequencies(cfg.base_model(), 1)[0].f_L_n),
                              baths).corner_states().items():
    print(k, np.round(v, 5))
