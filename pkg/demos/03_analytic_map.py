"""
Four-leg analytic map
=====================

In the square-wave limit one period is two thermal legs (fixed gap, linear
relaxation plus rotation) joined by two sudden basis changes of strength
eta.  The steady cycle is the fixed point of the composite affine map, found
with a 3x3 linear solve.  With relaxation only on the low-gap leg the power
has exact nulls at dt = 2 n pi / omega1, where the occupation is thermal.
"""
import math
import warnings

import numpy as np

from qheat import BathCoupling, Branch, QubitDriveModel, TanhCosine, find_steady_cycle
from qheat.analytic import (
    BranchRates,
    MapParams,
    ValidityWarning,
    closed_form_power,
    map_params,
    map_power,
    purity_audit,
    steady_state_fixed_point,
)
from qheat.observables import cycle_power_exact

# long legs exceed the first-order validity range; the numbers are still useful
warnings.simplefilter("ignore", ValidityWarning)

model = QubitDriveModel.from_ghz(6.0, 1.0, TanhCosine.from_ghz(30.0, 6.16227766))
bath = BathCoupling(0.01, 70.0, dephasing=False)

# map vs full integration at the first resonance
p = map_params(model, (bath,))
corners = steady_state_fixed_point(p)
numeric = cycle_power_exact(model, (bath,), find_steady_cycle(model, (bath,))).sum()
print(f"map power {map_power(p, corners).total:.5e}, Lindblad power {numeric:.5e} (internal units)")

# relaxation on the low-gap leg only
low = BathCoupling(0.01, 70.0, active_branch=Branch.LOW_GAP, dephasing=False)
w1 = model.omega1
for dt in np.arange(0.5, 4.01, 0.5) * math.pi / w1:
    q = map_params(model, (low,), dt, dt)
    q = MapParams(q.omega1, q.omega2, dt, dt, BranchRates(), q.rates2)
    c = steady_state_fixed_point(q)
    print(f"dt = {dt * w1 / math.pi:4.2f} pi/omega1: map P = {map_power(q, c).total:+.3e}, "
          f"closed form {closed_form_power(q):+.3e}")

# at the classical limit the thermal legs do not change the Bloch length
q = map_params(model, (low,), 2 * math.pi / w1, 2 * math.pi / w1)
q = MapParams(q.omega1, q.omega2, q.dt1, q.dt2, BranchRates(), q.rates2)
norms, changes = purity_audit(steady_state_fixed_point(q))
print("Bloch-length changes per leg:", {k: f"{v:.1e}" for k, v in changes.items()})
