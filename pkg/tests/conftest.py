import math

import pytest

from qheat import BathCoupling, QubitDriveModel, TanhCosine
from qheat.analytic import BranchRates, MapParams, map_params
from qheat.dissipation import Branch

OMEGA0_GHZ = 6.0
G_GHZ = 1.0
F_M = (math.sqrt(40.0) + 6.0) / 2  # GHz


def ref_model(a=8.0, f_ghz=F_M, g_ghz=G_GHZ):
    return QubitDriveModel.from_ghz(OMEGA0_GHZ, g_ghz, TanhCosine.from_ghz(a, f_ghz))


def ref_bath(kappa=0.01, T_mK=70.0, dephasing=False, **kw):
    return BathCoupling(kappa, T_mK, dephasing=dephasing, **kw)


def low_gap_bath(kappa=0.01, T_mK=70.0):
    return BathCoupling(kappa, T_mK, active_branch=Branch.LOW_GAP, dephasing=False)


def low_branch_params(dt, scale=1.0, T_mK=70.0):
    """Gamma_1 = 0, equal legs, bath on the low-gap branch only."""
    m = ref_model()
    p = map_params(m, (low_gap_bath(T_mK=T_mK),), dt, dt)
    r = p.rates2
    rates2 = BranchRates(r.gamma_down * scale, r.gamma_up * scale, 0.0)
    return MapParams(p.omega1, p.omega2, dt, dt, BranchRates(), rates2)


# ---------------------------------------------------------------------------
# acceptance reporting: one line per criterion in the terminal summary
# ---------------------------------------------------------------------------

_ACCEPTANCE = []


@pytest.fixture
def report():
    def _report(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
