"""Quantum heat of a driven qubit coupled to thermal baths."""
__version__ = "0.1.0"

from .dissipation import (  # noqa: E402
    BathCoupling,
    Branch,
    RateSet,
    ResonatorFilter,
    TransmonCircuit,
    bose_occupation,
    effective_kappa,
    rates_at,
    transmon_rate,
)
from .lindblad import (  # noqa: E402
    CycleSolution,
    DensityMatrix,
    IntegratorConfig,
    NotConverged,
    StepUnstable,
    evolve_one_cycle,
    find_steady_cycle,
    master_equation_rhs,
)
from .model import (  # noqa: E402
    AsymmetricSquare,
    PeakPrediction,
    QubitDriveModel,
    TanhCosine,
    dynamical_phase,
    extremal_gaps,
    gap_angular_frequency,
    resonance_frequencies,
    waveform_value,
)
