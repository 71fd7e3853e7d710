"""Non-unitary dynamics and phase locking in PT-symmetric tight-binding lattices."""

__version__ = "0.1.0"

from .errors import (
    DecompositionError,
    ExceptionalPointError,
    NumericalFailureError,
    NumericalInputError,
    SpecError,
)
from .linalg import EigenDecomposition, eig, expm
from .models import LatticeSpec, Variant, build_hamiltonian, check_pt_symmetry, parity_matrix
from .evolve import (
    PhaseSeries,
    StateTrajectory,
    TimeGrid,
    dimer_propagator_closed_form,
    invariant_digits,
    phases,
    propagate,
    random_state,
)
from .invariants import (
    IntertwinerBasis,
    InvariantSeries,
    ModeCoefficients,
    biorthogonal_decompose,
    mode_pt_product,
    find_intertwiners,
    invariant_series,
    pt_product,
)
from .analysis import (
    BondLock,
    LockingReport,
    PeriodEstimate,
    ThresholdResult,
    detect_locking,
    estimate_period,
    pt_threshold,
)
