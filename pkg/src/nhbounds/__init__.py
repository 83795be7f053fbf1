"""Speed limits and uncertainty relations for non-Hermitian quantum dynamics.

The package simulates dynamics generated by non-Hermitian Hamiltonians
(closed form and continuous-measurement form), and numerically evaluates
and verifies mean-based and deviation-based quantum speed limits and
thermodynamic-uncertainty-style inequalities, including the classical
Markov special case.  hbar = 1 throughout.
"""

from .bounds import (
    BoundReport,
    JumpCountObservable,
    SLACK_TOL,
    commutator_check,
    dynamical_activity,
    energy_time_check,
    fid_ml,
    fid_ml_open,
    fid_mt,
    fid_mt_open,
    ground_energy,
    ml_fidelity_bound,
    ml_fidelity_bound_open,
    mt_fidelity_bound,
    mt_fidelity_bound_open,
    normalized_overlap,
    open_overlap,
    qsl_classical,
    qsl_ml,
    qsl_ml_open,
    qsl_mt,
    qsl_mt_open,
    tur_classical,
    tur_ml,
    tur_ml_open,
    tur_mt,
    tur_mt_open,
)
from .errors import (
    BadParameter,
    CommutatorViolation,
    DegenerateObservable,
    HermiticityViolation,
    IntegratorDiverged,
    NonPositiveGamma,
    NormUnderflow,
    NotDistribution,
    NotPSD,
    NumericalOverflow,
    ShapeError,
    SimulationError,
    StepTooLarge,
    WindowExceeded,
)
from .metrics import (
    ObservableStats,
    bures_angle,
    fidelity,
    generalized_std,
    observable_stats,
    overlap_upper_bound,
    renyi_divergence,
    renyi_half,
)
from .models import (
    ClassicalMarkovModel,
    classical_initial_density,
    is_classical_embedding,
    make_classical,
    make_dephasing,
    make_refrigerator,
    random_commuting,
    random_density,
    random_diagonal_jump_lindblad,
    random_pure_state,
)
from .propagation import (
    LindbladModel,
    NoJumpState,
    NonHermitianModel,
    Trajectory,
    TrajectoryEnsemble,
    evolve_density_nonhermitian,
    evolve_lindblad,
    evolve_nonhermitian,
    kraus_operators,
    kraus_step,
    liouvillian,
    no_jump_heff_std,
    no_jump_state,
    propagator,
    propagator_with_error,
    sample_trajectory,
    trajectory_ensemble,
)
from .states import DensityOperator, StateVector, normalize, pure_density, purify, reduced_density

__all__ = [name for name in dir() if not name.startswith("_")]
