"""Conservative Camassa-Holm multi-peakon solver via the inverse spectral
transform: forward spectral analysis of a discrete generalized string,
exact evolution of the spectral data, and inverse reconstruction that stays
valid through peakon-antipeakon collisions (dipole formation)."""

from .core import (
    DiscreteMeasurePair,
    MeasureSnapshot,
    PeakonState,
    RealPolynomial,
    SpectralData,
    measure_from_document,
    measure_document,
    measure_to_peakons,
    parse_document,
    peakon_state,
    peakons_to_measure,
    spectral_data,
    spectral_document,
    spectral_from_document,
    validate_measure,
)
from .evolution import (
    CollisionReport,
    ExponentialSum,
    collision_times,
    conserved_quantities,
    delta1_exponential_sum,
    evolve_spectral,
    solve_at,
)
from .forward import (
    Classification,
    ContinuedFractionCoefficients,
    classify,
    continued_fraction_coefficients,
    eigenvalues,
    forward_transform,
    measure_moments,
    norming_constants,
    trace_values,
    weyl_continued_fraction,
    weyl_partial_fraction,
    wronskian,
)
from .inverse import (
    HankelTable,
    KappaMap,
    MomentSequence,
    hankel_table,
    kappa_map,
    moments,
    reconstruct,
)
from .ode import OdeOptions, OdeTrajectory, hamiltonian, integrate, ode_rhs
from .precision import DEFAULT_PRECISION_BITS, DEFAULT_REL_TOL, working_precision
from .soleval import (
    SolutionSample,
    collision_limit_diagnostics,
    energy_integral,
    evaluate_u,
    heights_from_samples,
    total_mass,
)
from .twopeakon import (
    TwoPeakonData,
    two_peakon_collision_time,
    two_peakon_from_spectrum,
    two_peakon_spectrum,
    two_peakon_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
