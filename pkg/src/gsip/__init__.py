"""Exactly solvable position-dependent-mass quantum wells.

Six closed-form families of shape-invariant superpotentials for the
variable-mass Hamiltonian -d/dx (1/(2m(x))) d/dx + V(x), with algebraic
spectra and analytic ground states, cross-checked by an independent
flux-conservative tridiagonal eigensolver.
"""

from .errors import (
    ConfigError,
    DomainError,
    GridError,
    GsipError,
    IndeterminateError,
    MassError,
    NormalizabilityError,
    NumericsError,
    PoleError,
    PotentialError,
    UnboundLevelError,
    ValidationError,
)
from .families import (
    Family,
    FamilySpec,
    as_superpotential,
    auto_interval,
    bound_level_count,
    ground_state_of,
    param_step_of,
    potential_of,
    r_of,
    spectrum_of,
    superpotential_of,
    validate_spec,
)
from .grids import Grid, GridFunction, overlap
from .eigensolver import (
    TridiagonalOperator,
    count_sign_changes,
    discretize,
    lowest_eigenpairs,
    lowest_eigenvalues,
    richardson_refine,
    sturm_count,
)
from .profiles import (
    MassProfile,
    constant_profile,
    custom_profile,
    eval_mass,
    eval_V0,
    eval_Y,
    inverse_linear_profile,
    linear_profile,
    profile_by_name,
    sech_profile,
)
from .susy import (
    NormalizabilityCheck,
    Superpotential,
    V1_from_W,
    V2_from_W,
    apply_A,
    apply_A_dagger,
    check_normalizability,
    ground_state_on_grid,
    ladder_excited_state,
    shape_invariance_residual,
    spectrum_accumulate,
)
from .verify import (
    CanonicalCase,
    Thresholds,
    VerificationReport,
    canonical_cases,
    reports_to_json,
    run_case,
    sweep,
)

__version__ = "0.1.0"
