"""Basic cohomology invariants of Riemannian foliations and the basic Hopf index formula."""
from .errors import (
    BadComponentMapError,
    BadIndexValueError,
    BadParityError,
    BettiShapeError,
    DegenerateLinearizationError,
    DegreeOutOfRangeError,
    DimensionMismatchError,
    FoliageError,
    LocalizationPreconditionError,
    MissingFaceError,
    NegativeWeightError,
    NonIntegerSupertraceError,
    OddDegreeNonzeroError,
    ParseError,
    SchemaError,
    SpectralGapTooSmallError,
)
from .hopf_ledger import CriticalRecord, HopfReport, hopf_sum, lower_bound_check, simple_form_check, verify
from .linear_index import (
    HolonomyReport,
    Linearization,
    PolarParts,
    deformation_path,
    holonomy_commutes,
    index_of,
    path_index_constancy,
    polar_decompose,
)
from .nerve_cech import (
    CechComplex,
    CohomologySummary,
    CoverNerve,
    betti,
    build_complex,
    cokernel_dim,
    group_average,
)
from .tolerances import DEFAULT_TOL, Tolerances
from .witten_spectral import (
    BasicComplexMatrices,
    SpectralProfile,
    SpectralReport,
    analyze,
    assemble,
    betti_numeric,
    heat_supertrace,
    localization_profile,
    morse_check,
    parity_of_anticommutator,
    preset_profile,
    witten_supertrace,
    witten_sweep,
)

__version__ = "0.1.0"
