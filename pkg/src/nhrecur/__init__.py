"""Non-unitary dynamics, information measures and recurrence for non-Hermitian Hamiltonians."""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    DensityState,
    basis_state,
    build_spectral_coeffs,
    evolve_many,
    evolve_omega,
    maximally_mixed,
    spectral_evolve,
    time_grid,
)
from .exceptions import (  # noqa: E402
    DefectiveMatrixError,
    NotHermitianError,
    NotPositiveError,
    NumericalRangeError,
)
from .hamiltonian import (  # noqa: E402
    Family,
    NHHamiltonian,
    PhaseClass,
    TwoLevelParams,
    build_apt,
    build_pt,
    classify_phase,
    delta,
    generic,
    has_real_spectrum,
    shift_spectrum,
)
from .linalg import expm, gen_eig, herm_eig  # noqa: E402
from .measures import (  # noqa: E402
    MeasureTag,
    PatternClass,
    classify_pattern,
    closed_form_neg_ln_tr,
    distinguishability,
    measure_series,
    neg_ln_tr,
    nh_entropy,
    von_neumann_entropy,
)
from .recurrence import (  # noqa: E402
    Verdict,
    build_witness,
    detect_recurrence,
    theorem_property_suite,
    witness_time_independence,
)
