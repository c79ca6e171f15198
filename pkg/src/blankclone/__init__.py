"""Universal and probabilistic quantum cloning machines that tolerate arbitrary blank states."""
from .errors import (
    BlankMismatchError,
    CloningError,
    DegeneratePairError,
    NotIsometryError,
    PreconditionError,
    SizeError,
    UnsupportedVariantError,
)
from .machines import (
    CloningMachine,
    build,
    build_prob_fixed,
    build_prob_robust,
    build_quditNM_fixed,
    build_quditNM_robust,
    build_qubit12_fixed,
    build_qubit12_robust,
    orthonormalize_domain,
)
from .sampling import haar_random_state
from .simulate import (
    CloneReport,
    NoiseChannel,
    apply_noise,
    blank_invariance_scan,
    run_mixed_blank,
    run_postselect,
    run_pure,
)
from .symmetric import OccupationVector, alpha, embed_symmetric, enumerate_occupations, machine_dim, sym_dim
from .tensor import (
    DensityMatrix,
    StateVector,
    bloch_vector,
    complete_isometry,
    fidelity_pure,
    kron,
    partial_trace,
    trace_distance,
)

__version__ = "0.1.0"
