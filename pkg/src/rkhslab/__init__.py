"""Numerical toolkit for unitarily invariant kernel spaces on the unit ball."""

from .dilation import (
    DilationCertificate,
    agler_coextension,
    direct_sum,
    spherical_unitary,
    verify_coextension,
)
from .errors import (
    CNPViolationError,
    DegeneracyError,
    DegenerateSampleError,
    ImproperIdealError,
    NilpotencyError,
    NonHermitianError,
    NotPSDError,
    ParameterDomainError,
    PointDomainError,
    PreconditionError,
    RKHSLabError,
    SeriesDivisionError,
    SingularKernelError,
    TruncationError,
)
from .kernels import (
    CoeffTable,
    KernelSpec,
    classify_summability,
    compute_a,
    invert_series,
    is_cnp,
    kernel_eval,
    kernel_gram,
    perturb_kernel,
    regularity_profile,
    table_for,
)
from .linalg import PsdVerdict, is_psd
from .model_ops import (
    HereditaryResult,
    OperatorTuple,
    commutator_tail_norms,
    compress,
    defect_operator,
    hereditary_1k,
    joint_eigenvalues,
    psi_row,
    sampled_multiplier_power_norm,
    shift_tuple,
    technical_identity_check,
    toeplitz_defect,
    truncated_shift,
)
from .pick import (
    PickProblem,
    gram_factor,
    kernel_quotient_gram,
    pick_matrix,
    sampled_multiplier_norm,
)
from .polyspace import (
    HomogeneousIdeal,
    HomogeneousPolynomial,
    IdealComplementBasis,
    MonomialBasis,
    build_basis,
    complement_basis,
    ideal_slices,
    kernel_power_vector,
    multinomial,
)

__version__ = "0.1.0"

__all__ = [
    "DilationCertificate",
    "agler_coextension",
    "direct_sum",
    "spherical_unitary",
    "verify_coextension",
    "CNPViolationError",
    "DegeneracyError",
    "DegenerateSampleError",
    "ImproperIdealError",
    "NilpotencyError",
    "NonHermitianError",
    "NotPSDError",
    "ParameterDomainError",
    "PointDomainError",
    "PreconditionError",
    "RKHSLabError",
    "SeriesDivisionError",
    "SingularKernelError",
    "TruncationError",
    "CoeffTable",
    "KernelSpec",
    "classify_summability",
    "compute_a",
    "invert_series",
    "is_cnp",
    "kernel_eval",
    "kernel_gram",
    "perturb_kernel",
    "regularity_profile",
    "table_for",
    "PsdVerdict",
    "is_psd",
    "HereditaryResult",
    "OperatorTuple",
    "commutator_tail_norms",
    "compress",
    "defect_operator",
    "hereditary_1k",
    "joint_eigenvalues",
    "psi_row",
    "sampled_multiplier_power_norm",
    "shift_tuple",
    "technical_identity_check",
    "toeplitz_defect",
    "truncated_shift",
    "PickProblem",
    "gram_factor",
    "kernel_quotient_gram",
    "pick_matrix",
    "sampled_multiplier_norm",
    "HomogeneousIdeal",
    "HomogeneousPolynomial",
    "IdealComplementBasis",
    "MonomialBasis",
    "build_basis",
    "complement_basis",
    "ideal_slices",
    "kernel_power_vector",
    "multinomial",
    "__version__",
]
