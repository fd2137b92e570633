"""oqeig: quotient-function eigenvalue estimation for self-adjoint pencils.

Estimates eigenvalues of M x = lambda N x from approximate eigenvectors via
Rayleigh/optimal quotients and the quotient function, runs the associated
quotient iterations with a midpoint shift, and generates starting vectors by
preconditioned variational descent with deflation.  A dense Jacobi-rotation
oracle verifies every estimator at desk scale.
"""

from .errors import (
    AtDiscontinuity,
    DeflationCollapse,
    DimensionMismatch,
    DirectionNegligible,
    ExactlySingular,
    InfiniteEigenvalue,
    NInKernel,
    NonConvergence,
    NotHermitian,
    NotPositiveDefinite,
    NotSelfAdjoint,
    OqeigError,
    ParseError,
    PhaseUndefined,
    SingularMatrix,
    SingularPencilFamily,
    SingularShift,
    ZeroVector,
)
from .kernels import get_backend
from .linalg import (
    CholeskyFactor,
    InnerProduct,
    LUFactor,
    Pencil,
    SpectrumOracle,
    as_operator,
    cholesky_spd,
    hermitian_definite_eigs,
    hermitian_eigs,
    lu_factorize,
    lu_solve,
    normalizing_inner_product,
    p_inner,
    p_norm,
    pencil_eigs_oracle,
)
from .quotients import (
    QuotientReport,
    SelfAdjointnessCheck,
    arnoldi_disc_check,
    check_self_adjoint,
    image_disc,
    lepo_bound,
    optimal_quotient,
    quotient_function,
    quotient_limits,
    quotient_report,
    rayleigh_quotient,
    sqrt_identity_check,
)
from .midpoint import (
    MidpointState,
    Reformulation,
    midpoint_refine,
    negated_shift_reformulate,
    psd_largest_estimate,
    random_rq_midpoint,
    shift_invert_reformulate,
)
from .iterations import (
    IterationConfig,
    IterationLog,
    hermitian_system_check,
    optimal_quotient_iteration,
    optimal_z,
    rayleigh_quotient_iteration,
    sigma2,
    sigma2_raw,
    smallest_pd_iteration,
)
from .descent import (
    DeflationSet,
    DescentConfig,
    accumulate_subspace,
    deflate_vector,
    descent_direction,
    descent_step,
    preconditioned_descent,
    refine_shift_descent,
)
from .ingest import (
    MatrixMarketHeader,
    ProblemBundle,
    gen_block_saddle,
    gen_fd_laplacian,
    gen_forward_shift,
    gen_kungfood,
    gen_random_selfadjoint,
    gen_two_bound_states,
    read_matrix_market,
    write_matrix_market,
)
from .cayley import (
    CayleyData,
    cayley_norm_identity,
    cayley_transform,
    distance_principle,
)

__version__ = "0.1.0"
