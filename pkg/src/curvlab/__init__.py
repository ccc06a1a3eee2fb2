"""curvlab: algebraic curvature tensors and verification of their sphere averages.

The package computes every identity three ways where possible (closed form,
exact monomial-moment integration, Monte Carlo) and ships a CLI harness
(`curvlab`) that runs the comparisons over random ensembles or saved fixtures
and emits deterministic JSON/CSV reports.
"""

__version__ = "0.1.0"

from .curvature import (
    BlockDecomposition,
    CurvatureTensor,
    KahlerTensor,
    RicciSet,
    TensorNorms,
    bisectional,
    block_decomposition,
    constant_hsc,
    curvature_from_entries,
    hsc,
    kahler_from_sym2,
    random_hermitian_curvature,
    random_kahler_curvature,
    ricci_set,
    sym2_quotient,
    tensor_from_json_dict,
    tensor_norms,
    tensor_to_json_dict,
    wedge_rank_one,
)
from .harness import SuiteConfig, VerificationReport, emit_fixture, run_suite
from .identities import (
    BisectionalAdjudication,
    IdentityResult,
    ZeroHscChecks,
    adjudicate_bisectional,
    bisectional_mean,
    l2_bisectional_derived,
    l2_bisectional_paper,
    l2_hsc_hermitian,
    l2_hsc_kahler,
    mean_hsc_hermitian,
    mean_hsc_kahler,
    variance_hsc,
    zero_hsc_consequences,
)
from .linalg import (
    InvalidTensorError,
    ResourceLimitError,
    frobenius_inner,
    hermitize,
    multi_index_decode,
    multi_index_encode,
)
from .sphere import (
    McEstimate,
    exact_expectation_B2,
    exact_expectation_B_mean,
    exact_expectation_H,
    exact_expectation_H2,
    exact_moment,
    exact_projection_residual,
    mc_expectation,
    mc_projection_residual,
    moment_matrix,
    sample_unit_sphere,
    sphere_sampler,
)
from .symgroup import (
    Permutation,
    apply_permutation,
    partial_trace,
    projector_sym,
    trace_f_pi4,
    trace_f_tensor_f_sigma,
    trace_f_tensor_f_sigma_oracle,
)
