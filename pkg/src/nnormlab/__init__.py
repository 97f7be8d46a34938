"""nnormlab: n-norms, semi-inner products and multilinear functional norms
on finite-dimensional real l^p spaces, with randomized property
verification."""

from .errors import (
    ConfigError,
    DependentFamilyError,
    DimensionError,
    NnormlabError,
    NotAntisymmetricError,
    RangeError,
    RankError,
    ShapeError,
    UnsupportedError,
    UnsupportedSizeError,
    ZeroVectorError,
)
from .functionals import (
    CurriedOperator,
    FunctionalNormEstimate,
    MultiFunctional,
    add,
    antisymmetrize,
    curry,
    det_functional,
    evaluate,
    is_antisymmetric,
    nn_ratio,
    norm_n1,
    norm_nn,
    op_norm,
    op_norm_G,
    scale,
    uncurry,
)
from .nnorms import (
    AxiomRecord,
    AxiomReport,
    GahlerEstimate,
    NNormConfig,
    check_n_norm_axioms,
    gahler_n_norm_estimate,
    gahler_n_norm_euclidean,
    lp_n_norm,
    sandwich_bounds,
)
from .ortho import (
    GramMatrix,
    OrthogonalizationResult,
    bordered_determinant_project,
    gram_determinant,
    gram_matrix,
    left_g_orthogonalize,
    project,
)
from .sip import (
    GPropertyReport,
    SipConfig,
    TauPair,
    check_g_properties,
    g,
    g_functional,
    g_numeric,
    is_g_orthogonal,
    semi_inner,
    tau,
)
from .spaces import (
    DualFunctional,
    PExponent,
    Permutation,
    SpaceSpec,
    Vector,
    det,
    dual_exponent,
    lp_norm,
    norming_functional,
    permutation_sign,
    random_vector,
    shared_direction,
    space,
    vector,
)
from .verify import (
    InstanceSpec,
    PropertyResult,
    SuiteConfig,
    VerificationReport,
    generate_instance,
    property_ids,
    run_suite,
    write_report_atomic,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
