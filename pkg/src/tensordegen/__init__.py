"""Exact verification of border-rank certificates, degenerations and substitution-method bounds."""

from .algebra import (
    AlgebraStruct,
    BilinearMap,
    check_properties,
    cw_dictionary,
    cw_easy_relabeling,
    cw_projection,
    find_identity,
    left_mult,
    make_cw_algebra,
    make_cw_easy_map,
    make_cw_easy_tensor,
    make_cw_tensor,
    make_diag_algebra,
    make_monomial_quotient,
    right_mult,
    structure_tensor,
)
from .bounds import (
    BoundReport,
    MWitness,
    ProofNode,
    cw_product_rule,
    flattening_bound,
    m_exhaustive_ff,
    m_lower_proved,
    m_upper,
    subspace_restriction_bound,
    substitution_bound,
    upper_bound_from_cert,
)
from .degen import (
    DecompCert,
    DegenReport,
    SandwichOperator,
    UnitalizeResult,
    cert_from_operator,
    certificate_operator,
    certificate_tensor,
    cw_certificate,
    cw_normalization_inputs,
    cw_smoothing_check,
    cw_smoothing_matrix,
    cw_unitalization_operator,
    diag_certificate,
    kron_certificate,
    normalize_unital_degeneration,
    power_certificate,
    restrict_certificate,
    sandwich_report,
    sandwich_triple,
    unitalize,
    verify_decomposition,
    verify_degeneration,
    verify_restriction,
)
from .errors import (
    BadPrime,
    BudgetExceeded,
    CertificateInvalid,
    DependentBasis,
    DimensionMismatch,
    DimensionOverflow,
    DivisionByZero,
    InfiniteDimensional,
    InvalidParameter,
    NotADegeneration,
    NotBindingWitness,
    NotInvertibleElement,
    NotRegularAtZero,
    NotUnital,
    ParseError,
    PipelineAssertionFailed,
    RuleNotApplicable,
    SingularMatrix,
    TensorDegenError,
    ZeroVector,
)
from .expr import CW, CWAlg, CWEasy, Diag, Kron, Literal, Pow, StructTensor, materialize, parse_expr
from .scalar import EPS, EpsScalar, Rational, eps_arith, eval_at_zero, format_scalar, parse_scalar, valuation
from .tensor3 import (
    QEPS,
    Q,
    Matrix,
    RestrictionOperator,
    Tensor3,
    apply_restriction,
    compose,
    contract,
    diag_tensor,
    find_binding_covectors,
    flattening_rank,
    is_concise,
    kron,
    kron_power,
    matrix_rank,
    kron_vec,
    unit_tensor,
    unit_vector,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraStruct",
    "BadPrime",
    "BilinearMap",
    "BoundReport",
    "BudgetExceeded",
    "CW",
    "CWAlg",
    "CWEasy",
    "CertificateInvalid",
    "DecompCert",
    "DegenReport",
    "DependentBasis",
    "Diag",
    "DimensionMismatch",
    "DimensionOverflow",
    "DivisionByZero",
    "EPS",
    "EpsScalar",
    "InfiniteDimensional",
    "InvalidParameter",
    "Kron",
    "Literal",
    "MWitness",
    "Matrix",
    "NotADegeneration",
    "NotBindingWitness",
    "NotInvertibleElement",
    "NotRegularAtZero",
    "NotUnital",
    "ParseError",
    "PipelineAssertionFailed",
    "Pow",
    "ProofNode",
    "Q",
    "QEPS",
    "Rational",
    "RestrictionOperator",
    "RuleNotApplicable",
    "SandwichOperator",
    "SingularMatrix",
    "StructTensor",
    "Tensor3",
    "TensorDegenError",
    "UnitalizeResult",
    "ZeroVector",
    "apply_restriction",
    "cert_from_operator",
    "certificate_operator",
    "certificate_tensor",
    "check_properties",
    "compose",
    "contract",
    "cw_certificate",
    "cw_dictionary",
    "cw_easy_relabeling",
    "cw_normalization_inputs",
    "cw_product_rule",
    "cw_projection",
    "cw_smoothing_check",
    "cw_smoothing_matrix",
    "cw_unitalization_operator",
    "diag_certificate",
    "diag_tensor",
    "eps_arith",
    "eval_at_zero",
    "find_binding_covectors",
    "find_identity",
    "flattening_bound",
    "flattening_rank",
    "format_scalar",
    "is_concise",
    "kron",
    "kron_certificate",
    "kron_power",
    "kron_vec",
    "left_mult",
    "m_exhaustive_ff",
    "m_lower_proved",
    "m_upper",
    "make_cw_algebra",
    "make_cw_easy_map",
    "make_cw_easy_tensor",
    "make_cw_tensor",
    "make_diag_algebra",
    "make_monomial_quotient",
    "materialize",
    "matrix_rank",
    "normalize_unital_degeneration",
    "parse_expr",
    "parse_scalar",
    "power_certificate",
    "restrict_certificate",
    "right_mult",
    "sandwich_report",
    "sandwich_triple",
    "structure_tensor",
    "subspace_restriction_bound",
    "substitution_bound",
    "unit_tensor",
    "unit_vector",
    "unitalize",
    "upper_bound_from_cert",
    "valuation",
    "verify_decomposition",
    "verify_degeneration",
    "verify_restriction",
]
