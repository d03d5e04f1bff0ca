"""Cochains with prescribed jumps on strip partitions, their kernel
transform and decay certificates, exact Dulac-series algebra, and the
fixed-point dichotomy for one-turn polycycle return maps."""

from .domains import (
    Biholo,
    HalfPlane,
    IDENTITY_MAP,
    StandardQuadraticDomain,
    Strip,
    psi_biholo,
    psi_inverse_biholo,
    psi_invert,
    psi_map,
    sqd_boundary,
    translation,
)
from .errors import (
    AnalyticRefusal,
    BranchCutError,
    CapabilityError,
    CertificateRefused,
    ConvergenceError,
    EvalDomainError,
    EvalRangeError,
    ExactnessError,
    GeometryError,
    GrammarError,
    HypothesisViolation,
    InputError,
    NotYetPositive,
    OneturnError,
    OrderError,
    ParseError,
    PartitionError,
    PreconditionError,
    QuadratureError,
)
from .partitions import (
    Cell,
    GeneralizedNeighborhood,
    LINE_SPACING,
    OrientedArc,
    Partition,
    partition_from_json,
    partition_to_json,
    product_partition,
    pullback_partition,
    regularity_report,
    repartition_uniform,
    standard_partition,
    strip_partition_from_levels,
    trivial_partition,
)
from .series import (
    DulacSeries,
    conj_affine_by_exp,
    format_series,
    is_identity,
    parse_series,
    series_compose,
    series_eval,
    series_eval_derivative,
    series_invert,
)
from .towers import Tln, TReal
from .expr import (
    Affine,
    Compose,
    Exp,
    GrammarForm,
    Log,
    NC,
    deviation,
    eval_with_derivative,
    expr_eval,
    expr_normalize,
    flatten,
    max_series_order,
    node_label,
    sum_jump_scales,
)
from .cochains import (
    CHComponent,
    CallableComponent,
    Cochain,
    Component,
    ConstComponent,
    ExpPolyComponent,
    JumpEntry,
    JumpSpec,
    ProductComponent,
    SumComponent,
    calibration_cochain,
    coboundary_eval,
    cochain_combine,
    cochain_derivative,
    cochain_pullback,
    jumps_from_config,
    nc_witness_cochain,
    parse_jump_literal,
    perturb_component,
    series_component,
    synthesize_simple,
)
from .cauchy_heine import (
    CHResult,
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    ch_trace_csv,
    ch_transform,
    global_sup_bound,
    integral_of_abs_jump,
    jump_residual,
    trivialization_residual,
    uniform_ch_bound,
)
from .phragmen import (
    BoundCertificate,
    Envelope,
    PLProfile,
    certificate_csv,
    certificate_json,
    certificate_rows,
    chart_change_certificate,
    classical_pl_check,
    compute_I_rho,
    compute_lambda,
    decay_dichotomy_check,
    decay_lemma_profile,
    pl_cochain_certificate,
    simple_cochain_certificate,
)
from .polycycle import (
    ClassifyResult,
    Polycycle,
    Vertex,
    assemble_return_map,
    classify,
    depth_profile,
    figure_one_polycycle,
    parse_polycycle,
)
from .dichotomy import (
    FIXED_POINT_FREE,
    IDENTITY,
    REFUSED,
    MuCheck,
    ReductionTrace,
    ScanPoint,
    ScanReport,
    Verdict,
    dichotomy_verdict,
    fixed_point_scan,
    verdict_report_json,
)

__version__ = "0.1.0"
