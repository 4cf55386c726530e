"""Toolkit for discontinuous maps: closed-convex envelopes, topological
degree on intervals and boxes, fixed-point certification, and scalar ODEs
with discontinuity curves."""

from .errors import (
    ConvergenceError,
    CoverError,
    DomainError,
    ExprParseError,
    NotWellDefinedError,
    QuadratureError,
    RefinementExhaustedError,
    ScenarioError,
    SplitFailureError,
    ToolkitError,
    UnclassifiedContactError,
)
from .geometry import (
    Box,
    ConvexBody,
    contains,
    convex_hull,
    distance,
    hausdorff_distance,
    project,
)
from .maps import Inequality, MapValueSet, Piece, PiecewiseMap, Region, cover_check
from .envelope import (
    ConditionReport,
    EnvelopeResult,
    check_condition,
    envelope_exact,
    envelope_sampled,
    range_hull,
)
from .degree import (
    DegreeReport,
    HomotopyFamily,
    certify_zero_free,
    compute_degree,
    degree_1d,
    degree_2d,
    homotopy_degree_bridge,
    verify_additivity,
    verify_borsuk,
    verify_excision,
)
from .fixpoint import (
    FixedPointCertificate,
    LocalizationResult,
    ProjectedMap,
    localize_fixed_points,
    schaefer_search,
    schauder_fixed_point,
)
from .ivp import (
    DiscontinuityCurve,
    IVProblem,
    Trajectory,
    apriori_bound,
    classify_all,
    classify_curve,
    picard_iterate,
    solve_ivp,
    validate_problem,
    verify_solution,
)

__version__ = "0.1.0"
