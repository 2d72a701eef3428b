"""chronoscale: delta calculus on hybrid time scales plus a numerical
verification harness for double-integral inequality bounds."""

from .delta_calculus import (
    BivariateFunction,
    QuadConfig,
    Rectangle,
    delta_integral_1d,
    delta_integral_2d,
    delta_partial,
    mixed_delta,
    sup_norm_mixed,
    validate_exact_mixed,
)
from .errors import (
    AccuracyError,
    ChronoscaleError,
    ConstructionError,
    DomainError,
    ExprEvalError,
    ExprSyntaxError,
    MisuseError,
)
from .expr import eval_expr, expr_to_str, parse_expr
from .harness import (
    CampaignConfig,
    VerificationReport,
    bivariate_from_expression,
    builtin_corpus,
    emit_report,
    run_campaign,
    search_counterexample,
)
from .inequality_ops import (
    InequalityResult,
    continuous_oracle,
    discrete_oracle,
    identity_grid,
    identity_residual,
    p_operator,
    q_operator,
    verify_thm21,
    verify_thm22,
    verify_thm31,
)
from .timescale_core import (
    TimeScale,
    TimeScalePairSpec,
    build_timescale,
    canonical,
    format_timescale,
    graininess,
    h_grid,
    integers,
    parse_timescale,
    q_grid,
    random_timescale,
    reals,
    rho,
    scattered_points,
    sigma,
)

__version__ = "0.1.0"
