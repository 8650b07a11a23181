"""creditcurves: sigmoid growth-curve toolkit for credit-operation series.

Fits logistic / Gompertz / generalized diffusion curves to yearly
cumulative counts or monetary volumes of credit pleas, with CSV ingestion,
derivative and concentration analytics, a seeded synthetic-data generator
and an SVG-emitting command line.
"""

__version__ = "0.1.0"

from .concentration import CcdfPoints, ConcentrationSummary, ccdf, lorenz, top_share
from .errors import (
    CreditCurvesError,
    DegenerateSeriesError,
    DomainError,
    EmptySelectionError,
    InsufficientDataError,
    NumericalFailureError,
    ParameterDomainError,
    RowParseError,
)
from .fitting import (
    FitOptions,
    FitResult,
    SelectionResult,
    fit,
    initial_guess,
    r_squared,
    select_model,
)
from .models import (
    Generalized,
    GompertzFree,
    GompertzStrict,
    GrowthParams,
    IntegrationResult,
    Logistic,
    TimeGrid,
    eval_generalized,
    eval_gompertz_free,
    eval_gompertz_strict,
    eval_logistic,
    eval_params,
    integrate,
    jacobian,
    ode_rhs,
)
from .series import (
    CumulativeSeries,
    DerivativeSeries,
    OperationRecord,
    ParseResult,
    aggregate,
    central_difference,
    find_peak,
    parse_records,
    write_records_csv,
)
from .synth import ScenarioConfig, generate_events, sample_curve

__all__ = [name for name in dir() if not name.startswith("_")]
