"""Local hidden variable models of Bell-type optical experiments.

A small laboratory for a two-harmonic cosine response family over a uniform
hidden variable, with time-correlated detection between consecutive event
pairs: closed-form rates and Clauser-Horne parameters, quadrature and Monte
Carlo oracles, and a derivative-free search for violations of the Bell
limit B = 1.
"""

from .errors import (
    AllDarkModelError,
    AsymmetricModelError,
    AsymmetricRatesError,
    EfficiencyRangeError,
    EmptySpaceError,
    InsufficientSamplesError,
    InvalidResponseError,
    LhvError,
    RejectionLimitError,
)
from .model import (
    CosineResponse,
    LhvModel,
    MemoryKind,
    MemoryRule,
    Orientation,
    ResponseValidity,
    enhance,
    inhibit,
    is_symmetric,
    memoryless,
    model_from_dict,
    model_to_dict,
    normalize_angle,
    reference_model,
    require_valid_model,
    require_valid_response,
    response_at,
    symmetric_model,
    validate_response,
)
from .analytic import (
    BellBreakdown,
    Observer,
    Rates,
    ch_parameter,
    ch_with_memory,
    coincidence_closed,
    memory_adjusted_rates,
    quantum_reference,
    rates_closed,
    singles_closed,
)
from .quadrature import QuadratureSpec, mean_over_lambda, rates_by_quadrature
from .montecarlo import (
    ChMcResult,
    Estimate,
    RunConfig,
    RunResult,
    Tally,
    estimate_ch_mc,
    simulate_run,
)
from .search import (
    SearchResult,
    SearchSpace,
    TraceEntry,
    maximize_ch,
    random_valid_model,
    sweep_phi,
)

__version__ = "0.1.0"

__all__ = [
    "AllDarkModelError",
    "AsymmetricModelError",
    "AsymmetricRatesError",
    "BellBreakdown",
    "ChMcResult",
    "CosineResponse",
    "EfficiencyRangeError",
    "EmptySpaceError",
    "Estimate",
    "InsufficientSamplesError",
    "InvalidResponseError",
    "LhvError",
    "LhvModel",
    "MemoryKind",
    "MemoryRule",
    "Observer",
    "Orientation",
    "QuadratureSpec",
    "Rates",
    "RejectionLimitError",
    "ResponseValidity",
    "RunConfig",
    "RunResult",
    "SearchResult",
    "SearchSpace",
    "Tally",
    "TraceEntry",
    "ch_parameter",
    "ch_with_memory",
    "coincidence_closed",
    "enhance",
    "estimate_ch_mc",
    "inhibit",
    "is_symmetric",
    "maximize_ch",
    "mean_over_lambda",
    "memory_adjusted_rates",
    "memoryless",
    "model_from_dict",
    "model_to_dict",
    "normalize_angle",
    "quantum_reference",
    "random_valid_model",
    "rates_by_quadrature",
    "rates_closed",
    "reference_model",
    "require_valid_model",
    "require_valid_response",
    "response_at",
    "simulate_run",
    "singles_closed",
    "sweep_phi",
    "symmetric_model",
    "validate_response",
]
