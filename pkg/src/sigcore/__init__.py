"""Generalized system signatures for semicoherent systems.

``p_k = Pr(T = X_{k:n})`` for dependent, non-identical or i.i.d. component
lifetimes, computed from the structure function and the relative quality
function of the lifetimes, with permutation and Monte Carlo oracles.
"""

from ._backend import get_backend, set_backend
from .errors import (
    ArityMismatch,
    ModelError,
    NotSamplable,
    NotSemicoherent,
    NumericalError,
    QuadratureError,
    RouteError,
    SigcoreError,
)
from .lifetimes import (
    IID,
    Exchangeable,
    Exponential,
    IndependentMarginals,
    LogNormal,
    OrderProbabilities,
    Uniform,
    Weibull,
    WeibullModel,
    sample,
)
from .oracle import (
    SimulationReport,
    monte_carlo_quality,
    monte_carlo_shortest,
    monte_carlo_signature,
    permutation_signature,
)
from .quality import (
    NormalizedQuality,
    QualityFunction,
    WeibullCheck,
    compute_quality,
    quality_exchangeable,
    quality_from_order_probabilities,
    quality_independent_quadrature,
    quality_weibull,
    quality_weibull_via_difference,
    shortest_lifetime_from_quality,
    shortest_lifetime_in_set_probability,
    tilde,
    weibull_characterization_check,
)
from .signature import (
    SignatureVector,
    SymmetricApproximation,
    TailProbabilityVector,
    boland_signature,
    projection_residual_check,
    signature_from_quality,
    signature_via_rk,
    symmetric_projection,
    tail_probabilities,
    weighted_distance,
)
from .structure import (
    OrderStatisticFunction,
    PathSetSystem,
    StructureFunction,
    SubsetMask,
    bridge,
    evaluate,
    from_path_sets,
    is_semicoherent,
    k_out_of_n,
    minimal_path_sets,
    parallel,
    s_difference,
    series,
)

__version__ = "0.1.0"
