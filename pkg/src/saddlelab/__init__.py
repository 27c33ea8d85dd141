"""Translation-surface saddle connection laboratory."""

__version__ = "0.1.0"

from .errors import (
    IncompleteSpectrumError,
    ParameterError,
    QuadratureError,
    ResourceLimitExceeded,
    SaddleLabError,
    SurfaceValidationError,
)
from .surface import (
    TranslationSurface,
    apply_matrix,
    builtin_surface,
    cone_data,
    load_surface,
    serialize_surface,
)
from .spectrum import (
    Annulus,
    Arc,
    SaddleConnection,
    Spectrum,
    enumerate_up_to_length,
    filter_annulus,
    filter_sector,
    first_n,
    nth_length,
    systole,
)
from .params import DEFAULT_PARAMETERS, ExperimentParameters
from .sl2 import (
    CartanCoords,
    GroupElement,
    HaarSampler,
    diag_flow,
    kak_compose,
    kak_decompose,
    rotation,
)
from .experiments import (
    annulus_indicator,
    growth_fit,
    kernel_integral,
    sector_partition,
    sector_scan,
    star_discrepancy,
    symdiff_experiment,
    weyl_experiment,
    weyl_sum,
)

__all__ = [
    "Annulus",
    "Arc",
    "CartanCoords",
    "DEFAULT_PARAMETERS",
    "ExperimentParameters",
    "GroupElement",
    "HaarSampler",
    "IncompleteSpectrumError",
    "ParameterError",
    "QuadratureError",
    "ResourceLimitExceeded",
    "SaddleConnection",
    "SaddleLabError",
    "Spectrum",
    "SurfaceValidationError",
    "TranslationSurface",
    "annulus_indicator",
    "apply_matrix",
    "builtin_surface",
    "cone_data",
    "diag_flow",
    "enumerate_up_to_length",
    "filter_annulus",
    "filter_sector",
    "first_n",
    "growth_fit",
    "kak_compose",
    "kak_decompose",
    "kernel_integral",
    "load_surface",
    "nth_length",
    "rotation",
    "sector_partition",
    "sector_scan",
    "serialize_surface",
    "star_discrepancy",
    "symdiff_experiment",
    "systole",
    "weyl_experiment",
    "weyl_sum",
]
