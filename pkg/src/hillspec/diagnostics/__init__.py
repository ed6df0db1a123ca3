"""Spectral singularities, finite-range spectrality diagnostics and coefficient criteria."""

from .conditions import (  # noqa: F401
    Condition1Result,
    Condition2Result,
    check_condition1,
    check_condition2,
    check_condition2_alpha,
    even_numerator_certificate,
    odd_distance_search,
)
from .singularities import (  # noqa: F401
    INTERIOR,
    JORDAN,
    SEMISIMPLE,
    DiagnosticsConfig,
    SingularityCandidate,
    SingularityReport,
    find_singularities,
    galerkin_unresolved,
    multiplicity_at,
)
from .spectrality import (  # noqa: F401
    CONSISTENT,
    INCONCLUSIVE,
    INCONSISTENT,
    SpectralityDiagnostic,
    separated_components,
    spectral_operator_verdict,
    spectrality_diagnostic,
)
