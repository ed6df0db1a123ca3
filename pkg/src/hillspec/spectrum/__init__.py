"""Eigenvalues lambda_n(t), band curves Gamma_n and spectrum membership."""

from .bands import SpectralCurve, assign, curve_by_index, record_joins, t_grid, track_bands  # noqa: F401
from .eigenvalues import (  # noqa: F401
    BlochEigenvalue,
    Membership,
    TrackingConfig,
    band_order,
    classify_discriminant,
    eigenvalues_at,
    mult_threshold,
    newton_root,
    seed_threshold,
    spectrum_membership,
    target,
)
from .schema import BandDocument, bands_document, bands_from_document, bands_to_csv  # noqa: F401
from .asymptotics import (  # noqa: F401
    DecayResult,
    SeparationResult,
    SeparationViolation,
    decay_witness,
    separation_check,
)
