"""Gelfand transform, expansion coefficients and the two spectral-expansion reconstructions."""

from .functions import (  # noqa: F401
    TestFunction,
    TestFunctionDocument,
    band_limited,
    bump,
    combine,
    from_samples,
    gaussian_window,
    load_test_function,
    shifted,
)
from .gelfand import (  # noqa: F401
    coefficients,
    exclusion_points,
    fiber,
    fiber_residual,
    gelfand_transform,
    parseval_check,
)
from .reconstruction import (  # noqa: F401
    ArcProjection,
    ExpansionEngine,
    ReconstructionReport,
    gauss_panels,
    project_arc,
    quadrature_plan,
    reconstruct_bloch,
    reconstruct_direct,
    reconstruction_csv,
    report_document,
)
from .settings import ExpansionConfig, Lattice  # noqa: F401
