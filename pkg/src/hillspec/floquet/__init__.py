"""Floquet solutions, eigenfunction pairs, alpha_n(t) and projection norms."""

from .eigenfunctions import (  # noqa: F401
    FloquetConfig,
    FloquetRecord,
    IdentityCheck,
    biorthogonality_matrix,
    eigenfunction_pair,
    floquet_coefficients,
    floquet_derivative_identity_check,
    floquet_records,
    floquet_solutions,
    fourier_tail_profile,
    records_for,
    records_from_traces,
)
from .profiles import (  # noqa: F401
    AlphaSample,
    alpha_profile,
    alpha_profile_csv,
    partial_sum_ratio,
    projection_norm_arc,
)
from .quadrature import x_grid  # noqa: F401
