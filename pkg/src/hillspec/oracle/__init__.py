"""Independent Fourier-Galerkin oracle for eigenvalues and eigenvectors of L_t."""

from .galerkin import (  # noqa: F401
    GalerkinPair,
    GalerkinSystem,
    galerkin_eigen,
    galerkin_eigenvalues,
    galerkin_matrix,
    nearest_pair,
    synthesize,
)
