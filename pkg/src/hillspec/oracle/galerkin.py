"""Fourier-Galerkin truncation of L_t in the basis exp(i (2 pi k + t) x)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy import linalg

from ..errors import EigensolverFailure
from ..potential import FourierPotential

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GalerkinSystem:
    """Dense matrix H with H[j, k] = (2 pi j + t)^2 delta_jk + q_{j-k}, |j|, |k| <= K."""

    t: float
    K: int
    H: np.ndarray

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)


@dataclass(frozen=True)
class GalerkinPair:
    eigenvalue: complex
    eigenvector: np.ndarray


def galerkin_matrix(p: FourierPotential, t: float, K: int) -> GalerkinSystem:
    if K < 1:
        raise ValueError(f"Truncation half-width must be positive, got {K}.")
    size = 2 * K + 1
    # Toeplitz column/row hold q_{j-k} for j-k = 0..2K and 0..-2K.
    column = np.array([p.coefficient(d) for d in range(size)], dtype=complex)
    row = np.array([p.coefficient(-d) for d in range(size)], dtype=complex)
    H = linalg.toeplitz(column, row)
    wave = 2.0 * np.pi * np.arange(-K, K + 1) + t
    H[np.diag_indices(size)] += wave**2
    return GalerkinSystem(t=float(t), K=K, H=H)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Scale to unit norm with the largest-modulus entry real positive."""

    pivot = vector[int(np.argmax(np.abs(vector)))]
    scaled = vector * (abs(pivot) / pivot)
    return scaled / np.linalg.norm(scaled)


def galerkin_eigen(p: FourierPotential, t: float, K: int) -> List[GalerkinPair]:
    """All 2K+1 eigenpairs, sorted by (real part, imaginary part).

    Only eigenvalues with |index| <= K/2 track true eigenvalues of L_t; the
    edge of the truncated spectrum is not reliable.
    """

    if K < p.order:
        raise ValueError(f"Truncation K={K} is below the potential order {p.order}.")
    system = galerkin_matrix(p, t, K)
    try:
        if np.array_equal(system.H, system.H.conj().T):
            values, vectors = linalg.eigh(system.H)
            values = values.astype(complex)
        else:
            values, vectors = linalg.eig(system.H)
    except linalg.LinAlgError as exc:
        raise EigensolverFailure(f"Dense eigensolver failed at t={t}, K={K}: {exc}") from exc
    order = np.lexsort((values.imag, values.real))
    return [
        GalerkinPair(eigenvalue=complex(values[i]), eigenvector=_fix_phase(vectors[:, i]))
        for i in order
    ]


def galerkin_eigenvalues(p: FourierPotential, t: float, K: int) -> np.ndarray:
    return np.array([pair.eigenvalue for pair in galerkin_eigen(p, t, K)])


def synthesize(
    vector: Sequence[complex], t: float, K: int, grid: Sequence[float] | np.ndarray
) -> np.ndarray:
    """Sample sum_k v_k exp(i (2 pi k + t) x) on ``grid``."""

    coefficients = np.asarray(vector, dtype=complex)
    if coefficients.size != 2 * K + 1:
        raise ValueError("Eigenvector length must be 2K + 1.")
    xs = np.asarray(grid, dtype=float)
    wave = 2.0 * np.pi * np.arange(-K, K + 1) + t
    return np.exp(1j * np.multiply.outer(xs, wave)) @ coefficients


def nearest_pair(pairs: Sequence[GalerkinPair], lam: complex) -> tuple[int, GalerkinPair]:
    index = int(np.argmin([abs(pair.eigenvalue - lam) for pair in pairs]))
    return index, pairs[index]
