"""Fourier-Galerkin oracle: matrix structure, free case, self-convergence and agreement with shooting."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hillspec.oracle import galerkin_eigen, galerkin_eigenvalues, galerkin_matrix, nearest_pair, synthesize
from hillspec.potential import from_fourier, mathieu, zero_potential
from hillspec.spectrum import TrackingConfig, eigenvalues_at

from .conftest import sorted_by_real


def test_matrix_structure(complex_mathieu) -> None:
    """Diagonal (2 pi k + t)^2 plus the Toeplitz matrix of q_{j-k}."""

    system = galerkin_matrix(complex_mathieu, 0.7, 4)
    H = system.H
    waves = (2.0 * math.pi * system.indices + 0.7) ** 2
    assert np.allclose(np.diag(H), waves)
    assert H[3, 2] == complex_mathieu.coefficient(1)
    assert H[2, 3] == complex_mathieu.coefficient(-1)
    assert H[0, 4] == 0


def test_real_potential_gives_hermitian_matrix(real_mathieu) -> None:
    H = galerkin_matrix(real_mathieu, 1.3, 6).H
    assert np.array_equal(H, H.conj().T)


def test_free_eigenvalues_are_plane_waves() -> None:
    t, K = 0.9, 5
    values = galerkin_eigenvalues(zero_potential(), t, K)
    expected = np.sort((2.0 * math.pi * np.arange(-K, K + 1) + t) ** 2)
    assert np.allclose(values.real, expected)


def test_self_convergence_in_truncation() -> None:
    """Mathieu a = 0.3, t = 1: central eigenvalues barely move from K = 32 to K = 48."""

    p = mathieu(0.3)
    coarse = sorted_by_real(galerkin_eigenvalues(p, 1.0, 32))[:11]
    fine = sorted_by_real(galerkin_eigenvalues(p, 1.0, 48))[:11]
    assert float(np.max(np.abs(coarse - fine) / np.abs(fine))) < 1e-8


def test_agrees_with_discriminant_root() -> None:
    """a = b = 1, t = 1: the eigenvalue near (2 pi + 1)^2 matches the Newton root."""

    p = from_fourier({-1: 1.0, 1: 1.0})
    _, pair = nearest_pair(galerkin_eigen(p, 1.0, 32), (2.0 * math.pi + 1.0) ** 2)
    roots = [e.lam for e in eigenvalues_at(p, 1.0, TrackingConfig(nmax=3, workers=1))]
    nearest = min(roots, key=lambda lam: abs(lam - pair.eigenvalue))
    assert abs(nearest - pair.eigenvalue) <= 1e-6 * abs(pair.eigenvalue)


def test_synthesized_eigenvector_is_quasi_periodic(complex_mathieu) -> None:
    """Synthesised eigenvectors carry the multiplier exp(i t)."""

    t, K = 1.1, 12
    pair = galerkin_eigen(complex_mathieu, t, K)[3]
    values = synthesize(pair.eigenvector, t, K, np.array([0.2, 1.2]))
    assert abs(values[1] - np.exp(1j * t) * values[0]) < 1e-10
    assert np.linalg.norm(pair.eigenvector) == pytest.approx(1.0)


def test_invalid_truncations(complex_mathieu) -> None:
    with pytest.raises(ValueError):
        galerkin_matrix(complex_mathieu, 0.0, 0)
    with pytest.raises(ValueError):
        galerkin_eigen(from_fourier({5: 1.0}), 0.0, 3)
    with pytest.raises(ValueError):
        synthesize(np.ones(4), 0.0, 2, np.linspace(0.0, 1.0, 5))


@settings(max_examples=25, deadline=None)
@given(
    re=st.floats(min_value=-1.0, max_value=1.0),
    im=st.floats(min_value=-1.0, max_value=1.0),
    t=st.floats(min_value=0.0, max_value=math.pi),
    K=st.integers(min_value=2, max_value=6),
)
def test_eigenvalue_sum_equals_trace(re: float, im: float, t: float, K: int) -> None:
    """With q_0 = 0 the eigenvalues sum to the sum of (2 pi k + t)^2."""

    p = mathieu(complex(re, im))
    total = np.sum(galerkin_eigenvalues(p, t, K))
    expected = float(np.sum((2.0 * math.pi * np.arange(-K, K + 1) + t) ** 2))
    assert abs(total - expected) <= 1e-9 * expected
