"""Inner products on [0, 1] by the composite trapezoid rule.

Every integrand met on [0, 1] is exactly 1-periodic (products of a
Floquet function with a partner of inverse multiplier), so the uniform
trapezoid rule converges spectrally.
"""
from __future__ import annotations

import numpy as np
from scipy import integrate

from ..config import DEFAULTS


def x_grid(m: int = int(DEFAULTS["xgrid"])) -> np.ndarray:
    """Uniform grid j/m, j = 0..m, both endpoints included."""

    if m < 8:
        raise ValueError(f"x-grid needs at least 8 intervals, got {m}.")
    return np.linspace(0.0, 1.0, m + 1)


def integral(values: np.ndarray, grid: np.ndarray) -> complex:
    return complex(integrate.trapezoid(values, grid))


def inner(f: np.ndarray, g: np.ndarray, grid: np.ndarray) -> complex:
    """(f, g) = integral of f conj(g) over the grid."""

    return integral(f * np.conj(g), grid)


def bilinear(f: np.ndarray, g: np.ndarray, grid: np.ndarray) -> complex:
    return integral(f * g, grid)


def norm(f: np.ndarray, grid: np.ndarray) -> float:
    return float(np.sqrt(max(inner(f, f, grid).real, 0.0)))


def plane_wave(k: int, t: float, grid: np.ndarray) -> np.ndarray:
    return np.exp(1j * (2.0 * np.pi * k + t) * grid)


def head_coefficients(values: np.ndarray, grid: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (f, exp(i (2 pi k + t) x)) for all k resolved by the grid.

    Returns the integer indices k and the coefficients, from an FFT of the
    periodic part f(x) exp(-i t x) sampled without the duplicate endpoint.
    """

    m = grid.size - 1
    periodic = values[:m] * np.exp(-1j * t * grid[:m])
    coefficients = np.fft.fft(periodic) / m
    ks = np.fft.fftfreq(m, d=1.0 / m).round().astype(int)
    return ks, coefficients


def fix_phase(values: np.ndarray, grid: np.ndarray, t: float) -> np.ndarray:
    """Rotate so that the largest Fourier head coefficient is real positive."""

    _, coefficients = head_coefficients(values, grid, t)
    pivot = coefficients[int(np.argmax(np.abs(coefficients)))]
    if pivot == 0:
        return values
    return values * (abs(pivot) / pivot)
