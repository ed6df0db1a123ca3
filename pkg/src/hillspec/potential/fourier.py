"""Complex 1-periodic potentials stored as finite Fourier series."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Sequence

import numpy as np

from ..errors import NonFiniteInput, NonzeroMean, TooFewSamples

logger = logging.getLogger(__name__)

MIN_SAMPLES = 4
# Relative size below which a sampled coefficient is treated as roundoff.
SAMPLE_CUTOFF = 1e-14


@dataclass(frozen=True)
class FourierPotential:
    """q(x) = sum_n q_n exp(i 2 pi n x) with q_0 = 0.

    ``coeffs`` maps the integer index n to the complex coefficient q_n.
    ``meta`` holds user-declared descriptors such as the smoothness pair
    ``{"p": ..., "s": ...}`` consumed by the coefficient criterion.
    """

    coeffs: Mapping[int, complex] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def order(self) -> int:
        """Truncation order K, the largest |n| carrying a coefficient."""

        return max((abs(n) for n in self.coeffs), default=0)

    @property
    def sup_norm_bound(self) -> float:
        """M = sup_n |q_n|."""

        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    @property
    def is_real(self) -> bool:
        """True when q(x) is real valued, i.e. q_{-n} = conj(q_n) for all n."""

        return all(
            self.coefficient(-n) == complex(v).conjugate() for n, v in self.coeffs.items()
        )

    @property
    def is_two_term(self) -> bool:
        return bool(self.coeffs) and set(self.coeffs) <= {-1, 1}

    def coefficient(self, n: int) -> complex:
        return complex(self.coeffs.get(n, 0.0))

    def conjugate(self) -> "FourierPotential":
        """Potential of the complex conjugate function q-bar."""

        return FourierPotential(
            coeffs={-n: complex(v).conjugate() for n, v in sorted(self.coeffs.items())},
            meta=dict(self.meta),
        )

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Indices and coefficients as numpy arrays, sorted by index."""

        items = sorted(self.coeffs.items())
        ns = np.array([n for n, _ in items], dtype=float)
        qs = np.array([v for _, v in items], dtype=complex)
        return ns, qs


def from_fourier(
    coeffs: Mapping[int, complex], meta: Dict[str, Any] | None = None
) -> FourierPotential:
    """Build a potential from an explicit coefficient map.

    Raises:
        NonzeroMean: If a nonzero q_0 is supplied.
        NonFiniteInput: If a coefficient is NaN or infinite.
    """

    cleaned: Dict[int, complex] = {}
    for n, value in coeffs.items():
        index = int(n)
        number = complex(value)
        if not (math.isfinite(number.real) and math.isfinite(number.imag)):
            raise NonFiniteInput(f"Coefficient q_{index} is not finite: {number!r}.")
        if index == 0:
            if number != 0:
                raise NonzeroMean(f"The mean coefficient q_0 must vanish, got {number!r}.")
            continue
        cleaned[index] = number
    return FourierPotential(coeffs=dict(sorted(cleaned.items())), meta=dict(meta or {}))


def from_samples(
    samples: Sequence[complex], meta: Dict[str, Any] | None = None
) -> FourierPotential:
    """Discrete Fourier transform of samples on the uniform grid j/m, j < m.

    The mean coefficient is discarded and indices are taken in
    [-floor(m/2), floor(m/2)]. Coefficients below ``SAMPLE_CUTOFF`` relative to
    the largest one are dropped as roundoff.
    """

    values = np.asarray(samples, dtype=complex)
    m = values.size
    if m < MIN_SAMPLES:
        raise TooFewSamples(f"At least {MIN_SAMPLES} samples are required, got {m}.")
    if not np.all(np.isfinite(values)):
        raise NonFiniteInput("Potential samples contain NaN or infinite values.")

    spectrum = np.fft.fft(values) / m
    frequencies = np.fft.fftfreq(m, d=1.0 / m).round().astype(int)
    scale = float(np.max(np.abs(spectrum))) if m else 0.0
    coeffs: Dict[int, complex] = {}
    for n, c in zip(frequencies, spectrum):
        if n == 0 or abs(c) <= SAMPLE_CUTOFF * max(scale, 1.0):
            continue
        coeffs[int(n)] = complex(c)
    if abs(spectrum[0]) > SAMPLE_CUTOFF:
        logger.info("Removed mean %s from sampled potential", complex(spectrum[0]))
    merged_meta = {"samples": m}
    merged_meta.update(meta or {})
    return FourierPotential(coeffs=dict(sorted(coeffs.items())), meta=merged_meta)


def evaluate(p: FourierPotential, x: float | np.ndarray) -> complex | np.ndarray:
    """Evaluate q at x (reduced mod 1); accepts scalars or arrays."""

    ns, qs = p.arrays()
    xs = np.mod(np.asarray(x, dtype=float), 1.0)
    if ns.size == 0:
        values = np.zeros(xs.shape, dtype=complex)
    else:
        phases = np.exp(2j * np.pi * np.multiply.outer(xs, ns))
        values = phases @ qs
    if np.ndim(values) == 0:
        return complex(values)
    return values


def zero_potential() -> FourierPotential:
    return FourierPotential()


def mathieu(a: complex) -> FourierPotential:
    """q(x) = 2a cos(2 pi x)."""

    return from_fourier({-1: a, 1: a}, meta={"preset": "mathieu"})


def two_term(a: complex, b: complex) -> FourierPotential:
    """q(x) = a exp(-i 2 pi x) + b exp(i 2 pi x)."""

    return from_fourier({-1: a, 1: b}, meta={"preset": "two_term"})
