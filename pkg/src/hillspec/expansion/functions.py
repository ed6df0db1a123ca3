"""Compactly supported test functions on the real line."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import integrate

from ..errors import ParseError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """f supported on the half-open interval [a, b); ``fn`` maps a real array to complex values.

    The half-open convention keeps integer-aligned supports from being
    counted twice by the Gelfand sum.
    """

    __test__ = False

    a: float
    b: float
    fn: Evaluator
    label: str = "f"
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"Support must be a finite interval, got [{self.a}, {self.b}].")

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        values = np.zeros(xs.shape, dtype=complex)
        inside = (xs >= self.a) & (xs < self.b)
        if np.any(inside):
            values[inside] = self.fn(xs[inside])
        return values

    @property
    def cells(self) -> range:
        """Integer shifts m whose cell [m, m + 1] meets the support."""

        return range(math.floor(self.a), math.ceil(self.b))

    def norm_squared(self) -> float:
        """Integral of |f|^2 by adaptive quadrature."""

        def density(x: float) -> float:
            return float(abs(self(np.array([x]))[0]) ** 2)

        value, _ = integrate.quad(density, self.a, self.b, limit=200, epsabs=1e-14, epsrel=1e-12)
        return value

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())


def bump(center: float = 0.0, radius: float = 1.0) -> TestFunction:
    """C-infinity bump exp(-1 / (1 - r^2)) with r = (x - center) / radius."""

    def fn(x: np.ndarray) -> np.ndarray:
        r = (x - center) / radius
        out = np.zeros(x.shape, dtype=complex)
        inside = np.abs(r) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
        return out

    return TestFunction(center - radius, center + radius, fn, "bump", {"center": center, "radius": radius})


def gaussian_window(center: float = 0.0, sigma: float = 0.3, half_width: float = 2.0) -> TestFunction:
    """exp(-(x - center)^2 / (2 sigma^2)) truncated to [center - w, center + w]."""

    def fn(x: np.ndarray) -> np.ndarray:
        return np.exp(-((x - center) ** 2) / (2.0 * sigma**2)).astype(complex)

    return TestFunction(
        center - half_width,
        center + half_width,
        fn,
        "gaussian",
        {"center": center, "sigma": sigma, "half_width": half_width},
    )


def band_limited(rng: np.random.Generator, support: tuple[float, float] = (-3.0, 3.0), modes: int = 4) -> TestFunction:
    """Random trigonometric polynomial multiplied by a bump filling ``support``."""

    a, b = support
    window = bump(0.5 * (a + b), 0.5 * (b - a))
    length = b - a
    ks = np.arange(-modes, modes + 1)
    weights = rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)

    def fn(x: np.ndarray) -> np.ndarray:
        waves = np.exp(2j * np.pi * np.multiply.outer(x - a, ks) / length)
        return window.fn(x) * (waves @ weights)

    return TestFunction(a, b, fn, "band_limited", {"modes": modes})


def shifted(f: TestFunction, k: float) -> TestFunction:
    """x -> f(x - k)."""

    return TestFunction(f.a + k, f.b + k, lambda x: f.fn(x - k), f"{f.label}+{k}", dict(f.meta))


def combine(alpha: complex, f: TestFunction, beta: complex, g: TestFunction) -> TestFunction:
    """alpha f + beta g on the union of the supports."""

    def fn(x: np.ndarray) -> np.ndarray:
        return alpha * f(x) + beta * g(x)

    return TestFunction(min(f.a, g.a), max(f.b, g.b), fn, f"{f.label}&{g.label}")


def from_samples(x: np.ndarray, values: np.ndarray, label: str = "samples") -> TestFunction:
    """Piecewise-linear interpolant of samples, zero outside [x[0], x[-1]]."""

    xs = np.asarray(x, dtype=float)
    ys = np.asarray(values, dtype=complex)
    if xs.size < 2 or xs.size != ys.size or np.any(np.diff(xs) <= 0):
        raise ValueError("Samples need at least two strictly increasing abscissae.")

    def fn(points: np.ndarray) -> np.ndarray:
        return np.interp(points, xs, ys.real) + 1j * np.interp(points, xs, ys.imag)

    return TestFunction(float(xs[0]), float(xs[-1]), fn, label, {"samples": int(xs.size)})


class TestFunctionDocument(BaseModel):
    """{"support": [a, b], "x": [...], "re": [...], "im": [...]}."""

    __test__ = False
    model_config = ConfigDict(extra="forbid")

    support: List[float] = Field(min_length=2, max_length=2)
    x: List[float]
    re: List[float]
    im: List[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _lengths(self) -> "TestFunctionDocument":
        if len(self.x) != len(self.re) or (self.im and len(self.im) != len(self.x)):
            raise ValueError("x, re and im must have equal lengths")
        return self

    def to_function(self) -> TestFunction:
        im = self.im or [0.0] * len(self.x)
        values = np.array(self.re) + 1j * np.array(im)
        f = from_samples(np.array(self.x), values)
        a, b = self.support
        return TestFunction(max(a, f.a), min(b, f.b), f.fn, "samples", dict(f.meta))


def load_test_function(path: str | Path) -> TestFunction:
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = TestFunctionDocument.model_validate_json(text)
    except ValidationError as exc:
        raise ParseError(f"Invalid test-function document: {exc}") from exc
    return document.to_function()
