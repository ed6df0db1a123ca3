"""Coefficient criteria for spectrality: the two-term angle test and the Fourier-coefficient test."""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np

from ..config import DEFAULTS
from ..errors import ZeroCoefficient, ZeroProduct
from ..potential import FourierPotential

logger = logging.getLogger(__name__)

MIN_SEARCH_BOUND = 100
# Tolerance of the rational certificate |alpha - m/n|.
CERTIFICATE_TOL = 1e-12


@dataclass(frozen=True)
class OddDistance:
    """min over 1 <= q <= Q of |scale * q * alpha - (2p - 1)|, p ranging over the integers."""

    scale: int
    verdict: str
    min_distance: float
    witness_q: int
    witness_p: int
    certificate: Tuple[int, int] | None = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "scale": self.scale,
            "verdict": self.verdict,
            "min": self.min_distance,
            "q": self.witness_q,
            "p": self.witness_p,
            "certificate": list(self.certificate) if self.certificate else None,
        }


@dataclass(frozen=True)
class Condition2Result:
    alpha: float
    Q: int
    linear: OddDistance
    doubled: OddDistance
    equal_moduli: bool | None = None

    @property
    def verdict(self) -> str:
        return self.linear.verdict

    def as_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "Q": self.Q,
            "verdict": self.verdict,
            "min": self.linear.min_distance,
            "q_alpha": self.linear.as_dict(),
            "two_q_alpha": self.doubled.as_dict(),
            "equal_moduli": self.equal_moduli,
        }


def odd_distance_search(value: float, Q: int) -> Tuple[float, int, int]:
    """Brute-force min of |q value - (2p - 1)|; returns (min, q, p)."""

    qs = np.arange(1, Q + 1, dtype=float)
    products = qs * value
    odd = 2.0 * np.round((products - 1.0) / 2.0) + 1.0
    distances = np.abs(products - odd)
    index = int(np.argmin(distances))
    return float(distances[index]), index + 1, int((odd[index] + 1.0) // 2)


def even_numerator_certificate(value: float, Q: int) -> Tuple[int, int] | None:
    """(m, n) with value = m/n in lowest terms, n <= Q and m even; None otherwise.

    For such a value q m / n is never an odd integer, so the infimum is at least 1/n.
    """

    fraction = Fraction(value).limit_denominator(Q)
    if abs(float(fraction) - value) > CERTIFICATE_TOL:
        return None
    if fraction.numerator % 2 != 0:
        return None
    return fraction.numerator, fraction.denominator


def _odd_distance(alpha: float, scale: int, Q: int, fail_tol: float) -> OddDistance:
    value = scale * alpha
    minimum, q, p = odd_distance_search(value, Q)
    certificate = even_numerator_certificate(value, Q)
    if certificate is not None:
        verdict = "holds"
    elif minimum < fail_tol:
        verdict = "fails"
    else:
        verdict = "borderline"
    return OddDistance(
        scale=scale, verdict=verdict, min_distance=minimum, witness_q=q, witness_p=p, certificate=certificate
    )


def check_condition2_alpha(
    alpha: float, Q: int = int(DEFAULTS["Q"]), fail_tol: float = DEFAULTS["fail_tol"]
) -> Condition2Result:
    """Angle test on alpha directly, in both the q alpha and 2 q alpha forms."""

    if Q < MIN_SEARCH_BOUND:
        raise ValueError(f"Search bound Q must be at least {MIN_SEARCH_BOUND}, got {Q}.")
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha!r}.")
    return Condition2Result(
        alpha=float(alpha),
        Q=Q,
        linear=_odd_distance(alpha, 1, Q, fail_tol),
        doubled=_odd_distance(alpha, 2, Q, fail_tol),
    )


def check_condition2(
    a: complex,
    b: complex,
    Q: int = int(DEFAULTS["Q"]),
    fail_tol: float = DEFAULTS["fail_tol"],
) -> Condition2Result:
    """Angle test for q(x) = a exp(-i 2 pi x) + b exp(i 2 pi x) with alpha = arg(ab) / pi.

    Raises:
        ZeroProduct: If ab = 0.
    """

    product = complex(a) * complex(b)
    if product == 0:
        raise ZeroProduct("The angle test needs ab != 0.")
    alpha = cmath.phase(product) / math.pi
    result = check_condition2_alpha(alpha, Q, fail_tol)
    equal = math.isclose(abs(a), abs(b), rel_tol=1e-12)
    logger.debug("Angle test alpha=%.17g verdict=%s", alpha, result.verdict)
    return Condition2Result(
        alpha=result.alpha, Q=Q, linear=result.linear, doubled=result.doubled, equal_moduli=equal
    )


@dataclass(frozen=True)
class Condition1Row:
    n: int
    q_n: complex
    q_minus_n: complex
    ratio: float
    ratio_ok: bool
    magnitude_ok: bool
    product_ok: bool

    @property
    def ok(self) -> bool:
        return self.ratio_ok and self.magnitude_ok and self.product_ok


@dataclass
class Condition1Result:
    rows: List[Condition1Row] = field(default_factory=list)
    params: Dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "holds-on-range" if all(row.ok for row in self.rows) else "fails"

    @property
    def first_violation(self) -> int | None:
        return next((row.n for row in self.rows if not row.ok), None)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "first_violation": self.first_violation,
            "params": dict(self.params),
            "rows": [
                {
                    "n": row.n,
                    "ratio": row.ratio,
                    "ratio_ok": row.ratio_ok,
                    "magnitude_ok": row.magnitude_ok,
                    "product_ok": row.product_ok,
                }
                for row in self.rows
            ],
        }


def check_condition1(
    p: FourierPotential,
    s: float,
    c: float,
    eps: float,
    nrange: Iterable[int],
    ratio_cap: float = DEFAULTS["ratio_cap"],
) -> Condition1Result:
    """Per-n check of q_n ~ q_-n, |q_n| > c n^(-s-1) and the sign condition on q_n q_-n.

    Smoothness of q is taken from the caller and not verified.

    Raises:
        ZeroCoefficient: If q_n or q_-n vanishes for some n in ``nrange``.
    """

    result = Condition1Result(params={"s": s, "c": c, "eps": eps, "ratio_cap": ratio_cap})
    for n in sorted({abs(int(v)) for v in nrange}):
        if n == 0:
            continue
        q_n, q_minus = p.coefficient(n), p.coefficient(-n)
        if q_n == 0 or q_minus == 0:
            raise ZeroCoefficient(f"Coefficient q_{n} or q_-{n} vanishes.", n=n)
        ratio = max(abs(q_n / q_minus), abs(q_minus / q_n))
        product = q_n * q_minus
        result.rows.append(
            Condition1Row(
                n=n,
                q_n=q_n,
                q_minus_n=q_minus,
                ratio=ratio,
                ratio_ok=ratio <= ratio_cap,
                magnitude_ok=abs(q_n) > c * n ** (-s - 1.0),
                product_ok=product.real >= 0 or abs(product.imag) >= eps * abs(product),
            )
        )
    return result
